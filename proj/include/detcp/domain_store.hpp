#ifndef DETCP_DOMAIN_STORE_HPP
#define DETCP_DOMAIN_STORE_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detcp/model.hpp"

namespace detcp {

/// Worker-local mutable search state: one sorted value set per variable plus
/// a removal trail with decision-level marks. Undo is exact: popping a level
/// re-inserts precisely the values removed since the matching push, so the
/// store returns bit-identical to its pre-decision state.
///
/// Never shared between threads; each worker owns its store and rebuilds
/// from the model when it picks up new work.
class DomainStore {
public:
    DomainStore() = default;

    explicit DomainStore(const Model& m) {
        domains_.reserve(m.vars.size());
        for (const auto& v : m.vars) domains_.push_back(v.domain);
    }

    std::size_t var_count() const { return domains_.size(); }

    const std::vector<std::int64_t>& domain(VarId v) const { return domains_[v]; }
    std::size_t size(VarId v) const { return domains_[v].size(); }
    bool is_empty(VarId v) const { return domains_[v].empty(); }
    bool is_fixed(VarId v) const { return domains_[v].size() == 1; }
    std::int64_t min(VarId v) const { return domains_[v].front(); }
    std::int64_t max(VarId v) const { return domains_[v].back(); }
    std::int64_t value(VarId v) const { return domains_[v].front(); }  // only when fixed

    bool contains(VarId v, std::int64_t val) const {
        const auto& d = domains_[v];
        return std::binary_search(d.begin(), d.end(), val);
    }

    bool all_fixed() const {
        for (const auto& d : domains_)
            if (d.size() != 1) return false;
        return true;
    }

    /// Snapshot of the fixed values; call only when all_fixed().
    Assignment assignment() const {
        Assignment a;
        a.values.reserve(domains_.size());
        for (const auto& d : domains_) a.values.push_back(d.front());
        return a;
    }

    /// Removes one value. Returns false if the value was not present.
    bool remove_value(VarId v, std::int64_t val) {
        auto& d = domains_[v];
        auto it = std::lower_bound(d.begin(), d.end(), val);
        if (it == d.end() || *it != val) return false;
        trail_.push_back({v, val});
        d.erase(it);
        return true;
    }

    /// Removes every value strictly below `bound`. Returns the removal count.
    std::size_t remove_below(VarId v, std::int64_t bound) {
        auto& d = domains_[v];
        auto it = std::lower_bound(d.begin(), d.end(), bound);
        for (auto p = d.begin(); p != it; ++p) trail_.push_back({v, *p});
        std::size_t n = static_cast<std::size_t>(it - d.begin());
        d.erase(d.begin(), it);
        return n;
    }

    /// Removes every value strictly above `bound`. Returns the removal count.
    std::size_t remove_above(VarId v, std::int64_t bound) {
        auto& d = domains_[v];
        auto it = std::upper_bound(d.begin(), d.end(), bound);
        for (auto p = it; p != d.end(); ++p) trail_.push_back({v, *p});
        std::size_t n = static_cast<std::size_t>(d.end() - it);
        d.erase(it, d.end());
        return n;
    }

    /// Removes every value except `val` (which must be present).
    std::size_t fix_to(VarId v, std::int64_t val) {
        std::size_t n = remove_below(v, val);
        n += remove_above(v, val);
        return n;
    }

    std::size_t level_count() const { return level_marks_.size(); }

    void push_level() { level_marks_.push_back(trail_.size()); }

    /// Restores the store to the state before the matching push_level.
    void pop_level() {
        if (level_marks_.empty())
            throw std::logic_error("DomainStore::pop_level: no decision level to pop");
        const std::size_t mark = level_marks_.back();
        level_marks_.pop_back();
        while (trail_.size() > mark) {
            const TrailEntry e = trail_.back();
            trail_.pop_back();
            auto& d = domains_[e.var];
            d.insert(std::lower_bound(d.begin(), d.end(), e.value), e.value);
        }
    }

    bool same_domains(const DomainStore& other) const { return domains_ == other.domains_; }

private:
    struct TrailEntry {
        VarId var;
        std::int64_t value;
    };

    std::vector<std::vector<std::int64_t>> domains_;
    std::vector<TrailEntry> trail_;
    std::vector<std::size_t> level_marks_;
};

}  // namespace detcp

#endif  // DETCP_DOMAIN_STORE_HPP
