#ifndef DETCP_PROPAGATION_HPP
#define DETCP_PROPAGATION_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "detcp/domain_store.hpp"
#include "detcp/model.hpp"

namespace detcp {

enum class DecisionPolarity { Assign, Exclude };

/// One binary branching step: left child takes (var = value), right child
/// takes (var != value).
struct Decision {
    VarId var = 0;
    std::int64_t value = 0;
    DecisionPolarity polarity = DecisionPolarity::Assign;
};

struct PropagationOutcome {
    bool stable = true;
    std::size_t failed_constraint = 0;  // index into Model::constraints when !stable

    static PropagationOutcome ok() { return {true, 0}; }
    static PropagationOutcome failure(std::size_t c) { return {false, c}; }
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b, r = a % b;
    if (r != 0 && ((r < 0) == (b < 0))) ++q;
    return q;
}

}  // namespace detail

/// Fixpoint propagation engine bound to one model. Holds the constraint
/// watch lists and the FIFO work queue; all domain state lives in the
/// caller's DomainStore. One instance per worker.
///
/// Filtering is deliberately light:
///   IntLinLe/IntLinEq — bounds reasoning against the other variables'
///   extremal contributions (Eq tightens both directions),
///   IntLinNe — value removal once all but one variable is fixed,
///   AllDifferent — a fixed variable's value is removed from the others.
/// The filters are monotone and contracting, so the fixpoint is unique
/// regardless of scheduling order.
class Propagator {
public:
    explicit Propagator(const Model& m) : model_(&m) {
        watchers_.resize(m.vars.size());
        for (std::size_t c = 0; c < m.constraints.size(); ++c)
            for (VarId v : m.constraints[c].vars) watchers_[v].push_back(c);
        in_queue_.assign(m.constraints.size(), false);
    }

    const Model& model() const { return *model_; }

    /// Runs every constraint to fixpoint. Use on a fresh root store.
    PropagationOutcome propagate(DomainStore& store) {
        clear_queue();
        for (std::size_t c = 0; c < model_->constraints.size(); ++c) enqueue(c);
        return run(store);
    }

    /// Applies a decision on a new trail level, then propagates from the
    /// touched variable. On Failure the level remains pushed so the caller
    /// can restore with pop_decision.
    PropagationOutcome push_decision(DomainStore& store, const Decision& d) {
        if (!store.contains(d.var, d.value))
            throw std::logic_error("push_decision: value not in domain");
        if (d.polarity == DecisionPolarity::Exclude && store.size(d.var) < 2)
            throw std::logic_error("push_decision: cannot exclude from a singleton domain");
        store.push_level();
        if (d.polarity == DecisionPolarity::Assign)
            store.fix_to(d.var, d.value);
        else
            store.remove_value(d.var, d.value);
        for (std::size_t c : watchers_[d.var]) enqueue(c);
        return run(store);
    }

    void pop_decision(DomainStore& store) {
        store.pop_level();
        // a failed run may leave constraints queued; the queue is per-call scratch
        clear_queue();
    }

private:
    void enqueue(std::size_t c) {
        if (!in_queue_[c]) {
            in_queue_[c] = true;
            queue_.push_back(c);
        }
    }

    void clear_queue() {
        for (std::size_t c : queue_) in_queue_[c] = false;
        queue_.clear();
    }

    void mark_changed(VarId v, std::size_t removed) {
        if (removed == 0) return;
        for (std::size_t c : watchers_[v]) enqueue(c);
    }

    PropagationOutcome run(DomainStore& store) {
        std::size_t head = 0;
        while (head < queue_.size()) {
            const std::size_t c = queue_[head++];
            in_queue_[c] = false;
            if (!filter(store, c)) {
                clear_queue();
                return PropagationOutcome::failure(c);
            }
        }
        queue_.clear();
        return PropagationOutcome::ok();
    }

    // Returns false on wipeout.
    bool filter(DomainStore& store, std::size_t ci) {
        const Constraint& con = model_->constraints[ci];
        switch (con.kind) {
            case ConstraintKind::IntLinEq:
                return filter_linear(store, con, true);
            case ConstraintKind::IntLinLe:
                return filter_linear(store, con, false);
            case ConstraintKind::IntLinNe:
                return filter_not_equal(store, con);
            case ConstraintKind::AllDifferent:
                return filter_all_different(store, con);
        }
        return true;
    }

    bool filter_linear(DomainStore& store, const Constraint& con, bool equality) {
        const std::size_t n = con.vars.size();
        std::int64_t sum_min = 0, sum_max = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t c = con.coeffs[i];
            const VarId v = con.vars[i];
            if (c >= 0) {
                sum_min += c * store.min(v);
                sum_max += c * store.max(v);
            } else {
                sum_min += c * store.max(v);
                sum_max += c * store.min(v);
            }
        }
        if (sum_min > con.rhs) return false;
        if (equality && sum_max < con.rhs) return false;

        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t c = con.coeffs[i];
            if (c == 0) continue;
            const VarId v = con.vars[i];
            const std::int64_t contrib_min = c >= 0 ? c * store.min(v) : c * store.max(v);
            const std::int64_t contrib_max = c >= 0 ? c * store.max(v) : c * store.min(v);

            // c*x <= rhs - (sum of the others' minimal contributions)
            const std::int64_t hi = con.rhs - (sum_min - contrib_min);
            std::size_t removed = 0;
            if (c > 0)
                removed += store.remove_above(v, detail::floor_div(hi, c));
            else
                removed += store.remove_below(v, detail::ceil_div(hi, c));

            if (equality) {
                // c*x >= rhs - (sum of the others' maximal contributions)
                const std::int64_t lo = con.rhs - (sum_max - contrib_max);
                if (c > 0)
                    removed += store.remove_below(v, detail::ceil_div(lo, c));
                else
                    removed += store.remove_above(v, detail::floor_div(lo, c));
            }
            if (store.is_empty(v)) return false;
            mark_changed(v, removed);
            if (removed) {
                // refresh the cached sums with the tightened bounds
                const std::int64_t new_min = c >= 0 ? c * store.min(v) : c * store.max(v);
                const std::int64_t new_max = c >= 0 ? c * store.max(v) : c * store.min(v);
                sum_min += new_min - contrib_min;
                sum_max += new_max - contrib_max;
                if (sum_min > con.rhs) return false;
                if (equality && sum_max < con.rhs) return false;
            }
        }
        return true;
    }

    bool filter_not_equal(DomainStore& store, const Constraint& con) {
        std::int64_t fixed_sum = 0;
        std::optional<std::size_t> open;
        for (std::size_t i = 0; i < con.vars.size(); ++i) {
            if (store.is_fixed(con.vars[i])) {
                fixed_sum += con.coeffs[i] * store.value(con.vars[i]);
            } else if (open) {
                return true;  // two or more open variables: nothing to do yet
            } else {
                open = i;
            }
        }
        if (!open) return fixed_sum != con.rhs;

        const std::int64_t c = con.coeffs[*open];
        const VarId v = con.vars[*open];
        const std::int64_t rest = con.rhs - fixed_sum;
        if (c == 0) return rest != 0;
        if (rest % c != 0) return true;
        const std::size_t removed = store.remove_value(v, rest / c) ? 1 : 0;
        if (store.is_empty(v)) return false;
        mark_changed(v, removed);
        return true;
    }

    bool filter_all_different(DomainStore& store, const Constraint& con) {
        for (std::size_t i = 0; i < con.vars.size(); ++i) {
            const VarId vi = con.vars[i];
            if (!store.is_fixed(vi)) continue;
            const std::int64_t val = store.value(vi);
            for (std::size_t j = 0; j < con.vars.size(); ++j) {
                if (j == i) continue;
                const VarId vj = con.vars[j];
                const std::size_t removed = store.remove_value(vj, val) ? 1 : 0;
                if (store.is_empty(vj)) return false;
                mark_changed(vj, removed);
            }
        }
        return true;
    }

    const Model* model_;
    std::vector<std::vector<std::size_t>> watchers_;
    std::vector<std::size_t> queue_;
    std::vector<bool> in_queue_;
};

/// Convenience single-shot forms of the propagation entry points.

inline PropagationOutcome propagate(DomainStore& store, const Model& m) {
    Propagator p(m);
    return p.propagate(store);
}

inline PropagationOutcome push_decision(DomainStore& store, const Model& m, const Decision& d) {
    Propagator p(m);
    return p.push_decision(store, d);
}

inline void pop_decision(DomainStore& store) {
    store.pop_level();
}

}  // namespace detcp

#endif  // DETCP_PROPAGATION_HPP
