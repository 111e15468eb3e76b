#ifndef DETCP_SYNTHETIC_HPP
#define DETCP_SYNTHETIC_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "detcp/model.hpp"
#include "detcp/propagation.hpp"

namespace detcp {

enum class TreeShape { BestCase, WorstCase, Balanced };

/// Complete binary tree of the given depth with solutions only at leaves.
/// BestCase puts the unique solution at the rightmost leaf (a left-first
/// sweep sees it last), WorstCase at the leftmost leaf (seen immediately),
/// Balanced spreads `solution_count` solutions evenly across the leaf row.
///
/// `node_work` adds that many spin iterations to every descent, emulating
/// the propagation cost of a real node; load-shape measurements need node
/// costs in the microsecond range or the run ends before work can move.
struct SyntheticSpec {
    unsigned depth = 1;
    TreeShape shape = TreeShape::Balanced;
    std::uint64_t solution_count = 1;  // Balanced only
    std::uint32_t node_work = 0;
};

/// Search problem over a synthetic tree: no propagation, feasibility decided
/// only at leaves, so engines genuinely descend to depth `depth` everywhere.
class SyntheticProblem {
public:
    struct State {
        std::vector<std::uint8_t> bits;
    };

    explicit SyntheticProblem(const SyntheticSpec& spec) : spec_(spec) {
        if (spec.depth < 1 || spec.depth > 30)
            throw std::out_of_range("SyntheticProblem: depth must be in 1..30");
        const std::uint64_t leaves = std::uint64_t{1} << spec.depth;
        if (spec.shape == TreeShape::Balanced &&
            (spec.solution_count < 1 || spec.solution_count > leaves))
            throw std::out_of_range("SyntheticProblem: solution_count must be in 1..2^depth");
    }

    const SyntheticSpec& spec() const { return spec_; }

    State new_state() const { return State{}; }

    bool make_root(State& s) const {
        s.bits.clear();
        return true;
    }

    std::optional<Decision> branch(const State& s) const {
        if (s.bits.size() >= spec_.depth) return std::nullopt;
        return Decision{s.bits.size(), 0, DecisionPolarity::Assign};
    }

    bool descend(State& s, const Decision&, bool right) const {
        s.bits.push_back(right ? 1 : 0);
        if (spec_.node_work > 0) burn(spec_.node_work);
        return true;
    }

    void undo(State& s) const { s.bits.pop_back(); }

    bool is_solution(const State& s) const {
        const std::uint64_t leaf = leaf_index(s);
        switch (spec_.shape) {
            case TreeShape::BestCase:
                return leaf == (std::uint64_t{1} << spec_.depth) - 1;
            case TreeShape::WorstCase:
                return leaf == 0;
            case TreeShape::Balanced: {
                const std::uint64_t spacing =
                    (std::uint64_t{1} << spec_.depth) / spec_.solution_count;
                return leaf % spacing == 0 && leaf / spacing < spec_.solution_count;
            }
        }
        return false;
    }

    std::optional<std::int64_t> objective_value(const State&) const { return std::nullopt; }
    std::optional<std::int64_t> objective_bound(const State&) const { return std::nullopt; }

    Assignment snapshot(const State& s) const {
        Assignment a;
        a.values.assign(s.bits.begin(), s.bits.end());
        return a;
    }

private:
    std::uint64_t leaf_index(const State& s) const {
        std::uint64_t idx = 0;
        for (auto b : s.bits) idx = (idx << 1) | b;
        return idx;
    }

    static void burn(std::uint32_t iterations) {
        volatile std::uint32_t sink = 0;
        for (std::uint32_t i = 0; i < iterations; ++i) sink = sink + i;
    }

    SyntheticSpec spec_;
};

inline SyntheticProblem gen_synthetic(const SyntheticSpec& spec) { return SyntheticProblem(spec); }

}  // namespace detcp

#endif  // DETCP_SYNTHETIC_HPP
