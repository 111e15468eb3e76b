#ifndef DETCP_SEARCH_HPP
#define DETCP_SEARCH_HPP

#include <concepts>
#include <cstdint>
#include <optional>
#include <vector>

#include "detcp/brute_force.hpp"
#include "detcp/model.hpp"
#include "detcp/path.hpp"
#include "detcp/propagation.hpp"

namespace detcp {

/// Anything the engines can search. Implementations must branch on node-local
/// data only (never on search history, clocks or shared state), which is what
/// makes replaying a PathId reproduce the exact subtree.
template <typename P>
concept SearchProblem = requires(const P p, typename P::State s, const typename P::State cs,
                                 const Decision d) {
    { p.new_state() } -> std::same_as<typename P::State>;
    { p.make_root(s) } -> std::same_as<bool>;              // false: root infeasible
    { p.branch(cs) } -> std::same_as<std::optional<Decision>>;  // nullopt: all fixed (leaf)
    { p.descend(s, d, true) } -> std::same_as<bool>;       // push one level; false: failed
    { p.undo(s) };                                         // pop one level, exact restore
    { p.is_solution(cs) } -> std::same_as<bool>;           // valid only at leaves
    { p.objective_value(cs) } -> std::same_as<std::optional<std::int64_t>>;
    { p.objective_bound(cs) } -> std::same_as<std::optional<std::int64_t>>;
    { p.snapshot(cs) } -> std::same_as<Assignment>;
};

struct SearchStats {
    std::uint64_t nodes_expanded = 0;
    std::uint64_t failures = 0;
    std::uint64_t solutions_found = 0;
    std::uint64_t max_depth = 0;
};

/// Min-index / min-value branching: pick the lowest-index unfixed variable
/// and its smallest remaining value. Returns nullopt when all variables are
/// fixed. Depends only on the store, so equal stores branch identically.
inline std::optional<Decision> branch_heuristic(const DomainStore& store) {
    for (VarId v = 0; v < store.var_count(); ++v) {
        if (store.size(v) >= 2)
            return Decision{v, store.min(v), DecisionPolarity::Assign};
    }
    return std::nullopt;
}

/// CP model adapter: state is a DomainStore driven by a Propagator.
/// Left child applies (var = value), right child applies (var != value).
class CpProblem {
public:
    struct State {
        DomainStore store;
        Propagator prop;

        explicit State(const Model& m) : store(m), prop(m) {}
    };

    explicit CpProblem(const Model& m) : model_(&m) {}

    const Model& model() const { return *model_; }

    State new_state() const { return State(*model_); }

    bool make_root(State& s) const {
        s.store = DomainStore(*model_);
        return s.prop.propagate(s.store).stable;
    }

    std::optional<Decision> branch(const State& s) const { return branch_heuristic(s.store); }

    bool descend(State& s, const Decision& d, bool right) const {
        Decision applied = d;
        applied.polarity = right ? DecisionPolarity::Exclude : DecisionPolarity::Assign;
        return s.prop.push_decision(s.store, applied).stable;
    }

    void undo(State& s) const { s.prop.pop_decision(s.store); }

    // Propagation filters are incomplete, so leaves are re-validated in full.
    bool is_solution(const State& s) const {
        return check_assignment(*model_, s.store.assignment());
    }

    std::optional<std::int64_t> objective_value(const State& s) const {
        if (model_->objective.kind == ObjectiveKind::Satisfy) return std::nullopt;
        return s.store.value(model_->objective.var);
    }

    /// Most optimistic objective still reachable below this node.
    std::optional<std::int64_t> objective_bound(const State& s) const {
        switch (model_->objective.kind) {
            case ObjectiveKind::Satisfy: return std::nullopt;
            case ObjectiveKind::Minimize: return s.store.min(model_->objective.var);
            case ObjectiveKind::Maximize: return s.store.max(model_->objective.var);
        }
        return std::nullopt;
    }

    Assignment snapshot(const State& s) const { return s.store.assignment(); }

    ObjectiveKind objective_kind() const { return model_->objective.kind; }

private:
    const Model* model_;
};

/// One edge of the walk below the task root: the branch decision taken at
/// that depth, the side currently explored, and whether the right child is
/// still unclaimed (not yet explored locally nor detached by a split).
struct WalkFrame {
    Decision decision;
    std::uint8_t side = 0;
    bool right_open = true;
};

/// Index of the frame whose right child a split would detach: the deepest
/// (or shallowest) frame that went left and still has its right child open.
inline std::optional<std::size_t> find_pending_right(const std::vector<WalkFrame>& frames,
                                                     bool deepest) {
    if (deepest) {
        for (std::size_t i = frames.size(); i-- > 0;)
            if (frames[i].side == 0 && frames[i].right_open) return i;
    } else {
        for (std::size_t i = 0; i < frames.size(); ++i)
            if (frames[i].side == 0 && frames[i].right_open) return i;
    }
    return std::nullopt;
}

/// Absolute path of the right child frame `i` designates: the walk prefix up
/// to depth i with the final branch flipped to 1.
inline PathId pending_right_path(const PathId& base, const std::vector<WalkFrame>& frames,
                                 std::size_t i) {
    PathId p = base;
    for (std::size_t k = 0; k < i; ++k) p.push(frames[k].side != 0);
    p.push(true);
    return p;
}

enum class VisitControl { Expand, Prune, Abort };

/// Depth-first walk of the subtree rooted at `base`, left child first.
/// The caller establishes the state at the base node before run(); the walk
/// returns with the state restored there. Hooks see every established node
/// and every candidate leaf, and may cut subtrees (Prune) or unwind the whole
/// task (Abort). Node accounting: every descend attempt, successful or
/// failed, counts one expansion; the base node itself is counted by whoever
/// established it.
template <typename Problem, typename Hooks>
    requires SearchProblem<Problem>
class TreeWalker {
public:
    TreeWalker(const Problem& prob, typename Problem::State& state, PathId base, Hooks& hooks,
               SearchStats& stats)
        : prob_(prob), state_(state), path_(std::move(base)), hooks_(hooks), stats_(stats) {}

    /// Explores the subtree. Returns false when the task was aborted.
    bool run() {
        if (stats_.max_depth < path_.depth()) stats_.max_depth = path_.depth();
        const VisitControl c = hooks_.visit(state_, path_);
        if (c == VisitControl::Abort) return false;
        if (c == VisitControl::Prune) return true;
        node();
        return !aborted_;
    }

    const PathId& current_path() const { return path_; }
    const std::vector<WalkFrame>& frames() const { return frames_; }

    /// Detaches one pending right branch (deepest or shallowest) and returns
    /// its absolute path; the walk will no longer explore it.
    std::optional<PathId> detach_pending_right(bool deepest) {
        const auto i = find_pending_right(frames_, deepest);
        if (!i) return std::nullopt;
        frames_[*i].right_open = false;
        PathId base_prefix;
        base_prefix.bits.assign(path_.bits.begin(), path_.bits.begin() + base_depth());
        return pending_right_path(base_prefix, frames_, *i);
    }

private:
    std::size_t base_depth() const { return path_.depth() - frames_.size(); }

    // Expands the established node at path_; state_ is back there on return.
    void node() {
        const std::optional<Decision> dec = prob_.branch(state_);
        if (!dec) {
            if (hooks_.on_leaf(state_, path_)) aborted_ = true;
            return;
        }
        hooks_.at_expansion(*this);

        frames_.push_back(WalkFrame{*dec, 0, true});
        path_.push(false);
        child(*dec, false);
        path_.pop();
        if (!aborted_ && frames_.back().right_open) {
            frames_.back().right_open = false;
            frames_.back().side = 1;
            path_.push(true);
            child(*dec, true);
            path_.pop();
        }
        frames_.pop_back();
    }

    void child(const Decision& dec, bool right) {
        ++stats_.nodes_expanded;
        if (!prob_.descend(state_, dec, right)) {
            ++stats_.failures;
            prob_.undo(state_);
            return;
        }
        if (stats_.max_depth < path_.depth()) stats_.max_depth = path_.depth();
        const VisitControl c = hooks_.visit(state_, path_);
        if (c == VisitControl::Abort)
            aborted_ = true;
        else if (c == VisitControl::Expand)
            node();
        prob_.undo(state_);
    }

    const Problem& prob_;
    typename Problem::State& state_;
    PathId path_;
    Hooks& hooks_;
    SearchStats& stats_;
    std::vector<WalkFrame> frames_;
    bool aborted_ = false;
};

struct SeqResult {
    std::vector<SolutionRecord> solutions;
    SearchStats stats;
};

namespace detail {

template <typename Problem>
SolutionRecord make_record(const Problem& prob, const typename Problem::State& s,
                           const PathId& path) {
    SolutionRecord rec;
    rec.assignment = prob.snapshot(s);
    rec.objective = prob.objective_value(s);
    rec.path = path;
    return rec;
}

inline bool objective_better(ObjectiveKind kind, std::int64_t a, std::int64_t b) {
    return kind == ObjectiveKind::Maximize ? a > b : a < b;
}

template <typename Problem>
struct SeqHooks {
    const Problem& prob;
    SolveMode mode;
    ObjectiveKind sense;
    SeqResult& out;
    std::optional<SolutionRecord> incumbent;

    VisitControl visit(const typename Problem::State& s, const PathId&) {
        if (mode == SolveMode::Optimize && incumbent) {
            const auto bound = prob.objective_bound(s);
            // keep only nodes that can strictly beat the incumbent
            if (bound && !objective_better(sense, *bound, *incumbent->objective))
                return VisitControl::Prune;
        }
        return VisitControl::Expand;
    }

    bool on_leaf(const typename Problem::State& s, const PathId& path) {
        if (!prob.is_solution(s)) return false;
        ++out.stats.solutions_found;
        SolutionRecord rec = make_record(prob, s, path);
        switch (mode) {
            case SolveMode::First:
                out.solutions.push_back(std::move(rec));
                return true;
            case SolveMode::All:
                out.solutions.push_back(std::move(rec));
                return false;
            case SolveMode::Optimize:
                if (!incumbent || objective_better(sense, *rec.objective, *incumbent->objective))
                    incumbent = std::move(rec);
                return false;
        }
        return false;
    }

    void at_expansion(TreeWalker<Problem, SeqHooks>&) {}
};

}  // namespace detail

/// Deterministic sequential depth-first search: the reference semantics every
/// parallel run must reproduce. First stops at the leftmost solution leaf;
/// All collects solutions in increasing PathId order; Optimize is
/// branch-and-bound keeping the first optimum encountered (the leftmost
/// among optimal).
template <typename Problem>
    requires SearchProblem<Problem>
SeqResult solve_seq(const Problem& prob, SolveMode mode,
                    ObjectiveKind sense = ObjectiveKind::Satisfy) {
    SeqResult result;
    typename Problem::State state = prob.new_state();
    ++result.stats.nodes_expanded;  // root establishment
    if (!prob.make_root(state)) {
        ++result.stats.failures;
        return result;
    }
    detail::SeqHooks<Problem> hooks{prob, mode, sense, result, std::nullopt};
    TreeWalker<Problem, detail::SeqHooks<Problem>> walker(prob, state, PathId{}, hooks,
                                                          result.stats);
    walker.run();
    if (mode == SolveMode::Optimize && hooks.incumbent)
        result.solutions.push_back(std::move(*hooks.incumbent));
    return result;
}

/// CP-model convenience wrapper.
inline SeqResult solve_seq(const Model& m, SolveMode mode) {
    CpProblem prob(m);
    if (mode == SolveMode::Optimize && m.objective.kind == ObjectiveKind::Satisfy)
        throw std::invalid_argument("solve_seq: Optimize mode on a model without objective");
    return solve_seq(prob, mode, m.objective.kind);
}

}  // namespace detcp

#endif  // DETCP_SEARCH_HPP
