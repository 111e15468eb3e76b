#ifndef DETCP_PARALLEL_HPP
#define DETCP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "detcp/search.hpp"

namespace detcp {

enum class Strategy { Seq, Spd, Spda };

/// A unit of stealable work: the root-to-node path of an unexplored right
/// branch. The receiving worker reconstructs the subtree state by replaying
/// the path from the root. Split-produced nodes always end with branch 1.
struct BobNode {
    PathId path;
    std::uint64_t seq = 0;   // global insertion counter, tie-break only
    unsigned producer = 0;
};

/// Shared queue of BobNodes ordered leftmost-first (DFS preorder on paths),
/// so waiting workers always pick up the subtree closest to the sequential
/// frontier. Not internally synchronized; the engine serializes access.
class GlobalPriorityQueue {
public:
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    void push(BobNode node) { entries_.insert(std::move(node)); }

    const BobNode& peek_min() const { return *entries_.begin(); }

    BobNode pop_min() {
        BobNode node = *entries_.begin();
        entries_.erase(entries_.begin());
        return node;
    }

    /// Drops every entry strictly right of the frontier. Returns the count.
    std::size_t purge_right_of(const PathId& frontier) {
        std::size_t purged = 0;
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (compare_paths(it->path, frontier) == PathOrder::Right) {
                it = entries_.erase(it);
                ++purged;
            } else {
                ++it;
            }
        }
        return purged;
    }

private:
    struct LeftmostFirst {
        bool operator()(const BobNode& a, const BobNode& b) const {
            const PathOrder o = compare_paths(a.path, b.path);
            if (o != PathOrder::Equal) return o == PathOrder::Left;
            return a.seq < b.seq;
        }
    };
    std::set<BobNode, LeftmostFirst> entries_;
};

/// Shared solution cell. The same storage serves both update disciplines:
/// leftmost-path-only (satisfaction runs) and best-objective with leftmost
/// tie-break (optimization runs). Updates are serialized and the accepted
/// sequence is kept for monotonicity audits.
class LeftmostCell {
public:
    explicit LeftmostCell(ObjectiveKind sense = ObjectiveKind::Satisfy) : sense_(sense) {}

    /// Install iff the cell is empty or the candidate path is strictly left
    /// of the current one.
    bool try_update_leftmost(const SolutionRecord& cand) {
        std::lock_guard lock(mu_);
        if (current_ && compare_paths(cand.path, current_->path) != PathOrder::Left) return false;
        accept(cand);
        return true;
    }

    /// Install iff the cell is empty, the candidate objective is strictly
    /// better, or the objectives tie and the candidate path is strictly left.
    bool try_update_best(const SolutionRecord& cand) {
        std::lock_guard lock(mu_);
        if (current_) {
            const std::int64_t cur = *current_->objective;
            const std::int64_t now = *cand.objective;
            const bool better = detail::objective_better(sense_, now, cur);
            const bool tie_left =
                now == cur && compare_paths(cand.path, current_->path) == PathOrder::Left;
            if (!better && !tie_left) return false;
        }
        accept(cand);
        return true;
    }

    /// First-come installation; later candidates are rejected. The
    /// non-deterministic baseline for satisfaction runs.
    bool install_if_empty(const SolutionRecord& cand) {
        std::lock_guard lock(mu_);
        if (current_) return false;
        accept(cand);
        return true;
    }

    /// Strictly-better-objective-only replacement; ties keep the earlier
    /// arrival. The non-deterministic baseline for optimization runs.
    bool update_if_strictly_better(const SolutionRecord& cand) {
        std::lock_guard lock(mu_);
        if (current_ && !detail::objective_better(sense_, *cand.objective, *current_->objective))
            return false;
        accept(cand);
        return true;
    }

    std::optional<SolutionRecord> current() const {
        std::lock_guard lock(mu_);
        return current_;
    }

    std::vector<SolutionRecord> history() const {
        std::lock_guard lock(mu_);
        return history_;
    }

    ObjectiveKind sense() const { return sense_; }

    /// Lock-free view of the incumbent objective, for bound checks on the
    /// hot path. May lag the cell; readers only ever see accepted values, so
    /// a stale read merely weakens pruning.
    std::optional<std::int64_t> objective_snapshot() const {
        if (!has_objective_.load(std::memory_order_acquire)) return std::nullopt;
        return objective_mirror_.load(std::memory_order_acquire);
    }

private:
    void accept(const SolutionRecord& cand) {
        current_ = cand;
        history_.push_back(cand);
        if (cand.objective) {
            objective_mirror_.store(*cand.objective, std::memory_order_release);
            has_objective_.store(true, std::memory_order_release);
        }
    }

    mutable std::mutex mu_;
    ObjectiveKind sense_;
    std::optional<SolutionRecord> current_;
    std::vector<SolutionRecord> history_;
    std::atomic<std::int64_t> objective_mirror_{0};
    std::atomic<bool> has_objective_{false};
};

/// Split guard: a worker may only split while somebody is waiting and its
/// per-task split budget P has not reached the shared threshold S.
inline bool split_allowed(std::size_t waiting, std::uint32_t p, std::uint32_t s) {
    return waiting >= 1 && p < s;
}

constexpr std::uint32_t kThresholdCap = 1u << 16;

/// Doubles the partitioning threshold on a load-imbalance signal, capped.
inline std::uint32_t adjust_threshold(std::uint32_t s, bool imbalance_signal) {
    if (!imbalance_signal) return s;
    return s >= kThresholdCap ? kThresholdCap : s * 2;
}

/// True iff no work remains anywhere: queue drained, every worker parked,
/// and no split sits in the window between detachment and queue insertion.
inline bool termination_detect(const GlobalPriorityQueue& gpq, std::size_t waiting,
                               std::size_t total_workers, std::size_t splits_in_flight) {
    return gpq.empty() && waiting == total_workers && splits_in_flight == 0;
}

struct CancellationOutcome {
    std::size_t workers_cancelled = 0;
    std::size_t entries_purged = 0;
};

/// Satisfaction-mode cancellation: flag every worker whose current task root
/// lies strictly right of the frontier and drop queue entries in that region.
/// Flagged workers notice at their next node expansion.
inline CancellationOutcome cancel_right_of(const PathId& frontier,
                                           const std::vector<std::optional<PathId>>& task_roots,
                                           std::atomic<bool>* cancel_flags,
                                           GlobalPriorityQueue& gpq) {
    CancellationOutcome out;
    for (std::size_t w = 0; w < task_roots.size(); ++w) {
        if (task_roots[w] && compare_paths(*task_roots[w], frontier) == PathOrder::Right) {
            if (!cancel_flags[w].exchange(true, std::memory_order_acq_rel)) ++out.workers_cancelled;
        }
    }
    out.entries_purged = gpq.purge_right_of(frontier);
    return out;
}

enum class ReplayStatus { Ready, Pruned, Aborted };

/// Rebuilds the search state at `path` by pushing each branch from a fresh
/// root, running full propagation along the way (the redundant part of a
/// steal). Every push counts as both an expansion and a replayed node; the
/// root rebuild counts as an expansion only. Hooks are consulted at each
/// established prefix node, so stale work can be cut mid-replay.
template <typename Problem, typename Hooks>
    requires SearchProblem<Problem>
ReplayStatus replay(const Problem& prob, typename Problem::State& state, const PathId& path,
                    Hooks& hooks, SearchStats& stats, std::uint64_t& replayed) {
    ++stats.nodes_expanded;  // root establishment
    if (!prob.make_root(state)) {
        ++stats.failures;
        return ReplayStatus::Pruned;
    }
    PathId prefix;
    for (std::size_t i = 0; i < path.depth(); ++i) {
        switch (hooks.visit_replayed(state, prefix)) {
            case VisitControl::Expand: break;
            case VisitControl::Prune: return ReplayStatus::Pruned;
            case VisitControl::Abort: return ReplayStatus::Aborted;
        }
        const std::optional<Decision> dec = prob.branch(state);
        if (!dec) return ReplayStatus::Pruned;  // subtree collapsed to a leaf above the target
        const bool right = path.bits[i] != 0;
        ++stats.nodes_expanded;
        ++replayed;
        prefix.push(right);
        if (stats.max_depth < prefix.depth()) stats.max_depth = prefix.depth();
        if (!prob.descend(state, *dec, right)) {
            ++stats.failures;
            prob.undo(state);
            return ReplayStatus::Pruned;
        }
    }
    return ReplayStatus::Ready;
}

/// Per-worker counters. The CSV emitted by the tools carries exactly these
/// fields.
struct WorkerStats {
    unsigned worker = 0;
    std::uint64_t nodes_expanded = 0;
    std::uint64_t nodes_replayed = 0;
    std::uint64_t splits_produced = 0;
    std::uint64_t bobnodes_consumed = 0;
    std::uint64_t solutions_found = 0;
    std::uint64_t work_ns = 0;
    std::uint64_t wait_ns = 0;
    // not part of the CSV contract
    std::uint64_t failures = 0;
    std::uint64_t max_depth = 0;
};

struct EngineConfig {
    unsigned workers = 1;
    Strategy strategy = Strategy::Spd;
    SolveMode mode = SolveMode::First;
    std::uint32_t threshold_s0 = 4;
    std::uint32_t imbalance_window_ms = 10;
};

struct ParResult {
    std::vector<SolutionRecord> solutions;
    std::vector<WorkerStats> worker_stats;

    std::uint64_t total_expanded() const {
        std::uint64_t n = 0;
        for (const auto& ws : worker_stats) n += ws.nodes_expanded;
        return n;
    }
    std::uint64_t total_replayed() const {
        std::uint64_t n = 0;
        for (const auto& ws : worker_stats) n += ws.nodes_replayed;
        return n;
    }
    std::uint64_t total_consumed() const {
        std::uint64_t n = 0;
        for (const auto& ws : worker_stats) n += ws.bobnodes_consumed;
        return n;
    }
    std::uint64_t max_depth() const {
        std::uint64_t d = 0;
        for (const auto& ws : worker_stats)
            if (ws.max_depth > d) d = ws.max_depth;
        return d;
    }
};

namespace detail {

template <typename Problem>
    requires SearchProblem<Problem>
class ParallelEngine {
public:
    ParallelEngine(const Problem& prob, EngineConfig cfg, ObjectiveKind sense)
        : prob_(prob),
          cfg_(cfg),
          cell_(sense),
          threshold_(cfg.threshold_s0 == 0 ? 1 : cfg.threshold_s0) {
        if (cfg_.workers < 1) throw std::invalid_argument("solve_par: workers must be >= 1");
        task_roots_.resize(cfg_.workers);
        cancel_flags_ = std::make_unique<std::atomic<bool>[]>(cfg_.workers);
        for (unsigned w = 0; w < cfg_.workers; ++w) cancel_flags_[w].store(false);
    }

    ParResult run() {
        all_solutions_.resize(cfg_.workers);
        stats_.resize(cfg_.workers);
        for (unsigned w = 0; w < cfg_.workers; ++w) stats_[w].worker = w;

        task_roots_[0] = PathId{};  // worker 0 seeds the root
        std::vector<std::thread> threads;
        threads.reserve(cfg_.workers);
        for (unsigned w = 0; w < cfg_.workers; ++w)
            threads.emplace_back([this, w] { worker_main(w); });
        for (auto& t : threads) t.join();

        ParResult result;
        result.worker_stats = std::move(stats_);
        if (cfg_.mode == SolveMode::All) {
            for (auto& local : all_solutions_)
                for (auto& rec : local) result.solutions.push_back(std::move(rec));
            std::sort(result.solutions.begin(), result.solutions.end(),
                      [](const SolutionRecord& a, const SolutionRecord& b) {
                          return path_before(a.path, b.path);
                      });
        } else if (auto rec = cell_.current()) {
            result.solutions.push_back(std::move(*rec));
        }
        return result;
    }

    const LeftmostCell& cell() const { return cell_; }

private:
    using Clock = std::chrono::steady_clock;

    struct WorkerRuntime {
        unsigned id = 0;
        std::uint32_t splits_since_consume = 0;  // P in the split guard
        std::uint64_t cached_frontier_version = 0;
        std::optional<PathId> cached_frontier;
    };

    struct Hooks {
        ParallelEngine& eng;
        WorkerRuntime& rt;
        WorkerStats& ws;

        VisitControl poll(const PathId& path) {
            if (eng.stop_all_.load(std::memory_order_relaxed) ||
                eng.cancel_flags_[rt.id].load(std::memory_order_relaxed))
                return VisitControl::Abort;
            if (eng.cfg_.mode == SolveMode::First && eng.cfg_.strategy == Strategy::Spd) {
                eng.refresh_frontier(rt);
                if (rt.cached_frontier &&
                    compare_paths(path, *rt.cached_frontier) == PathOrder::Right)
                    return VisitControl::Prune;
            }
            return VisitControl::Expand;
        }

        VisitControl visit(const typename Problem::State& s, const PathId& path) {
            const VisitControl c = poll(path);
            if (c != VisitControl::Expand) return c;
            if (eng.cfg_.mode == SolveMode::Optimize) {
                if (const auto inc = eng.cell_.objective_snapshot()) {
                    const auto bound = eng.prob_.objective_bound(s);
                    if (bound && eng.bound_prunes(*bound, *inc)) return VisitControl::Prune;
                }
            }
            return VisitControl::Expand;
        }

        VisitControl visit_replayed(const typename Problem::State& s, const PathId& path) {
            return visit(s, path);
        }

        bool on_leaf(const typename Problem::State& s, const PathId& path) {
            if (!eng.prob_.is_solution(s)) return false;
            ++ws.solutions_found;
            SolutionRecord rec = make_record(eng.prob_, s, path);
            eng.handle_solution(std::move(rec), rt.id);
            return false;  // cancellation arrives through the polls
        }

        void at_expansion(TreeWalker<Problem, Hooks>& walker) {
            if (eng.cfg_.strategy == Strategy::Seq) return;
            if (!split_allowed(eng.waiting_.load(std::memory_order_relaxed),
                               rt.splits_since_consume,
                               eng.threshold_.load(std::memory_order_relaxed)))
                return;
            eng.splits_in_flight_.fetch_add(1, std::memory_order_acq_rel);
            const bool deepest = eng.cfg_.strategy == Strategy::Spd;
            if (auto path = walker.detach_pending_right(deepest)) {
                ++rt.splits_since_consume;
                ++ws.splits_produced;
                eng.insert_bobnode(std::move(*path), rt.id);
            }
            eng.splits_in_flight_.fetch_sub(1, std::memory_order_acq_rel);
        }
    };

    void worker_main(unsigned w) {
        WorkerRuntime rt;
        rt.id = w;
        WorkerStats& ws = stats_[w];
        typename Problem::State state = prob_.new_state();

        std::optional<PathId> task;
        bool consumed = false;
        if (w == 0) {
            // Hold the seed until the other workers are parked on the queue:
            // the first expansions are where the large right subtrees are
            // shed, and they only ship while somebody is visibly waiting.
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return waiting_ == cfg_.workers - 1 || terminated_; });
            startup_done_ = true;
            task = PathId{};  // root seed, not a queue consumption
        }

        for (;;) {
            if (task) {
                const auto t0 = Clock::now();
                execute_task(rt, ws, state, *task, consumed);
                ws.work_ns += elapsed_ns(t0);
                task.reset();
            }
            const auto tw0 = Clock::now();
            std::unique_lock lock(mu_);
            task_roots_[w].reset();
            ++waiting_;
            if (!startup_done_) cv_.notify_all();  // worker 0 gates on the park count
            auto episode_start = Clock::now();
            for (;;) {
                if (terminated_) {
                    ws.wait_ns += elapsed_ns(tw0);
                    return;
                }
                drop_stale_entries();
                if (!gpq_.empty()) {
                    BobNode node = gpq_.pop_min();
                    --waiting_;
                    task_roots_[w] = node.path;
                    cancel_flags_[w].store(false, std::memory_order_release);
                    lock.unlock();
                    ws.wait_ns += elapsed_ns(tw0);
                    task = std::move(node.path);
                    consumed = true;
                    break;
                }
                if (termination_detect(gpq_, waiting_, cfg_.workers, splits_in_flight_.load())) {
                    terminated_ = true;
                    cv_.notify_all();
                    ws.wait_ns += elapsed_ns(tw0);
                    return;
                }
                cv_.wait_for(lock, std::chrono::milliseconds(cfg_.imbalance_window_ms));
                // imbalance: this worker has been starved for a full window
                // while somebody is still expanding
                if (!terminated_ && gpq_.empty() && waiting_ < cfg_.workers) {
                    const auto waited = std::chrono::duration_cast<std::chrono::milliseconds>(
                                            Clock::now() - episode_start)
                                            .count();
                    if (waited >= cfg_.imbalance_window_ms)
                        threshold_.store(adjust_threshold(threshold_.load(), true));
                }
            }
        }
    }

    void execute_task(WorkerRuntime& rt, WorkerStats& ws, typename Problem::State& state,
                      const PathId& path, bool consumed) {
        if (consumed) {
            ++ws.bobnodes_consumed;
            rt.splits_since_consume = 0;
        }
        Hooks hooks{*this, rt, ws};
        SearchStats local;
        local.max_depth = ws.max_depth;
        const ReplayStatus status = replay(prob_, state, path, hooks, local, ws.nodes_replayed);
        if (status == ReplayStatus::Ready) {
            TreeWalker<Problem, Hooks> walker(prob_, state, path, hooks, local);
            walker.run();
        }
        ws.nodes_expanded += local.nodes_expanded;
        ws.failures += local.failures;
        ws.solutions_found += local.solutions_found;
        if (local.max_depth > ws.max_depth) ws.max_depth = local.max_depth;
    }

    void handle_solution(SolutionRecord rec, unsigned worker) {
        switch (cfg_.mode) {
            case SolveMode::All: {
                all_solutions_[worker].push_back(std::move(rec));
                return;
            }
            case SolveMode::First: {
                if (cfg_.strategy == Strategy::Spda) {
                    if (cell_.install_if_empty(rec)) trigger_stop_all();
                    return;
                }
                if (cell_.try_update_leftmost(rec)) apply_frontier(rec.path);
                return;
            }
            case SolveMode::Optimize: {
                if (cfg_.strategy == Strategy::Spda)
                    cell_.update_if_strictly_better(rec);
                else
                    cell_.try_update_best(rec);
                return;
            }
        }
    }

    // Optimization bound test, strategy-aware. The deterministic strategy
    // keeps nodes that merely tie the incumbent: a tie on the left may still
    // displace the incumbent by path order.
    bool bound_prunes(std::int64_t bound, std::int64_t incumbent) const {
        const ObjectiveKind sense = cell_.sense();
        if (cfg_.strategy == Strategy::Spda)
            return !detail::objective_better(sense, bound, incumbent);
        return sense == ObjectiveKind::Maximize ? bound < incumbent : bound > incumbent;
    }

    void apply_frontier(const PathId& path) {
        std::lock_guard lock(mu_);
        if (frontier_ && compare_paths(path, *frontier_) != PathOrder::Left)
            return;  // a more-left update already landed
        frontier_ = path;
        cancel_right_of(path, task_roots_, cancel_flags_.get(), gpq_);
        frontier_version_.fetch_add(1, std::memory_order_release);
        cv_.notify_all();  // cancelled workers may be mid-wait on a purged queue
    }

    void refresh_frontier(WorkerRuntime& rt) {
        const std::uint64_t v = frontier_version_.load(std::memory_order_acquire);
        if (v == rt.cached_frontier_version) return;
        std::lock_guard lock(mu_);
        rt.cached_frontier = frontier_;
        rt.cached_frontier_version = frontier_version_.load(std::memory_order_acquire);
    }

    void insert_bobnode(PathId path, unsigned producer) {
        std::lock_guard lock(mu_);
        gpq_.push(BobNode{std::move(path), next_seq_++, producer});
        cv_.notify_one();
    }


    void trigger_stop_all() {
        stop_all_.store(true, std::memory_order_release);
        std::lock_guard lock(mu_);
        terminated_ = true;
        cv_.notify_all();
    }

    // Satisfaction runs drop queued work that fell right of the frontier
    // instead of handing it to a worker.
    void drop_stale_entries() {
        if (cfg_.mode != SolveMode::First || cfg_.strategy != Strategy::Spd || !frontier_) return;
        while (!gpq_.empty() &&
               compare_paths(gpq_.peek_min().path, *frontier_) == PathOrder::Right)
            gpq_.pop_min();
    }

    static std::uint64_t elapsed_ns(Clock::time_point t0) {
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
    }

    const Problem& prob_;
    EngineConfig cfg_;
    LeftmostCell cell_;

    std::mutex mu_;
    std::condition_variable cv_;
    GlobalPriorityQueue gpq_;
    std::vector<std::optional<PathId>> task_roots_;
    std::optional<PathId> frontier_;
    std::atomic<std::size_t> waiting_{0};  // mutated under mu_, read racily by the split guard
    bool terminated_ = false;
    bool startup_done_ = false;
    std::uint64_t next_seq_ = 0;

    std::unique_ptr<std::atomic<bool>[]> cancel_flags_;
    std::atomic<std::uint64_t> frontier_version_{0};
    std::atomic<std::uint32_t> threshold_;
    std::atomic<std::size_t> splits_in_flight_{0};
    std::atomic<bool> stop_all_{false};

    std::vector<WorkerStats> stats_;
    std::vector<std::vector<SolutionRecord>> all_solutions_;
};

}  // namespace detail

/// Parallel depth-first search over a dynamically partitioned tree.
///
/// Strategy Spd detaches the deepest pending right branch and, combined with
/// the leftmost-first queue, the leftmost solution cell and right-of-frontier
/// cancellation, returns exactly the solve_seq result for any worker count
/// and any scheduling. Strategy Spda detaches the shallowest pending right
/// branch and races: its First result is whichever solution lands first.
template <typename Problem>
    requires SearchProblem<Problem>
ParResult solve_par(const Problem& prob, const EngineConfig& cfg,
                    ObjectiveKind sense = ObjectiveKind::Satisfy) {
    detail::ParallelEngine<Problem> engine(prob, cfg, sense);
    return engine.run();
}

/// CP-model convenience wrapper.
inline ParResult solve_par(const Model& m, const EngineConfig& cfg) {
    if (cfg.mode == SolveMode::Optimize && m.objective.kind == ObjectiveKind::Satisfy)
        throw std::invalid_argument("solve_par: Optimize mode on a model without objective");
    CpProblem prob(m);
    return solve_par(prob, cfg, m.objective.kind);
}

}  // namespace detcp

#endif  // DETCP_PARALLEL_HPP
