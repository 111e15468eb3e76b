#include <catch2/catch_amalgamated.hpp>

#include "detcp/brute_force.hpp"
#include "detcp/parallel.hpp"
#include "detcp/synthetic.hpp"
#include "helpers.hpp"

using namespace detcp;
using namespace detcp::test;

namespace {

EngineConfig cfg_of(unsigned workers, Strategy strategy, SolveMode mode) {
    EngineConfig cfg;
    cfg.workers = workers;
    cfg.strategy = strategy;
    cfg.mode = mode;
    return cfg;
}

}  // namespace

TEST_CASE("deterministic first solution equals the sequential one", "[parallel]") {
    const Model m = load_model("queens4.dfzn");
    const auto seq = solve_seq(m, SolveMode::First);
    REQUIRE(seq.solutions.size() == 1);

    for (unsigned w : {1u, 2u, 4u}) {
        INFO("workers: " << w);
        const auto par = solve_par(m, cfg_of(w, Strategy::Spd, SolveMode::First));
        REQUIRE(par.solutions.size() == 1);
        CHECK(par.solutions[0].assignment.values == std::vector<std::int64_t>{1, 3, 0, 2});
        CHECK(par.solutions[0] == seq.solutions[0]);
    }
}

TEST_CASE("deterministic optimize equals the sequential optimum", "[parallel]") {
    const Model m = load_model("min_linear.dfzn");
    const auto seq = solve_seq(m, SolveMode::Optimize);
    const auto par = solve_par(m, cfg_of(3, Strategy::Spd, SolveMode::Optimize));
    REQUIRE(par.solutions.size() == 1);
    CHECK(par.solutions[0].objective == 0);
    CHECK(par.solutions[0] == seq.solutions[0]);
}

TEST_CASE("all-solutions mode reproduces the sequential list", "[parallel]") {
    const Model m = load_model("queens6.dfzn");
    const auto seq = solve_seq(m, SolveMode::All);
    const auto par = solve_par(m, cfg_of(2, Strategy::Spd, SolveMode::All));
    REQUIRE(par.solutions.size() == seq.solutions.size());
    for (std::size_t i = 0; i < seq.solutions.size(); ++i) {
        CHECK(par.solutions[i].assignment == seq.solutions[i].assignment);
        CHECK(par.solutions[i].path == seq.solutions[i].path);
    }
}

TEST_CASE("unsatisfiable model terminates with an empty result", "[parallel]") {
    const Model m = load_model("pigeon43.dfzn");
    const auto par = solve_par(m, cfg_of(4, Strategy::Spd, SolveMode::First));
    CHECK(par.solutions.empty());
}

TEST_CASE("single worker degenerates to sequential behavior", "[parallel]") {
    const Model m = load_model("queens6.dfzn");
    const auto seq = solve_seq(m, SolveMode::All);
    const auto par = solve_par(m, cfg_of(1, Strategy::Spd, SolveMode::All));
    REQUIRE(par.solutions.size() == seq.solutions.size());
    // one worker never splits, so the node count matches exactly
    CHECK(par.worker_stats.size() == 1);
    CHECK(par.worker_stats[0].nodes_expanded == seq.stats.nodes_expanded);
    CHECK(par.worker_stats[0].splits_produced == 0);
    CHECK(par.worker_stats[0].nodes_replayed == 0);
}

TEST_CASE("replay accounting identity in all-solutions mode", "[parallel][accounting]") {
    for (const auto& name : {"queens6.dfzn", "magic_square3.dfzn", "sched_toy.dfzn"}) {
        INFO("instance: " << name);
        const Model m = load_model(name);
        const auto seq = solve_seq(m, SolveMode::All);
        for (unsigned w : {2u, 4u}) {
            INFO("workers: " << w);
            const auto par = solve_par(m, cfg_of(w, Strategy::Spd, SolveMode::All));
            CHECK(par.total_expanded() - seq.stats.nodes_expanded == par.total_replayed());
            CHECK(par.total_replayed() <= par.total_consumed() * par.max_depth());
        }
    }
}

TEST_CASE("worker stats are coherent", "[parallel]") {
    const Model m = load_model("queens8.dfzn");
    const auto par = solve_par(m, cfg_of(4, Strategy::Spd, SolveMode::All));
    REQUIRE(par.worker_stats.size() == 4);
    std::uint64_t solutions = 0, consumed = 0, splits = 0;
    for (const auto& ws : par.worker_stats) {
        solutions += ws.solutions_found;
        consumed += ws.bobnodes_consumed;
        splits += ws.splits_produced;
    }
    CHECK(solutions == 92);
    CHECK(consumed <= splits);  // purging never applies in All mode, but pops can
    CHECK(consumed == splits);  // ... in All mode every split is consumed
}

TEST_CASE("anticipatory baseline finds some valid solution", "[parallel][spda]") {
    const Model m = load_model("queens8.dfzn");
    const auto par = solve_par(m, cfg_of(4, Strategy::Spda, SolveMode::First));
    REQUIRE(par.solutions.size() == 1);
    CHECK(check_assignment(m, par.solutions[0].assignment));

    SECTION("optimize baseline still reaches the optimal objective") {
        const Model km = load_model("knapsack4.dfzn");
        const auto seq = solve_seq(km, SolveMode::Optimize);
        const auto p2 = solve_par(km, cfg_of(4, Strategy::Spda, SolveMode::Optimize));
        REQUIRE(p2.solutions.size() == 1);
        CHECK(p2.solutions[0].objective == seq.solutions[0].objective);
        CHECK(check_assignment(km, p2.solutions[0].assignment));
    }
    SECTION("all mode is exhaustive regardless of strategy") {
        const Model qm = load_model("queens6.dfzn");
        const auto seq = solve_seq(qm, SolveMode::All);
        const auto p3 = solve_par(qm, cfg_of(3, Strategy::Spda, SolveMode::All));
        REQUIRE(p3.solutions.size() == seq.solutions.size());
        for (std::size_t i = 0; i < seq.solutions.size(); ++i)
            CHECK(p3.solutions[i].path == seq.solutions[i].path);
    }
}

TEST_CASE("synthetic trees run deterministically under the partitioning strategy",
          "[parallel][synthetic]") {
    SyntheticSpec spec;
    spec.depth = 12;

    SECTION("worst case: solution at the leftmost leaf") {
        spec.shape = TreeShape::WorstCase;
        const SyntheticProblem prob = gen_synthetic(spec);
        const auto seq = solve_seq(prob, SolveMode::First);
        REQUIRE(seq.solutions.size() == 1);
        CHECK(seq.solutions[0].path == PathId::from_string(std::string(12, '0')));
        for (unsigned w : {2u, 4u}) {
            const auto par = solve_par(prob, cfg_of(w, Strategy::Spd, SolveMode::First));
            REQUIRE(par.solutions.size() == 1);
            CHECK(par.solutions[0] == seq.solutions[0]);
            CHECK(par.total_expanded() >= seq.stats.nodes_expanded);
        }
    }
    SECTION("best case: solution at the rightmost leaf") {
        spec.shape = TreeShape::BestCase;
        const SyntheticProblem prob = gen_synthetic(spec);
        const auto seq = solve_seq(prob, SolveMode::First);
        REQUIRE(seq.solutions.size() == 1);
        CHECK(seq.solutions[0].path == PathId::from_string(std::string(12, '1')));
        const auto par = solve_par(prob, cfg_of(4, Strategy::Spd, SolveMode::First));
        REQUIRE(par.solutions.size() == 1);
        CHECK(par.solutions[0] == seq.solutions[0]);
    }
    SECTION("balanced: all solutions in path order") {
        spec.shape = TreeShape::Balanced;
        spec.solution_count = 4;
        const SyntheticProblem prob = gen_synthetic(spec);
        const auto seq = solve_seq(prob, SolveMode::All);
        REQUIRE(seq.solutions.size() == 4);
        const auto par = solve_par(prob, cfg_of(4, Strategy::Spd, SolveMode::All));
        REQUIRE(par.solutions.size() == 4);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(par.solutions[i].path == seq.solutions[i].path);
    }
}

TEST_CASE("synthetic generator shapes", "[synthetic]") {
    SECTION("best case depth 3") {
        const SyntheticProblem prob = gen_synthetic({3, TreeShape::BestCase, 1, 0});
        const auto res = solve_seq(prob, SolveMode::All);
        REQUIRE(res.solutions.size() == 1);
        CHECK(res.solutions[0].path == PathId{1, 1, 1});
    }
    SECTION("worst case depth 3") {
        const SyntheticProblem prob = gen_synthetic({3, TreeShape::WorstCase, 1, 0});
        const auto res = solve_seq(prob, SolveMode::All);
        REQUIRE(res.solutions.size() == 1);
        CHECK(res.solutions[0].path == PathId{0, 0, 0});
    }
    SECTION("balanced depth 3 with two solutions") {
        const SyntheticProblem prob = gen_synthetic({3, TreeShape::Balanced, 2, 0});
        const auto res = solve_seq(prob, SolveMode::All);
        REQUIRE(res.solutions.size() == 2);
        CHECK(res.solutions[0].path == PathId{0, 0, 0});  // leftmost leaf
        CHECK(res.solutions[1].path == PathId{1, 0, 0});  // evenly spaced
    }
    SECTION("depth bounds are enforced") {
        CHECK_THROWS_AS(gen_synthetic({0, TreeShape::Balanced, 1, 0}), std::out_of_range);
        CHECK_THROWS_AS(gen_synthetic({31, TreeShape::Balanced, 1, 0}), std::out_of_range);
        CHECK_THROWS_AS(gen_synthetic({3, TreeShape::Balanced, 9, 0}), std::out_of_range);
    }
}

TEST_CASE("equal-objective ties resolve to the leftmost optimum", "[parallel][determinism]") {
    // three assignments share the optimal objective; every run must return
    // the one with the leftmost solution path
    const Model m = load_model("tie_opt.dfzn");
    const auto seq = solve_seq(m, SolveMode::Optimize);
    REQUIRE(seq.solutions.size() == 1);
    CHECK(seq.solutions[0].assignment.values == std::vector<std::int64_t>{0, 2, 2});
    for (unsigned w : {2u, 4u, 8u}) {
        for (int rep = 0; rep < 3; ++rep) {
            const auto par = solve_par(m, cfg_of(w, Strategy::Spd, SolveMode::Optimize));
            REQUIRE(par.solutions.size() == 1);
            CHECK(par.solutions[0] == seq.solutions[0]);
        }
    }
}

TEST_CASE("deterministic runs repeat bit-identically", "[parallel][determinism]") {
    const Model m = load_model("queens8.dfzn");
    const auto seq = solve_seq(m, SolveMode::First);
    for (int rep = 0; rep < 5; ++rep) {
        const auto par = solve_par(m, cfg_of(4, Strategy::Spd, SolveMode::First));
        REQUIRE(par.solutions.size() == 1);
        CHECK(par.solutions[0] == seq.solutions[0]);
    }
}
