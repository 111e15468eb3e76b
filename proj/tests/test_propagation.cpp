#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "detcp/brute_force.hpp"
#include "detcp/propagation.hpp"
#include "helpers.hpp"

using namespace detcp;
using namespace detcp::test;

TEST_CASE("linear bounds filtering reaches the brute-force hull", "[propagation]") {
    // x, y in 0..3 with x + y <= 1
    Model m;
    m.vars = {var_range("x", 0, 3), var_range("y", 0, 3)};
    m.constraints = {lin_le({1, 1}, {0, 1}, 1)};
    DomainStore store(m);
    REQUIRE(propagate(store, m).stable);
    CHECK(store.domain(0) == std::vector<std::int64_t>{0, 1});
    CHECK(store.domain(1) == std::vector<std::int64_t>{0, 1});

    // cross-check against exhaustive support counting
    for (VarId v = 0; v < 2; ++v) {
        for (std::int64_t val : m.vars[v].domain) {
            bool supported = false;
            for (std::int64_t other = 0; other <= 3 && !supported; ++other)
                supported = (v == 0 ? val + other : other + val) <= 1;
            CHECK(store.contains(v, val) == supported);
        }
    }
}

TEST_CASE("equality tightens both directions", "[propagation]") {
    Model m;
    m.vars = {var_range("x", 0, 9), var_range("y", 0, 2)};
    m.constraints = {lin_eq({1, 1}, {0, 1}, 8)};
    DomainStore store(m);
    REQUIRE(propagate(store, m).stable);
    CHECK(store.min(0) == 6);  // x >= 8 - max(y)
    CHECK(store.max(0) == 8);  // x <= 8 - min(y)
}

TEST_CASE("all_different eliminates fixed values", "[propagation]") {
    Model m;
    m.vars = {VariableDecl{"x", {2}}, VariableDecl{"y", {1, 2, 3}}};
    m.constraints = {all_diff({0, 1})};
    DomainStore store(m);
    REQUIRE(propagate(store, m).stable);
    CHECK(store.domain(1) == std::vector<std::int64_t>{1, 3});
}

TEST_CASE("all_different wipeout is a failure", "[propagation]") {
    Model m;
    m.vars = {VariableDecl{"x", {1}}, VariableDecl{"y", {1}}};
    m.constraints = {all_diff({0, 1})};
    DomainStore store(m);
    const auto out = propagate(store, m);
    CHECK_FALSE(out.stable);
    CHECK(out.failed_constraint == 0);
}

TEST_CASE("not-equal fires once a single variable is open", "[propagation]") {
    Model m;
    m.vars = {VariableDecl{"x", {2}}, var_range("y", 0, 3)};
    m.constraints = {lin_ne({1, 1}, {0, 1}, 5)};
    DomainStore store(m);
    REQUIRE(propagate(store, m).stable);
    CHECK(store.domain(1) == std::vector<std::int64_t>{0, 1, 2});  // 3 removed
}

TEST_CASE("push_decision applies and propagates", "[propagation]") {
    Model m;
    m.vars = {VariableDecl{"x", {2, 5, 7}}};
    Propagator prop(m);

    SECTION("assign fixes the variable") {
        DomainStore store(m);
        REQUIRE(prop.push_decision(store, {0, 2, DecisionPolarity::Assign}).stable);
        CHECK(store.is_fixed(0));
        CHECK(store.value(0) == 2);
    }
    SECTION("exclude removes one value") {
        DomainStore store(m);
        REQUIRE(prop.push_decision(store, {0, 2, DecisionPolarity::Exclude}).stable);
        CHECK(store.domain(0) == std::vector<std::int64_t>{5, 7});
    }
    SECTION("binary not-equal chain") {
        Model m2;
        m2.vars = {var_range("x", 0, 1), var_range("y", 0, 1)};
        m2.constraints = {all_diff({0, 1})};
        Propagator prop2(m2);
        DomainStore store(m2);
        REQUIRE(prop2.push_decision(store, {0, 0, DecisionPolarity::Assign}).stable);
        CHECK(store.is_fixed(1));
        CHECK(store.value(1) == 1);
    }
    SECTION("contract violations throw") {
        DomainStore store(m);
        CHECK_THROWS_AS(prop.push_decision(store, {0, 3, DecisionPolarity::Assign}),
                        std::logic_error);
        REQUIRE(prop.push_decision(store, {0, 5, DecisionPolarity::Assign}).stable);
        CHECK_THROWS_AS(prop.push_decision(store, {0, 5, DecisionPolarity::Exclude}),
                        std::logic_error);
    }
}

TEST_CASE("pop_decision restores the exact previous state", "[propagation]") {
    Model m;
    m.vars = {VariableDecl{"x", {2, 5, 7}}, var_range("y", 0, 3)};
    m.constraints = {all_diff({0, 1})};
    Propagator prop(m);
    DomainStore store(m);
    REQUIRE(prop.propagate(store).stable);
    const DomainStore snapshot = store;

    REQUIRE(prop.push_decision(store, {0, 2, DecisionPolarity::Assign}).stable);
    prop.pop_decision(store);
    CHECK(store.same_domains(snapshot));

    REQUIRE(prop.push_decision(store, {0, 2, DecisionPolarity::Assign}).stable);
    REQUIRE(prop.push_decision(store, {1, 0, DecisionPolarity::Exclude}).stable);
    prop.pop_decision(store);
    prop.pop_decision(store);
    CHECK(store.same_domains(snapshot));

    SECTION("pop on a fresh store is a contract error") {
        DomainStore fresh(m);
        CHECK_THROWS_AS(pop_decision(fresh), std::logic_error);
    }
}

TEST_CASE("failure leaves the store restorable", "[propagation]") {
    Model m;
    m.vars = {var_range("x", 0, 1), var_range("y", 0, 1), var_range("z", 0, 1)};
    m.constraints = {all_diff({0, 1, 2})};  // only 2 values for 3 vars: any fix fails
    Propagator prop(m);
    DomainStore store(m);
    const DomainStore snapshot = store;
    const auto out = prop.push_decision(store, {0, 0, DecisionPolarity::Assign});
    REQUIRE_FALSE(out.stable);
    prop.pop_decision(store);
    CHECK(store.same_domains(snapshot));
}

TEST_CASE("propagation is monotone", "[propagation][property]") {
    const Model m = load_model("queens6.dfzn");
    DomainStore store(m);
    std::vector<std::vector<std::int64_t>> before;
    for (VarId v = 0; v < store.var_count(); ++v) before.push_back(store.domain(v));
    REQUIRE(propagate(store, m).stable);
    for (VarId v = 0; v < store.var_count(); ++v)
        for (std::int64_t val : store.domain(v))
            CHECK(std::binary_search(before[v].begin(), before[v].end(), val));
}

TEST_CASE("fixpoint is independent of constraint order", "[propagation][property]") {
    Model m;
    m.vars = {var_range("x", 0, 9), var_range("y", 0, 9), var_range("z", 0, 9)};
    m.constraints = {lin_eq({1, 1}, {0, 1}, 9), lin_le({1, 1}, {1, 2}, 4), all_diff({0, 1, 2})};

    std::mt19937 rng(99);
    DomainStore reference(m);
    REQUIRE(propagate(reference, m).stable);
    std::vector<std::size_t> order = {0, 1, 2};
    for (int i = 0; i < 6; ++i) {
        std::shuffle(order.begin(), order.end(), rng);
        Model permuted = m;
        permuted.constraints.clear();
        for (auto idx : order) permuted.constraints.push_back(m.constraints[idx]);
        DomainStore store(permuted);
        REQUIRE(propagate(store, permuted).stable);
        CHECK(store.same_domains(reference));
    }
}

namespace {

Model random_propagation_model(std::mt19937& rng) {
    std::uniform_int_distribution<int> nvars(2, 5), nconstraints(1, 4), val(-6, 6), kind(0, 3);
    Model m;
    const int nv = nvars(rng);
    for (int i = 0; i < nv; ++i) {
        const int lo = val(rng);
        std::uniform_int_distribution<int> width(1, 6);
        m.vars.push_back(var_range("v" + std::to_string(i), lo, lo + width(rng)));
    }
    const int nc = nconstraints(rng);
    std::uniform_int_distribution<VarId> pick(0, static_cast<VarId>(nv - 1));
    for (int c = 0; c < nc; ++c) {
        Constraint con;
        con.kind = static_cast<ConstraintKind>(kind(rng));
        std::uniform_int_distribution<int> arity(1, nv);
        const int a = arity(rng);
        for (int i = 0; i < a; ++i) con.vars.push_back(pick(rng));
        if (con.kind != ConstraintKind::AllDifferent) {
            for (int i = 0; i < a; ++i) con.coeffs.push_back(val(rng));
            con.rhs = val(rng);
        }
        m.constraints.push_back(std::move(con));
    }
    return m;
}

}  // namespace

TEST_CASE("random push/pop sequences restore bit-identical stores", "[propagation][property]") {
    std::mt19937 rng(20240511);
    int sequences = 0;
    while (sequences < 1000) {
        const Model m = random_propagation_model(rng);
        Propagator prop(m);
        DomainStore store(m);
        if (!prop.propagate(store).stable) continue;
        ++sequences;

        const DomainStore base = store;
        std::vector<DomainStore> snapshots;
        std::uniform_int_distribution<int> depth_dist(1, 6), coin(0, 1);
        const int target_depth = depth_dist(rng);
        int pushed = 0;
        for (int d = 0; d < target_depth; ++d) {
            // pick a random unfixed variable, if any
            std::vector<VarId> open;
            for (VarId v = 0; v < store.var_count(); ++v)
                if (store.size(v) >= 2) open.push_back(v);
            if (open.empty()) break;
            const VarId v = open[std::uniform_int_distribution<std::size_t>(
                0, open.size() - 1)(rng)];
            const auto& dom = store.domain(v);
            const std::int64_t val =
                dom[std::uniform_int_distribution<std::size_t>(0, dom.size() - 1)(rng)];
            const DecisionPolarity pol =
                coin(rng) ? DecisionPolarity::Assign : DecisionPolarity::Exclude;
            snapshots.push_back(store);
            ++pushed;
            const auto out = prop.push_decision(store, {v, val, pol});
            if (!out.stable) break;  // failed level still pops below
        }
        for (int d = pushed - 1; d >= 0; --d) {
            prop.pop_decision(store);
            REQUIRE(store.same_domains(snapshots[static_cast<std::size_t>(d)]));
        }
        REQUIRE(store.same_domains(base));
    }
    CHECK(sequences == 1000);
}

TEST_CASE("propagate on equal stores gives equal stores", "[propagation][property]") {
    const Model m = load_model("queens8.dfzn");
    DomainStore a(m), b(m);
    REQUIRE(propagate(a, m).stable);
    REQUIRE(propagate(b, m).stable);
    CHECK(a.same_domains(b));
}
