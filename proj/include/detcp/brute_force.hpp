#ifndef DETCP_BRUTE_FORCE_HPP
#define DETCP_BRUTE_FORCE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detcp/model.hpp"

namespace detcp {

constexpr std::uint64_t kBruteForceDefaultCap = 10'000'000;

/// Product of domain sizes, saturating at cap+1 so callers can test the cap
/// without overflow.
inline std::uint64_t search_space_size(const Model& m, std::uint64_t cap = kBruteForceDefaultCap) {
    std::uint64_t product = 1;
    for (const auto& v : m.vars) {
        product *= static_cast<std::uint64_t>(v.domain.size());
        if (product > cap) return cap + 1;
    }
    return product;
}

/// Exhaustive-enumeration reference solver. Walks complete assignments in
/// lexicographic order (variable declaration order, ascending domain values)
/// and filters with check_assignment. Independent of the search engine: no
/// propagation, no tree, no pruning. Returned records carry empty PathIds.
///
/// First: the lexicographically first feasible assignment.
/// All: every feasible assignment, in enumeration order.
/// Optimize: the best objective value; ties resolved in favour of the
/// lexicographically first assignment (strictly-better-only replacement).
///
/// Throws std::length_error when the domain-size product exceeds `cap`.
inline std::vector<SolutionRecord> brute_force_solve(const Model& m, SolveMode mode,
                                                     std::uint64_t cap = kBruteForceDefaultCap) {
    if (search_space_size(m, cap) > cap)
        throw std::length_error("brute_force_solve: search space exceeds cap of " +
                                std::to_string(cap));
    if (mode == SolveMode::Optimize && m.objective.kind == ObjectiveKind::Satisfy)
        throw std::invalid_argument("brute_force_solve: Optimize mode on a model without objective");

    const std::size_t n = m.vars.size();
    std::vector<SolutionRecord> out;
    if (n == 0) return out;
    for (const auto& v : m.vars)
        if (v.domain.empty()) return out;

    std::vector<std::size_t> idx(n, 0);
    Assignment a;
    a.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) a.values[i] = m.vars[i].domain[0];

    const bool minimize = m.objective.kind == ObjectiveKind::Minimize;
    bool have_best = false;
    SolutionRecord best;

    for (;;) {
        if (check_assignment(m, a)) {
            SolutionRecord rec;
            rec.assignment = a;
            if (m.objective.kind != ObjectiveKind::Satisfy)
                rec.objective = a.values[m.objective.var];
            switch (mode) {
                case SolveMode::First:
                    out.push_back(std::move(rec));
                    return out;
                case SolveMode::All:
                    out.push_back(std::move(rec));
                    break;
                case SolveMode::Optimize: {
                    const std::int64_t obj = *rec.objective;
                    const bool better =
                        !have_best || (minimize ? obj < *best.objective : obj > *best.objective);
                    if (better) {
                        best = std::move(rec);
                        have_best = true;
                    }
                    break;
                }
            }
        }
        // odometer: last variable ticks fastest
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < m.vars[pos].domain.size()) {
                a.values[pos] = m.vars[pos].domain[idx[pos]];
                break;
            }
            idx[pos] = 0;
            a.values[pos] = m.vars[pos].domain[0];
            if (pos == 0) {
                if (mode == SolveMode::Optimize && have_best) out.push_back(std::move(best));
                return out;
            }
        }
    }
}

}  // namespace detcp

#endif  // DETCP_BRUTE_FORCE_HPP
