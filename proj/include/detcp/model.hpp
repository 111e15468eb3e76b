#ifndef DETCP_MODEL_HPP
#define DETCP_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "detcp/path.hpp"

namespace detcp {

using VarId = std::size_t;

/// A declared variable: name plus its initial domain as a sorted set of
/// distinct integers.
struct VariableDecl {
    std::string name;
    std::vector<std::int64_t> domain;
};

enum class ConstraintKind { IntLinEq, IntLinLe, IntLinNe, AllDifferent };

/// Linear kinds read  sum(coeffs[i] * vars[i])  (=|<=|!=)  rhs.
/// AllDifferent uses only `vars`.
struct Constraint {
    ConstraintKind kind = ConstraintKind::IntLinEq;
    std::vector<std::int64_t> coeffs;
    std::vector<VarId> vars;
    std::int64_t rhs = 0;
};

enum class ObjectiveKind { Satisfy, Minimize, Maximize };

struct Objective {
    ObjectiveKind kind = ObjectiveKind::Satisfy;
    VarId var = 0;  // meaningful unless kind == Satisfy
};

/// Immutable problem description. Safe to share read-only between threads
/// once built.
struct Model {
    std::vector<VariableDecl> vars;
    std::vector<Constraint> constraints;
    Objective objective;

    std::optional<VarId> var_index(const std::string& name) const {
        for (VarId i = 0; i < vars.size(); ++i)
            if (vars[i].name == name) return i;
        return std::nullopt;
    }
};

/// Complete assignment, indexed by VarId.
struct Assignment {
    std::vector<std::int64_t> values;

    bool operator==(const Assignment& other) const { return values == other.values; }
};

enum class SolveMode { First, All, Optimize };

/// One solution: the full assignment, the objective value when the model has
/// one, and the PathId of the solution leaf. The brute-force oracle has no
/// search tree and leaves the path empty.
struct SolutionRecord {
    Assignment assignment;
    std::optional<std::int64_t> objective;
    PathId path;

    bool operator==(const SolutionRecord& other) const {
        return assignment == other.assignment && objective == other.objective &&
               path == other.path;
    }
};

/// Structural model validation. Returns one human-readable diagnostic per
/// violation; an empty list means the model is well-formed.
inline std::vector<std::string> validate_model(const Model& m) {
    std::vector<std::string> diags;
    for (VarId i = 0; i < m.vars.size(); ++i) {
        const auto& v = m.vars[i];
        if (v.domain.empty())
            diags.push_back("empty domain for variable '" + v.name + "'");
        if (!std::is_sorted(v.domain.begin(), v.domain.end()) ||
            std::adjacent_find(v.domain.begin(), v.domain.end()) != v.domain.end())
            diags.push_back("domain of variable '" + v.name + "' is not a sorted set");
        for (VarId j = i + 1; j < m.vars.size(); ++j)
            if (m.vars[j].name == v.name)
                diags.push_back("duplicate variable name '" + v.name + "'");
    }
    auto check_ref = [&](VarId v, const std::string& where) {
        if (v >= m.vars.size())
            diags.push_back("unknown variable reference #" + std::to_string(v) + " in " + where);
    };
    for (std::size_t c = 0; c < m.constraints.size(); ++c) {
        const auto& con = m.constraints[c];
        const std::string where = "constraint " + std::to_string(c);
        if (con.vars.empty()) diags.push_back("no variables in " + where);
        for (VarId v : con.vars) check_ref(v, where);
        if (con.kind != ConstraintKind::AllDifferent && con.coeffs.size() != con.vars.size())
            diags.push_back("arity mismatch in " + where + ": " + std::to_string(con.coeffs.size()) +
                            " coefficients vs " + std::to_string(con.vars.size()) + " variables");
    }
    if (m.objective.kind != ObjectiveKind::Satisfy)
        check_ref(m.objective.var, "objective");
    return diags;
}

/// True iff the complete assignment satisfies every constraint.
/// Throws std::invalid_argument if the assignment does not cover all
/// variables.
inline bool check_assignment(const Model& m, const Assignment& a) {
    if (a.values.size() != m.vars.size())
        throw std::invalid_argument("check_assignment: assignment does not cover all variables");
    for (const auto& con : m.constraints) {
        switch (con.kind) {
            case ConstraintKind::IntLinEq:
            case ConstraintKind::IntLinLe:
            case ConstraintKind::IntLinNe: {
                std::int64_t sum = 0;
                for (std::size_t i = 0; i < con.vars.size(); ++i)
                    sum += con.coeffs[i] * a.values[con.vars[i]];
                if (con.kind == ConstraintKind::IntLinEq && sum != con.rhs) return false;
                if (con.kind == ConstraintKind::IntLinLe && sum > con.rhs) return false;
                if (con.kind == ConstraintKind::IntLinNe && sum == con.rhs) return false;
                break;
            }
            case ConstraintKind::AllDifferent:
                for (std::size_t i = 0; i < con.vars.size(); ++i)
                    for (std::size_t j = i + 1; j < con.vars.size(); ++j)
                        if (a.values[con.vars[i]] == a.values[con.vars[j]]) return false;
                break;
        }
    }
    return true;
}

}  // namespace detcp

#endif  // DETCP_MODEL_HPP
