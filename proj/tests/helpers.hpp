#ifndef DETCP_TESTS_HELPERS_HPP
#define DETCP_TESTS_HELPERS_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "detcp/fzn.hpp"
#include "detcp/model.hpp"

namespace detcp::test {

inline std::string instance_path(const std::string& name) {
    return std::string(DETCP_INSTANCE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& rel) {
    return std::string(DETCP_GOLDEN_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Model load_model(const std::string& name) {
    const std::string path = instance_path(name);
    const ParseResult r = parse(ModelSource{slurp(path), path});
    if (const auto* err = std::get_if<ParseError>(&r))
        throw std::runtime_error("parse failed: " + err->formatted());
    return std::get<Model>(r);
}

inline Model parse_or_throw(const std::string& text) {
    const ParseResult r = parse_text(text);
    if (const auto* err = std::get_if<ParseError>(&r))
        throw std::runtime_error("parse failed: " + err->formatted());
    return std::get<Model>(r);
}

/// Variable with a contiguous domain, for hand-built models.
inline VariableDecl var_range(const std::string& name, std::int64_t lo, std::int64_t hi) {
    VariableDecl v;
    v.name = name;
    for (std::int64_t x = lo; x <= hi; ++x) v.domain.push_back(x);
    return v;
}

inline Constraint lin_eq(std::vector<std::int64_t> coeffs, std::vector<VarId> vars,
                         std::int64_t rhs) {
    return Constraint{ConstraintKind::IntLinEq, std::move(coeffs), std::move(vars), rhs};
}

inline Constraint lin_le(std::vector<std::int64_t> coeffs, std::vector<VarId> vars,
                         std::int64_t rhs) {
    return Constraint{ConstraintKind::IntLinLe, std::move(coeffs), std::move(vars), rhs};
}

inline Constraint lin_ne(std::vector<std::int64_t> coeffs, std::vector<VarId> vars,
                         std::int64_t rhs) {
    return Constraint{ConstraintKind::IntLinNe, std::move(coeffs), std::move(vars), rhs};
}

inline Constraint all_diff(std::vector<VarId> vars) {
    return Constraint{ConstraintKind::AllDifferent, {}, std::move(vars), 0};
}

}  // namespace detcp::test

#endif  // DETCP_TESTS_HELPERS_HPP
