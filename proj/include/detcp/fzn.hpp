#ifndef DETCP_FZN_HPP
#define DETCP_FZN_HPP

#include <cctype>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "detcp/model.hpp"

namespace detcp {

/// Model text plus where it came from, for error reporting.
struct ModelSource {
    std::string text;
    std::string origin = "<memory>";
};

enum class ParseErrorKind { Lexical, Syntax, Semantic };

struct ParseError {
    ParseErrorKind kind = ParseErrorKind::Syntax;
    std::size_t line = 1;
    std::size_t col = 1;
    std::string message;
    std::string origin;

    std::string formatted() const {
        const char* k = kind == ParseErrorKind::Lexical  ? "lexical"
                        : kind == ParseErrorKind::Syntax ? "syntax"
                                                         : "semantic";
        return origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + k +
               " error: " + message;
    }
};

using ParseResult = std::variant<Model, ParseError>;

namespace fzn_detail {

enum class Tok { Ident, Int, LParen, RParen, LBracket, RBracket, LBrace, RBrace, Comma, Colon, Semi, DotDot, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    std::size_t line = 1;
    std::size_t col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    // Returns false and fills err on a lexical error.
    bool next(Token& out, ParseError& err) {
        skip_ws_and_comments();
        out.line = line_;
        out.col = col_;
        if (pos_ >= text_.size()) {
            out.kind = Tok::End;
            return true;
        }
        const char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                advance();
            out.kind = Tok::Ident;
            out.text = text_.substr(start, pos_ - start);
            return true;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            std::size_t start = pos_;
            advance();
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance();
            const std::string digits = text_.substr(start, pos_ - start);
            if (digits == "-") {
                err = {ParseErrorKind::Lexical, out.line, out.col, "'-' without digits", {}};
                return false;
            }
            out.kind = Tok::Int;
            out.text = digits;
            try {
                out.value = std::stoll(digits);
            } catch (const std::out_of_range&) {
                err = {ParseErrorKind::Lexical, out.line, out.col,
                       "integer literal out of range: " + digits, {}};
                return false;
            }
            return true;
        }
        switch (c) {
            case '(': out.kind = Tok::LParen; break;
            case ')': out.kind = Tok::RParen; break;
            case '[': out.kind = Tok::LBracket; break;
            case ']': out.kind = Tok::RBracket; break;
            case '{': out.kind = Tok::LBrace; break;
            case '}': out.kind = Tok::RBrace; break;
            case ',': out.kind = Tok::Comma; break;
            case ':': out.kind = Tok::Colon; break;
            case ';': out.kind = Tok::Semi; break;
            case '.':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '.') {
                    advance();
                    out.kind = Tok::DotDot;
                    break;
                }
                err = {ParseErrorKind::Lexical, out.line, out.col, "stray '.'", {}};
                return false;
            default:
                err = {ParseErrorKind::Lexical, out.line, out.col,
                       std::string("unexpected character '") + c + "'", {}};
                return false;
        }
        advance();
        return true;
    }

private:
    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(const ModelSource& src) : src_(src), lexer_(src.text) {}

    ParseResult run() {
        if (!advance()) return fail();
        Model m;
        bool solved = false;
        while (!solved) {
            if (cur_.kind == Tok::End)
                return error(ParseErrorKind::Syntax, cur_, "expected item or 'solve', got end of input");
            if (cur_.kind != Tok::Ident)
                return error(ParseErrorKind::Syntax, cur_, "expected 'var', 'constraint' or 'solve'");
            if (cur_.text == "var") {
                if (!parse_var_decl(m)) return fail();
            } else if (cur_.text == "constraint") {
                if (!parse_constraint(m)) return fail();
            } else if (cur_.text == "solve") {
                if (!parse_solve(m)) return fail();
                solved = true;
            } else {
                return error(ParseErrorKind::Syntax, cur_,
                             "expected 'var', 'constraint' or 'solve', got '" + cur_.text + "'");
            }
        }
        if (cur_.kind != Tok::End)
            return error(ParseErrorKind::Syntax, cur_, "trailing input after 'solve' item");
        const auto diags = validate_model(m);
        if (!diags.empty())
            return error(ParseErrorKind::Semantic, cur_, diags.front());
        return m;
    }

private:
    bool advance() {
        ParseError err;
        if (!lexer_.next(cur_, err)) {
            err_ = err;
            return false;
        }
        return true;
    }

    bool expect(Tok kind, const char* what) {
        if (cur_.kind != kind) {
            set_error(ParseErrorKind::Syntax, cur_, std::string("expected ") + what);
            return false;
        }
        return advance();
    }

    void set_error(ParseErrorKind kind, const Token& at, std::string msg) {
        err_ = {kind, at.line, at.col, std::move(msg), {}};
    }

    ParseResult error(ParseErrorKind kind, const Token& at, std::string msg) {
        set_error(kind, at, std::move(msg));
        return fail();
    }

    ParseResult fail() {
        err_.origin = src_.origin;
        return err_;
    }

    bool parse_int(std::int64_t& out) {
        if (cur_.kind != Tok::Int) {
            set_error(ParseErrorKind::Syntax, cur_, "expected integer");
            return false;
        }
        out = cur_.value;
        return advance();
    }

    bool parse_var_decl(Model& m) {
        if (!advance()) return false;  // past 'var'
        std::vector<std::int64_t> domain;
        if (cur_.kind == Tok::LBrace) {
            if (!advance()) return false;
            std::int64_t v;
            if (!parse_int(v)) return false;
            domain.push_back(v);
            while (cur_.kind == Tok::Comma) {
                if (!advance()) return false;
                if (!parse_int(v)) return false;
                domain.push_back(v);
            }
            if (!expect(Tok::RBrace, "'}'")) return false;
            std::sort(domain.begin(), domain.end());
            domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
        } else {
            std::int64_t lo, hi;
            const Token at = cur_;
            if (!parse_int(lo)) return false;
            if (!expect(Tok::DotDot, "'..'")) return false;
            if (!parse_int(hi)) return false;
            if (lo > hi) {
                set_error(ParseErrorKind::Semantic, at,
                          "empty domain " + std::to_string(lo) + ".." + std::to_string(hi));
                return false;
            }
            domain.reserve(static_cast<std::size_t>(hi - lo + 1));
            for (std::int64_t v = lo; v <= hi; ++v) domain.push_back(v);
        }
        if (!expect(Tok::Colon, "':'")) return false;
        if (cur_.kind != Tok::Ident) {
            set_error(ParseErrorKind::Syntax, cur_, "expected variable name");
            return false;
        }
        const Token name_tok = cur_;
        if (m.var_index(name_tok.text)) {
            set_error(ParseErrorKind::Semantic, name_tok,
                      "duplicate variable name '" + name_tok.text + "'");
            return false;
        }
        if (!advance()) return false;
        if (!expect(Tok::Semi, "';'")) return false;
        m.vars.push_back(VariableDecl{name_tok.text, std::move(domain)});
        return true;
    }

    bool parse_int_array(std::vector<std::int64_t>& out) {
        if (!expect(Tok::LBracket, "'['")) return false;
        std::int64_t v;
        if (!parse_int(v)) return false;
        out.push_back(v);
        while (cur_.kind == Tok::Comma) {
            if (!advance()) return false;
            if (!parse_int(v)) return false;
            out.push_back(v);
        }
        return expect(Tok::RBracket, "']'");
    }

    bool parse_var_array(const Model& m, std::vector<VarId>& out) {
        if (!expect(Tok::LBracket, "'['")) return false;
        for (;;) {
            if (cur_.kind != Tok::Ident) {
                set_error(ParseErrorKind::Syntax, cur_, "expected variable name");
                return false;
            }
            const auto id = m.var_index(cur_.text);
            if (!id) {
                set_error(ParseErrorKind::Semantic, cur_, "unknown variable '" + cur_.text + "'");
                return false;
            }
            out.push_back(*id);
            if (!advance()) return false;
            if (cur_.kind != Tok::Comma) break;
            if (!advance()) return false;
        }
        return expect(Tok::RBracket, "']'");
    }

    bool parse_constraint(Model& m) {
        if (!advance()) return false;  // past 'constraint'
        if (cur_.kind != Tok::Ident) {
            set_error(ParseErrorKind::Syntax, cur_, "expected constraint name");
            return false;
        }
        const Token call = cur_;
        Constraint con;
        if (call.text == "int_lin_eq")
            con.kind = ConstraintKind::IntLinEq;
        else if (call.text == "int_lin_le")
            con.kind = ConstraintKind::IntLinLe;
        else if (call.text == "int_lin_ne")
            con.kind = ConstraintKind::IntLinNe;
        else if (call.text == "all_different")
            con.kind = ConstraintKind::AllDifferent;
        else {
            set_error(ParseErrorKind::Syntax, call, "unknown constraint '" + call.text + "'");
            return false;
        }
        if (!advance()) return false;
        if (!expect(Tok::LParen, "'('")) return false;
        if (con.kind == ConstraintKind::AllDifferent) {
            if (!parse_var_array(m, con.vars)) return false;
        } else {
            if (!parse_int_array(con.coeffs)) return false;
            if (!expect(Tok::Comma, "','")) return false;
            if (!parse_var_array(m, con.vars)) return false;
            if (!expect(Tok::Comma, "','")) return false;
            if (!parse_int(con.rhs)) return false;
            if (con.coeffs.size() != con.vars.size()) {
                set_error(ParseErrorKind::Semantic, call,
                          "arity mismatch: " + std::to_string(con.coeffs.size()) +
                              " coefficients vs " + std::to_string(con.vars.size()) + " variables");
                return false;
            }
        }
        if (!expect(Tok::RParen, "')'")) return false;
        if (!expect(Tok::Semi, "';'")) return false;
        m.constraints.push_back(std::move(con));
        return true;
    }

    bool parse_solve(Model& m) {
        if (!advance()) return false;  // past 'solve'
        if (cur_.kind != Tok::Ident) {
            set_error(ParseErrorKind::Syntax, cur_, "expected 'satisfy', 'minimize' or 'maximize'");
            return false;
        }
        const Token what = cur_;
        if (what.text == "satisfy") {
            m.objective = Objective{ObjectiveKind::Satisfy, 0};
            if (!advance()) return false;
        } else if (what.text == "minimize" || what.text == "maximize") {
            if (!advance()) return false;
            if (cur_.kind != Tok::Ident) {
                set_error(ParseErrorKind::Syntax, cur_, "expected objective variable name");
                return false;
            }
            const auto id = m.var_index(cur_.text);
            if (!id) {
                set_error(ParseErrorKind::Semantic, cur_, "unknown variable '" + cur_.text + "'");
                return false;
            }
            m.objective = Objective{
                what.text == "minimize" ? ObjectiveKind::Minimize : ObjectiveKind::Maximize, *id};
            if (!advance()) return false;
        } else {
            set_error(ParseErrorKind::Syntax, what,
                      "expected 'satisfy', 'minimize' or 'maximize', got '" + what.text + "'");
            return false;
        }
        return expect(Tok::Semi, "';'");
    }

    const ModelSource& src_;
    Lexer lexer_;
    Token cur_;
    ParseError err_;
};

}  // namespace fzn_detail

/// Parses the model text. Variable indices follow declaration order, which
/// the branching heuristic relies on, so parsing is strictly order-preserving.
inline ParseResult parse(const ModelSource& src) {
    fzn_detail::Parser p(src);
    return p.run();
}

inline ParseResult parse_text(std::string text) {
    return parse(ModelSource{std::move(text), "<memory>"});
}

/// Canonical text form: declarations in variable order, then constraints in
/// declaration order, then the solve item; single space after commas.
/// parse(serialize(m)) reproduces m structurally.
inline std::string serialize(const Model& m) {
    std::string out;
    auto join_ints = [&](const std::vector<std::int64_t>& xs) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(xs[i]);
        }
    };
    for (const auto& v : m.vars) {
        out += "var ";
        const bool contiguous =
            !v.domain.empty() &&
            v.domain.back() - v.domain.front() + 1 == static_cast<std::int64_t>(v.domain.size());
        if (contiguous) {
            out += std::to_string(v.domain.front()) + ".." + std::to_string(v.domain.back());
        } else {
            out += "{";
            join_ints(v.domain);
            out += "}";
        }
        out += ": " + v.name + ";\n";
    }
    for (const auto& con : m.constraints) {
        out += "constraint ";
        const char* name = con.kind == ConstraintKind::IntLinEq   ? "int_lin_eq"
                           : con.kind == ConstraintKind::IntLinLe ? "int_lin_le"
                           : con.kind == ConstraintKind::IntLinNe ? "int_lin_ne"
                                                                  : "all_different";
        out += name;
        out += "(";
        if (con.kind != ConstraintKind::AllDifferent) {
            out += "[";
            join_ints(con.coeffs);
            out += "], ";
        }
        out += "[";
        for (std::size_t i = 0; i < con.vars.size(); ++i) {
            if (i) out += ", ";
            out += m.vars[con.vars[i]].name;
        }
        out += "]";
        if (con.kind != ConstraintKind::AllDifferent) out += ", " + std::to_string(con.rhs);
        out += ");\n";
    }
    switch (m.objective.kind) {
        case ObjectiveKind::Satisfy: out += "solve satisfy;\n"; break;
        case ObjectiveKind::Minimize:
            out += "solve minimize " + m.vars[m.objective.var].name + ";\n";
            break;
        case ObjectiveKind::Maximize:
            out += "solve maximize " + m.vars[m.objective.var].name + ";\n";
            break;
    }
    return out;
}

/// Structural equality used by the round-trip tests.
inline bool models_equal(const Model& a, const Model& b) {
    if (a.vars.size() != b.vars.size() || a.constraints.size() != b.constraints.size())
        return false;
    for (std::size_t i = 0; i < a.vars.size(); ++i)
        if (a.vars[i].name != b.vars[i].name || a.vars[i].domain != b.vars[i].domain) return false;
    for (std::size_t i = 0; i < a.constraints.size(); ++i) {
        const auto& x = a.constraints[i];
        const auto& y = b.constraints[i];
        if (x.kind != y.kind || x.coeffs != y.coeffs || x.vars != y.vars || x.rhs != y.rhs)
            return false;
    }
    return a.objective.kind == b.objective.kind &&
           (a.objective.kind == ObjectiveKind::Satisfy || a.objective.var == b.objective.var);
}

}  // namespace detcp

#endif  // DETCP_FZN_HPP
