// ============================================================================
// straloop/parse.hpp — text grammar for formulas and ST-RA specifications
// ============================================================================
//
// One grammar serves the canonical set format and the human comparison
// style:
//
//   stra       := bexpr 'U' '[' rat ',' rat ']' bexpr
//   bexpr      := bterm ('|' bterm)*
//   bterm      := bfactor ('&' bfactor)*
//   bfactor    := '!' bfactor | '(' stra | bexpr ')' | 'true' | 'false'
//                 | comparison
//   comparison := sum (relop sum)+          relop: <= < >= > = ==
//   sum        := ['-'] prod (('+'|'-') prod)*
//   prod       := rat ['*' var] | var
//   rat        := int | int '/' int | finite decimal
//
// Chained comparisons expand to conjunctions ("0 <= h <= 4"). The until
// operator may not nest: it is rejected inside Boolean operators and as
// an operand of another until.
//
// ============================================================================

#ifndef STRALOOP_PARSE_HPP
#define STRALOOP_PARSE_HPP

#include "straloop/formula.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace straloop {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

// phi1 U[l,u] phi2 with quantifier-free operands; 0 <= l <= u.
struct StraParts {
    Formula phi1;
    Rat lo, hi;
    Formula phi2;
};

namespace detail {

struct Token {
    enum Kind { Ident, Number, Sym, Until, True, False, End } kind;
    std::string text;
    Rat value;
    int line, col;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

private:
    void advance() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) step();
        tok_.line = line_;
        tok_.col = col_;
        if (i_ >= s_.size()) { tok_.kind = Token::End; tok_.text = "<end>"; return; }
        char c = s_[i_];
        if (c == '\n') { step(); advance(); return; }
        if ((c >= '0' && c <= '9') || (c == '.' && i_ + 1 < s_.size() && isdigit(s_[i_ + 1]))) {
            lex_number();
            return;
        }
        if (isalpha(c) || c == '_') {
            std::string id;
            while (i_ < s_.size() && (isalnum(s_[i_]) || s_[i_] == '_')) { id.push_back(s_[i_]); step(); }
            if (id == "U") tok_.kind = Token::Until;
            else if (id == "true") tok_.kind = Token::True;
            else if (id == "false") tok_.kind = Token::False;
            else tok_.kind = Token::Ident;
            tok_.text = id;
            return;
        }
        if (c == '$')
            throw ParseError("identifiers starting with '$' are reserved", line_, col_);
        // multi-char operators
        auto two = [&](char a, char b) {
            return c == a && i_ + 1 < s_.size() && s_[i_ + 1] == b;
        };
        if (two('<', '=') || two('>', '=') || two('=', '=') || two('-', '>')) {
            tok_.kind = Token::Sym;
            tok_.text = std::string(1, c) + s_[i_ + 1];
            step(); step();
            return;
        }
        if (std::string("()!&|+-*,[]<>=:").find(c) != std::string::npos) {
            tok_.kind = Token::Sym;
            tok_.text = std::string(1, c);
            step();
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void lex_number() {
        std::string lit;
        auto digits = [&] {
            while (i_ < s_.size() && isdigit(s_[i_])) { lit.push_back(s_[i_]); step(); }
        };
        digits();
        if (i_ < s_.size() && s_[i_] == '.') {
            lit.push_back('.');
            step();
            digits();
        } else if (i_ < s_.size() && s_[i_] == '/' && i_ + 1 < s_.size() && isdigit(s_[i_ + 1])) {
            lit.push_back('/');
            step();
            digits();
        }
        auto v = Rat::try_parse(lit);
        if (!v) throw ParseError("bad numeric literal '" + lit + "'", line_, col_);
        tok_.kind = Token::Number;
        tok_.text = lit;
        tok_.value = *v;
    }

    void step() {
        if (s_[i_] == '\n') { ++line_; col_ = 1; }
        else ++col_;
        ++i_;
    }

    static bool isdigit(char c) { return c >= '0' && c <= '9'; }
    static bool isalpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
    static bool isalnum(char c) { return isdigit(c) || isalpha(c); }

    std::string_view s_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) : lx_(text) {}

    // Entire input must be one quantifier-free formula.
    Formula parse_formula_all() {
        Formula f = parse_bexpr(false);
        expect_end();
        return f;
    }

    // Entire input must be one ST-RA formula (exactly one top-level until).
    StraParts parse_stra_all() {
        auto r = parse_expr();
        expect_end();
        if (!r.stra) lx_.fail("expected an until operator in ST-RA formula");
        return std::move(*r.stra);
    }

private:
    struct ExprResult {
        Formula qf;
        std::optional<StraParts> stra;
    };

    // bexpr ['U' [l,u] bexpr]
    ExprResult parse_expr() {
        Formula lhs = parse_bexpr(true);
        if (lx_.peek().kind == Token::Until) {
            sawUntil_ = true;
            lx_.next();
            expect_sym("[");
            Rat lo = parse_rat_signed();
            expect_sym(",");
            Rat hi = parse_rat_signed();
            expect_sym("]");
            Formula rhs = parse_bexpr(true);
            if (lx_.peek().kind == Token::Until)
                lx_.fail("nested temporal operator");
            if (lo.sign() < 0 || hi < lo)
                lx_.fail("until interval must satisfy 0 <= l <= u");
            return {Formula::t(), StraParts{std::move(lhs), lo, hi, std::move(rhs)}};
        }
        return {std::move(lhs), std::nullopt};
    }

    Formula parse_bexpr(bool untilContext) {
        Formula f = parse_bterm(untilContext);
        std::vector<Formula> alts{f};
        while (is_sym("|")) {
            lx_.next();
            alts.push_back(parse_bterm(untilContext));
        }
        return alts.size() == 1 ? alts[0] : f_or(std::move(alts));
    }

    Formula parse_bterm(bool untilContext) {
        std::vector<Formula> parts{parse_bfactor(untilContext)};
        while (is_sym("&")) {
            lx_.next();
            parts.push_back(parse_bfactor(untilContext));
        }
        return parts.size() == 1 ? parts[0] : f_and(std::move(parts));
    }

    Formula parse_bfactor(bool untilContext) {
        const Token& t = lx_.peek();
        if (t.kind == Token::True) { lx_.next(); return Formula::t(); }
        if (t.kind == Token::False) { lx_.next(); return Formula::f(); }
        if (t.kind == Token::Until) lx_.fail("nested temporal operator");
        if (is_sym("!")) {
            lx_.next();
            return f_not(parse_bfactor(untilContext));
        }
        if (is_sym("(")) {
            lx_.next();
            // An until is syntactically possible here but never legal as a
            // Boolean operand; diagnose it specifically.
            ++parenDepth_;
            ExprResult r = parse_expr();
            --parenDepth_;
            expect_sym(")");
            if (r.stra) lx_.fail("nested temporal operator");
            return std::move(r.qf);
        }
        return parse_comparison();
    }

    Formula parse_comparison() {
        LinExpr first = parse_sum();
        struct Step { std::string op; LinExpr rhs; };
        std::vector<Step> steps;
        while (is_sym("<=") || is_sym("<") || is_sym(">=") || is_sym(">") || is_sym("=") ||
               is_sym("==")) {
            std::string op = lx_.next().text;
            steps.push_back({op, parse_sum()});
        }
        if (steps.empty()) {
            // an until token here means a temporal operand in atom position
            if (lx_.peek().kind == detail::Token::Until && (parenDepth_ > 0 || sawUntil_))
                lx_.fail("nested temporal operator");
            lx_.fail("expected comparison operator");
        }
        std::vector<Formula> conj;
        const LinExpr* lhs = &first;
        for (const auto& s : steps) {
            conj.push_back(make_cmp(*lhs, s.op, s.rhs));
            lhs = &s.rhs;
        }
        return conj.size() == 1 ? conj[0] : f_and(std::move(conj));
    }

    static Formula make_cmp(const LinExpr& a, const std::string& op, const LinExpr& b) {
        if (op == ">=") return Formula::ge0(a - b);
        if (op == ">") return Formula::gt0(a - b);
        if (op == "<=") return Formula::ge0(b - a);
        if (op == "<") return Formula::gt0(b - a);
        // equality: both weak directions
        return f_and(Formula::ge0(a - b), Formula::ge0(b - a));
    }

    LinExpr parse_sum() {
        LinExpr e;
        bool neg = false;
        if (is_sym("-")) { lx_.next(); neg = true; }
        else if (is_sym("+")) lx_.next();
        e += parse_prod(neg);
        while (is_sym("+") || is_sym("-")) {
            bool minus = lx_.next().text == "-";
            e += parse_prod(minus);
        }
        return e;
    }

    LinExpr parse_prod(bool neg) {
        while (is_sym("-")) { // signs may stack: "x + -1*y"
            lx_.next();
            neg = !neg;
        }
        const Token& t = lx_.peek();
        Rat sign = neg ? Rat(-1) : Rat(1);
        if (t.kind == Token::Number) {
            Rat v = lx_.next().value;
            if (is_sym("*")) {
                lx_.next();
                Token id = lx_.next();
                if (id.kind != Token::Ident)
                    throw ParseError("expected variable after '*'", id.line, id.col);
                return LinExpr::var(id.text, sign * v);
            }
            return LinExpr::constant(sign * v);
        }
        if (t.kind == Token::Ident) {
            Token id = lx_.next();
            if (is_sym("*")) { // var * coeff
                lx_.next();
                Token num = lx_.next();
                if (num.kind != Token::Number)
                    throw ParseError("expected coefficient after '*'", num.line, num.col);
                return LinExpr::var(id.text, sign * num.value);
            }
            return LinExpr::var(id.text, sign);
        }
        lx_.fail("expected term");
    }

    Rat parse_rat_signed() {
        bool neg = false;
        if (is_sym("-")) { lx_.next(); neg = true; }
        Token t = lx_.next();
        if (t.kind != Token::Number) throw ParseError("expected rational", t.line, t.col);
        return neg ? -t.value : t.value;
    }

    int parenDepth_ = 0;
    bool sawUntil_ = false;

    bool is_sym(const char* s) const {
        return lx_.peek().kind == Token::Sym && lx_.peek().text == s;
    }
    void expect_sym(const char* s) {
        if (!is_sym(s)) lx_.fail(std::string("expected '") + s + "'");
        lx_.next();
    }
    void expect_end() {
        if (lx_.peek().kind != Token::End) lx_.fail("trailing input");
    }

    Lexer lx_;
};

} // namespace detail

// Quantifier-free formula; until operators are rejected.
inline Formula parse_formula(std::string_view text) {
    return detail::FormulaParser(text).parse_formula_all();
}

// phi1 U[l,u] phi2 with quantifier-free operands.
inline StraParts parse_stra_parts(std::string_view text) {
    return detail::FormulaParser(text).parse_stra_all();
}

} // namespace straloop

#endif // STRALOOP_PARSE_HPP
