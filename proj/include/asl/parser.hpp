#ifndef ASL_PARSER_HPP
#define ASL_PARSER_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "syntax.hpp"

namespace asl {

namespace lexer {

struct Token {
    enum class K { Ident, Nat, Sym, End };
    K kind;
    std::string text;
    Val num = 0;
    int line = 1;
    int col = 1;
};

inline bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
inline bool ident_tail(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '\''; }

inline std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto make = [&](Token::K k, std::string text, Val num = 0) {
        out.push_back({k, std::move(text), num, line, col});
    };
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n') { ++i; ++line; col = 1; continue; }
        if (c == ' ' || c == '\t' || c == '\r') { ++i; ++col; continue; }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (s.compare(i, 3, "|->") == 0) { make(Token::K::Sym, "|->"); i += 3; col += 3; continue; }
        if (s.compare(i, 2, "/\\") == 0) { make(Token::K::Sym, "/\\"); i += 2; col += 2; continue; }
        if (s.compare(i, 2, "<=") == 0) { make(Token::K::Sym, "<="); i += 2; col += 2; continue; }
        if (s.compare(i, 2, "!=") == 0) { make(Token::K::Sym, "!="); i += 2; col += 2; continue; }
        if (std::string("*+-=<:;,().").find(c) != std::string::npos) {
            make(Token::K::Sym, std::string(1, c));
            ++i; ++col;
            continue;
        }
        if (c >= '0' && c <= '9') {
            size_t j = i;
            while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
            std::string text = s.substr(i, j - i);
            Val v = 0;
            for (char d : text) {
                if (v > (~0ULL - 9) / 10) throw parse_error("numeral too large", line, col);
                v = v * 10 + Val(d - '0');
            }
            make(Token::K::Nat, text, v);
            col += int(j - i);
            i = j;
            continue;
        }
        if (ident_start(c)) {
            size_t j = i;
            while (j < s.size() && ident_tail(s[j])) ++j;
            make(Token::K::Ident, s.substr(i, j - i));
            col += int(j - i);
            i = j;
            continue;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({Token::K::End, "", 0, line, col});
    return out;
}

} // namespace lexer

inline bool is_keyword(const std::string& s) { return s == "EX" || s == "emp" || s == "arr"; }

inline std::set<std::string> scan_identifiers(const std::string& text) {
    std::set<std::string> out;
    for (const auto& t : lexer::lex(text))
        if (t.kind == lexer::Token::K::Ident && !is_keyword(t.text)) out.insert(t.text);
    return out;
}

// Shared state for a parse unit (e.g. both sides of a problem file).
// The pool must know every identifier of the unit before parsing starts,
// so generated names never collide with variables appearing later.
struct ParseContext {
    FreshNames pool;
    std::map<std::pair<Term, Val>, std::string> sub_memo; // for quantifier-free heaps

    explicit ParseContext(std::set<std::string> idents = {}) : pool(std::move(idents)) {}

    // Names for eliminated subtractions: f, g, ..., z skipping taken
    // identifiers, then f1, f2, ...
    std::string next_sub_name() {
        for (char c = 'f'; c <= 'z'; ++c) {
            std::string cand(1, c);
            if (!pool.used(cand)) {
                pool.reserve(cand);
                return cand;
            }
        }
        return pool.fresh_plain("f");
    }
};

namespace detail {

class HeapParser {
public:
    HeapParser(const std::vector<lexer::Token>& toks, ParseContext& ctx) : t_(toks), ctx_(ctx) {}

    SymbolicHeap parse() {
        SymbolicHeap h;
        if (at_ident("EX")) {
            ++i_;
            while (cur().kind == lexer::Token::K::Ident && !is_keyword(cur().text))
                h.bound.push_back(take_ident());
            if (h.bound.empty()) fail("expected at least one bound variable after EX");
            expect_sym(".");
        }
        quantified_ = !h.bound.empty();
        if (colon_ahead()) {
            h.pure.push_back(parse_atom());
            while (at_sym("/\\")) {
                ++i_;
                h.pure.push_back(parse_atom());
            }
            expect_sym(":");
        }
        h.spatial.push_back(parse_satom());
        while (at_sym("*")) {
            ++i_;
            h.spatial.push_back(parse_satom());
        }
        if (cur().kind != lexer::Token::K::End) fail("trailing input after symbolic heap");
        for (auto& a : sub_atoms_) h.pure.push_back(std::move(a));
        for (auto& v : sub_bound_) h.bound.push_back(std::move(v));
        return h;
    }

private:
    const std::vector<lexer::Token>& t_;
    size_t i_ = 0;
    ParseContext& ctx_;
    bool quantified_ = false;
    std::map<std::pair<Term, Val>, std::string> local_memo_;
    std::set<std::string> recorded_;
    PureFormula sub_atoms_;
    std::vector<std::string> sub_bound_;

    const lexer::Token& cur() const { return t_[i_]; }
    const lexer::Token& at(size_t off) const { return t_[std::min(i_ + off, t_.size() - 1)]; }
    bool at_sym(const std::string& s) const { return cur().kind == lexer::Token::K::Sym && cur().text == s; }
    bool at_ident(const std::string& s) const { return cur().kind == lexer::Token::K::Ident && cur().text == s; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg + (cur().text.empty() ? "" : " near '" + cur().text + "'"), cur().line, cur().col);
    }

    void expect_sym(const std::string& s) {
        if (!at_sym(s)) fail("expected '" + s + "'");
        ++i_;
    }

    std::string take_ident() {
        if (cur().kind != lexer::Token::K::Ident) fail("expected identifier");
        if (is_keyword(cur().text)) fail("keyword not allowed as variable");
        return t_[i_++].text;
    }

    bool colon_ahead() const {
        for (size_t j = i_; j < t_.size() && t_[j].kind != lexer::Token::K::End; ++j)
            if (t_[j].kind == lexer::Token::K::Sym && t_[j].text == ":") return true;
        return false;
    }

    PureAtom parse_atom() {
        Term l = parse_term();
        Rel r;
        if (at_sym("=")) r = Rel::Eq;
        else if (at_sym("!=")) r = Rel::Ne;
        else if (at_sym("<=")) r = Rel::Le;
        else if (at_sym("<")) r = Rel::Lt;
        else { fail("expected relation (=, !=, <=, <)"); }
        ++i_;
        return {std::move(l), r, parse_term()};
    }

    SpatialAtom parse_satom() {
        if (at_ident("emp")) { ++i_; return EmpAtom{}; }
        if (at_ident("arr")) {
            ++i_;
            expect_sym("(");
            Term a = parse_term();
            if (at_sym(";")) {
                ++i_;
                Term lo_off = parse_term();
                expect_sym(",");
                Term hi_off = parse_term();
                expect_sym(")");
                return ArraySeg{a + lo_off, a + hi_off};
            }
            expect_sym(",");
            Term b = parse_term();
            expect_sym(")");
            return ArraySeg{std::move(a), std::move(b)};
        }
        Term src = parse_term();
        if (!at_sym("|->")) fail("expected '|->'");
        ++i_;
        return PointsTo{std::move(src), parse_term(true)};
    }

    Term parse_term(bool dst_ctx = false) {
        Term acc = parse_prod(dst_ctx);
        for (;;) {
            if (at_sym("+")) {
                ++i_;
                acc += parse_prod(dst_ctx);
            } else if (at_sym("-")) {
                ++i_;
                if (cur().kind != lexer::Token::K::Nat) fail("subtraction requires a constant");
                Val n = t_[i_++].num;
                acc = eliminate_subtraction(std::move(acc), n);
            } else {
                break;
            }
        }
        return acc;
    }

    // In destination position "n * x" is a product only when x is not the
    // source of the next points-to; otherwise the * separates spatial atoms.
    Term parse_prod(bool dst_ctx) {
        if (cur().kind == lexer::Token::K::Nat) {
            Val n = t_[i_++].num;
            if (at_sym("*") && at(1).kind == lexer::Token::K::Ident && !is_keyword(at(1).text) &&
                !(dst_ctx && at(2).kind == lexer::Token::K::Sym && at(2).text == "|->")) {
                ++i_;
                return Term::var(take_ident(), n);
            }
            return Term(n);
        }
        return Term::var(take_ident());
    }

    // t - n becomes a fresh f with t = f + n recorded; occurrences of the
    // same (t, n) inside one scope share f. Under a quantifier prefix the
    // fresh variable is bound, otherwise it stays free. A heap reusing a
    // name from the shared scope still records the defining atom itself.
    Term eliminate_subtraction(Term t, Val n) {
        auto& memo = quantified_ ? local_memo_ : ctx_.sub_memo;
        auto key = std::make_pair(t, n);
        auto it = memo.find(key);
        std::string name;
        if (it != memo.end()) {
            name = it->second;
        } else {
            name = ctx_.next_sub_name();
            memo.emplace(std::move(key), name);
            if (quantified_) sub_bound_.push_back(name);
        }
        if (!recorded_.count(name)) {
            recorded_.insert(name);
            sub_atoms_.push_back(eq_atom(std::move(t), Term::var(name) + Term(n)));
        }
        return Term::var(name);
    }
};

} // namespace detail

inline SymbolicHeap parse_heap(const std::string& text, ParseContext& ctx) {
    auto toks = lexer::lex(text);
    for (const auto& t : toks)
        if (t.kind == lexer::Token::K::Ident && !is_keyword(t.text)) ctx.pool.reserve(t.text);
    detail::HeapParser p(toks, ctx);
    return p.parse();
}

inline SymbolicHeap parse_heap(const std::string& text) {
    ParseContext ctx(scan_identifiers(text));
    return parse_heap(text, ctx);
}

} // namespace asl

#endif
