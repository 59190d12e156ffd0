#pragma once

#include <concepts>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <asl/syntax.hpp>

namespace asl {

using LinAtom = PureAtom;
using Valuation = std::map<std::string, Val>;

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

// Negation-normal by construction: there is no Not node. bx_neg pushes
// negation down to atoms, where it stays expressible within LinAtom.
// An empty And is true, an empty Or is false.
struct BoolExpr {
    enum class K { Atom, And, Or };
    K kind = K::And;
    LinAtom atom;                  // meaningful only when kind == Atom
    std::vector<BoolExprPtr> kids; // meaningful only for And / Or
};

inline bool is_true(const BoolExprPtr& e) {
    return e->kind == BoolExpr::K::And && e->kids.empty();
}
inline bool is_false(const BoolExprPtr& e) {
    return e->kind == BoolExpr::K::Or && e->kids.empty();
}

inline BoolExprPtr bx_true() {
    static const BoolExprPtr t = std::make_shared<BoolExpr>(BoolExpr{BoolExpr::K::And, {}, {}});
    return t;
}
inline BoolExprPtr bx_false() {
    static const BoolExprPtr f = std::make_shared<BoolExpr>(BoolExpr{BoolExpr::K::Or, {}, {}});
    return f;
}

inline std::optional<bool> atom_const_value(const LinAtom& a) {
    if (!a.lhs.is_const() || !a.rhs.is_const()) return std::nullopt;
    switch (a.rel) {
    case Rel::Eq: return a.lhs.k == a.rhs.k;
    case Rel::Ne: return a.lhs.k != a.rhs.k;
    case Rel::Le: return a.lhs.k <= a.rhs.k;
    case Rel::Lt: return a.lhs.k < a.rhs.k;
    }
    return std::nullopt;
}

inline BoolExprPtr bx_atom(LinAtom a) {
    if (auto c = atom_const_value(a)) return *c ? bx_true() : bx_false();
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::K::Atom, std::move(a), {}});
}

// Both builders flatten one level of the same connective and fold units,
// so trees stay shallow and constant subtrees disappear eagerly.
inline BoolExprPtr bx_and(std::vector<BoolExprPtr> ks) {
    std::vector<BoolExprPtr> out;
    for (auto& k : ks) {
        if (is_true(k)) continue;
        if (is_false(k)) return bx_false();
        if (k->kind == BoolExpr::K::And)
            out.insert(out.end(), k->kids.begin(), k->kids.end());
        else
            out.push_back(std::move(k));
    }
    if (out.empty()) return bx_true();
    if (out.size() == 1) return out[0];
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::K::And, {}, std::move(out)});
}

inline BoolExprPtr bx_or(std::vector<BoolExprPtr> ks) {
    std::vector<BoolExprPtr> out;
    for (auto& k : ks) {
        if (is_false(k)) continue;
        if (is_true(k)) return bx_true();
        if (k->kind == BoolExpr::K::Or)
            out.insert(out.end(), k->kids.begin(), k->kids.end());
        else
            out.push_back(std::move(k));
    }
    if (out.empty()) return bx_false();
    if (out.size() == 1) return out[0];
    return std::make_shared<BoolExpr>(BoolExpr{BoolExpr::K::Or, {}, std::move(out)});
}

inline BoolExprPtr bx_conj(const PureFormula& pure) {
    std::vector<BoolExprPtr> ks;
    ks.reserve(pure.size());
    for (const auto& a : pure) ks.push_back(bx_atom(a));
    return bx_and(std::move(ks));
}

inline LinAtom neg_atom(const LinAtom& a) {
    switch (a.rel) {
    case Rel::Eq: return ne_atom(a.lhs, a.rhs);
    case Rel::Ne: return eq_atom(a.lhs, a.rhs);
    case Rel::Le: return lt_atom(a.rhs, a.lhs);
    case Rel::Lt: return le_atom(a.rhs, a.lhs);
    }
    return a;
}

inline BoolExprPtr bx_neg(const BoolExprPtr& e) {
    switch (e->kind) {
    case BoolExpr::K::Atom: return bx_atom(neg_atom(e->atom));
    case BoolExpr::K::And: {
        std::vector<BoolExprPtr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids) ks.push_back(bx_neg(k));
        return bx_or(std::move(ks));
    }
    case BoolExpr::K::Or: {
        std::vector<BoolExprPtr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids) ks.push_back(bx_neg(k));
        return bx_and(std::move(ks));
    }
    }
    return e;
}

inline Term term_subst(const Term& t, const std::map<std::string, Term>& m) {
    Term out(t.k);
    for (const auto& [x, c] : t.parts) {
        auto it = m.find(x);
        if (it != m.end())
            out += it->second.scaled(c);
        else
            out += Term::var(x, c);
    }
    return out;
}

inline BoolExprPtr bx_subst(const BoolExprPtr& e, const std::map<std::string, Term>& m) {
    switch (e->kind) {
    case BoolExpr::K::Atom:
        return bx_atom(LinAtom{term_subst(e->atom.lhs, m), e->atom.rel, term_subst(e->atom.rhs, m)});
    case BoolExpr::K::And: {
        std::vector<BoolExprPtr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids) ks.push_back(bx_subst(k, m));
        return bx_and(std::move(ks));
    }
    case BoolExpr::K::Or: {
        std::vector<BoolExprPtr> ks;
        ks.reserve(e->kids.size());
        for (const auto& k : e->kids) ks.push_back(bx_subst(k, m));
        return bx_or(std::move(ks));
    }
    }
    return e;
}

inline void bx_vars_into(const BoolExprPtr& e, std::set<std::string>& out) {
    if (e->kind == BoolExpr::K::Atom) {
        e->atom.lhs.vars_into(out);
        e->atom.rhs.vars_into(out);
        return;
    }
    for (const auto& k : e->kids) bx_vars_into(k, out);
}

template <typename Lookup>
    requires std::invocable<Lookup&, const std::string&>
bool atom_holds(const LinAtom& a, Lookup&& f) {
    Val l = a.lhs.eval(f), r = a.rhs.eval(f);
    switch (a.rel) {
    case Rel::Eq: return l == r;
    case Rel::Ne: return l != r;
    case Rel::Le: return l <= r;
    case Rel::Lt: return l < r;
    }
    return false;
}

template <typename Lookup>
    requires std::invocable<Lookup&, const std::string&>
bool bx_eval(const BoolExprPtr& e, Lookup&& f) {
    switch (e->kind) {
    case BoolExpr::K::Atom: return atom_holds(e->atom, f);
    case BoolExpr::K::And:
        for (const auto& k : e->kids)
            if (!bx_eval(k, f)) return false;
        return true;
    case BoolExpr::K::Or:
        for (const auto& k : e->kids)
            if (bx_eval(k, f)) return true;
        return false;
    }
    return false;
}

inline bool bx_eval(const BoolExprPtr& e, const Valuation& v) {
    return bx_eval(e, [&](const std::string& x) -> Val {
        auto it = v.find(x);
        if (it == v.end()) throw eval_error("no value for variable " + x);
        return it->second;
    });
}

inline std::string to_string(const BoolExprPtr& e) {
    switch (e->kind) {
    case BoolExpr::K::Atom: return to_string(e->atom);
    case BoolExpr::K::And: {
        if (e->kids.empty()) return "true";
        std::string s = "(";
        for (size_t i = 0; i < e->kids.size(); ++i) {
            if (i) s += " /\\ ";
            s += to_string(e->kids[i]);
        }
        return s + ")";
    }
    case BoolExpr::K::Or: {
        if (e->kids.empty()) return "false";
        std::string s = "(";
        for (size_t i = 0; i < e->kids.size(); ++i) {
            if (i) s += " \\/ ";
            s += to_string(e->kids[i]);
        }
        return s + ")";
    }
    }
    return "";
}

// Prenex sentence with alternation depth at most two: EX exists ALL forall . body.
// Either block may be empty.
struct ArithSentence {
    std::vector<std::string> exists;
    std::vector<std::string> forall;
    BoolExprPtr body = bx_true();
};

} // namespace asl
