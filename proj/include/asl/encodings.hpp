#pragma once

#include <set>
#include <string>
#include <vector>

#include <asl/arith.hpp>
#include <asl/errors.hpp>
#include <asl/syntax.hpp>

// The arithmetic encodings of symbolic-heap problems: array abstraction,
// the satisfiability formula gamma, the biabduction formula beta with its
// term set, and the entailment pieces phi, psi1, psi2, chi. All of them are
// pure functions producing negation-normal BoolExprs.

namespace asl {

// Every points-to c |-> d becomes the one-cell array arr(c,c); pure part
// and existing arrays are untouched.
inline SymbolicHeap abstr(const SymbolicHeap& a) {
    if (!is_quantifier_free(a)) throw input_error("abstr: quantified input");
    SymbolicHeap out = a;
    for (auto& s : out.spatial)
        if (const auto* p = std::get_if<PointsTo>(&s)) s = ArraySeg{p->src, p->src};
    return out;
}

// gamma(A) = Pi /\ (lo_i <= hi_i for every array) /\ pairwise disjointness,
// over the array abstraction of A. Satisfiable exactly when some heap
// satisfies A under the given stack.
inline BoolExprPtr gamma(const SymbolicHeap& a) {
    if (!is_quantifier_free(a)) throw input_error("gamma: quantified input");
    auto arrays = arrays_of(abstr(a));
    std::vector<BoolExprPtr> conj;
    for (const auto& p : a.pure) conj.push_back(bx_atom(p));
    for (const auto& s : arrays) conj.push_back(bx_atom(le_atom(s.lo, s.hi)));
    for (size_t i = 0; i < arrays.size(); ++i)
        for (size_t j = i + 1; j < arrays.size(); ++j)
            conj.push_back(bx_or({bx_atom(lt_atom(arrays[i].hi, arrays[j].lo)),
                                  bx_atom(lt_atom(arrays[j].hi, arrays[i].lo))}));
    return bx_and(std::move(conj));
}

// T(A,B): every term of A and B, plus the successor of each array upper
// bound and of each points-to source, on both sides. Canonical-form
// duplicates collapse; the result is sorted in canonical term order.
inline std::vector<Term> abd_terms(const SymbolicHeap& a, const SymbolicHeap& b) {
    std::set<Term> ts;
    for (const SymbolicHeap* h : {&a, &b}) {
        for (const auto& t : terms_of(*h)) ts.insert(t);
        for (const auto& s : arrays_of(*h)) ts.insert(s.hi.succ());
        for (const auto& p : ptos_of(*h)) ts.insert(p.src.succ());
    }
    return {ts.begin(), ts.end()};
}

// beta(A,B) = gamma(A) /\ gamma(B)
//           /\ (every B points-to source lands outside every A array)
//           /\ (A and B points-tos with equal sources have equal contents)
inline BoolExprPtr beta(const SymbolicHeap& a, const SymbolicHeap& b) {
    if (!is_quantifier_free(a) || !is_quantifier_free(b))
        throw input_error("beta: quantified input");
    std::vector<BoolExprPtr> conj = {gamma(a), gamma(b)};
    auto a_arrays = arrays_of(a);
    auto a_ptos = ptos_of(a);
    auto b_ptos = ptos_of(b);
    for (const auto& q : b_ptos)
        for (const auto& s : a_arrays)
            conj.push_back(
                bx_or({bx_atom(lt_atom(q.src, s.lo)), bx_atom(lt_atom(s.hi, q.src))}));
    for (const auto& p : a_ptos)
        for (const auto& q : b_ptos)
            conj.push_back(
                bx_or({bx_atom(ne_atom(p.src, q.src)), bx_atom(eq_atom(p.dst, q.dst))}));
    return bx_and(std::move(conj));
}

// Quantifier-free phi(A,B): some cell covered by A escapes every array of B.
// Quantifiers are dropped and pointers abstracted before reading endpoints;
// the witness cell can always be taken from the lower endpoints of A or the
// successors of B's upper endpoints, which eliminates the quantifier.
inline BoolExprPtr phi_qf(const SymbolicHeap& a, const SymbolicHeap& b) {
    auto as = arrays_of(abstr(qf_part(a)));
    auto bs = arrays_of(abstr(qf_part(b)));
    auto alpha = [&](const Term& x) {
        std::vector<BoolExprPtr> inside;
        for (const auto& s : as)
            inside.push_back(bx_and({bx_atom(le_atom(s.lo, x)), bx_atom(le_atom(x, s.hi))}));
        std::vector<BoolExprPtr> conj = {bx_or(std::move(inside))};
        for (const auto& s : bs)
            conj.push_back(bx_or({bx_atom(lt_atom(x, s.lo)), bx_atom(lt_atom(s.hi, x))}));
        return bx_and(std::move(conj));
    };
    std::vector<BoolExprPtr> disj;
    for (const auto& s : as) disj.push_back(alpha(s.lo));
    for (const auto& s : bs) disj.push_back(alpha(s.hi.succ()));
    return bx_or(std::move(disj));
}

// psi1(A,B): some array of A covers a points-to source of B.
inline BoolExprPtr psi1(const SymbolicHeap& a, const SymbolicHeap& b) {
    std::vector<BoolExprPtr> disj;
    for (const auto& s : arrays_of(qf_part(a)))
        for (const auto& q : ptos_of(qf_part(b)))
            disj.push_back(bx_and({bx_atom(le_atom(s.lo, q.src)), bx_atom(le_atom(q.src, s.hi))}));
    return bx_or(std::move(disj));
}

// psi2(A,B): matching points-to sources with mismatched contents.
inline BoolExprPtr psi2(const SymbolicHeap& a, const SymbolicHeap& b) {
    std::vector<BoolExprPtr> disj;
    for (const auto& p : ptos_of(qf_part(a)))
        for (const auto& q : ptos_of(qf_part(b)))
            disj.push_back(bx_and({bx_atom(eq_atom(p.src, q.src)), bx_atom(ne_atom(p.dst, q.dst))}));
    return bx_or(std::move(disj));
}

namespace detail {

// Rename b's bound variables apart from the given outside names.
inline SymbolicHeap rename_bound_apart(const SymbolicHeap& b, const std::set<std::string>& outside) {
    FreshNames pool;
    for (const auto& v : outside) pool.reserve(v);
    for (const auto& v : all_vars(b)) pool.reserve(v);
    std::map<std::string, std::string> ren;
    for (const auto& z : b.bound)
        if (outside.count(z) && !ren.count(z)) ren.emplace(z, pool.fresh_plain(z));
    if (ren.empty()) return b;
    SymbolicHeap out;
    for (const auto& z : b.bound) out.bound.push_back(ren.count(z) ? ren.at(z) : z);
    for (const auto& p : b.pure)
        out.pure.push_back({rename_term(p.lhs, ren), p.rel, rename_term(p.rhs, ren)});
    for (const auto& s : b.spatial) out.spatial.push_back(rename_spatial(s, ren));
    return out;
}

} // namespace detail

// chi(A,B) = gamma(A) /\ ALL z . (!gamma(B') \/ phi(A,B') \/ phi(B',A)
//                                 \/ psi1(A,B') \/ psi2(A,B'))
// where z are B's bound variables (renamed apart) and B' is B's body.
// Satisfiable exactly when A |= B fails on some stack. The existential
// block lists the free variables, so the result plugs straight into
// check_exists / check_exists_forall.
inline ArithSentence chi(const SymbolicHeap& a, const SymbolicHeap& b_in) {
    if (!is_quantifier_free(a)) throw input_error("chi: quantified left-hand side");
    SymbolicHeap b = detail::rename_bound_apart(b_in, all_vars(a));
    std::set<std::string> bound(b.bound.begin(), b.bound.end());
    for (const auto& p : ptos_of(b)) {
        std::set<std::string> dv;
        p.dst.vars_into(dv);
        for (const auto& v : dv)
            if (bound.count(v))
                throw restriction_error(
                    "chi: bound variable " + v +
                    " appears in a points-to destination on the right-hand side");
    }
    SymbolicHeap qb = qf_part(b);
    BoolExprPtr matrix = bx_or({bx_neg(gamma(qb)), phi_qf(a, qb), phi_qf(qb, a), psi1(a, qb),
                                psi2(a, qb)});
    ArithSentence s;
    s.body = bx_and({gamma(a), matrix});
    s.forall = b.bound;
    std::set<std::string> fv;
    bx_vars_into(s.body, fv);
    for (const auto& v : fv)
        if (!bound.count(v)) s.exists.push_back(v);
    return s;
}

} // namespace asl
