#pragma once

#include <asl/encodings.hpp>
#include <asl/entailment.hpp>
#include <asl/satcheck.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace asl {

// A total order over abd_terms(a, b) derived from a beta model. The order is
// carried twice: as explicit atoms (one per unordered term pair, so the seed
// entails beta by rank comparison alone) and as the inducing valuation. Every
// model of the order ranks the terms identically, so order queries evaluate
// the valuation directly instead of calling a solver.
struct SolutionSeed {
    PureFormula order;
    std::vector<Term> terms; // abd_terms of the instance, sorted
    Valuation model;         // the beta model the order was read off
};

struct CoverResult {
    PureFormula extra_pure; // primed definitions p' + 1 = t, one per fresh prime
    std::vector<SpatialAtom> spatial;
};

namespace detail {

inline Val seed_value(const SolutionSeed& seed, const Term& t) {
    Val v = t.k;
    for (const auto& [name, coeff] : t.parts) {
        auto it = seed.model.find(name);
        if (it == seed.model.end())
            throw eval_error("seed model does not cover variable " + name);
        v += coeff * it->second;
    }
    return v;
}

inline bool seed_lt(const SolutionSeed& s, const Term& a, const Term& b) {
    return seed_value(s, a) < seed_value(s, b);
}
inline bool seed_le(const SolutionSeed& s, const Term& a, const Term& b) {
    return seed_value(s, a) <= seed_value(s, b);
}
inline bool seed_eq(const SolutionSeed& s, const Term& a, const Term& b) {
    return seed_value(s, a) == seed_value(s, b);
}

// Mints primed predecessor variables: predecessor(t) is a fresh variable p
// with the defining atom p + 1 = t appended to out on first use. One pool
// spans all covers of a solve, keeping primed names globally fresh and each
// definition emitted exactly once.
class PrimePool {
public:
    explicit PrimePool(std::set<std::string> used) : names_(std::move(used)) {}

    Term predecessor(const Term& t, PureFormula& out) {
        auto it = memo_.find(t);
        if (it != memo_.end()) return Term::var(it->second);
        std::string base;
        for (char c : to_string(t))
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') base += c;
        if (base.empty() || !std::isalpha(static_cast<unsigned char>(base[0]))) base = "p";
        std::string name = names_.fresh_primed(base);
        memo_.emplace(t, name);
        out.push_back(eq_atom(Term::var(name) + Term(1), t));
        return Term::var(name);
    }

private:
    FreshNames names_;
    std::map<Term, std::string> memo_;
};

// Covers arr(e, f) with fresh arrays around the blocks a already provides.
// Iterative form of the recursion: each pass either finishes or moves e
// strictly past one of a's blocks, so the pass count is bounded by the block
// count (the blocks are pairwise disjoint under any seed).
inline void arrcov_into(const SymbolicHeap& a, const SolutionSeed& seed, Term e, const Term& f,
                        PrimePool& pool, CoverResult& out) {
    std::vector<ArraySeg> blocks = arrays_of(abstr(a));
    for (size_t pass = 0; pass <= blocks.size(); ++pass) {
        if (seed_lt(seed, f, e)) return; // nothing to cover
        const ArraySeg* covering = nullptr;
        for (const auto& blk : blocks)
            if (seed_le(seed, blk.lo, e) && seed_le(seed, e, blk.hi)) {
                covering = &blk;
                break;
            }
        if (covering) { // left endpoint already provided; skip past the block
            e = covering->hi + Term(1);
            continue;
        }
        const ArraySeg* next = nullptr; // least block start inside (e, f]
        for (const auto& blk : blocks)
            if (seed_lt(seed, e, blk.lo) && seed_le(seed, blk.lo, f) &&
                (!next || seed_lt(seed, blk.lo, next->lo)))
                next = &blk;
        if (!next) { // no part of arr(e, f) covered
            out.spatial.push_back(ArraySeg{std::move(e), f});
            return;
        }
        // Fill up to just before the next block. The predecessor is safe to
        // name: e < next->lo under the seed, so next->lo is nonzero.
        Term pred = pool.predecessor(next->lo, out.extra_pure);
        out.spatial.push_back(ArraySeg{std::move(e), std::move(pred)});
        e = next->hi + Term(1);
    }
    throw internal_error("arrcov: pass bound exceeded");
}

inline void ptocov_into(const SymbolicHeap& a, const SolutionSeed& seed, const Term& e,
                        const Term& f, CoverResult& out) {
    for (const auto& p : ptos_of(a))
        if (seed_eq(seed, p.src, e)) return; // a points-to already sits here
    for (const auto& r : arrays_of(a))
        if (seed_le(seed, r.lo, e) && seed_le(seed, e, r.hi)) return; // inside an array
    out.spatial.push_back(PointsTo{e, f});
}

inline void require_seed_term(const SolutionSeed& seed, const Term& t, const char* who) {
    if (std::find(seed.terms.begin(), seed.terms.end(), t) == seed.terms.end())
        throw input_error(std::string(who) + ": term " + to_string(t) +
                          " outside the seed's term set");
}

// The negation of a seed's total order, phrased over its transitive
// reduction: the chain of adjacent comparisons (terms sorted by value)
// entails every induced pair, so blocking the chain blocks exactly the
// models inducing this order while keeping the disjunction linear in the
// term count rather than quadratic.
inline BoolExprPtr seed_blocker(const SolutionSeed& seed) {
    std::vector<const Term*> by_value;
    by_value.reserve(seed.terms.size());
    for (const auto& t : seed.terms) by_value.push_back(&t);
    std::stable_sort(by_value.begin(), by_value.end(), [&](const Term* a, const Term* b) {
        return seed_value(seed, *a) < seed_value(seed, *b);
    });
    std::vector<BoolExprPtr> chain;
    for (size_t i = 0; i + 1 < by_value.size(); ++i) {
        const Term &a = *by_value[i], &b = *by_value[i + 1];
        chain.push_back(bx_atom(seed_value(seed, a) == seed_value(seed, b) ? eq_atom(a, b)
                                                                           : lt_atom(a, b)));
    }
    return bx_neg(bx_and(std::move(chain)));
}

// Solves beta (plus any blocking constraints) and reads a total order off
// the model, per term pair: e < f, f < e, or e = f. Variables the solver
// left unmentioned default to zero so every term evaluates.
inline std::optional<SolutionSeed> seed_from_beta(const SymbolicHeap& a, const SymbolicHeap& b,
                                                  const std::vector<BoolExprPtr>& blockers) {
    std::vector<BoolExprPtr> parts{beta(a, b)};
    parts.insert(parts.end(), blockers.begin(), blockers.end());
    BoolExprPtr body = bx_and(std::move(parts));
    SolutionSeed seed;
    seed.terms = abd_terms(a, b);
    std::set<std::string> vars;
    bx_vars_into(body, vars);
    for (const auto& t : seed.terms) t.vars_into(vars);
    Solver sv;
    auto r = sv.check_exists(body, {vars.begin(), vars.end()});
    if (r.status != Tri::Sat) return std::nullopt;
    seed.model = std::move(r.model);
    for (const auto& v : vars) seed.model.emplace(v, 0);
    for (size_t i = 0; i < seed.terms.size(); ++i)
        for (size_t j = i + 1; j < seed.terms.size(); ++j) {
            const Term &ti = seed.terms[i], &tj = seed.terms[j];
            Val vi = seed_value(seed, ti), vj = seed_value(seed, tj);
            if (vi < vj)
                seed.order.push_back(lt_atom(ti, tj));
            else if (vj < vi)
                seed.order.push_back(lt_atom(tj, ti));
            else
                seed.order.push_back(eq_atom(ti, tj));
        }
    return seed;
}

inline void check_seed_inputs(const SymbolicHeap& a, const SymbolicHeap& b, const char* who) {
    if (!is_quantifier_free(a) || !is_quantifier_free(b))
        throw input_error(std::string(who) + ": quantified input");
    if (is_sat(a).status != Tri::Sat)
        throw input_error(std::string(who) + ": unsatisfiable left side");
    if (is_sat(b).status != Tri::Sat)
        throw input_error(std::string(who) + ": unsatisfiable right side");
}

} // namespace detail

// Seed from the first beta model, or none exactly when beta is unsatisfiable,
// which certifies that the instance has no solution at all.
inline std::optional<SolutionSeed> derive_seed(const SymbolicHeap& a, const SymbolicHeap& b) {
    detail::check_seed_inputs(a, b, "derive_seed");
    return detail::seed_from_beta(a, b, {});
}

// Up to limit seeds with pairwise distinct orders: each found order is
// blocked (its negation conjoined) and beta is re-solved.
inline std::vector<SolutionSeed> enumerate_seeds(const SymbolicHeap& a, const SymbolicHeap& b,
                                                 unsigned limit) {
    detail::check_seed_inputs(a, b, "enumerate_seeds");
    std::vector<SolutionSeed> out;
    std::vector<BoolExprPtr> blockers;
    while (out.size() < limit) {
        auto seed = detail::seed_from_beta(a, b, blockers);
        if (!seed) break;
        blockers.push_back(detail::seed_blocker(*seed));
        out.push_back(std::move(*seed));
    }
    return out;
}

inline CoverResult arrcov(const SymbolicHeap& a, const SolutionSeed& seed, const Term& e,
                          const Term& f) {
    if (!is_quantifier_free(a)) throw input_error("arrcov: quantified heap");
    detail::require_seed_term(seed, e, "arrcov");
    detail::require_seed_term(seed, f, "arrcov");
    std::set<std::string> used = all_vars(a);
    for (const auto& [v, x] : seed.model) used.insert(v);
    detail::PrimePool pool(std::move(used));
    CoverResult out;
    detail::arrcov_into(a, seed, e, f, pool, out);
    return out;
}

inline CoverResult ptocov(const SymbolicHeap& a, const SolutionSeed& seed, const Term& e,
                          const Term& f) {
    if (!is_quantifier_free(a)) throw input_error("ptocov: quantified heap");
    detail::require_seed_term(seed, e, "ptocov");
    detail::require_seed_term(seed, f, "ptocov");
    CoverResult out;
    detail::ptocov_into(a, seed, e, f, out);
    return out;
}

struct BiabductionSolution {
    SymbolicHeap x, y;      // antiframe and frame; both carry delta_hat as pure part
    PureFormula delta_hat;  // seed order plus the covers' primed definitions
    bool verified = false;  // set once the independent check passed
    Tri by_sat = Tri::Unknown; // diagnostic: is b * y satisfiable?
};

struct BiabductionOptions {
    bool weaken = false;
    unsigned max_rounds = 64; // entailment round cap for quantified right sides
};

enum class VerifyOutcome { Pass, Fail, Unknown };

inline std::string to_string(VerifyOutcome v) {
    switch (v) {
    case VerifyOutcome::Pass: return "Pass";
    case VerifyOutcome::Fail: return "Fail";
    default: return "Unknown";
    }
}

// The right side as actually solved against: bound prefix renamed apart from
// a's variables, then dropped. Deterministic, so separate calls agree.
inline SymbolicHeap rhs_body(const SymbolicHeap& a, const SymbolicHeap& b) {
    return qf_part(detail::rename_bound_apart(b, all_vars(a)));
}

// Independent check of the solution conditions: a * x satisfiable and
// a * x |= b * y, using only the satisfiability and entailment engines.
// b's binders are renamed apart from y before lifting so y's variables are
// not captured. Unknown surfaces the entailment round cap, never a guess.
inline VerifyOutcome verify_solution(const SymbolicHeap& a, const SymbolicHeap& b,
                                     const BiabductionSolution& sol, unsigned max_rounds = 64) {
    SymbolicHeap ax = star_lift(a, sol.x);
    if (is_sat(ax).status != Tri::Sat) return VerifyOutcome::Fail;
    SymbolicHeap by = star_lift(detail::rename_bound_apart(b, all_vars(sol.y)), sol.y);
    EntailResult r = entails(ax, by, max_rounds);
    switch (r.status) {
    case EntailStatus::Valid: return VerifyOutcome::Pass;
    case EntailStatus::Invalid: return VerifyOutcome::Fail;
    default: return VerifyOutcome::Unknown;
    }
}

// Assembles (X, Y) from a seed per the cover construction: X covers b's
// atoms against a, Y covers a's atoms against b's body, and both share
// delta_hat = order /\ primed definitions. The result is verified against
// the quantifier-free body, which is exact and transfers to b itself (the
// body entails the quantified heap witness-wise).
inline BiabductionSolution build_solution(const SymbolicHeap& a, const SymbolicHeap& b,
                                          const SolutionSeed& seed,
                                          const BiabductionOptions& opts = {}) {
    SymbolicHeap qb = rhs_body(a, b);
    std::set<std::string> used = all_vars(a);
    for (const auto& v : all_vars(b)) used.insert(v);
    for (const auto& v : all_vars(qb)) used.insert(v);
    for (const auto& [v, x] : seed.model) used.insert(v);
    detail::PrimePool pool(std::move(used));
    CoverResult cx, cy;
    for (const auto& r : arrays_of(qb)) detail::arrcov_into(a, seed, r.lo, r.hi, pool, cx);
    for (const auto& p : ptos_of(qb)) detail::ptocov_into(a, seed, p.src, p.dst, cx);
    for (const auto& r : arrays_of(a)) detail::arrcov_into(qb, seed, r.lo, r.hi, pool, cy);
    for (const auto& p : ptos_of(a)) detail::ptocov_into(qb, seed, p.src, p.dst, cy);
    BiabductionSolution sol;
    sol.delta_hat = seed.order;
    for (auto& at : cx.extra_pure) sol.delta_hat.push_back(std::move(at));
    for (auto& at : cy.extra_pure) sol.delta_hat.push_back(std::move(at));
    sol.x = SymbolicHeap{{}, sol.delta_hat, std::move(cx.spatial)};
    sol.y = SymbolicHeap{{}, sol.delta_hat, std::move(cy.spatial)};
    if (verify_solution(a, qb, sol, opts.max_rounds) != VerifyOutcome::Pass)
        throw internal_error("build_solution: constructed solution failed verification");
    sol.verified = true;
    sol.by_sat = is_sat(star_lift(detail::rename_bound_apart(b, all_vars(sol.y)), sol.y)).status;
    return sol;
}

namespace detail {

// Primed definitions whose variable still appears in a spatial atom pin that
// atom's endpoint; dropping them would leave the endpoint unconstrained.
inline bool pins_spatial_prime(const PureAtom& at, const std::set<std::string>& spatial_vars) {
    if (at.rel != Rel::Eq) return false;
    for (const Term* t : {&at.lhs, &at.rhs})
        if (t->parts.size() == 1 && t->parts[0].second == 1 && t->k == 1 &&
            t->parts[0].first.find('\'') != std::string::npos &&
            spatial_vars.count(t->parts[0].first))
            return true;
    return false;
}

// Identical spatial multisets with the right side's pure atoms a subset of
// the left's: entailment holds outright, no engine needed. Never claims
// true spuriously, so callers can fall through to the full check.
inline bool trivially_entails(const SymbolicHeap& lhs, const SymbolicHeap& rhs) {
    if (!is_quantifier_free(lhs) || !is_quantifier_free(rhs)) return false;
    auto ls = lhs.spatial, rs = rhs.spatial;
    std::sort(ls.begin(), ls.end());
    std::sort(rs.begin(), rs.end());
    if (ls != rs) return false;
    auto lp = lhs.pure, rp = rhs.pure;
    std::sort(lp.begin(), lp.end());
    std::sort(rp.begin(), rp.end());
    return std::includes(lp.begin(), lp.end(), rp.begin(), rp.end());
}

// Acceptance check for one weakening step, equivalent to verify_solution
// but cheaper: the left side's satisfiability is invariant across steps
// (dropping shared pure conjuncts only grows its model set, and no step
// touches x), so only the entailment is at stake, and the common shape
// after a pure drop short-circuits syntactically.
inline bool weaken_step_ok(const SymbolicHeap& a, const SymbolicHeap& b,
                           const BiabductionSolution& cand, unsigned max_rounds) {
    SymbolicHeap ax = star_lift(a, cand.x);
    SymbolicHeap by = star_lift(rename_bound_apart(b, all_vars(cand.y)), cand.y);
    if (trivially_entails(ax, by)) return true;
    return entails(ax, by, max_rounds).status == EntailStatus::Valid;
}

} // namespace detail

// Weakening, in two sound directions. First, frame atoms need not promise
// cell contents: each points-to in y is relaxed to its one-cell array when
// verification still passes (y sits on the entailed side, and t |-> u entails
// arr(t, t)). Then pure conjuncts of delta_hat are dropped greedily, keeping
// primed definitions still mentioned by a spatial atom. Every kept change is
// re-verified, so the output is verified and entailed by the input.
inline BiabductionSolution weaken_solution(const SymbolicHeap& a, const SymbolicHeap& b,
                                           const BiabductionSolution& sol,
                                           unsigned max_rounds = 64) {
    BiabductionSolution cur = sol;
    for (size_t i = 0; i < cur.y.spatial.size(); ++i) {
        const auto* p = std::get_if<PointsTo>(&cur.y.spatial[i]);
        if (!p) continue;
        BiabductionSolution cand = cur;
        cand.y.spatial[i] = ArraySeg{p->src, p->src};
        if (detail::weaken_step_ok(a, b, cand, max_rounds)) {
            cand.verified = true;
            cur = std::move(cand);
        }
    }
    std::set<std::string> spatial_vars;
    for (const auto& at : cur.x.spatial) spatial_vars_into(at, spatial_vars);
    for (const auto& at : cur.y.spatial) spatial_vars_into(at, spatial_vars);
    bool changed = true;
    while (changed) {
        changed = false;
        size_t i = 0;
        while (i < cur.delta_hat.size()) {
            if (detail::pins_spatial_prime(cur.delta_hat[i], spatial_vars)) {
                ++i;
                continue;
            }
            BiabductionSolution cand = cur;
            cand.delta_hat.erase(cand.delta_hat.begin() + static_cast<long>(i));
            cand.x.pure = cand.delta_hat;
            cand.y.pure = cand.delta_hat;
            if (detail::weaken_step_ok(a, b, cand, max_rounds)) {
                cand.verified = true;
                cur = std::move(cand); // keep scanning from the same index
                changed = true;
            } else {
                ++i;
            }
        }
    }
    return cur;
}

// Full pipeline: check the instance, reduce a quantified right side to its
// body, derive a seed, build and verify (X, Y). Returns nothing exactly when
// beta is unsatisfiable, which certifies no solution exists.
inline std::optional<BiabductionSolution> solve_biabduction(const SymbolicHeap& a,
                                                            const SymbolicHeap& b,
                                                            const BiabductionOptions& opts = {}) {
    if (!is_quantifier_free(a)) throw input_error("solve_biabduction: quantified left side");
    if (!check_restriction(b))
        throw restriction_error(
            "solve_biabduction: bound variable in a points-to destination on the right");
    if (is_sat(a).status != Tri::Sat)
        throw input_error("solve_biabduction: unsatisfiable left side");
    if (is_sat(b).status != Tri::Sat)
        throw input_error("solve_biabduction: unsatisfiable right side");
    SymbolicHeap qb = rhs_body(a, b);
    auto seed = detail::seed_from_beta(a, qb, {});
    if (!seed) return std::nullopt;
    BiabductionSolution sol = build_solution(a, b, *seed, opts);
    if (opts.weaken) sol = weaken_solution(a, b, sol, opts.max_rounds);
    return sol;
}

} // namespace asl
