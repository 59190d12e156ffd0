#pragma once

#include <asl/encodings.hpp>
#include <asl/semantics.hpp>
#include <asl/solver.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace asl {

enum class EntailStatus { Valid, Invalid, Unknown };

inline std::string to_string(EntailStatus st) {
    switch (st) {
    case EntailStatus::Valid: return "Valid";
    case EntailStatus::Invalid: return "Invalid";
    default: return "Unknown";
    }
}

struct EntailResult {
    EntailStatus status = EntailStatus::Unknown;
    // Present exactly when Invalid; satisfies the left side and falsifies the right.
    std::optional<std::pair<Stack, Heap>> countermodel;
};

// True iff no bound variable of b occurs in a points-to destination. The chi
// encoding is exact only under this restriction; the bounded oracle remains
// available for heaps outside it.
inline bool check_restriction(const SymbolicHeap& b) {
    if (b.bound.empty()) return true;
    std::set<std::string> bound(b.bound.begin(), b.bound.end());
    for (const auto& p : ptos_of(b)) {
        std::set<std::string> dv;
        p.dst.vars_into(dv);
        for (const auto& v : dv)
            if (bound.count(v)) return false;
    }
    return true;
}

namespace detail {

inline Val stack_heap_span(const Stack& s, const Heap& h) {
    Val m = 0;
    for (const auto& [v, x] : s.m) m = std::max(m, x);
    for (const auto& [addr, val] : h.cells) m = std::max(m, std::max(addr, val));
    return m;
}

inline Val max_constant(const SymbolicHeap& a) {
    Val m = 0;
    for (const auto& t : terms_of(a)) m = std::max(m, t.k);
    return m;
}

// Countermodel from a chi model: the stack extends the model with zeros for
// variables chi never mentions, the heap is a's forced footprint with every
// array cell set to 1 + max of b's points-to destination values. The offset
// keeps array cells distinct from every s(w_j), and the restriction keeps the
// destinations independent of b's bound variables, so one heap refutes every
// instantiation of the prefix.
inline std::pair<Stack, Heap> chi_countermodel(const SymbolicHeap& a, const SymbolicHeap& b,
                                               const Valuation& model) {
    Stack s;
    for (const auto& [v, x] : model) s.set(v, x);
    std::set<std::string> fv = free_vars(a);
    for (const auto& v : free_vars(b)) fv.insert(v);
    for (const auto& v : fv)
        if (!s.m.count(v)) s.set(v, 0);
    Val fill = 0;
    for (const auto& p : ptos_of(b)) fill = std::max(fill, eval_term(s, p.dst) + 1);
    auto fh = forced_heap(s, a);
    if (!fh) throw internal_error("entails: chi model admits no footprint on the left");
    Heap h = std::move(fh->base);
    for (Val c : fh->array_cells) h.cells[c] = fill;
    return {std::move(s), std::move(h)};
}

// Right sides outside the quantifier restriction are beyond the chi encoding:
// the refuting heap would need contents different from a quantified value.
// A bounded countermodel search can still refute soundly; a hit is re-checked
// with the binder range widened past everything the pair can reach, and only
// a verified refutation counts. No refutation means no verdict.
inline EntailResult refute_unrestricted(const SymbolicHeap& a, const SymbolicHeap& b) {
    Val width = std::max(max_constant(a), max_constant(b));
    std::set<std::string> vs = free_vars(a);
    for (const auto& v : free_vars(b)) vs.insert(v);
    width += vs.size() + b.bound.size() + 1;
    auto cm = oracle_find_countermodel(a, b, Bounds{width, width});
    if (cm) {
        Bounds vb{std::max(width, stack_heap_span(cm->first, cm->second) + max_constant(b) + 1),
                  0};
        if (holds(cm->first, cm->second, a) && !holds(cm->first, cm->second, b, vb)) {
            EntailResult out;
            out.status = EntailStatus::Invalid;
            out.countermodel = std::move(cm);
            return out;
        }
    }
    throw restriction_error(
        "entails: bound variable in a points-to destination on the right-hand side");
}

} // namespace detail

// Decides a |= b. Quantifier-free b is decided exactly; b with a bound prefix
// goes through the exists-forall loop and may come back Unknown at the round
// cap. Rejects quantified a. A right side outside the quantifier restriction
// is decided Invalid when a bounded search refutes it, and rejected otherwise.
inline EntailResult entails(const SymbolicHeap& a, const SymbolicHeap& b,
                            unsigned max_rounds = 64) {
    if (!is_quantifier_free(a)) throw input_error("entails: quantified left-hand side");
    if (!check_restriction(b)) return detail::refute_unrestricted(a, b);
    ArithSentence sent = chi(a, b);
    Solver sv;
    SolveResult r = sent.forall.empty() ? sv.check_exists(sent.body, sent.exists)
                                        : sv.check_exists_forall(sent, max_rounds);
    EntailResult out;
    if (r.status == Tri::Unsat) {
        out.status = EntailStatus::Valid;
    } else if (r.status == Tri::Unknown) {
        out.status = EntailStatus::Unknown;
    } else {
        out.status = EntailStatus::Invalid;
        out.countermodel = detail::chi_countermodel(a, b, r.model);
    }
    return out;
}

struct CrosscheckReport {
    bool agree = true;
    EntailStatus status = EntailStatus::Unknown; // checker verdict, if it made one
    bool oracle_found = false;
    std::optional<std::pair<Stack, Heap>> oracle_countermodel;
    std::optional<std::pair<SymbolicHeap, SymbolicHeap>> shrunk; // present iff !agree
    std::string note;
};

namespace detail {

inline CrosscheckReport crosscheck_one(const SymbolicHeap& a, const SymbolicHeap& b,
                                       const Bounds& bounds) {
    CrosscheckReport rep;
    EntailResult r;
    try {
        r = entails(a, b);
    } catch (const restriction_error&) {
        rep.oracle_countermodel = oracle_find_countermodel(a, b, bounds);
        rep.oracle_found = rep.oracle_countermodel.has_value();
        rep.note = "right side outside the quantifier restriction; oracle verdict only";
        return rep; // no checker claim to contradict
    }
    rep.status = r.status;
    rep.oracle_countermodel = oracle_find_countermodel(a, b, bounds);
    rep.oracle_found = rep.oracle_countermodel.has_value();
    switch (r.status) {
    case EntailStatus::Valid:
        rep.agree = !rep.oracle_found;
        if (!rep.agree) rep.note = "checker Valid but the oracle found a countermodel in bounds";
        break;
    case EntailStatus::Invalid: {
        const auto& [s, h] = *r.countermodel;
        // The falsification check must let b's bound variables range past every
        // value the countermodel or b's own offsets can reach.
        Bounds vb = bounds;
        vb.stack_bound =
            std::max(vb.stack_bound, stack_heap_span(s, h) + max_constant(b) + 1);
        bool ok = holds(s, h, a) && !holds(s, h, b, vb);
        rep.agree = ok;
        if (!ok)
            rep.note = "checker countermodel failed direct verification";
        else if (!rep.oracle_found)
            rep.note = "countermodel exceeds oracle bounds; confirmed by direct checks";
        break;
    }
    case EntailStatus::Unknown:
        rep.note = "checker Unknown at the round cap; oracle verdict recorded";
        break;
    }
    return rep;
}

} // namespace detail

// Differential harness: runs the checker and the bounded oracle on the same
// pair. Invalid verdicts are accepted on a directly verified countermodel
// (the oracle may legitimately miss models past its bounds); Valid verdicts
// require the oracle to come up empty. A disagreement is shrunk by greedily
// dropping pure and spatial atoms while it survives, and the minimal pair is
// returned for diagnosis.
inline CrosscheckReport entails_oracle_crosscheck(const SymbolicHeap& a, const SymbolicHeap& b,
                                                  const Bounds& bounds) {
    CrosscheckReport rep = detail::crosscheck_one(a, b, bounds);
    if (rep.agree) return rep;
    auto disagrees = [&](const SymbolicHeap& xa, const SymbolicHeap& xb) {
        try {
            return !detail::crosscheck_one(xa, xb, bounds).agree;
        } catch (const std::exception&) {
            return false;
        }
    };
    SymbolicHeap sa = a, sb = b;
    auto shrink_side = [&](SymbolicHeap& target, bool is_lhs) {
        const SymbolicHeap& other = is_lhs ? sb : sa;
        for (size_t i = 0; i < target.pure.size(); ++i) {
            SymbolicHeap cand = target;
            cand.pure.erase(cand.pure.begin() + i);
            if (is_lhs ? disagrees(cand, other) : disagrees(other, cand)) {
                target = std::move(cand);
                return true;
            }
        }
        for (size_t i = 0; i < target.spatial.size(); ++i) {
            SymbolicHeap cand = target;
            cand.spatial.erase(cand.spatial.begin() + i);
            if (is_lhs ? disagrees(cand, other) : disagrees(other, cand)) {
                target = std::move(cand);
                return true;
            }
        }
        return false;
    };
    while (shrink_side(sa, true) || shrink_side(sb, false)) {}
    std::set<std::string> sbv = all_vars(qf_part(sb));
    sb.bound.erase(std::remove_if(sb.bound.begin(), sb.bound.end(),
                                  [&](const std::string& z) { return !sbv.count(z); }),
                   sb.bound.end());
    rep.shrunk.emplace(std::move(sa), std::move(sb));
    return rep;
}

} // namespace asl
