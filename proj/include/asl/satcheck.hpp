#pragma once

#include <optional>
#include <set>
#include <utility>

#include <asl/encodings.hpp>
#include <asl/semantics.hpp>
#include <asl/solver.hpp>

// Satisfiability of symbolic heaps, reduced to pure arithmetic: A is
// satisfiable iff gamma(qf(A)) has a solution over the naturals. The
// quantifier prefix never matters here, so it is stripped up front.

namespace asl {

struct SatResult {
    Tri status = Tri::Unsat; // Sat or Unsat; the reduction is complete
    std::optional<std::pair<Stack, Heap>> witness;
};

inline SatResult is_sat(const SymbolicHeap& a, bool want_witness = false) {
    SymbolicHeap q = qf_part(a);
    BoolExprPtr g = gamma(q);
    // gamma never mentions points-to contents, but the witness stack must
    // bind them, so solve over every variable of the heap.
    std::set<std::string> names = all_vars(q);
    bx_vars_into(g, names);
    Solver sv;
    auto r = sv.check_exists(g, {names.begin(), names.end()});
    SatResult out;
    out.status = r.status;
    if (out.status != Tri::Sat || !want_witness) return out;

    Stack s;
    for (const auto& [v, x] : r.model) s.set(v, x);
    auto fp = detail::forced_footprint(s, q.spatial);
    if (!fp) throw internal_error("is_sat: model admits no footprint");
    Heap h;
    for (const auto& c : *fp)
        for (Val addr = c.lo;; ++addr) {
            h.cells[addr] = c.is_pto ? c.content : 0;
            if (addr == c.hi) break;
        }
    // Quantified variables were instantiated by the solver; the witness
    // stack reports free variables only.
    for (const auto& z : a.bound) s.m.erase(z);
    out.witness.emplace(std::move(s), std::move(h));
    return out;
}

inline std::optional<std::pair<Stack, Heap>> witness_model(const SymbolicHeap& a) {
    auto r = is_sat(a, true);
    if (r.status != Tri::Sat) return std::nullopt;
    return std::move(r.witness);
}

} // namespace asl
