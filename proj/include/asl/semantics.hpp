#ifndef ASL_SEMANTICS_HPP
#define ASL_SEMANTICS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "syntax.hpp"

namespace asl {

struct Stack {
    std::map<std::string, Val> m;

    Val get(const std::string& v) const {
        auto it = m.find(v);
        if (it == m.end()) throw eval_error("unbound variable '" + v + "'");
        return it->second;
    }
    void set(const std::string& v, Val x) { m[v] = x; }
    bool operator==(const Stack&) const = default;
};

// Finite map from addresses to values.
struct Heap {
    std::map<Val, Val> cells;
    bool operator==(const Heap&) const = default;
};

struct Bounds {
    Val stack_bound = 0;
    Val value_bound = 0;
};

inline Val eval_term(const Stack& s, const Term& t) {
    return t.eval([&](const std::string& v) { return s.get(v); });
}

inline bool eval_atom(const Stack& s, const PureAtom& a) {
    Val l = eval_term(s, a.lhs), r = eval_term(s, a.rhs);
    switch (a.rel) {
        case Rel::Eq: return l == r;
        case Rel::Ne: return l != r;
        case Rel::Le: return l <= r;
        case Rel::Lt: return l < r;
    }
    return false;
}

inline bool eval_pure(const Stack& s, const PureFormula& f) {
    for (const auto& a : f)
        if (!eval_atom(s, a)) return false;
    return true;
}

namespace detail {

// Stack-determined cell range of one spatial atom. Points-to pins content.
struct AtomCells {
    Val lo, hi;
    bool is_pto;
    Val content;
};

// nullopt when no heap can realise the spatial part under s:
// an ill-formed array (lo > hi) or overlapping footprints.
inline std::optional<std::vector<AtomCells>> forced_footprint(const Stack& s,
                                                              const std::vector<SpatialAtom>& sp) {
    std::vector<AtomCells> out;
    for (const auto& a : sp) {
        if (std::holds_alternative<EmpAtom>(a)) continue;
        if (const auto* p = std::get_if<PointsTo>(&a)) {
            Val addr = eval_term(s, p->src);
            out.push_back({addr, addr, true, eval_term(s, p->dst)});
        } else {
            const auto& seg = std::get<ArraySeg>(a);
            Val lo = eval_term(s, seg.lo), hi = eval_term(s, seg.hi);
            if (lo > hi) return std::nullopt;
            out.push_back({lo, hi, false, 0});
        }
    }
    std::vector<AtomCells> sorted = out;
    std::sort(sorted.begin(), sorted.end(), [](const AtomCells& x, const AtomCells& y) { return x.lo < y.lo; });
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].lo <= sorted[i - 1].hi) return std::nullopt;
    return out;
}

// Odometer over [0, bound]^n in ascending lexicographic order,
// rightmost position fastest. Returns false once exhausted.
inline bool odometer_next(std::vector<Val>& digits, Val bound) {
    for (size_t i = digits.size(); i-- > 0;) {
        if (digits[i] < bound) {
            ++digits[i];
            for (size_t j = i + 1; j < digits.size(); ++j) digits[j] = 0;
            return true;
        }
    }
    return false;
}

} // namespace detail

inline bool holds_qf(const Stack& s, const Heap& h, const SymbolicHeap& a) {
    if (!eval_pure(s, a.pure)) return false;
    auto fp = detail::forced_footprint(s, a.spatial);
    if (!fp) return false;
    Val total = 0;
    for (const auto& c : *fp) total += c.hi - c.lo + 1;
    if (total != h.cells.size()) return false;
    for (const auto& c : *fp) {
        for (Val addr = c.lo;; ++addr) {
            auto it = h.cells.find(addr);
            if (it == h.cells.end()) return false;
            if (c.is_pto && it->second != c.content) return false;
            if (addr == c.hi) break;
        }
    }
    return true;
}

// Fig.-1 satisfaction. Exact for quantifier-free a; the existential prefix
// is enumerated over [0, stack_bound]^k, so quantified answers are
// complete only relative to the bound.
inline bool holds(const Stack& s, const Heap& h, const SymbolicHeap& a, const Bounds& bounds) {
    if (a.bound.empty()) return holds_qf(s, h, a);
    SymbolicHeap body = qf_part(a);
    std::vector<Val> digits(a.bound.size(), 0);
    for (;;) {
        Stack ext = s;
        for (size_t i = 0; i < a.bound.size(); ++i) ext.set(a.bound[i], digits[i]);
        if (holds_qf(ext, h, body)) return true;
        if (!detail::odometer_next(digits, bounds.stack_bound)) return false;
    }
}

inline bool holds(const Stack& s, const Heap& h, const SymbolicHeap& a) {
    if (!a.bound.empty()) throw eval_error("holds without bounds requires a quantifier-free heap");
    return holds_qf(s, h, a);
}

// The unique subheap of h satisfying quantifier-free a under s, if any.
// Uniqueness comes from spatial footprints being stack-determined.
inline std::optional<Heap> cut_subheap(const Stack& s, const Heap& h, const SymbolicHeap& a) {
    if (!a.bound.empty()) throw eval_error("cut_subheap requires a quantifier-free heap");
    auto fp = detail::forced_footprint(s, a.spatial);
    if (!fp) return std::nullopt;
    Heap sub;
    for (const auto& c : *fp) {
        for (Val addr = c.lo;; ++addr) {
            auto it = h.cells.find(addr);
            if (it == h.cells.end()) return std::nullopt;
            sub.cells[addr] = it->second;
            if (addr == c.hi) break;
        }
    }
    if (!holds_qf(s, sub, a)) return std::nullopt;
    return sub;
}

struct OracleOptions {
    bool descending_contents = false;
};

namespace detail {

struct ForcedHeap {
    std::vector<Val> array_cells; // ascending, contents free
    Heap base;                    // points-to cells, contents pinned
};

inline std::optional<ForcedHeap> forced_heap(const Stack& s, const SymbolicHeap& body) {
    auto fp = forced_footprint(s, body.spatial);
    if (!fp) return std::nullopt;
    ForcedHeap fh;
    for (const auto& c : *fp) {
        if (c.is_pto) {
            fh.base.cells[c.lo] = c.content;
        } else {
            for (Val addr = c.lo;; ++addr) {
                fh.array_cells.push_back(addr);
                if (addr == c.hi) break;
            }
        }
    }
    std::sort(fh.array_cells.begin(), fh.array_cells.end());
    return fh;
}

template <typename Fn> // Fn: (const Stack&) -> bool, returns true to stop
inline bool enumerate_stacks(const std::vector<std::string>& vars, Val bound, Fn&& fn) {
    std::vector<Val> digits(vars.size(), 0);
    for (;;) {
        Stack s;
        for (size_t i = 0; i < vars.size(); ++i) s.set(vars[i], digits[i]);
        if (fn(s)) return true;
        if (vars.empty() || !odometer_next(digits, bound)) return false;
    }
}

} // namespace detail

// Enumerates stacks over every variable of a (free and bound) up to
// stack_bound, materialises the forced heap of the body, and enumerates
// array contents up to value_bound. First hit wins; deterministic.
inline std::optional<std::pair<Stack, Heap>> oracle_find_model(const SymbolicHeap& a,
                                                               const Bounds& bounds,
                                                               const OracleOptions& opts = {}) {
    std::set<std::string> vs = all_vars(a);
    std::vector<std::string> vars(vs.begin(), vs.end());
    SymbolicHeap body = qf_part(a);
    std::set<std::string> fv = free_vars(a);
    std::optional<std::pair<Stack, Heap>> found;
    detail::enumerate_stacks(vars, bounds.stack_bound, [&](const Stack& sf) {
        if (!eval_pure(sf, body.pure)) return false;
        auto fh = detail::forced_heap(sf, body);
        if (!fh) return false;
        std::vector<Val> contents(fh->array_cells.size(), opts.descending_contents ? bounds.value_bound : 0);
        for (;;) {
            Heap h = fh->base;
            for (size_t i = 0; i < fh->array_cells.size(); ++i) h.cells[fh->array_cells[i]] = contents[i];
            if (holds_qf(sf, h, body)) {
                Stack out;
                for (const auto& v : fv) out.set(v, sf.get(v));
                found = {out, h};
                return true;
            }
            if (opts.descending_contents) {
                bool moved = false;
                for (size_t i = contents.size(); i-- > 0;) {
                    if (contents[i] > 0) {
                        --contents[i];
                        for (size_t j = i + 1; j < contents.size(); ++j) contents[j] = bounds.value_bound;
                        moved = true;
                        break;
                    }
                }
                if (!moved) return false;
            } else if (!detail::odometer_next(contents, bounds.value_bound)) {
                return false;
            }
        }
    });
    return found;
}

namespace detail {

// Cells whose content can influence holds(b): addresses reachable by some
// points-to source of a or b under the given stack, with b's bound
// variables enumerated up to the stack bound.
inline std::set<Val> content_relevant_cells(const Stack& s, const SymbolicHeap& a,
                                            const SymbolicHeap& b, Val stack_bound) {
    std::set<Val> cells;
    auto add_term = [&](const Term& t, const std::vector<std::string>& bound_here) {
        std::set<std::string> tv;
        t.vars_into(tv);
        std::vector<std::string> enumerated;
        for (const auto& v : tv)
            if (std::count(bound_here.begin(), bound_here.end(), v)) enumerated.push_back(v);
        enumerate_stacks(enumerated, stack_bound, [&](const Stack& zs) {
            Stack ext = s;
            for (const auto& [k, v] : zs.m) ext.set(k, v);
            cells.insert(eval_term(ext, t));
            return false;
        });
    };
    for (const auto& p : ptos_of(a)) add_term(p.src, {});
    for (const auto& p : ptos_of(b)) add_term(p.src, b.bound);
    return cells;
}

} // namespace detail

// Searches for (s, h) with s, h |= a and s, h |/= b within bounds.
// a must be quantifier-free; the stack ranges over fv(a) u fv(b).
// Content enumeration is restricted to cells some points-to can read;
// other array cells are pinned, which cannot change either side.
inline std::optional<std::pair<Stack, Heap>> oracle_find_countermodel(const SymbolicHeap& a,
                                                                      const SymbolicHeap& b,
                                                                      const Bounds& bounds,
                                                                      const OracleOptions& opts = {}) {
    if (!a.bound.empty()) throw eval_error("oracle_find_countermodel requires quantifier-free lhs");
    std::set<std::string> vs = free_vars(a);
    for (const auto& v : free_vars(b)) vs.insert(v);
    std::vector<std::string> vars(vs.begin(), vs.end());
    std::optional<std::pair<Stack, Heap>> found;
    detail::enumerate_stacks(vars, bounds.stack_bound, [&](const Stack& sf) {
        if (!eval_pure(sf, a.pure)) return false;
        auto fh = detail::forced_heap(sf, a);
        if (!fh) return false;
        std::set<Val> relevant = detail::content_relevant_cells(sf, a, b, bounds.stack_bound);
        std::vector<Val> open_cells;
        for (Val c : fh->array_cells)
            if (relevant.count(c)) open_cells.push_back(c);
        Val fill = opts.descending_contents ? bounds.value_bound : 0;
        Heap base = fh->base;
        for (Val c : fh->array_cells)
            if (!relevant.count(c)) base.cells[c] = fill;
        std::vector<Val> contents(open_cells.size(), opts.descending_contents ? bounds.value_bound : 0);
        for (;;) {
            Heap h = base;
            for (size_t i = 0; i < open_cells.size(); ++i) h.cells[open_cells[i]] = contents[i];
            if (holds_qf(sf, h, a) && !holds(sf, h, b, bounds)) {
                found = {sf, h};
                return true;
            }
            if (opts.descending_contents) {
                bool moved = false;
                for (size_t i = contents.size(); i-- > 0;) {
                    if (contents[i] > 0) {
                        --contents[i];
                        for (size_t j = i + 1; j < contents.size(); ++j) contents[j] = bounds.value_bound;
                        moved = true;
                        break;
                    }
                }
                if (!moved) return false;
            } else if (!detail::odometer_next(contents, bounds.value_bound)) {
                return false;
            }
        }
    });
    return found;
}

} // namespace asl

#endif
