#ifndef ASL_SYNTAX_HPP
#define ASL_SYNTAX_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "term.hpp"

namespace asl {

enum class Rel { Eq, Ne, Le, Lt };

struct PureAtom {
    Term lhs;
    Rel rel;
    Term rhs;
    bool operator==(const PureAtom&) const = default;
    auto operator<=>(const PureAtom&) const = default;
};

// Conjunction of atoms; empty list is "true".
using PureFormula = std::vector<PureAtom>;

struct EmpAtom {
    bool operator==(const EmpAtom&) const = default;
    auto operator<=>(const EmpAtom&) const = default;
};

struct PointsTo {
    Term src;
    Term dst;
    bool operator==(const PointsTo&) const = default;
    auto operator<=>(const PointsTo&) const = default;
};

// Contiguous block arr(lo, hi); satisfiable only when lo <= hi.
struct ArraySeg {
    Term lo;
    Term hi;
    bool operator==(const ArraySeg&) const = default;
    auto operator<=>(const ArraySeg&) const = default;
};

using SpatialAtom = std::variant<EmpAtom, PointsTo, ArraySeg>;

// EX bound . pure : spatial. An empty spatial list means emp.
struct SymbolicHeap {
    std::vector<std::string> bound;
    PureFormula pure;
    std::vector<SpatialAtom> spatial;
    bool operator==(const SymbolicHeap&) const = default;
};

inline PureAtom eq_atom(Term a, Term b) { return {std::move(a), Rel::Eq, std::move(b)}; }
inline PureAtom ne_atom(Term a, Term b) { return {std::move(a), Rel::Ne, std::move(b)}; }
inline PureAtom le_atom(Term a, Term b) { return {std::move(a), Rel::Le, std::move(b)}; }
inline PureAtom lt_atom(Term a, Term b) { return {std::move(a), Rel::Lt, std::move(b)}; }

inline bool is_quantifier_free(const SymbolicHeap& h) { return h.bound.empty(); }

// Body of the heap with the quantifier prefix dropped; bound names become free.
inline SymbolicHeap qf_part(const SymbolicHeap& h) {
    return {{}, h.pure, h.spatial};
}

inline void atom_vars_into(const PureAtom& a, std::set<std::string>& out) {
    a.lhs.vars_into(out);
    a.rhs.vars_into(out);
}

inline void spatial_vars_into(const SpatialAtom& a, std::set<std::string>& out) {
    if (const auto* p = std::get_if<PointsTo>(&a)) {
        p->src.vars_into(out);
        p->dst.vars_into(out);
    } else if (const auto* s = std::get_if<ArraySeg>(&a)) {
        s->lo.vars_into(out);
        s->hi.vars_into(out);
    }
}

inline std::set<std::string> all_vars(const SymbolicHeap& h) {
    std::set<std::string> out(h.bound.begin(), h.bound.end());
    for (const auto& a : h.pure) atom_vars_into(a, out);
    for (const auto& a : h.spatial) spatial_vars_into(a, out);
    return out;
}

inline std::set<std::string> free_vars(const SymbolicHeap& h) {
    std::set<std::string> out = all_vars(h);
    for (const auto& b : h.bound) out.erase(b);
    return out;
}

// All terms of the heap in occurrence order: pure atoms left to right,
// then spatial atoms. Duplicates kept; callers dedupe as needed.
inline std::vector<Term> terms_of(const SymbolicHeap& h) {
    std::vector<Term> out;
    for (const auto& a : h.pure) {
        out.push_back(a.lhs);
        out.push_back(a.rhs);
    }
    for (const auto& a : h.spatial) {
        if (const auto* p = std::get_if<PointsTo>(&a)) {
            out.push_back(p->src);
            out.push_back(p->dst);
        } else if (const auto* s = std::get_if<ArraySeg>(&a)) {
            out.push_back(s->lo);
            out.push_back(s->hi);
        }
    }
    return out;
}

inline std::vector<ArraySeg> arrays_of(const SymbolicHeap& h) {
    std::vector<ArraySeg> out;
    for (const auto& a : h.spatial)
        if (const auto* s = std::get_if<ArraySeg>(&a)) out.push_back(*s);
    return out;
}

inline std::vector<PointsTo> ptos_of(const SymbolicHeap& h) {
    std::vector<PointsTo> out;
    for (const auto& a : h.spatial)
        if (const auto* p = std::get_if<PointsTo>(&a)) out.push_back(*p);
    return out;
}

namespace detail {
inline Term rename_term(const Term& t, const std::map<std::string, std::string>& ren) {
    Term r(t.k);
    for (const auto& [v, c] : t.parts) {
        auto it = ren.find(v);
        r += Term::var(it == ren.end() ? v : it->second, c);
    }
    return r;
}

inline SpatialAtom rename_spatial(const SpatialAtom& a, const std::map<std::string, std::string>& ren) {
    if (const auto* p = std::get_if<PointsTo>(&a))
        return PointsTo{rename_term(p->src, ren), rename_term(p->dst, ren)};
    if (const auto* s = std::get_if<ArraySeg>(&a))
        return ArraySeg{rename_term(s->lo, ren), rename_term(s->hi, ren)};
    return EmpAtom{};
}
} // namespace detail

// a * b with quantifier prefixes merged; b's bound variables are renamed
// (x, x1, x2, ...) whenever they would capture anything visible in a or b.
inline SymbolicHeap star_lift(const SymbolicHeap& a, const SymbolicHeap& b) {
    std::set<std::string> taken = all_vars(a);
    {
        std::set<std::string> bv = all_vars(b);
        for (const auto& v : bv)
            if (!std::count(b.bound.begin(), b.bound.end(), v)) taken.insert(v);
    }
    FreshNames pool(taken);
    std::map<std::string, std::string> ren;
    SymbolicHeap r;
    r.bound = a.bound;
    for (const auto& z : b.bound) {
        std::string nz = pool.fresh_plain(z);
        if (nz != z) ren[z] = nz;
        r.bound.push_back(nz);
    }
    r.pure = a.pure;
    for (const auto& at : b.pure)
        r.pure.push_back({detail::rename_term(at.lhs, ren), at.rel, detail::rename_term(at.rhs, ren)});
    r.spatial = a.spatial;
    for (const auto& sa : b.spatial) r.spatial.push_back(detail::rename_spatial(sa, ren));
    return r;
}

// Difference-shaped pure atom: each side carries at most one variable,
// with coefficient 1. Disequalities are excluded.
inline bool is_difference_atom(const PureAtom& a) {
    if (a.rel == Rel::Ne) return false;
    auto side_ok = [](const Term& t) {
        return t.parts.empty() || (t.parts.size() == 1 && t.parts[0].second == 1);
    };
    return side_ok(a.lhs) && side_ok(a.rhs);
}

namespace detail {
// lo/hi of shape base+offset where base is a variable: returns (var, offset).
inline std::optional<std::pair<std::string, std::optional<Term>>> split_base(const Term& t) {
    if (t.parts.size() != 1 || t.parts[0].second != 1) return std::nullopt;
    return std::make_pair(t.parts[0].first, t.k == 0 ? std::nullopt : std::optional<Term>(Term(t.k)));
}
} // namespace detail

// Two-variable form: pure atoms are difference constraints, spatial atoms are
// k|->v, arr(a;0,j), arr(a;1,j), or single cells arr(k;j,j) at constant base.
// Offsets j may be variables or constants.
inline bool is_two_variable_form(const SymbolicHeap& h) {
    for (const auto& a : h.pure)
        if (!is_difference_atom(a)) return false;
    for (const auto& sa : h.spatial) {
        if (std::holds_alternative<EmpAtom>(sa)) continue;
        if (const auto* p = std::get_if<PointsTo>(&sa)) {
            if (!p->src.is_const() || !p->dst.is_var()) return false;
            continue;
        }
        const auto& s = std::get<ArraySeg>(sa);
        // arr(k;j,j): single cell at a constant plus at most one unit variable.
        if (s.lo == s.hi) {
            if (s.lo.is_const()) continue;
            if (s.lo.parts.size() == 1 && s.lo.parts[0].second == 1) continue;
            return false;
        }
        // arr(a;0,j) / arr(a;1,j): variable base a, offset j a variable or constant.
        if (s.lo.parts.size() != 1 || s.lo.parts[0].second != 1 || s.lo.k > 1) return false;
        const std::string& base = s.lo.parts[0].first;
        bool hi_ok = false;
        if (s.hi.parts.size() == 1 && s.hi.parts[0].first == base && s.hi.parts[0].second == 1)
            hi_ok = true; // constant offset: hi = a + c
        if (s.hi.parts.size() == 2 && s.hi.k == 0) {
            bool has_base = false, unit_other = false;
            for (const auto& [v, c] : s.hi.parts) {
                if (v == base && c == 1) has_base = true;
                else if (c == 1) unit_other = true;
            }
            hi_ok = has_base && unit_other; // variable offset: hi = a + j
        }
        if (!hi_ok) return false;
    }
    return true;
}

inline std::string to_string(const PureAtom& a) {
    const char* rel = a.rel == Rel::Eq ? " = " : a.rel == Rel::Ne ? " != " : a.rel == Rel::Le ? " <= " : " < ";
    return to_string(a.lhs) + rel + to_string(a.rhs);
}

inline std::string to_string(const SpatialAtom& a) {
    if (std::holds_alternative<EmpAtom>(a)) return "emp";
    if (const auto* p = std::get_if<PointsTo>(&a)) return to_string(p->src) + " |-> " + to_string(p->dst);
    const auto& s = std::get<ArraySeg>(a);
    return "arr(" + to_string(s.lo) + "," + to_string(s.hi) + ")";
}

inline std::string to_string(const SymbolicHeap& h) {
    std::string out;
    if (!h.bound.empty()) {
        out += "EX";
        for (const auto& v : h.bound) out += " " + v;
        out += " . ";
    }
    for (size_t i = 0; i < h.pure.size(); ++i) {
        if (i) out += " /\\ ";
        out += to_string(h.pure[i]);
    }
    if (!h.pure.empty()) out += " : ";
    if (h.spatial.empty()) {
        out += "emp";
    } else {
        for (size_t i = 0; i < h.spatial.size(); ++i) {
            if (i) out += " * ";
            out += to_string(h.spatial[i]);
        }
    }
    return out;
}

} // namespace asl

#endif
