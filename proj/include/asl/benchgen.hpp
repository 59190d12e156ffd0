#pragma once

#include <asl/errors.hpp>
#include <asl/syntax.hpp>

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace asl {

// A 3-partition instance (B, S): 3m items that are to be split into m
// groups of three, each summing to B. The size window B/4 < k < B/2 forces
// every group to have exactly three members.
struct ThreePartitionInstance {
    Val bound;
    std::vector<Val> items;

    ThreePartitionInstance(Val b, std::vector<Val> ks) : bound(b), items(std::move(ks)) {
        if (items.size() % 3 != 0)
            throw input_error("3-partition instance: item count not a multiple of 3");
        Val sum = 0;
        for (Val k : items) sum += k;
        if (sum != groups() * bound)
            throw input_error("3-partition instance: items do not sum to m*B");
        for (Val k : items)
            if (4 * k <= bound || 2 * k >= bound)
                throw input_error("3-partition instance: item outside (B/4, B/2)");
    }

    Val groups() const { return items.size() / 3; } // m
};

// An undirected graph whose first k vertices are the designated leaves of
// the 2-round colouring game. Edges are stored normalized: 1-based, lower
// endpoint first, sorted, duplicates removed.
struct UndirectedGraph {
    size_t n;
    size_t k;
    std::vector<std::pair<size_t, size_t>> edges;

    UndirectedGraph(size_t n_, size_t k_, std::vector<std::pair<size_t, size_t>> es)
        : n(n_), k(k_), edges(std::move(es)) {
        if (k > n) throw input_error("graph: more leaves than vertices");
        for (auto& [i, j] : edges) {
            if (i < 1 || j < 1 || i > n || j > n)
                throw input_error("graph: edge endpoint out of range");
            if (i == j) throw input_error("graph: self-loop");
            if (j < i) std::swap(i, j);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
};

namespace detail {

inline Term dvar(size_t i) { return Term::var("d" + std::to_string(i)); }
inline Term avar(size_t j) { return Term::var("a" + std::to_string(j)); }

inline void push_or_emp(SymbolicHeap& h) {
    if (h.spatial.empty()) h.spatial.push_back(EmpAtom{});
}

// Delimiter cells arr(d_i; 0, 0) for i = 1..m+1.
inline void delimiter_cells(SymbolicHeap& h, Val m) {
    for (Val i = 1; i <= m + 1; ++i) h.spatial.push_back(ArraySeg{dvar(i), dvar(i)});
}

// Item arrays arr(a_j; 1, k_j) and their confinement d_1 <= a_j, a_j+k_j < d_{m+1}.
inline void item_arrays(SymbolicHeap& h, const ThreePartitionInstance& inst) {
    Val m = inst.groups();
    for (size_t j = 1; j <= inst.items.size(); ++j) {
        h.pure.push_back(le_atom(dvar(1), avar(j)));
        h.pure.push_back(lt_atom(avar(j) + Term(inst.items[j - 1]), dvar(m + 1)));
    }
    for (size_t j = 1; j <= inst.items.size(); ++j)
        h.spatial.push_back(ArraySeg{avar(j) + Term(1), avar(j) + Term(inst.items[j - 1])});
}

} // namespace detail

// A_{B,S}: delimiters pinned exactly B+1 apart, so each of the m chunks
// between them has B free cells; the item arrays must tile those chunks,
// which is possible iff the instance has a complete 3-partition.
inline SymbolicHeap gen_3part_sat(const ThreePartitionInstance& inst) {
    Val m = inst.groups();
    SymbolicHeap h;
    for (Val i = 1; i <= m; ++i)
        h.pure.push_back(eq_atom(detail::dvar(i + 1), detail::dvar(i) + Term(inst.bound + 1)));
    SymbolicHeap items;
    detail::item_arrays(items, inst);
    h.pure.insert(h.pure.end(), items.pure.begin(), items.pure.end());
    detail::delimiter_cells(h, m);
    h.spatial.insert(h.spatial.end(), items.spatial.begin(), items.spatial.end());
    return h;
}

// The biabduction form: the left side keeps only the rigid delimiters, the
// right side is the relaxed A_{B,S} whose delimiters merely ascend. Any
// solution must bridge the two, which again demands a 3-partition.
inline std::pair<SymbolicHeap, SymbolicHeap> gen_3part_biabd(const ThreePartitionInstance& inst) {
    Val m = inst.groups();
    SymbolicHeap a;
    for (Val i = 1; i <= m; ++i)
        a.pure.push_back(eq_atom(detail::dvar(i + 1), detail::dvar(i) + Term(inst.bound + 1)));
    detail::delimiter_cells(a, m);
    SymbolicHeap b;
    for (Val i = 1; i <= m; ++i) b.pure.push_back(lt_atom(detail::dvar(i), detail::dvar(i + 1)));
    SymbolicHeap items;
    detail::item_arrays(items, inst);
    b.pure.insert(b.pure.end(), items.pure.begin(), items.pure.end());
    detail::delimiter_cells(b, m);
    b.spatial.insert(b.spatial.end(), items.spatial.begin(), items.spatial.end());
    return {std::move(a), std::move(b)};
}

namespace detail {

// Address layout for the colouring instances: leaf cells and edge blocks
// live at constant bases 10, 20, 30, ... so every array is trivially
// disjoint (blocks span at most 4 cells above their base).
inline Val leaf_base(size_t i) { return 10 * static_cast<Val>(i); }
inline Val edge_base(const UndirectedGraph& g, size_t edge_idx) {
    return 10 * static_cast<Val>(g.k + 1 + edge_idx); // 0-based edge index
}

inline std::string colour_name(size_t i) { return "c" + std::to_string(i) + "_1"; }
inline std::string compl_name(size_t i, size_t j) {
    return "ct" + std::to_string(i) + "_" + std::to_string(j);
}
inline std::string cell_name(size_t i) { return "c" + std::to_string(i); }
inline std::string mod_name(size_t i) { return "q" + std::to_string(i); }

inline void colour_range(SymbolicHeap& h, const std::string& v) {
    h.pure.push_back(le_atom(Term(1), Term::var(v)));
    h.pure.push_back(le_atom(Term::var(v), Term(3)));
}

// The three one-cell arrays inside an edge's block, per the right sides of
// both colouring instances: their addresses must tile the block, which
// forces (c_i, c_j, ct_ij) to permute (1, 2, 3).
inline void edge_cells(SymbolicHeap& h, const UndirectedGraph& g) {
    for (size_t t = 0; t < g.edges.size(); ++t) {
        Term base(edge_base(g, t));
        h.spatial.push_back(
            ArraySeg{base + Term::var(colour_name(g.edges[t].first)),
                     base + Term::var(colour_name(g.edges[t].first))});
    }
    for (size_t t = 0; t < g.edges.size(); ++t) {
        Term base(edge_base(g, t));
        const auto& [i, j] = g.edges[t];
        h.spatial.push_back(
            ArraySeg{base + Term::var(colour_name(j)), base + Term::var(colour_name(j))});
        h.spatial.push_back(
            ArraySeg{base + Term::var(compl_name(i, j)), base + Term::var(compl_name(i, j))});
    }
}

} // namespace detail

// The biabduction colouring instance. The left side allocates one anonymous
// cell per leaf and a 3-cell block per edge; the right side reads each leaf
// cell through a points-to, decodes its colour mod 3, and tiles each edge
// block with the two endpoint colours plus the complementary one. A
// solution exists iff every leaf colouring extends to a proper 3-colouring.
inline std::pair<SymbolicHeap, SymbolicHeap> gen_colour_biabd(const UndirectedGraph& g) {
    SymbolicHeap a;
    for (size_t i = 1; i <= g.k; ++i) {
        Term cell(detail::leaf_base(i) + 1); // arr(d_i; 1, 1)
        a.spatial.push_back(ArraySeg{cell, cell});
    }
    for (size_t t = 0; t < g.edges.size(); ++t) {
        Val base = detail::edge_base(g, t);
        a.spatial.push_back(ArraySeg{Term(base + 1), Term(base + 3)});
    }
    detail::push_or_emp(a);

    SymbolicHeap b;
    for (size_t i = 1; i <= g.n; ++i) {
        b.bound.push_back(detail::colour_name(i));
        detail::colour_range(b, detail::colour_name(i));
    }
    for (const auto& [i, j] : g.edges) {
        b.bound.push_back(detail::compl_name(i, j));
        detail::colour_range(b, detail::compl_name(i, j));
    }
    // Colour decoding, c_{i,1} - 1 == c_i (mod 3), without subtraction:
    // c_i + 1 = c_{i,1} + 3q_i with q_i the quotient witness.
    for (size_t i = 1; i <= g.k; ++i) {
        b.bound.push_back(detail::cell_name(i));
        b.bound.push_back(detail::mod_name(i));
        b.pure.push_back(eq_atom(Term::var(detail::cell_name(i)) + Term(1),
                                 Term::var(detail::colour_name(i)) +
                                     Term::var(detail::mod_name(i), 3)));
    }
    for (size_t i = 1; i <= g.k; ++i)
        b.spatial.push_back(
            PointsTo{Term(detail::leaf_base(i) + 1), Term::var(detail::cell_name(i))});
    detail::edge_cells(b, g);
    detail::push_or_emp(b);
    return {std::move(a), std::move(b)};
}

// The entailment colouring instance: pointer-free, leaf colours are shared
// free variables. The entailment is valid iff every leaf colouring extends
// to a proper 3-colouring of the whole graph.
inline std::pair<SymbolicHeap, SymbolicHeap> gen_colour_entail(const UndirectedGraph& g) {
    SymbolicHeap a;
    for (size_t i = 1; i <= g.k; ++i) detail::colour_range(a, detail::colour_name(i));
    for (size_t t = 0; t < g.edges.size(); ++t) {
        Val base = detail::edge_base(g, t);
        a.spatial.push_back(ArraySeg{Term(base + 1), Term(base + 3)});
    }
    detail::push_or_emp(a);

    SymbolicHeap b;
    for (size_t i = g.k + 1; i <= g.n; ++i) b.bound.push_back(detail::colour_name(i));
    for (const auto& [i, j] : g.edges) b.bound.push_back(detail::compl_name(i, j));
    for (size_t i = 1; i <= g.n; ++i) detail::colour_range(b, detail::colour_name(i));
    for (const auto& [i, j] : g.edges) detail::colour_range(b, detail::compl_name(i, j));
    detail::edge_cells(b, g);
    detail::push_or_emp(b);
    return {std::move(a), std::move(b)};
}

// Knobs for the seeded random generator.
struct RandomHeapConfig {
    size_t vars = 2;
    size_t arrays = 1;
    size_t ptos = 1;
    size_t pure_atoms = 1;
    Val max_const = 4;
};

// Deterministic per seed. Distribution: terms are a variable (uniform over
// v1..v_vars) plus a constant in [0, max_const], or a bare constant with
// probability 1/3 (always, when vars = 0). Pure atoms are difference
// constraints v REL w + c with REL uniform over =, !=, <=, <; arrays have a
// random base and length in [0, max_const]; points-tos are term |-> term.
inline SymbolicHeap gen_random(Val seed, const RandomHeapConfig& cfg) {
    std::mt19937_64 rng(seed);
    auto val = [&](Val n) { return std::uniform_int_distribution<Val>(0, n)(rng); };
    auto variable = [&]() { return Term::var("v" + std::to_string(1 + val(cfg.vars - 1))); };
    auto term = [&]() {
        if (cfg.vars == 0 || val(2) == 0) return Term(val(cfg.max_const));
        return variable() + Term(val(cfg.max_const));
    };
    SymbolicHeap h;
    for (size_t i = 0; i < cfg.pure_atoms; ++i) {
        Rel r = std::array{Rel::Eq, Rel::Ne, Rel::Le, Rel::Lt}[val(3)];
        Term lhs = cfg.vars == 0 ? Term(val(cfg.max_const)) : variable();
        Term rhs = (cfg.vars == 0 ? Term(0) : variable()) + Term(val(cfg.max_const));
        h.pure.push_back({std::move(lhs), r, std::move(rhs)});
    }
    for (size_t i = 0; i < cfg.arrays; ++i) {
        Term lo = term();
        h.spatial.push_back(ArraySeg{lo, lo + Term(val(cfg.max_const))});
    }
    for (size_t i = 0; i < cfg.ptos; ++i) h.spatial.push_back(PointsTo{term(), term()});
    detail::push_or_emp(h);
    return h;
}

} // namespace asl
