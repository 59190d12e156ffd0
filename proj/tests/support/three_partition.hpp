#pragma once

#include <string>
#include <vector>

#include <asl/syntax.hpp>

// Exhaustive check: can ks be split into disjoint triples, each summing to
// bound? Fixes the first element and tries every pair of partners.
// Delimiter-and-chunk heap for a 3-partition instance: m+1 single-cell
// delimiters spaced bound+1 apart, and one array of length ks[j] per
// element, each forced strictly between the first and last delimiter.
inline asl::SymbolicHeap three_part_heap(asl::Val bound, const std::vector<asl::Val>& ks) {
    using asl::Term;
    size_t m = ks.size() / 3;
    auto d = [](size_t i) { return Term::var("d" + std::to_string(i)); };
    auto a = [](size_t j) { return Term::var("a" + std::to_string(j)); };
    asl::SymbolicHeap h;
    for (size_t i = 1; i <= m; ++i)
        h.pure.push_back(asl::eq_atom(d(i + 1), d(i) + Term(bound + 1)));
    for (size_t j = 1; j <= ks.size(); ++j) {
        h.pure.push_back(asl::le_atom(d(1), a(j)));
        h.pure.push_back(asl::lt_atom(a(j) + Term(ks[j - 1]), d(m + 1)));
    }
    for (size_t i = 1; i <= m + 1; ++i) h.spatial.push_back(asl::ArraySeg{d(i), d(i)});
    for (size_t j = 1; j <= ks.size(); ++j)
        h.spatial.push_back(asl::ArraySeg{a(j) + Term(1), a(j) + Term(ks[j - 1])});
    return h;
}

inline bool three_partition_exists(asl::Val bound, const std::vector<asl::Val>& ks) {
    if (ks.empty()) return true;
    if (ks.size() % 3 != 0) return false;
    for (size_t i = 1; i < ks.size(); ++i)
        for (size_t j = i + 1; j < ks.size(); ++j) {
            if (ks[0] + ks[i] + ks[j] != bound) continue;
            std::vector<asl::Val> rest;
            for (size_t t = 1; t < ks.size(); ++t)
                if (t != i && t != j) rest.push_back(ks[t]);
            if (three_partition_exists(bound, rest)) return true;
        }
    return false;
}
