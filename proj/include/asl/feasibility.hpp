#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <asl/arith.hpp>
#include <asl/errors.hpp>

// Exact feasibility over the naturals for a conjunction of =, <=, < atoms.
// Difference-form systems go through Bellman-Ford; everything else through
// an Omega-test elimination. Arbitrary-precision integers throughout, so no
// overflow anywhere in the pipeline.

namespace asl {
namespace feas {

using Int = boost::multiprecision::cpp_int;

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}
inline Int ceil_div(const Int& a, const Int& b) { return -floor_div(-a, b); }

// symmetric remainder in (-m/2, m/2]
inline Int mod_hat(const Int& a, const Int& m) {
    Int r = ((a % m) + m) % m;
    if (r * 2 > m) r -= m;
    return r;
}

struct Lin {
    std::map<int, Int> c; // variable id -> coefficient, never zero
    Int k;

    void add(int v, const Int& a) {
        if (a == 0) return;
        auto [it, fresh] = c.try_emplace(v, a);
        if (!fresh) {
            it->second += a;
            if (it->second == 0) c.erase(it);
        }
    }
    void add_lin(const Lin& o, const Int& scale) {
        for (const auto& [v, a] : o.c) add(v, a * scale);
        k += o.k * scale;
    }
    Int coeff(int v) const {
        auto it = c.find(v);
        return it == c.end() ? Int(0) : it->second;
    }
    Lin without(int v) const {
        Lin out = *this;
        out.c.erase(v);
        return out;
    }
    Int eval(const std::map<int, Int>& m) const {
        Int s = k;
        for (const auto& [v, a] : c) {
            auto it = m.find(v);
            if (it != m.end()) s += a * it->second;
        }
        return s;
    }
};

// Constraint system: eqs hold with = 0, ges with >= 0.
struct System {
    std::vector<Lin> eqs, ges;
    int next_var = 0;
};

namespace detail {

inline Int coeff_gcd(const Lin& e) {
    Int g = 0;
    for (const auto& [v, a] : e.c) g = boost::multiprecision::gcd(g, abs(a));
    return g;
}

// Returns false on an inconsistent ground constraint; drops satisfied ones.
inline bool normalize(System& sys) {
    std::vector<Lin> eqs, ges;
    for (auto& e : sys.eqs) {
        if (e.c.empty()) {
            if (e.k != 0) return false;
            continue;
        }
        Int g = coeff_gcd(e);
        if (e.k % g != 0) return false;
        if (g > 1) {
            for (auto& [v, a] : e.c) a /= g;
            e.k /= g;
        }
        eqs.push_back(std::move(e));
    }
    for (auto& e : sys.ges) {
        if (e.c.empty()) {
            if (e.k < 0) return false;
            continue;
        }
        Int g = coeff_gcd(e);
        if (g > 1) {
            for (auto& [v, a] : e.c) a /= g;
            e.k = floor_div(e.k, g); // tightens: sum >= -k/g rounds up
        }
        ges.push_back(std::move(e));
    }
    sys.eqs = std::move(eqs);
    sys.ges = std::move(ges);
    return true;
}

inline bool difference_form(const Lin& e) {
    if (e.c.size() > 2) return false;
    int pos = 0, neg = 0;
    for (const auto& [v, a] : e.c) {
        if (a == 1)
            ++pos;
        else if (a == -1)
            ++neg;
        else
            return false;
    }
    return pos <= 1 && neg <= 1;
}

// Shortest-path feasibility for x - y <= w systems. Vertex n is the zero
// point; a model is d[x] - d[zero], which the caller's x >= 0 edges keep
// non-negative.
inline std::optional<std::map<int, Int>> bellman_ford(int nvars,
                                                      const std::vector<Lin>& ges) {
    struct Edge {
        int from, to;
        Int w;
    };
    const int zero = nvars;
    std::vector<Edge> edges;
    for (const auto& e : ges) {
        if (e.c.empty()) {
            if (e.k < 0) return std::nullopt;
            continue;
        }
        // e >= 0 with unit coefficients; rewrite as to - from <= k form:
        int vp = -1, vn = -1;
        for (const auto& [v, a] : e.c) (a == 1 ? vp : vn) = v;
        if (vp >= 0 && vn >= 0)
            edges.push_back({vp, vn, e.k}); // vn - vp <= k
        else if (vp >= 0)
            edges.push_back({vp, zero, e.k}); // zero - vp <= k, i.e. vp >= -k
        else
            edges.push_back({zero, vn, e.k}); // vn - zero <= k
    }
    std::vector<Int> d(nvars + 1, 0);
    for (int round = 0; round <= nvars; ++round) {
        bool changed = false;
        for (const auto& e : edges) {
            if (d[e.from] + e.w < d[e.to]) {
                d[e.to] = d[e.from] + e.w;
                changed = true;
            }
        }
        if (!changed) {
            std::map<int, Int> m;
            for (int v = 0; v < nvars; ++v) m[v] = d[v] - d[zero];
            return m;
        }
    }
    return std::nullopt; // negative cycle
}

inline std::map<int, Int> with_value(std::map<int, Int> m, int v, Int val) {
    m[v] = std::move(val);
    return m;
}

inline Int value_or_zero(const std::map<int, Int>& m, int v) {
    auto it = m.find(v);
    return it == m.end() ? Int(0) : it->second;
}

// Pugh's Omega test, recursion on the number of variables.
inline std::optional<std::map<int, Int>> omega(System sys) {
    if (!normalize(sys)) return std::nullopt;

    if (!sys.eqs.empty()) {
        Lin eq = sys.eqs.back();
        sys.eqs.pop_back();
        // pick the variable with the smallest |coefficient|
        int xk = -1;
        Int best = 0;
        for (const auto& [v, a] : eq.c)
            if (xk < 0 || abs(a) < best) {
                xk = v;
                best = abs(a);
            }
        if (best == 1) {
            // xk = -sign * (rest); substitute everywhere
            Int sign = eq.coeff(xk);
            Lin rest = eq.without(xk);
            Lin expr; // xk = expr
            expr.add_lin(rest, -sign);
            System sub;
            sub.next_var = sys.next_var;
            for (auto& e : sys.eqs) {
                Int a = e.coeff(xk);
                Lin ne = e.without(xk);
                ne.add_lin(expr, a);
                sub.eqs.push_back(std::move(ne));
            }
            for (auto& e : sys.ges) {
                Int a = e.coeff(xk);
                Lin ne = e.without(xk);
                ne.add_lin(expr, a);
                sub.ges.push_back(std::move(ne));
            }
            auto m = omega(std::move(sub));
            if (!m) return std::nullopt;
            return with_value(std::move(*m), xk, expr.eval(*m));
        }
        // |coefficients| all >= 2: shrink them with the symmetric-mod trick.
        Int m = best + 1;
        int sigma = sys.next_var++;
        Lin eq2;
        for (const auto& [v, a] : eq.c) eq2.add(v, mod_hat(a, m));
        eq2.k = mod_hat(eq.k, m);
        eq2.add(sigma, -m);
        // coefficient of xk in eq2 is +-1 by choice of m
        Int sign = eq2.coeff(xk);
        Lin expr;
        expr.add_lin(eq2.without(xk), -sign);
        System sub;
        sub.next_var = sys.next_var;
        auto subst = [&](const Lin& e) {
            Int a = e.coeff(xk);
            Lin ne = e.without(xk);
            ne.add_lin(expr, a);
            return ne;
        };
        sub.eqs.push_back(subst(eq));
        for (const auto& e : sys.eqs) sub.eqs.push_back(subst(e));
        for (const auto& e : sys.ges) sub.ges.push_back(subst(e));
        auto sm = omega(std::move(sub));
        if (!sm) return std::nullopt;
        return with_value(std::move(*sm), xk, expr.eval(*sm));
    }

    if (sys.ges.empty()) return std::map<int, Int>{};

    // choose the variable minimizing the lower*upper pairing count
    std::map<int, std::pair<int, int>> uses;
    for (const auto& e : sys.ges)
        for (const auto& [v, a] : e.c)
            (a > 0 ? uses[v].first : uses[v].second)++;
    int x = -1;
    long long score = -1;
    for (const auto& [v, lu] : uses) {
        long long s = 1LL * lu.first * lu.second;
        if (x < 0 || s < score) {
            x = v;
            score = s;
        }
    }

    // a*x >= alpha (a > 0)  and  b*x <= beta (b > 0)
    std::vector<std::pair<Int, Lin>> lowers, uppers;
    System rest;
    rest.next_var = sys.next_var;
    for (const auto& e : sys.ges) {
        Int a = e.coeff(x);
        if (a == 0) {
            rest.ges.push_back(e);
        } else if (a > 0) {
            Lin alpha;
            alpha.add_lin(e.without(x), -1);
            lowers.emplace_back(a, std::move(alpha));
        } else {
            uppers.emplace_back(-a, e.without(x));
        }
    }

    auto pick_from_bounds = [&](const std::map<int, Int>& m) -> Int {
        if (!lowers.empty()) {
            Int best;
            bool first = true;
            for (const auto& [a, alpha] : lowers) {
                Int v = ceil_div(alpha.eval(m), a);
                if (first || v > best) {
                    best = v;
                    first = false;
                }
            }
            return best;
        }
        if (!uppers.empty()) {
            Int best;
            bool first = true;
            for (const auto& [b, beta] : uppers) {
                Int v = floor_div(beta.eval(m), b);
                if (first || v < best) {
                    best = v;
                    first = false;
                }
            }
            return best;
        }
        return 0;
    };

    if (lowers.empty() || uppers.empty()) {
        auto m = omega(std::move(rest));
        if (!m) return std::nullopt;
        return with_value(std::move(*m), x, pick_from_bounds(*m));
    }

    bool exact = true;
    for (const auto& [a, alpha] : lowers)
        for (const auto& [b, beta] : uppers)
            if (a > 1 && b > 1) exact = false;

    auto shadow = [&](bool dark) {
        System sh = rest;
        for (const auto& [a, alpha] : lowers)
            for (const auto& [b, beta] : uppers) {
                Lin e; // a*beta - b*alpha >= (dark ? (a-1)(b-1) : 0)
                e.add_lin(beta, a);
                e.add_lin(alpha, -b);
                if (dark) e.k -= (a - 1) * (b - 1);
                sh.ges.push_back(std::move(e));
            }
        return sh;
    };

    if (auto m = omega(shadow(true))) // dark shadow (= real shadow when exact)
        return with_value(std::move(*m), x, pick_from_bounds(*m));
    if (exact) return std::nullopt;
    if (!omega(shadow(false))) return std::nullopt; // real shadow empty

    // splinter: solutions missed by the dark shadow hug some lower bound
    Int bmax = 0;
    for (const auto& [b, beta] : uppers) bmax = std::max(bmax, b);
    for (const auto& [a, alpha] : lowers) {
        Int hi = floor_div(a * bmax - a - bmax, bmax);
        for (Int i = 0; i <= hi; ++i) {
            System sp = sys;
            Lin e; // a*x = alpha + i
            e.add(x, a);
            e.add_lin(alpha, -1);
            e.k -= i;
            sp.eqs.push_back(std::move(e));
            if (auto m = omega(std::move(sp))) return m;
        }
    }
    return std::nullopt;
}

} // namespace detail

// Model for a conjunction of Eq/Le/Lt atoms over natural-valued variables,
// or nullopt when none exists. Disequalities must be split by the caller.
inline std::optional<Valuation> feasible(const std::vector<LinAtom>& atoms) {
    std::map<std::string, int> ids;
    std::vector<std::string> names;
    auto id_of = [&](const std::string& n) {
        auto [it, fresh] = ids.try_emplace(n, static_cast<int>(names.size()));
        if (fresh) names.push_back(n);
        return it->second;
    };

    System sys;
    auto lin_of = [&](const Term& t) {
        Lin e;
        e.k = t.k;
        for (const auto& [x, c] : t.parts) e.add(id_of(x), Int(c));
        return e;
    };
    for (const auto& a : atoms) {
        Lin l = lin_of(a.lhs), r = lin_of(a.rhs);
        Lin d = r;
        d.add_lin(l, -1); // r - l
        switch (a.rel) {
        case Rel::Eq: sys.eqs.push_back(std::move(d)); break;
        case Rel::Le: sys.ges.push_back(std::move(d)); break;
        case Rel::Lt:
            d.k -= 1;
            sys.ges.push_back(std::move(d));
            break;
        case Rel::Ne: throw internal_error("feasible: disequality not split");
        }
    }
    const int nvars = static_cast<int>(names.size());
    for (int v = 0; v < nvars; ++v) {
        Lin e;
        e.add(v, 1);
        sys.ges.push_back(std::move(e)); // v >= 0
    }
    sys.next_var = nvars;

    std::optional<std::map<int, Int>> m;
    bool diff = true;
    for (const auto& e : sys.eqs) diff = diff && detail::difference_form(e);
    for (const auto& e : sys.ges) diff = diff && detail::difference_form(e);
    if (diff) {
        std::vector<Lin> ges = sys.ges;
        for (const auto& e : sys.eqs) {
            ges.push_back(e);
            Lin neg;
            neg.add_lin(e, -1);
            ges.push_back(std::move(neg));
        }
        m = detail::bellman_ford(nvars, ges);
    } else {
        m = detail::omega(std::move(sys));
    }
    if (!m) return std::nullopt;

    Valuation out;
    for (int v = 0; v < nvars; ++v) {
        Int val = detail::value_or_zero(*m, v);
        if (val < 0 || val > std::numeric_limits<Val>::max())
            throw internal_error("feasible: model value out of range for " + names[v]);
        out[names[v]] = val.convert_to<Val>();
    }
    return out;
}

} // namespace feas
} // namespace asl
