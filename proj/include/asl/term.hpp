#ifndef ASL_TERM_HPP
#define ASL_TERM_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace asl {

using Val = unsigned long long;

// Linear term over naturals: sum of coeff*var plus a constant.
// Canonical form: parts sorted by variable name, no zero coefficients.
struct Term {
    std::vector<std::pair<std::string, Val>> parts;
    Val k = 0;

    Term() = default;
    Term(Val c) : k(c) {} // NOLINT: implicit constant lift is intended

    static Term var(const std::string& name, Val coeff = 1) {
        Term t;
        if (coeff != 0) t.parts.emplace_back(name, coeff);
        return t;
    }

    bool is_const() const { return parts.empty(); }
    bool is_var() const { return parts.size() == 1 && parts[0].second == 1 && k == 0; }
    const std::string& var_name() const {
        if (!is_var()) throw internal_error("term is not a plain variable");
        return parts[0].first;
    }

    Term& operator+=(const Term& o) {
        for (const auto& [v, c] : o.parts) add_part(v, c);
        k += o.k;
        return *this;
    }
    friend Term operator+(Term a, const Term& b) { return a += b; }

    Term scaled(Val n) const {
        Term t;
        if (n == 0) return t;
        t.parts = parts;
        for (auto& p : t.parts) p.second *= n;
        t.k = k * n;
        return t;
    }

    Term succ() const { return *this + Term(1); }

    template <typename Lookup> // Lookup: (const std::string&) -> Val
    Val eval(Lookup&& lookup) const {
        Val r = k;
        for (const auto& [v, c] : parts) r += c * lookup(v);
        return r;
    }

    void vars_into(std::set<std::string>& out) const {
        for (const auto& [v, c] : parts) out.insert(v);
    }

    auto operator<=>(const Term&) const = default;
    bool operator==(const Term&) const = default;

private:
    void add_part(const std::string& v, Val c) {
        if (c == 0) return;
        auto it = std::lower_bound(parts.begin(), parts.end(), v,
                                   [](const auto& p, const std::string& n) { return p.first < n; });
        if (it != parts.end() && it->first == v) {
            it->second += c;
            if (it->second == 0) parts.erase(it);
        } else {
            parts.insert(it, {v, c});
        }
    }
};

inline std::string to_string(const Term& t) {
    std::string s;
    for (const auto& [v, c] : t.parts) {
        if (!s.empty()) s += "+";
        if (c != 1) s += std::to_string(c) + "*";
        s += v;
    }
    if (t.k != 0 || s.empty()) {
        if (!s.empty()) s += "+";
        s += std::to_string(t.k);
    }
    return s;
}

// Hands out identifiers not colliding with a known used set.
// Primed names follow <base>' then <base>'2, <base>'3, ...
// Plain names try the base itself first.
class FreshNames {
public:
    FreshNames() = default;
    explicit FreshNames(std::set<std::string> used) : used_(std::move(used)) {}

    void reserve(const std::string& name) { used_.insert(name); }
    bool used(const std::string& name) const { return used_.count(name) != 0; }

    std::string fresh_primed(const std::string& base) {
        std::string cand = base + "'";
        for (int i = 2; used_.count(cand); ++i) cand = base + "'" + std::to_string(i);
        used_.insert(cand);
        return cand;
    }

    std::string fresh_plain(const std::string& base) {
        if (!used_.count(base)) {
            used_.insert(base);
            return base;
        }
        std::string cand;
        for (int i = 1;; ++i) {
            cand = base + std::to_string(i);
            if (!used_.count(cand)) break;
        }
        used_.insert(cand);
        return cand;
    }

private:
    std::set<std::string> used_;
};

} // namespace asl

#endif
