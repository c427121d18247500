#pragma once

#include <map>
#include <string>
#include <vector>

#include "latsub/point.hpp"
#include "latsub/rational.hpp"

namespace latsub {

/// Multivariate polynomial with exact rational coefficients,
/// stored as exponent vector -> coefficient.
struct Polynomial {
    int nvars;
    std::map<Point, Rat> coeffs;

    Polynomial() : nvars(0) {}
    explicit Polynomial(int n) : nvars(n) {}

    static Polynomial constant(int n, const Rat& c) {
        Polynomial p(n);
        if (c != Rat(0)) p.coeffs[Point(n, 0)] = c;
        return p;
    }
    static Polynomial monomial(int n, const Point& expo, const Rat& c = Rat(1)) {
        Polynomial p(n);
        if (c != Rat(0)) p.coeffs[expo] = c;
        return p;
    }

    void add_term(const Point& expo, const Rat& c) {
        auto it = coeffs.find(expo);
        if (it == coeffs.end()) {
            if (c != Rat(0)) coeffs[expo] = c;
        } else {
            it->second += c;
            if (it->second == Rat(0)) coeffs.erase(it);
        }
    }

    Polynomial operator+(const Polynomial& o) const {
        Polynomial r = *this;
        for (const auto& [e, c] : o.coeffs) r.add_term(e, c);
        return r;
    }
    Polynomial operator-(const Polynomial& o) const {
        Polynomial r = *this;
        for (const auto& [e, c] : o.coeffs) r.add_term(e, -c);
        return r;
    }
    Polynomial operator*(const Polynomial& o) const {
        Polynomial r(nvars);
        for (const auto& [e1, c1] : coeffs)
            for (const auto& [e2, c2] : o.coeffs) r.add_term(point_add(e1, e2), c1 * c2);
        return r;
    }
    Polynomial operator*(const Rat& c) const {
        Polynomial r(nvars);
        for (const auto& [e, v] : coeffs) r.add_term(e, v * c);
        return r;
    }

    bool zero() const { return coeffs.empty(); }
    int total_degree() const {
        int deg = -1;
        for (const auto& [e, c] : coeffs) deg = std::max(deg, index_sum(e));
        return deg;
    }

    /// Terms of exact total degree deg.
    Polynomial homogeneous_part(int deg) const {
        Polynomial r(nvars);
        for (const auto& [e, c] : coeffs)
            if (index_sum(e) == deg) r.coeffs.emplace(e, c);
        return r;
    }

    Rat eval(const std::vector<Rat>& x) const {
        Rat acc(0);
        for (const auto& [e, c] : coeffs) {
            Rat t = c;
            for (int i = 0; i < nvars; ++i) t *= rat_pow(x[i], e[i]);
            acc += t;
        }
        return acc;
    }

    /// P(x + c) for a rational shift c.
    Polynomial shifted(const std::vector<Rat>& c) const;

    std::string str() const;
};

/// prod_i (x_i + c_i)^{mu_i} expanded exactly.
Polynomial shifted_monomial(const Point& mu, const std::vector<Rat>& c);

}  // namespace latsub
