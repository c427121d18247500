#include "latsub/limit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace latsub {

CascadeState cascade(const SchemeSpec& s, const RatSeq& v0, int levels) {
    if (levels < 0) throw Error("levels must be >= 0");
    if (v0.dim() != s.dim()) throw Error("dimension mismatch");
    // Support grows by a factor of about m per level.
    constexpr size_t kMaxSupport = 4'000'000;
    double est = static_cast<double>(std::max<size_t>(v0.support_size(), 1));
    int feasible = 0;
    for (int j = 0; j < levels; ++j) {
        est *= static_cast<double>(s.m());
        if (est <= static_cast<double>(kMaxSupport)) feasible = j + 1;
    }
    if (est > static_cast<double>(kMaxSupport))
        throw Error("cascade to level " + std::to_string(levels) +
                    " exceeds the memory budget; feasible level is " + std::to_string(feasible));
    CascadeState st;
    st.level = 0;
    st.values = v0;
    for (int j = 0; j < levels; ++j) {
        st.values = subdivide(s, st.values);
        st.level += 1;
    }
    return st;
}

double RenderField::min_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
}

double RenderField::max_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::max(m, v);
    return m;
}

namespace {

std::vector<double> to_real(const DilationMatrix& M, int level, const Point& k) {
    // M^{-level} k via the exact inverse.
    std::vector<Rat> cur(k.size());
    for (size_t i = 0; i < k.size(); ++i) cur[i] = Rat(k[i]);
    for (int t = 0; t < level; ++t) {
        std::vector<Rat> nxt(cur.size(), Rat(0));
        for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = 0; j < cur.size(); ++j) nxt[i] += M.inverse()[i][j] * cur[j];
        cur = nxt;
    }
    std::vector<double> out(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) out[i] = to_double(cur[i]);
    return out;
}

/// Evaluate sum_k v_k Phi(y - k) at y (coefficient grid coordinates).
double eval_comb(const RatSeq& v, const RenderBasis& basis, const std::vector<double>& y) {
    int d = v.dim();
    std::vector<double> lo, hi;
    basis.support_box(lo, hi);
    std::vector<int> klo(d), khi(d);
    for (int i = 0; i < d; ++i) {
        klo[i] = static_cast<int>(std::floor(y[i] - hi[i]));
        khi[i] = static_cast<int>(std::ceil(y[i] - lo[i]));
    }
    double acc = 0;
    Point k(d);
    auto rec = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            Rat c = v.at(k);
            if (c != Rat(0)) {
                std::vector<double> z(d);
                for (int i = 0; i < d; ++i) z[i] = y[i] - k[i];
                acc += to_double(c) * basis.eval(z);
            }
            return;
        }
        for (int t = klo[axis]; t <= khi[axis]; ++t) {
            k[axis] = t;
            self(self, axis + 1);
        }
    };
    rec(rec, 0);
    return acc;
}

std::vector<double> apply_pow_real(const DilationMatrix& M, int level,
                                   const std::vector<double>& x) {
    std::vector<double> cur = x;
    for (int t = 0; t < level; ++t) {
        std::vector<double> nxt(cur.size(), 0.0);
        for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = 0; j < cur.size(); ++j)
                nxt[i] += static_cast<double>(M.entries()[i][j]) * cur[j];
        cur = nxt;
    }
    return cur;
}

}  // namespace

double render_at(const SchemeSpec& s, const CascadeState& state, const RenderBasis& basis,
                 const std::vector<double>& x) {
    return eval_comb(state.values, basis, apply_pow_real(s.M(), state.level, x));
}

RenderField render(const SchemeSpec& s, const CascadeState& state, const RenderBasis& basis,
                   const std::vector<int>& grid) {
    int d = s.dim();
    if (static_cast<int>(grid.size()) != d) throw Error("grid rank mismatch");
    for (int g : grid)
        if (g < 2) throw Error("grid must be >= 2 per axis");

    RenderField f;
    f.shape = grid;
    f.lo.assign(d, 0.0);
    f.hi.assign(d, 0.0);
    bool first = true;
    for (const auto& [k, c] : state.values.values()) {
        auto x = to_real(s.M(), state.level, k);
        for (int i = 0; i < d; ++i) {
            if (first) {
                f.lo[i] = x[i];
                f.hi[i] = x[i];
            } else {
                f.lo[i] = std::min(f.lo[i], x[i]);
                f.hi[i] = std::max(f.hi[i], x[i]);
            }
        }
        first = false;
    }
    for (int i = 0; i < d; ++i) {
        f.lo[i] -= 0.5;
        f.hi[i] += 0.5;
        if (f.hi[i] <= f.lo[i]) f.hi[i] = f.lo[i] + 1.0;
    }

    size_t total = 1;
    for (int g : grid) total *= static_cast<size_t>(g);
    f.values.resize(total);
    std::vector<int> idx(d, 0);
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        for (int i = d - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % grid[i]);
            rem /= grid[i];
        }
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i)
            x[i] = f.lo[i] + (f.hi[i] - f.lo[i]) * idx[i] / (grid[i] - 1);
        f.values[flat] = render_at(s, state, basis, x);
    }
    return f;
}

void write_csv(std::ostream& out, const RenderField& f) {
    out.precision(17);
    int d = static_cast<int>(f.shape.size());
    std::vector<int> idx(d, 0);
    size_t total = f.values.size();
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        for (int i = d - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % f.shape[i]);
            rem /= f.shape[i];
        }
        for (int i = 0; i < d; ++i)
            out << (f.lo[i] + (f.hi[i] - f.lo[i]) * idx[i] / (f.shape[i] - 1)) << ",";
        out << f.values[flat] << "\n";
    }
}

void write_pgm(std::ostream& out, const RenderField& f) {
    if (f.shape.size() != 2) throw Error("pgm output requires a 2-d field");
    double lo = f.min_value(), hi = f.max_value();
    double span = hi - lo;
    if (span <= 0) span = 1;
    out << "P5\n" << f.shape[1] << " " << f.shape[0] << "\n255\n";
    for (double v : f.values) {
        int g = static_cast<int>(std::lround(255.0 * (v - lo) / span));
        g = std::clamp(g, 0, 255);
        out.put(static_cast<char>(g));
    }
}

namespace {

/// True when every order-2 difference whose full stencil stays inside the
/// support bounding box vanishes (constant or affine samples).
bool exactly_affine(const RatSeq& v) {
    Point lo, hi;
    v.bounds(lo, hi);
    if (lo.empty()) return true;
    int d = v.dim();
    for (const auto& mu : multiindices(d, 2)) {
        auto diff = forward_difference(v, mu);
        for (const auto& [p, c] : diff.values()) {
            bool interior = true;
            for (int i = 0; i < d; ++i)
                if (p[i] < lo[i] || p[i] + mu[i] > hi[i]) interior = false;
            if (interior && c != Rat(0)) return false;
        }
    }
    return true;
}

}  // namespace

DecayDiagnostic empirical_holder(const SchemeSpec& s, const RatSeq& v0, int levels) {
    if (levels < 4) throw Error("empirical Hoelder needs at least 4 levels");
    DecayDiagnostic d;
    if (exactly_affine(v0)) {
        d.degenerate = true;
        d.note = "exactly polynomial data";
        return d;
    }
    RatSeq v = v0;
    d.level_norms.push_back(block_norm_exact(delta_block(v, 1), PNorm::Inf));
    for (int j = 0; j < levels; ++j) {
        v = subdivide(s, v);
        d.level_norms.push_back(block_norm_exact(delta_block(v, 1), PNorm::Inf));
    }
    for (size_t j = 0; j + 1 < d.level_norms.size(); ++j) {
        if (d.level_norms[j] == Rat(0)) {
            d.degenerate = true;
            d.note = "exactly polynomial data";
            return d;
        }
        d.ratios.push_back(d.level_norms[j + 1] / d.level_norms[j]);
    }
    int tail = levels / 2;
    double logsum = 0;
    for (int t = 0; t < tail; ++t) {
        Rat r = d.ratios[d.ratios.size() - 1 - t];
        if (r == Rat(0)) {
            d.degenerate = true;
            d.note = "differences vanished during the cascade";
            return d;
        }
        logsum += std::log(to_double(r));
    }
    d.rho_emp = std::exp(logsum / tail);
    d.s_emp = -std::log(d.rho_emp) / std::log(static_cast<double>(s.m()));
    return d;
}

SobolevDecayReport sobolev_decay(const SchemeSpec& s, const RatSeq& v0, int levels,
                                 const RenderBasis& basis, const Point& mu, PNorm p,
                                 double certified_s_star, int grid_per_axis) {
    SobolevDecayReport rep;
    auto iso = classify_isotropy(s.M());
    if (!iso.isotropic()) {
        rep.note = "not applicable: M is anisotropic";
        return rep;
    }
    int order = index_sum(mu);
    if (order > 0 && basis.kind != RenderBasis::BoxBasis) {
        rep.note = "derivative diagnostics need a box-spline basis";
        return rep;
    }
    if (order > 0 && basis.box->smoothness() < order - 2) {
        rep.note = "basis smoothness below |mu| - 2";
        return rep;
    }
    if (order > 1) {
        rep.note = "orders |mu| > 1 not measured; certificate covers them by "
                   "the radius table";
        return rep;
    }
    rep.applicable = true;

    int d = s.dim();
    // Fixed sample grid in limit coordinates over the coarse support.
    std::vector<double> glo(d, 1e300), ghi(d, -1e300);
    for (const auto& [k, c] : v0.values())
        for (int i = 0; i < d; ++i) {
            glo[i] = std::min(glo[i], static_cast<double>(k[i]));
            ghi[i] = std::max(ghi[i], static_cast<double>(k[i]));
        }
    for (int i = 0; i < d; ++i) {
        double mid = 0.5 * (glo[i] + ghi[i]), half = 0.25 * (ghi[i] - glo[i]) + 0.5;
        glo[i] = mid - half;
        ghi[i] = mid + half;
    }
    std::vector<std::vector<double>> samples;
    {
        std::vector<double> x(d);
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == d) {
                samples.push_back(x);
                return;
            }
            for (int g = 0; g < grid_per_axis; ++g) {
                x[axis] = glo[axis] + (ghi[axis] - glo[axis]) * (g + 0.5) / grid_per_axis;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
    }

    int r_index = -1;
    if (order == 1)
        for (size_t i = 0; i < mu.size(); ++i)
            if (mu[i] == 1) r_index = static_cast<int>(i);

    std::vector<CascadeState> states;
    states.push_back(cascade(s, v0, 0));
    for (int j = 1; j <= levels; ++j) {
        CascadeState st;
        st.level = states.back().level + 1;
        st.values = subdivide(s, states.back().values);
        states.push_back(st);
    }
    std::vector<DblSeq> coeffs(states.size(), DblSeq(d));
    for (size_t j = 0; j < states.size(); ++j)
        for (const auto& [k, c] : states[j].values.values()) coeffs[j].set(k, to_double(c));

    // D_{x_r} F_j with z = M^j x_r expanded over the base directions.
    auto deriv_at = [&](size_t level_idx, const std::vector<double>& x) {
        const auto& st = states[level_idx];
        const auto& dm = basis.box->dirs();
        Point z = s.M().apply_pow(st.level, dm.vectors[r_index]);
        std::vector<Rat> alpha(d, Rat(0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) alpha[i] += dm.base_inv[i][j] * Rat(z[j]);
        std::vector<double> y = apply_pow_real(s.M(), st.level, x);
        double acc = 0;
        for (int i = 0; i < d; ++i) {
            if (alpha[i] == Rat(0)) continue;
            acc += to_double(alpha[i]) * directional_derivative(coeffs[level_idx], *basis.box, i, y);
        }
        return acc;
    };

    for (int j = 0; j + 1 <= levels; ++j) {
        double acc = 0;
        for (const auto& x : samples) {
            double a, b;
            if (order == 0) {
                a = render_at(s, states[j + 1], basis, x);
                b = render_at(s, states[j], basis, x);
            } else {
                a = deriv_at(j + 1, x);
                b = deriv_at(j, x);
            }
            double diff = std::fabs(a - b);
            switch (p) {
                case PNorm::Inf: acc = std::max(acc, diff); break;
                case PNorm::One: acc += diff; break;
                case PNorm::Two: acc += diff * diff; break;
            }
        }
        if (p == PNorm::Two) acc = std::sqrt(acc / samples.size());
        if (p == PNorm::One) acc /= samples.size();
        rep.level_norms.push_back(acc);
    }

    rep.s_star = certified_s_star;
    double sigma = std::pow(static_cast<double>(s.m()), 1.0 / d);
    rep.predicted_slope = (order - certified_s_star) * std::log(sigma);
    int used = 0;
    double slope = 0;
    for (size_t j = 0; j + 1 < rep.level_norms.size(); ++j) {
        if (rep.level_norms[j] > 1e-14 && rep.level_norms[j + 1] > 1e-15) {
            slope += std::log(rep.level_norms[j + 1] / rep.level_norms[j]);
            ++used;
        }
    }
    if (used > 0)
        rep.measured_slope = slope / used;
    else
        rep.note = "derivative differences below measurement precision";
    return rep;
}

}  // namespace latsub
