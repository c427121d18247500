#include "latsub/boxspline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

namespace latsub {

double hat(const std::vector<double>& x) {
    double v = 1.0;
    for (double xi : x) v *= std::max(0.0, 1.0 - std::fabs(xi));
    return v;
}

namespace {

int rank_of(const std::vector<Point>& vecs, int d) {
    std::vector<std::vector<Rat>> m;
    for (const auto& v : vecs) {
        std::vector<Rat> row(d);
        for (int i = 0; i < d; ++i) row[i] = Rat(v[i]);
        m.push_back(row);
    }
    int rank = 0;
    for (int col = 0; col < d && rank < static_cast<int>(m.size()); ++col) {
        int piv = -1;
        for (int r = rank; r < static_cast<int>(m.size()); ++r)
            if (m[r][col] != Rat(0)) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        for (int r = 0; r < static_cast<int>(m.size()); ++r) {
            if (r == rank || m[r][col] == Rat(0)) continue;
            Rat f = m[r][col] / m[rank][col];
            for (int c = col; c < d; ++c) m[r][c] -= f * m[rank][c];
        }
        ++rank;
    }
    return rank;
}

bool spans(const std::vector<Point>& vecs, int d) { return rank_of(vecs, d) == d; }

}  // namespace

DirectionMatrix::DirectionMatrix(std::vector<Point> dirs) {
    if (dirs.empty()) throw Error("empty direction family");
    d = static_cast<int>(dirs[0].size());
    for (const auto& v : dirs) {
        if (static_cast<int>(v.size()) != d) throw Error("direction dimension mismatch");
        if (inf_norm(v) == 0) throw Error("zero vector in direction family");
    }
    if (static_cast<int>(dirs.size()) < d) throw Error("need at least d directions");
    // Rearrange: greedily move a linearly independent base to the front.
    std::vector<Point> base, rest;
    for (const auto& v : dirs) {
        if (static_cast<int>(base.size()) < d) {
            base.push_back(v);
            if (rank_of(base, d) < static_cast<int>(base.size())) {
                base.pop_back();
                rest.push_back(v);
            }
        } else {
            rest.push_back(v);
        }
    }
    if (static_cast<int>(base.size()) != d)
        throw Error("direction family does not span R^d");
    vectors = base;
    vectors.insert(vectors.end(), rest.begin(), rest.end());

    // Exact inverse of the base matrix (columns are base vectors).
    int n = d;
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(2 * n, Rat(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = Rat(base[j][i]);
        m[i][n + i] = Rat(1);
    }
    Rat det(1);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (m[r][col] != Rat(0)) { piv = r; break; }
        if (piv < 0) throw Error("base block is singular");
        if (piv != col) {
            std::swap(m[col], m[piv]);
            det = -det;
        }
        det *= m[col][col];
        Rat p = m[col][col];
        for (int j = 0; j < 2 * n; ++j) m[col][j] /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == Rat(0)) continue;
            Rat f = m[r][col];
            for (int j = 0; j < 2 * n; ++j) m[r][j] -= f * m[col][j];
        }
    }
    base_inv.assign(n, std::vector<Rat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) base_inv[i][j] = m[i][n + j];
    Rat da = rat_abs(det);
    if (da.denominator() != 1) throw Error("internal: integer determinant expected");
    detbase_abs = da.numerator();
}

std::vector<Point> repeat_directions(const std::vector<Point>& dirs, int n) {
    if (n < 1) throw Error("multiplicity must be >= 1");
    std::vector<Point> out;
    for (const auto& v : dirs)
        for (int i = 0; i < n; ++i) out.push_back(v);
    return out;
}

int smoothness_order(const DirectionMatrix& dirs) {
    int n = dirs.count();
    int d = dirs.d;
    // Smallest deletion count that breaks spanning, minus 2.
    for (int k = 1; k <= n; ++k) {
        std::vector<int> pick(k);
        bool broken = false;
        auto rec = [&](auto&& self, int pos, int start) -> void {
            if (broken) return;
            if (pos == k) {
                std::vector<Point> kept;
                std::vector<bool> del(n, false);
                for (int i : pick) del[i] = true;
                for (int i = 0; i < n; ++i)
                    if (!del[i]) kept.push_back(dirs.vectors[i]);
                if (kept.empty() || !spans(kept, d)) broken = true;
                return;
            }
            for (int i = start; i < n; ++i) {
                pick[pos] = i;
                self(self, pos + 1, i + 1);
            }
        };
        rec(rec, 0, 0);
        if (broken) return k - 2;
    }
    return n - 2;
}

BoxSpline::BoxSpline(DirectionMatrix dirs, double quad_tol)
    : dirs_(std::move(dirs)), tol_(quad_tol) {
    smoothness_ = smoothness_order(dirs_);
    // Support boxes of the prefix families X_d..X_n (for the base case the
    // box of the base parallelepiped), used to clip the quadrature window.
    int d = dirs_.d;
    prefix_lo_.assign(dirs_.count() + 1, std::vector<double>(d, 0.0));
    prefix_hi_.assign(dirs_.count() + 1, std::vector<double>(d, 0.0));
    for (int k = 1; k <= dirs_.count(); ++k) {
        prefix_lo_[k] = prefix_lo_[k - 1];
        prefix_hi_[k] = prefix_hi_[k - 1];
        for (int i = 0; i < d; ++i) {
            prefix_lo_[k][i] += std::min(0, dirs_.vectors[k - 1][i]);
            prefix_hi_[k][i] += std::max(0, dirs_.vectors[k - 1][i]);
        }
    }
}

void BoxSpline::support_box(std::vector<double>& lo, std::vector<double>& hi) const {
    lo.assign(dirs_.d, 0.0);
    hi.assign(dirs_.d, 0.0);
    for (const auto& v : dirs_.vectors)
        for (int i = 0; i < dirs_.d; ++i) {
            lo[i] += std::min(0, v[i]);
            hi[i] += std::max(0, v[i]);
        }
}

namespace {

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class F>
double integrate_interval(const F& f, double a, double b, double tol) {
    // Force a few splits before trusting the error estimate; box-spline
    // integrands are piecewise polynomials with interior kinks.
    double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    double whole = (b - a) * (fa + 4 * fm + fb) / 6.0;
    double acc = 0;
    const int pieces = 4;
    for (int i = 0; i < pieces; ++i) {
        double x0 = a + (b - a) * i / pieces;
        double x1 = a + (b - a) * (i + 1) / pieces;
        double g0 = f(x0), gm = f(0.5 * (x0 + x1)), g1 = f(x1);
        double w = (x1 - x0) * (g0 + 4 * gm + g1) / 6.0;
        acc += adaptive_simpson(f, x0, x1, g0, gm, g1, w, tol / pieces, 26);
    }
    (void)whole;
    return acc;
}

std::vector<long long> bit_key(const std::vector<double>& x) {
    std::vector<long long> key(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        long long bits;
        static_assert(sizeof(bits) == sizeof(double));
        std::memcpy(&bits, &x[i], sizeof(bits));
        key[i] = bits;
    }
    return key;
}

}  // namespace

double BoxSpline::eval_level(int k, const std::vector<double>& x) const {
    int d = dirs_.d;
    if (k == d) {
        // lambda = B^{-1} x in [0,1)^d  =>  1/|det B|.
        for (int i = 0; i < d; ++i) {
            double acc = 0;
            for (int j = 0; j < d; ++j) acc += to_double(dirs_.base_inv[i][j]) * x[j];
            if (acc < 0.0 || acc >= 1.0) return 0.0;
        }
        return 1.0 / static_cast<double>(dirs_.detbase_abs.convert_to<long long>());
    }
    auto key = std::make_pair(k, bit_key(x));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const Point& xk = dirs_.vectors[k - 1];
    // Clip the t-window to {t : x - t x_k inside supp X_{k-1}} so thin
    // slivers cannot slip between quadrature nodes.
    double t0 = 0.0, t1 = 1.0;
    for (int i = 0; i < d; ++i) {
        double lo = prefix_lo_[k - 1][i], hi = prefix_hi_[k - 1][i];
        int v = xk[i];
        if (v == 0) {
            if (x[i] < lo - 1e-14 || x[i] > hi + 1e-14) {
                memo_[key] = 0.0;
                return 0.0;
            }
        } else if (v > 0) {
            t0 = std::max(t0, (x[i] - hi) / v);
            t1 = std::min(t1, (x[i] - lo) / v);
        } else {
            t0 = std::max(t0, (x[i] - lo) / v);
            t1 = std::min(t1, (x[i] - hi) / v);
        }
    }
    double val = 0.0;
    if (t1 > t0) {
        auto f = [&](double t) {
            std::vector<double> y(x);
            for (int i = 0; i < d; ++i) y[i] -= t * xk[i];
            return eval_level(k - 1, y);
        };
        val = integrate_interval(f, t0, t1, tol_);
    }
    memo_[key] = val;
    return val;
}

double BoxSpline::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dirs_.d) throw Error("dimension mismatch");
    std::vector<double> lo, hi;
    support_box(lo, hi);
    for (int i = 0; i < dirs_.d; ++i)
        if (x[i] < lo[i] - 1e-14 || x[i] > hi[i] + 1e-14) return 0.0;
    return eval_level(dirs_.count(), x);
}

double directional_derivative(const Sequence<double>& coeffs, const BoxSpline& bs, int r_index,
                              const std::vector<double>& x) {
    const auto& dirs = bs.dirs();
    if (r_index < 0 || r_index >= dirs.count()) throw Error("direction index out of range");
    std::vector<Point> reduced;
    for (int i = 0; i < dirs.count(); ++i)
        if (i != r_index) reduced.push_back(dirs.vectors[i]);
    if (reduced.empty() || static_cast<int>(reduced.size()) < dirs.d || !spans(reduced, dirs.d))
        throw Error("deleting direction " + point_str(dirs.vectors[r_index]) +
                    " breaks spanning");
    BoxSpline rbs{DirectionMatrix(reduced)};
    const Point& xr = dirs.vectors[r_index];
    // Backward coefficient difference c_k - c_{k - x_r} against the reduced
    // spline; include points just past the support where the difference is
    // nonzero.
    std::map<Point, double> diff;
    for (const auto& [k, c] : coeffs.values()) {
        diff[k] += c;
        diff[point_add(k, xr)] -= c;
    }
    double acc = 0;
    for (const auto& [k, dc] : diff) {
        if (dc == 0.0) continue;
        std::vector<double> y(x.size());
        for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] - k[i];
        acc += dc * rbs.eval(y);
    }
    return acc;
}

ReproductionCheck polynomial_reproduction_check(const BoxSpline& bs, const Point& monomial,
                                                int window, unsigned seed) {
    int d = bs.dim();
    int degree = index_sum(monomial);
    if (degree > bs.smoothness() + 1)
        throw Error("degree " + std::to_string(degree) + " exceeds r+1 = " +
                    std::to_string(bs.smoothness() + 1));

    std::vector<Point> basis;
    for (int t = 0; t <= degree; ++t)
        for (const auto& e : multiindices(d, t)) basis.push_back(e);

    int nsamples = static_cast<int>(basis.size()) + 5 + 3 * d;
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) {
        return a + (b - a) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
    };

    std::vector<double> lo, hi;
    bs.support_box(lo, hi);
    Eigen::MatrixXd A(nsamples, basis.size());
    Eigen::VectorXd b(nsamples);
    for (int s = 0; s < nsamples; ++s) {
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i) x[i] = uni(-window / 2.0, window / 2.0);
        double val = 0;
        Point k(d);
        std::vector<int> klo(d), khi(d);
        for (int i = 0; i < d; ++i) {
            klo[i] = static_cast<int>(std::floor(x[i] - hi[i])) - 1;
            khi[i] = static_cast<int>(std::ceil(x[i] - lo[i])) + 1;
        }
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == d) {
                double c = 1.0;
                for (int i = 0; i < d; ++i)
                    c *= std::pow(static_cast<double>(k[i]), monomial[i]);
                if (c != 0.0 || degree == 0) {
                    std::vector<double> y(d);
                    for (int i = 0; i < d; ++i) y[i] = x[i] - k[i];
                    val += c * bs.eval(y);
                }
                return;
            }
            for (int v = klo[axis]; v <= khi[axis]; ++v) {
                k[axis] = v;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
        b(s) = val;
        for (size_t j = 0; j < basis.size(); ++j) {
            double t = 1.0;
            for (int i = 0; i < d; ++i) t *= std::pow(x[i], basis[j][i]);
            A(s, j) = t;
        }
    }
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    double resid = (A * coef - b).lpNorm<Eigen::Infinity>();

    ReproductionCheck out;
    out.residual = resid;
    out.reproduced = resid < 1e-8;
    for (size_t j = 0; j < basis.size(); ++j) {
        if (index_sum(basis[j]) == degree) {
            out.leading.push_back(coef(j));
            out.leading_monomials.push_back(basis[j]);
        }
    }
    return out;
}

RenderBasis RenderBasis::hat_basis(int d) {
    RenderBasis b;
    b.kind = HatBasis;
    b.d = d;
    return b;
}

RenderBasis RenderBasis::box_basis(std::vector<Point> dirs) {
    RenderBasis b;
    b.kind = BoxBasis;
    b.box = std::make_shared<BoxSpline>(DirectionMatrix(std::move(dirs)));
    b.d = b.box->dim();
    return b;
}

double RenderBasis::eval(const std::vector<double>& x) const {
    return kind == HatBasis ? hat(x) : box->eval(x);
}

void RenderBasis::support_box(std::vector<double>& lo, std::vector<double>& hi) const {
    if (kind == HatBasis) {
        lo.assign(d, -1.0);
        hi.assign(d, 1.0);
    } else {
        box->support_box(lo, hi);
    }
}

RefinementMask fit_refinement_mask(const RenderBasis& basis, const DilationMatrix& M,
                                   int support_bound, int grid) {
    int d = basis.d;
    if (M.dim() != d) throw Error("dimension mismatch");
    if (grid < 2) throw Error("grid must be >= 2");

    std::vector<double> lo, hi;
    basis.support_box(lo, hi);

    // Candidate translates: Phi(Mx - k) must overlap supp Phi.
    std::vector<Point> cands;
    {
        std::vector<int> klo(d), khi(d);
        for (int i = 0; i < d; ++i) {
            double mlo = 0, mhi = 0;
            for (int j = 0; j < d; ++j) {
                double a = M.entries()[i][j] * lo[j], b = M.entries()[i][j] * hi[j];
                mlo += std::min(a, b);
                mhi += std::max(a, b);
            }
            klo[i] = std::max(-support_bound, static_cast<int>(std::floor(mlo - hi[i])) - 1);
            khi[i] = std::min(support_bound, static_cast<int>(std::ceil(mhi - lo[i])) + 1);
        }
        Point k(d);
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == d) {
                cands.push_back(k);
                return;
            }
            for (int v = klo[axis]; v <= khi[axis]; ++v) {
                k[axis] = v;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
    }

    std::vector<std::vector<double>> samples;
    {
        std::vector<double> x(d);
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == d) {
                samples.push_back(x);
                return;
            }
            for (int g = 0; g < grid; ++g) {
                x[axis] = lo[axis] + (hi[axis] - lo[axis]) * (g + 0.5) / grid;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
    }
    if (samples.size() < cands.size())
        throw Error("grid too coarse: " + std::to_string(samples.size()) + " equations for " +
                    std::to_string(cands.size()) + " unknowns");

    Eigen::MatrixXd A(samples.size(), cands.size());
    Eigen::VectorXd b(samples.size());
    for (size_t s = 0; s < samples.size(); ++s) {
        b(s) = basis.eval(samples[s]);
        std::vector<double> mx(d, 0.0);
        for (int i = 0; i < d; ++i) {
            double acc = 0;
            for (int j = 0; j < d; ++j) acc += M.entries()[i][j] * samples[s][j];
            mx[i] = acc;
        }
        for (size_t c = 0; c < cands.size(); ++c) {
            std::vector<double> y(d);
            for (int i = 0; i < d; ++i) y[i] = mx[i] - cands[c][i];
            A(s, c) = basis.eval(y);
        }
    }
    Eigen::VectorXd g = A.colPivHouseholderQr().solve(b);
    double resid = (A * g - b).lpNorm<Eigen::Infinity>();

    RefinementMask out;
    out.residual = resid;
    out.ok = resid < 1e-8;
    for (size_t c = 0; c < cands.size(); ++c) {
        if (std::fabs(g(c)) < 1e-9) continue;
        out.mask[cands[c]] = g(c);
        double v = g(c);
        long best_num = 0, best_den = 1;
        double best_err = 1e300;
        for (long den = 1; den <= 64; ++den) {
            long num = std::lround(v * den);
            double err = std::fabs(v - static_cast<double>(num) / den);
            if (err < best_err) {
                best_err = err;
                best_num = num;
                best_den = den;
            }
        }
        if (best_err < 1e-7) out.mask_snapped[cands[c]] = Rat(Int(best_num), Int(best_den));
    }
    return out;
}

}  // namespace latsub
