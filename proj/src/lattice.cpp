#include "latsub/lattice.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace latsub {

namespace {

Int exact_det(const std::vector<std::vector<long long>>& a) {
    // Fraction-free Gaussian elimination (Bareiss).
    int n = static_cast<int>(a.size());
    std::vector<std::vector<Int>> m(n, std::vector<Int>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = Int(a[i][j]);
    Int prev(1);
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int piv = -1;
            for (int r = k + 1; r < n; ++r)
                if (m[r][k] != 0) { piv = r; break; }
            if (piv < 0) return Int(0);
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return Int(sign) * m[n - 1][n - 1];
}

std::vector<std::vector<Rat>> exact_inverse(const std::vector<std::vector<long long>>& a) {
    int n = static_cast<int>(a.size());
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(2 * n, Rat(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = Rat(Int(a[i][j]), Int(1));
        m[i][n + i] = Rat(1);
    }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (m[r][col] != Rat(0)) { piv = r; break; }
        if (piv < 0) throw Error("matrix is singular");
        std::swap(m[col], m[piv]);
        Rat p = m[col][col];
        for (int j = 0; j < 2 * n; ++j) m[col][j] /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == Rat(0)) continue;
            Rat f = m[r][col];
            for (int j = 0; j < 2 * n; ++j) m[r][j] -= f * m[col][j];
        }
    }
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv[i][j] = m[i][n + j];
    return inv;
}

std::vector<double> eigen_moduli(const std::vector<std::vector<long long>>& a) {
    int n = static_cast<int>(a.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(a[i][j]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<double> mods(n);
    for (int i = 0; i < n; ++i) mods[i] = std::abs(es.eigenvalues()[i]);
    return mods;
}

constexpr double kEigTol = 1e-10;

}  // namespace

bool is_dilation(const std::vector<std::vector<long long>>& entries) {
    int n = static_cast<int>(entries.size());
    if (n == 0) throw Error("empty matrix");
    for (const auto& row : entries)
        if (static_cast<int>(row.size()) != n) throw Error("matrix is not square");
    if (exact_det(entries) == 0) return false;
    bool all_above = true;
    for (double mod : eigen_moduli(entries)) {
        if (std::abs(mod - 1.0) <= kEigTol)
            throw Error("indeterminate expansion: eigenvalue modulus within 1e-10 of 1");
        if (mod < 1.0) all_above = false;
    }
    return all_above;
}

DilationMatrix::DilationMatrix(std::vector<std::vector<long long>> entries)
    : entries_(std::move(entries)) {
    d_ = static_cast<int>(entries_.size());
    for (const auto& row : entries_)
        if (static_cast<int>(row.size()) != d_) throw Error("matrix is not square");
    Int det = exact_det(entries_);
    if (det == 0) throw Error("not a dilation matrix: det = 0");
    for (double mod : eigen_moduli(entries_)) {
        if (std::abs(mod - 1.0) <= kEigTol)
            throw Error("indeterminate expansion: eigenvalue modulus within 1e-10 of 1");
        if (mod < 1.0)
            throw Error("not expanding: eigenvalue modulus " + std::to_string(mod) + " < 1");
    }
    Int mabs = det < 0 ? -det : det;
    m_ = mabs.convert_to<long long>();
    if (m_ < 2) throw Error("not a dilation matrix: |det| < 2");
    inverse_ = exact_inverse(entries_);
}

Point DilationMatrix::apply(const Point& k) const {
    Point r(d_, 0);
    for (int i = 0; i < d_; ++i) {
        long long s = 0;
        for (int j = 0; j < d_; ++j) s += entries_[i][j] * k[j];
        r[i] = static_cast<int>(s);
    }
    return r;
}

Point DilationMatrix::apply_pow(int j, const Point& k) const {
    Point r = k;
    for (int t = 0; t < j; ++t) r = apply(r);
    return r;
}

std::vector<Rat> DilationMatrix::apply_inverse(const Point& k) const {
    std::vector<Rat> r(d_, Rat(0));
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) r[i] += inverse_[i][j] * Rat(k[j]);
    return r;
}

std::optional<Point> DilationMatrix::preimage(const Point& k) const {
    auto r = apply_inverse(k);
    Point p(d_);
    for (int i = 0; i < d_; ++i) {
        if (r[i].denominator() != 1) return std::nullopt;
        p[i] = static_cast<int>(r[i].numerator().convert_to<long long>());
    }
    return p;
}

Rat DilationMatrix::inf_norm() const {
    Rat best(0);
    for (int i = 0; i < d_; ++i) {
        Rat s(0);
        for (int j = 0; j < d_; ++j) s += Rat(std::abs(entries_[i][j]));
        best = std::max(best, s);
    }
    return best;
}

CosetSet::CosetSet(const DilationMatrix& M) : M_(M) {
    int d = M.dim();
    // Scan the integer bounding box of M [0,1)^d.
    std::vector<long long> lo(d, 0), hi(d, 0);
    int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        for (int i = 0; i < d; ++i) {
            long long v = 0;
            for (int j = 0; j < d; ++j)
                if (c & (1 << j)) v += M.entries()[i][j];
            lo[i] = std::min(lo[i], v);
            hi[i] = std::max(hi[i], v);
        }
    }
    std::vector<Point> found;
    Point k(d);
    auto scan = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            auto x = M.apply_inverse(k);
            for (int i = 0; i < d; ++i)
                if (x[i] < Rat(0) || x[i] >= Rat(1)) return;
            found.push_back(k);
            return;
        }
        for (long long v = lo[axis]; v <= hi[axis]; ++v) {
            k[axis] = static_cast<int>(v);
            self(self, axis + 1);
        }
    };
    scan(scan, 0);
    std::sort(found.begin(), found.end());
    Point zero(d, 0);
    reps_.push_back(zero);
    for (const auto& p : found)
        if (p != zero) reps_.push_back(p);
    if (static_cast<long long>(reps_.size()) != M.det_abs())
        throw Error("coset scan found " + std::to_string(reps_.size()) +
                    " representatives, expected " + std::to_string(M.det_abs()));
}

CosetSet::Decomposition CosetSet::decompose(const Point& p) const {
    for (int i = 0; i < count(); ++i) {
        auto base = M_.preimage(point_sub(p, reps_[i]));
        if (base) return {*base, i};
    }
    throw Error("coset decomposition failed for " + point_str(p));
}

IsotropyInfo classify_isotropy(const DilationMatrix& M, int q_max) {
    if (q_max < 1) throw Error("q_max must be >= 1");
    int d = M.dim();
    IsotropyInfo info;
    info.sigma = std::pow(static_cast<double>(M.det_abs()), 1.0 / d);

    // Exact integer check for M^q = lambda I.
    std::vector<std::vector<Int>> pw(d, std::vector<Int>(d, Int(0)));
    for (int i = 0; i < d; ++i) pw[i][i] = 1;
    for (int q = 1; q <= q_max; ++q) {
        std::vector<std::vector<Int>> nxt(d, std::vector<Int>(d, Int(0)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int t = 0; t < d; ++t)
                    nxt[i][j] += pw[i][t] * Int(M.entries()[t][j]);
        pw = nxt;
        bool scalar = true;
        for (int i = 0; i < d && scalar; ++i)
            for (int j = 0; j < d && scalar; ++j)
                if (i != j ? pw[i][j] != 0 : pw[i][j] != pw[0][0]) scalar = false;
        if (scalar) {
            info.kind = IsotropyInfo::Cyclic;
            info.q = q;
            info.lambda = pw[0][0].convert_to<long long>();
            return info;
        }
    }

    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = static_cast<double>(M.entries()[i][j]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    double lo = 1e300, hi = 0;
    for (int i = 0; i < d; ++i) {
        double mod = std::abs(es.eigenvalues()[i]);
        lo = std::min(lo, mod);
        hi = std::max(hi, mod);
    }
    info.kind = (hi - lo <= 1e-10) ? IsotropyInfo::Isotropic : IsotropyInfo::Anisotropic;
    return info;
}

std::string IsotropyInfo::describe() const {
    switch (kind) {
        case Isotropic: return "isotropic (sigma = " + std::to_string(sigma) + ")";
        case Cyclic:
            return "cyclic (M^" + std::to_string(q) + " = " + std::to_string(lambda) +
                   " I, sigma = " + std::to_string(sigma) + ")";
        default: return "anisotropic";
    }
}

}  // namespace latsub
