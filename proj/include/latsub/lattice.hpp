#pragma once

#include <optional>
#include <vector>

#include "latsub/point.hpp"
#include "latsub/rational.hpp"

namespace latsub {

/// Integer expanding matrix M with exact inverse and coset machinery.
class DilationMatrix {
public:
    /// Validates expansion (all eigenvalue moduli > 1, checked to 1e-10).
    /// Moduli within 1e-10 of 1 raise "indeterminate expansion".
    explicit DilationMatrix(std::vector<std::vector<long long>> entries);

    int dim() const { return d_; }
    long long det_abs() const { return m_; }  // m = |det M|
    const std::vector<std::vector<long long>>& entries() const { return entries_; }
    const std::vector<std::vector<Rat>>& inverse() const { return inverse_; }

    Point apply(const Point& k) const;          // M k
    Point apply_pow(int j, const Point& k) const;  // M^j k
    std::vector<Rat> apply_inverse(const Point& k) const;  // M^{-1} k, exact
    /// M^{-1} k if it is integral.
    std::optional<Point> preimage(const Point& k) const;

    Rat inf_norm() const;  // max absolute row sum, exact

private:
    int d_;
    long long m_;
    std::vector<std::vector<long long>> entries_;
    std::vector<std::vector<Rat>> inverse_;
};

/// true iff square integer matrix has det != 0 and all eigenvalue moduli > 1.
bool is_dilation(const std::vector<std::vector<long long>>& entries);

/// Canonical coset representatives {k : M^{-1}k in [0,1)^d}; eps_0 = 0 first,
/// remainder lexicographic.
class CosetSet {
public:
    explicit CosetSet(const DilationMatrix& M);

    int count() const { return static_cast<int>(reps_.size()); }
    const Point& rep(int i) const { return reps_[i]; }
    const std::vector<Point>& reps() const { return reps_; }

    /// p = M*base + rep(coset); unique.
    struct Decomposition {
        Point base;
        int coset;
    };
    Decomposition decompose(const Point& p) const;

private:
    DilationMatrix M_;
    std::vector<Point> reps_;
};

struct IsotropyInfo {
    enum Kind { Isotropic, Cyclic, Anisotropic } kind;
    double sigma = 0.0;  // m^{1/d} when isotropic/cyclic
    int q = 0;           // smallest q with M^q = lambda*I (cyclic)
    long long lambda = 0;

    bool isotropic() const { return kind != Anisotropic; }
    std::string describe() const;
};

IsotropyInfo classify_isotropy(const DilationMatrix& M, int q_max = 8);

}  // namespace latsub
