#pragma once

#include <map>
#include <memory>
#include <vector>

#include "latsub/gridseq.hpp"
#include "latsub/lattice.hpp"

namespace latsub {

/// Tensor hat function: prod_i max(0, 1 - |x_i|).
double hat(const std::vector<double>& x);

/// Ordered direction family X_n, rearranged so the first d vectors are
/// linearly independent (the box-spline base case parallelepiped).
struct DirectionMatrix {
    std::vector<Point> vectors;  // rearranged order
    int d = 0;
    Int detbase_abs;                      // |det| of the base block
    std::vector<std::vector<Rat>> base_inv;  // exact inverse of the base

    explicit DirectionMatrix(std::vector<Point> dirs);
    int count() const { return static_cast<int>(vectors.size()); }
};

/// N-fold repetition of every direction (the Y_N family).
std::vector<Point> repeat_directions(const std::vector<Point>& dirs, int n);

/// Largest r such that deleting any r+1 vectors still spans R^d
/// (box spline is then C^r); r = -1 for the bare parallelepiped.
int smoothness_order(const DirectionMatrix& dirs);

class BoxSpline {
public:
    explicit BoxSpline(DirectionMatrix dirs, double quad_tol = 1e-10);

    const DirectionMatrix& dirs() const { return dirs_; }
    int dim() const { return dirs_.d; }
    int smoothness() const { return smoothness_; }
    /// Support bounding box [X][0,1]^n.
    void support_box(std::vector<double>& lo, std::vector<double>& hi) const;

    /// Recursive evaluation by 1-D adaptive quadrature, memoized.
    double eval(const std::vector<double>& x) const;

private:
    double eval_level(int k, const std::vector<double>& x) const;

    DirectionMatrix dirs_;
    int smoothness_;
    double tol_;
    std::vector<std::vector<double>> prefix_lo_, prefix_hi_;
    mutable std::map<std::pair<int, std::vector<long long>>, double> memo_;
};

/// D_{x_r} sum_k c_k beta(x - k): backward coefficient differences against
/// the deleted-direction spline. Throws when the deletion breaks spanning.
double directional_derivative(const Sequence<double>& coeffs, const BoxSpline& bs, int r_index,
                              const std::vector<double>& x);

struct ReproductionCheck {
    bool reproduced = false;
    double residual = 0;
    std::vector<double> leading;  // fitted coefficients of the top-degree monomials
    std::vector<Point> leading_monomials;
};

/// Verifies sum_k c(k) beta(x-k) is a polynomial of the same total degree
/// with identical leading coefficients (sampled exact-fit test).
ReproductionCheck polynomial_reproduction_check(const BoxSpline& bs, const Point& monomial,
                                                int window, unsigned seed = 1);

/// Rendering basis: the hat function or a box spline.
struct RenderBasis {
    enum Kind { HatBasis, BoxBasis } kind = HatBasis;
    int d = 1;
    std::shared_ptr<BoxSpline> box;

    static RenderBasis hat_basis(int d);
    static RenderBasis box_basis(std::vector<Point> dirs);
    double eval(const std::vector<double>& x) const;
    void support_box(std::vector<double>& lo, std::vector<double>& hi) const;
    bool interpolating_on_lattice() const { return kind == HatBasis; }
};

struct RefinementMask {
    bool ok = false;
    double residual = 0;                 // sup-norm scaling-equation defect
    std::map<Point, double> mask;        // g_k
    std::map<Point, Rat> mask_snapped;   // entries snapped to small rationals
};

/// Least-squares fit of Phi(x) = sum_k g_k Phi(M x - k) on a sample grid;
/// ok iff the residual is below 1e-8.
RefinementMask fit_refinement_mask(const RenderBasis& basis, const DilationMatrix& M,
                                   int support_bound, int grid);

}  // namespace latsub
