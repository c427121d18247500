#include <random>

#include "doctest.h"
#include "latsub/boxspline.hpp"

using namespace latsub;

namespace {

// Closed-form three-direction element: piecewise-linear hat on the hexagon
// (0,0),(1,0),(2,1),(2,2),(1,2),(0,1) with peak 1 at (1,1).
double courant_closed_form(double x, double y) {
    static const double V[6][2] = {{0, 0}, {1, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 1}};
    const double cx = 1, cy = 1;
    for (int i = 0; i < 6; ++i) {
        const double* a = V[i];
        const double* b = V[(i + 1) % 6];
        double det = (a[0] - cx) * (b[1] - cy) - (b[0] - cx) * (a[1] - cy);
        double la = ((x - cx) * (b[1] - cy) - (b[0] - cx) * (y - cy)) / det;
        double lb = ((a[0] - cx) * (y - cy) - (x - cx) * (a[1] - cy)) / det;
        double lc = 1 - la - lb;
        if (la >= -1e-12 && lb >= -1e-12 && lc >= -1e-12) return lc;
    }
    return 0.0;
}

BoxSpline courant() { return BoxSpline{DirectionMatrix({{1, 0}, {0, 1}, {1, 1}})}; }

double uni(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
}

}  // namespace

TEST_CASE("hat function basics") {
    CHECK(hat({0.0, 0.0}) == 1.0);
    CHECK(hat({1.0, 0.3}) == 0.0);
    CHECK(hat({0.5}) == 0.5);
    // Partition of unity at random points.
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        double x = uni(rng, -3, 3), y = uni(rng, -3, 3);
        double sum = 0;
        for (int kx = -5; kx <= 5; ++kx)
            for (int ky = -5; ky <= 5; ++ky) sum += hat({x - kx, y - ky});
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("indicator box spline") {
    BoxSpline ind{DirectionMatrix({{1, 0}, {0, 1}})};
    CHECK(ind.smoothness() == -1);
    CHECK(ind.eval({0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(ind.eval({1.5, 0.5}) == 0.0);
    CHECK(ind.eval({-0.1, 0.5}) == 0.0);
}

TEST_CASE("courant element against the closed form") {
    auto bs = courant();
    CHECK(bs.smoothness() == 0);
    CHECK(bs.eval({1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-8));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        double x = uni(rng, -0.5, 2.5), y = uni(rng, -0.5, 2.5);
        CHECK(bs.eval({x, y}) == doctest::Approx(courant_closed_form(x, y)).epsilon(1e-7));
    }
}

TEST_CASE("partition of unity on a grid") {
    auto bs = courant();
    std::vector<double> lo, hi;
    bs.support_box(lo, hi);
    for (int gx = 0; gx < 13; ++gx)
        for (int gy = 0; gy < 13; ++gy) {
            double x = 0.03 + 0.97 * gx / 12.0, y = 0.05 + 0.9 * gy / 12.0;
            double sum = 0;
            for (int kx = -3; kx <= 3; ++kx)
                for (int ky = -3; ky <= 3; ++ky) sum += bs.eval({x - kx, y - ky});
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
        }
}

TEST_CASE("smoothness orders") {
    CHECK(smoothness_order(DirectionMatrix({{1, 0}, {0, 1}})) == -1);
    CHECK(smoothness_order(DirectionMatrix({{1, 0}, {0, 1}, {1, 1}})) == 0);
    // Y_2 doubling of the courant directions: only two copies of each
    // direction exist, so no 3 deletions strand a collinear remainder, while
    // deleting both copies of two directions does: C^2.
    auto y2 = repeat_directions({{1, 0}, {0, 1}, {1, 1}}, 2);
    CHECK(smoothness_order(DirectionMatrix(y2)) == 2);
    // Permutation invariance.
    CHECK(smoothness_order(DirectionMatrix({{1, 1}, {0, 1}, {1, 0}})) == 0);
}

TEST_CASE("nonnegative and unit integral (monte carlo)") {
    auto bs = courant();
    std::mt19937_64 rng(23);
    std::vector<double> lo, hi;
    bs.support_box(lo, hi);
    double vol = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    double acc = 0;
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
        double x = uni(rng, lo[0], hi[0]), y = uni(rng, lo[1], hi[1]);
        double v = bs.eval({x, y});
        CHECK(v >= -1e-12);
        acc += v;
    }
    CHECK(acc / n * vol == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("directional derivative vs central differences") {
    auto bs = courant();
    // Affine coefficients c_k = k_1 -> D_{e1} s = 1 on the interior.
    DblSeq c(2);
    for (int kx = -6; kx <= 6; ++kx)
        for (int ky = -6; ky <= 6; ++ky) c.set({kx, ky}, static_cast<double>(kx));
    CHECK(directional_derivative(c, bs, 0, {0.37, 0.21}) == doctest::Approx(1.0).epsilon(1e-7));

    // Random coefficients, 20 interior points, rel err 1e-6 off mesh planes.
    std::mt19937_64 rng(31);
    DblSeq r(2);
    for (int kx = -6; kx <= 6; ++kx)
        for (int ky = -6; ky <= 6; ++ky) r.set({kx, ky}, uni(rng, -1, 1));
    auto s_eval = [&](double x, double y) {
        double acc = 0;
        for (int kx = -6; kx <= 6; ++kx)
            for (int ky = -6; ky <= 6; ++ky) acc += r.at({kx, ky}) * bs.eval({x - kx, y - ky});
        return acc;
    };
    int checked = 0;
    while (checked < 20) {
        double x = uni(rng, -1.5, 1.5), y = uni(rng, -1.5, 1.5);
        // Stay away from the mesh planes of the three-direction grid.
        auto frac = [](double t) { return std::fabs(t - std::round(t)); };
        if (frac(x) < 0.05 || frac(y) < 0.05 || frac(x - y) < 0.05) continue;
        double h = 1e-5;
        double fd = (s_eval(x + h, y) - s_eval(x - h, y)) / (2 * h);
        double an = directional_derivative(r, bs, 0, {x, y});
        CHECK(an == doctest::Approx(fd).epsilon(1e-6));
        ++checked;
    }

    DblSeq constant(2);
    for (int kx = -3; kx <= 3; ++kx)
        for (int ky = -3; ky <= 3; ++ky) constant.set({kx, ky}, 4.5);
    CHECK(directional_derivative(constant, bs, 0, {0.4, 0.3}) == doctest::Approx(0.0));

    BoxSpline ind{DirectionMatrix({{1, 0}, {0, 1}})};
    CHECK_THROWS_AS(directional_derivative(constant, ind, 0, {0.5, 0.5}), Error);
}

TEST_CASE("polynomial reproduction of the courant element") {
    auto bs = courant();
    auto chk0 = polynomial_reproduction_check(bs, {0, 0}, 6);
    CHECK(chk0.reproduced);  // partition of unity
    auto chk1 = polynomial_reproduction_check(bs, {1, 0}, 6);
    CHECK(chk1.reproduced);
    REQUIRE(chk1.leading.size() == 2);
    // Leading coefficient 1 on x_1, 0 on x_2 (order: (1,0) then (0,1)).
    CHECK(chk1.leading[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(chk1.leading[1] == doctest::Approx(0.0).epsilon(1e-6));

    BoxSpline ind{DirectionMatrix({{1, 0}, {0, 1}})};
    CHECK_THROWS_AS(polynomial_reproduction_check(ind, {1, 0}, 6), Error);
}

TEST_CASE("refinement mask of the hat under 2I") {
    DilationMatrix two({{2, 0}, {0, 2}});
    auto mask = fit_refinement_mask(RenderBasis::hat_basis(2), two, 3, 16);
    CHECK(mask.ok);
    CHECK(mask.residual < 1e-10);
    // Tensor of (1/2, 1, 1/2) on {-1,0,1}^2.
    for (int kx = -1; kx <= 1; ++kx)
        for (int ky = -1; ky <= 1; ++ky) {
            double want = (kx == 0 ? 1.0 : 0.5) * (ky == 0 ? 1.0 : 0.5);
            CHECK(mask.mask.at({kx, ky}) == doctest::Approx(want).epsilon(1e-9));
        }
    CHECK(mask.mask_snapped.at({0, 0}) == Rat(1));
    CHECK(mask.mask_snapped.at({1, 0}) == Rat(1, 2));
}

TEST_CASE("refinement fit reports honest failures") {
    // The 1-d style hat is not refinable under the quincunx rotation at a
    // tight support bound; the fit must answer through the residual, not
    // by throwing.
    DilationMatrix quin({{-1, 1}, {1, 1}});
    auto fit = fit_refinement_mask(RenderBasis::hat_basis(2), quin, 2, 16);
    CHECK(fit.residual >= 0.0);
    CHECK(fit.ok == (fit.residual < 1e-8));
}

TEST_CASE("zero outside the support polytope") {
    auto bs = courant();
    CHECK(bs.eval({-0.2, 0.5}) == 0.0);
    CHECK(bs.eval({2.3, 1.0}) == 0.0);
    CHECK(bs.eval({1.0, 2.2}) == 0.0);
    // Inside the bounding box but outside the hexagon.
    CHECK(bs.eval({1.9, 0.1}) == 0.0);
}

TEST_CASE("courant element refinement under the quincunx matrix") {
    DilationMatrix quin({{-1, 1}, {1, 1}});
    auto basis = RenderBasis::box_basis({{1, 0}, {0, 1}, {1, 1}});
    auto fit = fit_refinement_mask(basis, quin, 2, 12);
    // The numerical fit is the oracle: accept/reject strictly by residual.
    CHECK(fit.ok == (fit.residual < 1e-8));
    CHECK(fit.residual >= 0.0);
}
