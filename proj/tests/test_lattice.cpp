#include "doctest.h"
#include "latsub/lattice.hpp"

using namespace latsub;

TEST_CASE("is_dilation on the paper matrices") {
    CHECK(is_dilation({{-1, 1}, {1, 1}}));
    CHECK(is_dilation({{2, 1}, {0, -2}}));
    CHECK_THROWS_AS(is_dilation({{1, 0}, {0, 1}}), Error);
}

TEST_CASE("coset representatives") {
    DilationMatrix hex({{2, 1}, {0, -2}});
    CosetSet cs(hex);
    CHECK(cs.count() == 4);
    CHECK(cs.rep(0) == Point{0, 0});
    std::set<Point> got(cs.reps().begin(), cs.reps().end());
    std::set<Point> want{{0, 0}, {1, 0}, {1, -1}, {2, -1}};
    CHECK(got == want);

    DilationMatrix quin({{-1, 1}, {1, 1}});
    CosetSet qs(quin);
    CHECK(qs.reps() == std::vector<Point>{{0, 0}, {0, 1}});

    DilationMatrix two(std::vector<std::vector<long long>>{{2}});
    CosetSet ts(two);
    CHECK(ts.reps() == std::vector<Point>{{0}, {1}});
}

TEST_CASE("isotropy classification") {
    DilationMatrix quin({{-1, 1}, {1, 1}});
    auto qi = classify_isotropy(quin);
    CHECK(qi.kind == IsotropyInfo::Cyclic);
    CHECK(qi.q == 2);
    CHECK(qi.lambda == 2);
    DilationMatrix hex({{2, 1}, {0, -2}});
    auto hi = classify_isotropy(hex);
    CHECK(hi.kind == IsotropyInfo::Cyclic);
    CHECK(hi.q == 2);
    CHECK(hi.lambda == 4);
    DilationMatrix aniso({{2, 0}, {0, 3}});
    CHECK(classify_isotropy(aniso).kind == IsotropyInfo::Anisotropic);
}

TEST_CASE("inf norm") {
    DilationMatrix hex({{2, 1}, {0, -2}});
    CHECK(hex.inf_norm() == Rat(3));
    DilationMatrix quin({{-1, 1}, {1, 1}});
    CHECK(quin.inf_norm() == Rat(2));
}

TEST_CASE("cyclic classification ties sigma to lambda") {
    for (const char* rows : {"quincunx", "hexagonal"}) {
        DilationMatrix M(rows[0] == 'q'
                             ? std::vector<std::vector<long long>>{{-1, 1}, {1, 1}}
                             : std::vector<std::vector<long long>>{{2, 1}, {0, -2}});
        auto info = classify_isotropy(M);
        REQUIRE(info.kind == IsotropyInfo::Cyclic);
        // sigma^q = |lambda| and sigma = m^{1/d}.
        CHECK(std::pow(info.sigma, info.q) ==
              doctest::Approx(std::abs(static_cast<double>(info.lambda))).epsilon(1e-10));
        CHECK(info.sigma ==
              doctest::Approx(std::pow(static_cast<double>(M.det_abs()), 0.5)).epsilon(1e-10));
    }
    DilationMatrix twoI({{2, 0}, {0, 2}});
    CHECK(twoI.inf_norm() == Rat(2));
}

TEST_CASE("partition of the window") {
    DilationMatrix hex({{2, 1}, {0, -2}});
    CosetSet cs(hex);
    int W = 12;
    for (int x = -W; x <= W; ++x)
        for (int y = -W; y <= W; ++y) {
            auto dec = cs.decompose({x, y});
            CHECK(point_add(hex.apply(dec.base), cs.rep(dec.coset)) == Point{x, y});
        }
}
