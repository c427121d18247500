#include <random>

#include "doctest.h"
#include "latsub/diffscheme.hpp"

using namespace latsub;

namespace {

RatSeq random_seq(int dim, int radius, unsigned seed) {
    std::mt19937_64 rng(seed);
    RatSeq v(dim);
    Point p(dim, -radius);
    auto rec = [&](auto&& self, int axis) -> void {
        if (axis == dim) {
            long long num = static_cast<long long>(rng() % 17) - 8;
            long long den = 1 + static_cast<long long>(rng() % 3);
            v.set(p, Rat(Int(num), Int(den)));
            return;
        }
        for (int x = -radius; x <= radius; ++x) {
            p[axis] = x;
            self(self, axis + 1);
        }
    };
    rec(rec, 0);
    return v;
}

ChoiceFn random_choices(const SchemeSpec& s, unsigned seed) {
    auto scheme = s;
    return [scheme, seed](const Point& k, int coset) {
        size_t h = seed * 1000003u + static_cast<size_t>(coset) * 97;
        for (int x : k) h = h * 31 + static_cast<size_t>(x + 1000);
        return static_cast<int>(h % static_cast<size_t>(scheme.rule_count(coset)));
    };
}

void check_identity(const SchemeSpec& s, int l, unsigned seed) {
    auto ds = derive(s, l);
    RatSeq v = random_seq(s.dim(), 3, seed);
    RatSeq w = random_seq(s.dim(), 3, seed + 1);
    ChoiceFn choice = random_choices(s, seed);
    auto lhs_seq = subdivide_operator(s, v, w, &choice);
    auto lhs = delta_block(lhs_seq, l);
    auto rhs = apply_diff(ds, choice, delta_block(w, l));
    REQUIRE(lhs.indices == rhs.indices);
    for (size_t i = 0; i < lhs.components.size(); ++i)
        CHECK(lhs.components[i] == rhs.components[i]);
}

}  // namespace

TEST_CASE("flow decomposition is exact and minimal") {
    DirectionSet canon({{1, 0}, {0, 1}});
    // f = 1/4 d_{(1,-1)} - 1/2 d_{(0,0)} + 1/4 d_{(0,-1)}: W1 mass 3/4.
    RowFun f;
    f[{1, -1}] = Rat(1, 4);
    f[{0, 0}] = Rat(-1, 2);
    f[{0, -1}] = Rat(1, 4);
    CHECK(w1_cost(f, canon) == Rat(3, 4));
    auto masks = flow_decompose(f, canon);
    Rat mass(0);
    for (const auto& m : masks) mass += mask_mass(m);
    CHECK(mass == Rat(3, 4));
}

TEST_CASE("hexagonal S_1 norm is exactly 3/4") {
    auto hex = builtin("hexagonal");
    auto ds = derive(hex, 1);
    CHECK(operator_inf_norm(ds) == Rat(3, 4));
    CHECK(ds.record.residual_zero);
}

TEST_CASE("quincunx S_1 exists; identity holds on random pairs") {
    auto quin = builtin("quincunx");
    auto ds = derive(quin, 1);
    CHECK(operator_inf_norm(ds) == Rat(1));
    for (unsigned seed = 0; seed < 12; ++seed) check_identity(quin, 1, 100 + seed * 7);
}

TEST_CASE("hexagonal identity l = 1, 2") {
    auto hex = builtin("hexagonal");
    for (unsigned seed = 0; seed < 6; ++seed) check_identity(hex, 1, seed);
    for (unsigned seed = 0; seed < 6; ++seed) check_identity(hex, 2, 50 + seed);
}

TEST_CASE("quincunx identity l = 2") {
    auto quin = builtin("quincunx");
    for (unsigned seed = 0; seed < 6; ++seed) check_identity(quin, 2, 200 + seed);
}

TEST_CASE("insufficient reproduction refuses the order") {
    DilationMatrix two({{2, 0}, {0, 2}});
    CosetSet cs(two);
    std::vector<std::vector<StencilRule>> rules;
    for (int e = 0; e < cs.count(); ++e)
        rules.push_back({StencilRule{{{0, 0}, {1, 0}}, {Rat(1, 3), Rat(2, 3)}}});
    SchemeSpec skew(two, rules, Selector::eno(), false);
    CHECK_NOTHROW(derive(skew, 1));
    CHECK_THROWS_WITH_AS(derive(skew, 2),
                         doctest::Contains("no difference scheme of order 2"), Error);
}

TEST_CASE("1-d midpoint scheme: S_1 norm 1/2") {
    DilationMatrix two(std::vector<std::vector<long long>>{{2}});
    CosetSet cs(two);
    std::vector<std::vector<StencilRule>> rules(2);
    rules[0] = {StencilRule{{{0}}, {Rat(1)}}};
    rules[1] = {StencilRule{{{0}, {1}}, {Rat(1, 2), Rat(1, 2)}}};
    SchemeSpec mid(two, rules, Selector::eno(), true);
    auto ds = derive(mid, 1);
    CHECK(operator_inf_norm(ds) == Rat(1, 2));
}

TEST_CASE("directional derivation") {
    auto quin = builtin("quincunx");
    DirectionSet canon({{1, 0}, {0, 1}});
    auto a = derive(quin, 1);
    auto b = derive_directional(quin, canon, 1);
    CHECK(operator_inf_norm(a) == operator_inf_norm(b));

    DirectionSet quad({{1, 0}, {0, 1}, {1, 1}, {1, -1}});
    auto dsq = derive_directional(quin, quad, 1);
    CHECK(dsq.q() == 4);
    for (unsigned seed = 0; seed < 8; ++seed) {
        RatSeq v = random_seq(2, 3, 300 + seed);
        RatSeq w = random_seq(2, 3, 400 + seed);
        ChoiceFn choice = random_choices(quin, seed);
        auto lhs_seq = subdivide_operator(quin, v, w, &choice);
        auto lhs = delta_block_directional(lhs_seq, quad, 1);
        auto rhs = apply_diff(dsq, choice, delta_block_directional(w, quad, 1));
        for (size_t i = 0; i < lhs.components.size(); ++i)
            CHECK(lhs.components[i] == rhs.components[i]);
    }

    DirectionSet bad({{2, 0}, {0, 2}});
    CHECK_THROWS_AS(derive_directional(quin, bad, 1), Error);
}

TEST_CASE("norm consistency on random data") {
    auto hex = builtin("hexagonal");
    auto ds = derive(hex, 1);
    Rat norm = operator_inf_norm(ds);
    for (unsigned seed = 0; seed < 8; ++seed) {
        RatSeq v = random_seq(2, 3, 500 + seed);
        auto sv = subdivide(hex, v);
        Rat before = block_norm_exact(delta_block(v, 1), PNorm::Inf);
        Rat after = block_norm_exact(delta_block(sv, 1), PNorm::Inf);
        CHECK(after <= norm * before);
    }
}

TEST_CASE("zero input maps to zero") {
    auto hex = builtin("hexagonal");
    auto ds = derive(hex, 1);
    DifferenceBlock<Rat> zero;
    zero.order = 1;
    zero.indices = ds.indices;
    zero.components.assign(ds.q(), RatSeq(2));
    auto choice = random_choices(hex, 1);
    auto out = apply_diff(ds, choice, zero);
    for (const auto& c : out.components) CHECK(c.empty());
}

TEST_CASE("derivation is deterministic") {
    auto hex = builtin("hexagonal");
    auto a = derive(hex, 1);
    auto b = derive(hex, 1);
    REQUIRE(a.families.size() == b.families.size());
    for (size_t e = 0; e < a.families.size(); ++e)
        for (size_t mi = 0; mi < a.families[e].size(); ++mi) {
            const auto& fa = a.families[e][mi];
            const auto& fb = b.families[e][mi];
            REQUIRE(fa.rows.size() == fb.rows.size());
            for (const auto& [tuple, masks] : fa.rows) {
                const auto& other = fb.rows.at(tuple);
                for (size_t ni = 0; ni < masks.size(); ++ni) CHECK(masks[ni] == other[ni]);
            }
        }
}

TEST_CASE("trilinear scheme in three dimensions") {
    DilationMatrix two({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
    CosetSet cs(two);
    REQUIRE(cs.count() == 8);
    std::vector<std::vector<StencilRule>> rules(8);
    for (int e = 0; e < 8; ++e) {
        const Point& eps = cs.rep(e);
        StencilRule rule;
        // Corners of the unit cell spanned by the nonzero coordinates.
        std::vector<int> active;
        for (int i = 0; i < 3; ++i)
            if (eps[i] != 0) active.push_back(i);
        int corners = 1 << active.size();
        for (int c = 0; c < corners; ++c) {
            Point o(3, 0);
            for (size_t a = 0; a < active.size(); ++a)
                if (c & (1 << a)) o[active[a]] = 1;
            rule.offsets.push_back(o);
            rule.weights.push_back(Rat(1, corners));
        }
        rules[e] = {rule};
    }
    SchemeSpec tri(two, rules, Selector::eno(), true);
    CHECK(reproduction_degree(tri, 1, true).degree == 1);
    auto ds = derive(tri, 1);
    CHECK(operator_inf_norm(ds) == Rat(1, 2));
    // Identity on a random pair.
    RatSeq v = random_seq(3, 1, 5);
    RatSeq w = random_seq(3, 1, 6);
    ChoiceFn choice = selector_choices(tri, v);
    auto lhs = delta_block(subdivide_operator(tri, v, w, &choice), 1);
    auto rhs = apply_diff(ds, choice, delta_block(w, 1));
    for (size_t i = 0; i < lhs.components.size(); ++i)
        CHECK(lhs.components[i] == rhs.components[i]);
}
