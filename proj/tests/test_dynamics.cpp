#include <doctest.h>

#include "nilab/dynamics.hpp"
#include "nilab/maps.hpp"
#include "nilab/nilspace.hpp"

using namespace nilab;

namespace {

SpacePtr d1() {
    static SpacePtr s = build_dk(grp::make_group({2}, "z2"), 1, "d1");
    return s;
}
SpacePtr d2() {
    static SpacePtr s = build_dk(grp::make_group({2}, "z2"), 2, "d2");
    return s;
}
SpacePtr xstar() {
    static SpacePtr s = build_product({d1(), d2()}, "xstar");
    return s;
}

NilMap alpha() { return maps::make_map("alpha", xstar(), xstar(), {2, 3, 1, 0}); }
NilMap psi() { return maps::make_map("psi", xstar(), d2(), {0, 1, 0, 1}); }

} // namespace

TEST_CASE("systems require a verified translation") {
    Budget::Scope budget(Budget::kDefault);
    NilMap a = alpha();
    CHECK_THROWS_AS(dynamics::make_system(xstar(), a), InputError);
    REQUIRE(maps::is_translation(a).passed());
    auto sys = dynamics::make_system(xstar(), a);
    CHECK(dynamics::is_transitive(sys).passed());

    // tau is rejected before any system is formed
    NilMap t = maps::make_map("tau", xstar(), xstar(), {2, 1, 0, 3});
    CHECK(maps::is_translation(t).failed());
    CHECK_THROWS_AS(dynamics::make_system(xstar(), t), InputError);
}

TEST_CASE("consistency splits psi but not the canonical factor") {
    Budget::Scope budget(Budget::kDefault);
    NilMap a = alpha();
    REQUIRE(maps::is_translation(a).passed());

    Report bad = dynamics::is_consistent(psi(), a);
    REQUIRE(bad.failed());
    CHECK(bad.witness["x"] == nlohmann::json::parse("[[0],[0]]"));
    CHECK(bad.witness["y"] == nlohmann::json::parse("[[1],[0]]"));
    CHECK(bad.witness["value"] == nlohmann::json::parse("[0]"));
    CHECK(bad.witness["value_after_x"] == nlohmann::json::parse("[0]"));
    CHECK(bad.witness["value_after_y"] == nlohmann::json::parse("[1]"));

    auto [x1, pi1] = factor(xstar(), 1);
    CHECK(dynamics::is_consistent(pi1, a).passed());
}

TEST_CASE("induced translations descend exactly when consistent") {
    Budget::Scope budget(Budget::kDefault);
    NilMap a = alpha();
    REQUIRE(maps::is_translation(a).passed());
    auto [x1, pi1] = factor(xstar(), 1);
    REQUIRE(maps::is_fibration(pi1).passed());

    auto down = dynamics::induced_translation(pi1, a);
    CHECK(down.report.passed());
    REQUIRE(down.beta.has_value());
    // downstairs alpha shifts the level-1 class: a -> a + 1
    CHECK(down.beta->table == std::vector<PointId>{1, 0});
    for (PointId x = 0; x < 4; ++x)
        CHECK(down.beta->table[pi1.table[x]] == pi1.table[a.table[x]]);

    NilMap p = psi();
    REQUIRE(maps::is_fibration(p).passed());
    auto blocked = dynamics::induced_translation(p, a);
    CHECK(blocked.report.failed());
    CHECK(!blocked.beta.has_value());
}

TEST_CASE("the induced assignment is a homomorphism on the full group") {
    Budget::Scope budget(Budget::kDefault);
    auto [x1, pi1] = factor(xstar(), 1);
    REQUIRE(maps::is_fibration(pi1).passed());
    Report r = dynamics::hat_hom_check(pi1);
    CHECK(r.passed());
    CHECK(r.counts["upstairs_order"] == 8);
    CHECK(r.counts["composition_pairs"] == 64);
    CHECK(r.counts["intertwining_checks"] == 32);
}

TEST_CASE("weighted metric on products") {
    Budget::Scope budget(Budget::kDefault);
    SpacePtr x02 = build_product({xstar(), xstar()}, "x02");
    dynamics::ProductMetric m{{Rational::parse("1/2"), Rational::parse("1/4")}};
    CHECK(dynamics::metric_distance(x02, m, 0, 0) == Rational(0));
    CHECK(dynamics::metric_distance(x02, m, 0, 15).str() == "3/4");
    CHECK(dynamics::metric_distance(x02, m, 0, 3).str() == "1/4");
    CHECK(dynamics::metric_distance(x02, m, 3, 0).str() == "1/4");
    CHECK(dynamics::metric_distance(x02, m, 4, 6).str() == "1/4");

    dynamics::ProductMetric wrong{{Rational::parse("1/2")}};
    CHECK_THROWS_AS((void)dynamics::metric_distance(x02, wrong, 0, 1), InputError);
}

TEST_CASE("fiber diameters against an exhaustive recomputation") {
    Budget::Scope budget(Budget::kDefault);
    SpacePtr x0 = xstar();
    SpacePtr x03 = build_product({x0, x0, x0}, "x03");
    SpacePtr psi1s = build_product({x0, d2()}, "psi1s");
    NilMap id0 = maps::identity_map(x0);
    NilMap psi0 = maps::make_map("psi0", x0, d2(), {0, 1, 0, 1});
    NilMap psi1 = maps::product_map(x03, psi1s, {0, 1}, {id0, psi0}, "psi1");
    dynamics::ProductMetric m{
        {Rational::parse("1/2"), Rational::parse("1/4"), Rational::parse("1/8")}};

    auto fd = dynamics::fiber_diameters(psi1, m);
    CHECK(fd.report.passed());
    CHECK(fd.sup.str() == "3/8");
    CHECK(fd.per_fiber.size() == 8);

    // recompute from raw coordinates: weight every differing base-4 digit
    auto dist = [](PointId x, PointId y) {
        Rational d(0);
        int wnum[3] = {2, 4, 8};
        for (int i = 0; i < 3; ++i) {
            int dx = (x / (i == 0 ? 16 : i == 1 ? 4 : 1)) % 4;
            int dy = (y / (i == 0 ? 16 : i == 1 ? 4 : 1)) % 4;
            if (dx != dy) d = d + Rational(1, wnum[i]);
        }
        return d;
    };
    std::vector<Rational> sup_by_fiber(psi1s->size(), Rational(0));
    for (PointId x = 0; x < 64; ++x)
        for (PointId y = 0; y < 64; ++y) {
            if (psi1.table[x] != psi1.table[y]) continue;
            Rational d = dist(x, y);
            if (sup_by_fiber[psi1.table[x]] < d) sup_by_fiber[psi1.table[x]] = d;
        }
    for (size_t i = 0; i < sup_by_fiber.size(); ++i) CHECK(fd.per_fiber[i] == sup_by_fiber[i]);

    NilMap psi2 = maps::product_map(x03, build_product({x0, x0, d2()}, "psi2s"), {0, 1, 2},
                                    {id0, id0, psi0}, "psi2");
    auto fd2 = dynamics::fiber_diameters(psi2, m);
    CHECK(fd2.sup.str() == "1/8");

    // a codomain point that is never hit is an input error
    NilMap missing = maps::make_map("into_corner", build_product({d1()}, "p1"), d2(), {0, 0});
    dynamics::ProductMetric one{{Rational(1)}};
    CHECK_THROWS_AS((void)dynamics::fiber_diameters(missing, one), InputError);
}

TEST_CASE("coordinatewise rotation is not transitive on the square") {
    Budget::Scope budget(Budget::kDefault);
    SpacePtr x02 = build_product({xstar(), xstar()}, "x02");
    NilMap a0 = alpha();
    NilMap aa = maps::product_map(x02, x02, {0, 1}, {a0, a0}, "alpha_pair");
    REQUIRE(maps::is_translation(aa).passed());
    Report r = dynamics::is_transitive(dynamics::make_system(x02, aa));
    CHECK(r.failed());
}
