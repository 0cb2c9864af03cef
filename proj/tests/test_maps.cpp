#include <doctest.h>

#include <algorithm>
#include <set>

#include "nilab/errors.hpp"
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
NilMap tau() { return maps::make_map("tau", xstar(), xstar(), {2, 1, 0, 3}); }
NilMap psi() { return maps::make_map("psi", xstar(), d2(), {0, 1, 0, 1}); }

} // namespace

TEST_CASE("map construction validates tables") {
    CHECK_THROWS_AS(maps::make_map("short", xstar(), d2(), {0, 1}), InputError);
    CHECK_THROWS_AS(maps::make_map("range", d1(), d1(), {0, 7}), InputError);
    NilMap id = maps::identity_map(xstar());
    CHECK(id.table == std::vector<PointId>{0, 1, 2, 3});
    NilMap c = maps::constant_map(xstar(), d2(), 1);
    CHECK(c.table == std::vector<PointId>(4, 1));
    NilMap comp = maps::compose(psi(), alpha(), "psi_after_alpha");
    CHECK(comp.table == std::vector<PointId>{0, 1, 1, 0});
}

TEST_CASE("refinement order on maps") {
    NilMap p = psi();
    NilMap id = maps::identity_map(xstar());
    NilMap cx = maps::constant_map(xstar(), d2(), 0);
    CHECK(maps::refines(id, p));
    CHECK(maps::refines(p, p));
    CHECK(maps::refines(p, cx));
    CHECK(!maps::refines(p, maps::make_map("pi1like", xstar(), d1(), {0, 0, 1, 1})));
    auto cells = maps::partition_of(p).cells;
    CHECK(cells == std::vector<std::vector<PointId>>{{0, 2}, {1, 3}});
}

TEST_CASE("morphism verdicts, including the classic non-example") {
    Budget::Scope budget(Budget::kDefault);
    CHECK(maps::is_morphism(psi()).passed());
    CHECK(maps::is_morphism(alpha()).passed());
    // the identity on points does not map degree-2 cubes to degree-1 cubes
    NilMap down = maps::make_map("collapse_step", d2(), d1(), {0, 1});
    Report r = maps::is_morphism(down);
    CHECK(r.failed());
    REQUIRE(r.witness.contains("cube"));
    // replay: the witness cube really is a cube upstairs and not downstairs
    const auto wc = r.witness["cube"];
    CubeVals vals;
    for (const auto& v : wc) vals.push_back(v[0].get<int>());
    CHECK(in_cube_set(d2(), r.witness["dim"].get<int>(), vals));
    CHECK(!in_cube_set(d1(), r.witness["dim"].get<int>(), vals));

    // the inclusion the other way is a morphism (degree raises fine)
    CHECK(maps::is_morphism(maps::make_map("incl", d1(), d2(), {0, 1})).passed());
}

TEST_CASE("fibration verdicts and the two criteria agreeing") {
    Budget::Scope budget(Budget::kDefault);
    CHECK(maps::is_fibration(psi()).passed());
    auto [x1, pi1] = factor(xstar(), 1);
    CHECK(maps::is_fibration(pi1).passed());
    Report incl = maps::is_fibration(maps::make_map("incl", d1(), d2(), {0, 1}));
    CHECK(incl.failed());
    // corner_lift_check is the one-sided route; it must agree
    CHECK(corner_lift_check(xstar(), d2(), psi().table).passed());
    CHECK(!corner_lift_check(d1(), d2(), {0, 1}).passed());
}

TEST_CASE("translation recognition with a replayable rejection") {
    Budget::Scope budget(Budget::kDefault);
    CHECK(maps::is_translation(alpha()).passed());
    CHECK(maps::is_translation(maps::identity_map(xstar())).passed());

    Report r = maps::is_translation(tau());
    REQUIRE(r.failed());
    int dim = r.witness["dim"].get<int>();
    int axis = r.witness["axis"].get<int>();
    int side = r.witness["side"].get<int>();
    CHECK(dim == 3);
    CHECK(axis == 1);
    CHECK(side == 0);
    CubeVals q;
    for (const auto& v : r.witness["cube"]) {
        // xstar points print as [[a],[b]]
        q.push_back(v[0][0].get<int>() * 2 + v[1][0].get<int>());
    }
    REQUIRE(q.size() == 8);
    CHECK(in_cube_set(xstar(), dim, q));
    // independent replay: apply tau on the named half-space and watch it break
    CubeVals image = q;
    NilMap t = tau();
    for (size_t v = 0; v < q.size(); ++v)
        if (((v >> (axis - 1)) & 1) == static_cast<size_t>(side)) image[v] = t.table[q[v]];
    CHECK(!in_cube_set(xstar(), dim, image));
}

TEST_CASE("translation group of the running example") {
    Budget::Scope budget(Budget::kDefault);
    auto tg = maps::tran_group(xstar());
    CHECK(tg.report.passed());
    REQUIRE(tg.elements.size() == 8);
    CHECK(!tg.abelian);

    // closed form: (a, b) -> (a + s, b + c a + t) over s, c, t in Z2
    std::set<std::vector<PointId>> expected;
    for (int s = 0; s < 2; ++s)
        for (int c = 0; c < 2; ++c)
            for (int t = 0; t < 2; ++t) {
                std::vector<PointId> tab(4);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        tab[a * 2 + b] = ((a + s) % 2) * 2 + (b + c * a + t) % 2;
                expected.insert(tab);
            }
    std::set<std::vector<PointId>> got(tg.elements.begin(), tg.elements.end());
    CHECK(got == expected);
    CHECK(got.count(alpha().table) == 1);
    CHECK(got.count(tau().table) == 0);

    // closure under composition
    for (const auto& f : tg.elements)
        for (const auto& g : tg.elements) {
            std::vector<PointId> h(4);
            for (int p = 0; p < 4; ++p) h[p] = f[g[p]];
            CHECK(got.count(h) == 1);
        }

    auto small = maps::tran_group(d2());
    CHECK(small.elements.size() == 2);
    CHECK(small.abelian);
}

TEST_CASE("product maps check their wiring and act componentwise") {
    Budget::Scope budget(Budget::kDefault);
    SpacePtr x0 = xstar();
    SpacePtr x02 = build_product({x0, x0}, "x02");
    NilMap a0 = maps::make_map("alpha0", x0, x0, {2, 3, 1, 0});
    NilMap aa = maps::product_map(x02, x02, {0, 1}, {a0, a0}, "alpha_pair");
    for (int p = 0; p < 16; ++p) CHECK(aa.table[p] == a0.table[p / 4] * 4 + a0.table[p % 4]);
    CHECK_THROWS_AS(maps::product_map(x02, x02, {0}, {a0}, "half_wired"), InputError);

    // the componentwise translation route fires above the direct limit and
    // its verdict survives spot checks against the definition
    Report tr = maps::is_translation(aa);
    CHECK(tr.passed());
    CHECK(tr.counts.count("components") == 1);
    // membership in the product cube set is componentwise by definition,
    // which keeps the check independent of the fast path under test
    auto is_pair_cube = [&](const CubeVals& q8) {
        CubeVals l(8), r(8);
        for (int v = 0; v < 8; ++v) {
            l[v] = q8[v] / 4;
            r[v] = q8[v] % 4;
        }
        return in_cube_set(x0, 3, l) && in_cube_set(x0, 3, r);
    };
    const auto& cubes0 = enumerate_cubes(x0, 3);
    for (size_t i = 0; i < cubes0.size(); i += 137)
        for (size_t j = 0; j < cubes0.size(); j += 173) {
            CubeVals q(8);
            for (int v = 0; v < 8; ++v) q[v] = cubes0[i][v] * 4 + cubes0[j][v];
            REQUIRE(is_pair_cube(q));
            for (int axis = 0; axis < 3; ++axis) {
                CubeVals img = q;
                for (int v = 0; v < 8; ++v)
                    if (((v >> axis) & 1) == 0) img[v] = aa.table[q[v]];
                CHECK(is_pair_cube(img));
            }
        }
}

TEST_CASE("structure morphisms and induced factor maps") {
    Budget::Scope budget(Budget::kDefault);
    NilMap p = psi();
    REQUIRE(maps::is_fibration(p).passed());
    auto sm = maps::structure_morphism(p, 2);
    CHECK(sm.report.passed());
    REQUIRE(sm.hom.table.size() == 2);
    // psi forgets a and keeps b, so the top group map is the identity on Z2
    CHECK(sm.hom.table[0] == grp::Elem{0});
    CHECK(sm.hom.table[1] == grp::Elem{1});

    NilMap ind = maps::induced_factor_map(p, 1);
    auto [x1, pi1] = factor(xstar(), 1);
    auto [y1, piy] = factor(d2(), 1);
    CHECK(ind.domain.get() == x1.get());
    CHECK(ind.codomain.get() == y1.get());
    for (PointId x = 0; x < 4; ++x) CHECK(ind.table[pi1.table[x]] == piy.table[p.table[x]]);
}

TEST_CASE("bundling maps into a product") {
    Budget::Scope budget(Budget::kDefault);
    auto [x1, pi1] = factor(xstar(), 1);
    NilMap b = maps::bundle_map({pi1, psi()}, build_product({x1, d2()}, "x1xd2"), "joint");
    // (pi1, psi) separates points, so the bundle is injective
    std::set<PointId> img(b.table.begin(), b.table.end());
    CHECK(img.size() == 4);
    CHECK(maps::is_morphism(b).passed());
}
