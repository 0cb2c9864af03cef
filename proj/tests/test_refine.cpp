#include <doctest.h>

#include "nilab/dynamics.hpp"
#include "nilab/maps.hpp"
#include "nilab/nilspace.hpp"
#include "nilab/refine.hpp"

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

NilMap verified_fibration(NilMap m) {
    REQUIRE(maps::is_fibration(m).passed());
    return m;
}

} // namespace

TEST_CASE("fiber products demand verified fibrations") {
    Budget::Scope budget(Budget::kDefault);
    auto [y0, p0] = factor(d2(), 0);
    NilMap c1 = maps::constant_map(d1(), y0, 0);
    CHECK_THROWS_WITH_AS(refine::fiber_product(p0, c1),
                         doctest::Contains("verified fibration"), InputError);

    p0 = verified_fibration(p0);
    c1 = verified_fibration(c1);
    auto fp = refine::fiber_product(p0, c1);
    CHECK(fp.report.passed());
    CHECK(fp.space->size() == 4);
    CHECK(fp.report.counts.at("corners_completed") > 0);
    CHECK(verify_axioms(fp.space).passed());
    // projections recover the defining identity f(proj_left q) = g(proj_right q)
    for (PointId q = 0; q < fp.space->size(); ++q)
        CHECK(p0.table[fp.proj_left.table[q]] == c1.table[fp.proj_right.table[q]]);
}

TEST_CASE("the graph of a fibration is isomorphic to its domain") {
    Budget::Scope budget(Budget::kDefault);
    NilMap p = verified_fibration(psi());
    NilMap idy = verified_fibration(maps::identity_map(d2()));
    auto fp = refine::fiber_product(p, idy);
    CHECK(fp.report.passed());
    CHECK(fp.space->size() == 4);
    CHECK(find_nilspace_isomorphism(fp.space, xstar()).has_value());
}

TEST_CASE("coarsest fibration factorization") {
    Budget::Scope budget(Budget::kDefault);
    auto cf = refine::coarsest_fibration_factor(psi());
    CHECK(cf.report.passed());
    CHECK(cf.space->size() == 2);
    CHECK(cf.report.counts.at("cells") == 2);
    CHECK(cf.report.counts.at("candidates_tried") == 1);
    CHECK(cf.report.values.at("method") == "exhaustive");
    // the factorization reproduces psi
    NilMap p = psi();
    for (PointId x = 0; x < 4; ++x)
        CHECK(cf.induced.table[cf.proj.table[x]] == p.table[x]);

    // identity forces the discrete factor, a constant allows the point
    auto full = refine::coarsest_fibration_factor(maps::identity_map(xstar()));
    CHECK(full.space->size() == 4);
    auto coarse = refine::coarsest_fibration_factor(maps::constant_map(xstar(), d2(), 0));
    CHECK(coarse.space->size() == 1);

    NilMap notmor = maps::make_map("collapse_step", d2(), d1(), {0, 1});
    CHECK_THROWS_WITH_AS(refine::coarsest_fibration_factor(notmor),
                         doctest::Contains("not a morphism"), InputError);
}

TEST_CASE("common refinement separates exactly as much as needed") {
    Budget::Scope budget(Budget::kDefault);
    auto [x1, pi1] = factor(xstar(), 1);
    auto cr = refine::common_refinement({pi1, psi()});
    CHECK(cr.report.passed());
    CHECK(cr.space->size() == 4);
    REQUIRE(cr.induced.size() == 2);
    for (PointId x = 0; x < 4; ++x) {
        CHECK(cr.induced[0].table[cr.proj.table[x]] == pi1.table[x]);
        CHECK(cr.induced[1].table[cr.proj.table[x]] == psi().table[x]);
    }

    // refining a map by itself changes nothing
    auto self = refine::common_refinement({psi(), psi()});
    CHECK(self.space->size() == 2);
}

TEST_CASE("the delta construction proves its five claims") {
    Budget::Scope budget(Budget::kDefault);
    NilMap p = verified_fibration(psi());
    auto [x1, pi1v] = factor(xstar(), 1);
    NilMap pi1 = verified_fibration(pi1v);
    auto [y1, piyv] = factor(d2(), 1);
    NilMap piy = verified_fibration(piyv);
    NilMap psi3 = verified_fibration(maps::make_map("collapse", x1, y1, {0, 0}));

    auto delta = refine::delta_fibration(p, pi1, psi3);
    CHECK(delta.report.passed());
    CHECK(delta.space->size() == 4);
    const auto& claims = delta.report.values.at("claims");
    for (const char* c : {"image_covers", "fibration", "level_data_matches",
                          "factor_correspondence", "top_group_match"})
        CHECK(claims.at(c) == "pass");
    CHECK(delta.report.values.contains("factor_iso"));
    CHECK(delta.report.values.contains("top_hom"));
    // the combined map reproduces both inputs through the projections
    for (PointId x = 0; x < 4; ++x) {
        CHECK(delta.proj_y.table[delta.psi.table[x]] == p.table[x]);
        CHECK(delta.proj_w.table[delta.psi.table[x]] == pi1.table[x]);
    }
    CHECK(find_nilspace_isomorphism(delta.space, xstar()).has_value());

    // psi2 must hold at least the level-(k-1) data of the domain
    CHECK_THROWS_WITH_AS(refine::delta_fibration(p, p, piy),
                         doctest::Contains("factor through"), InputError);
    // psi3 must land in the cached factor of the codomain
    SpacePtr decoy = build_point("decoy");
    NilMap bad3 = verified_fibration(maps::constant_map(x1, decoy, 0));
    CHECK_THROWS_WITH_AS(refine::delta_fibration(p, pi1, bad3),
                         doctest::Contains("cached level"), InputError);
}

TEST_CASE("kernel witnesses for refined fibrations") {
    Budget::Scope budget(Budget::kDefault);
    NilMap cx = verified_fibration(maps::constant_map(xstar(), build_point(), 0));
    NilMap p = psi();
    NilMap idx = maps::identity_map(xstar());

    auto w1 = refine::ker_witness(cx, p, 0, 1);
    CHECK(w1.report.passed());
    CHECK(w1.z_index == 1);
    // replay: the found kernel element moves y into the fiber of x
    auto moved = w1.report.values.at("moved");
    CHECK(moved == nlohmann::json::parse("[[0],[0]]"));

    auto w2 = refine::ker_witness(cx, p, 2, 2);
    CHECK(w2.report.passed());
    CHECK(w2.z_index == 0);

    auto w3 = refine::ker_witness(cx, idx, 0, 3);
    CHECK(w3.report.passed());
    CHECK(w3.z_index == -1);
    CHECK(w3.report.values.at("related") == false);

    // the finer map must actually refine the fibration
    auto [x1, pi1] = factor(xstar(), 1);
    CHECK_THROWS_AS(refine::ker_witness(verified_fibration(psi()), pi1, 0, 1), InputError);
}

TEST_CASE("consistent refinement of the running example") {
    Budget::Scope budget(Budget::kDefault);
    NilMap a = alpha();
    REQUIRE(maps::is_translation(a).passed());
    NilMap p = verified_fibration(psi());

    auto f = refine::h_consistent_refinement(p, {a});
    CHECK(f.report.passed());
    CHECK(f.report.counts.at("size") == 4);
    CHECK(f.report.values.at("method") == "assembled");
    // contract: p o psi = the input, and the refinement is now consistent
    for (PointId x = 0; x < 4; ++x) CHECK(f.p.table[f.psi.table[x]] == p.table[x]);
    CHECK(dynamics::is_consistent(f.psi, a).passed());

    // a factor map that is already consistent still refines cleanly
    auto [x1, pi1v] = factor(xstar(), 1);
    NilMap pi1 = verified_fibration(pi1v);
    auto g = refine::h_consistent_refinement(pi1, {a});
    CHECK(g.report.passed());
    CHECK(dynamics::is_consistent(g.psi, a).passed());

    // no translations means nothing to do
    auto h = refine::h_consistent_refinement(p, {});
    CHECK(h.report.passed());
    CHECK(h.psi.table == p.table);
}

TEST_CASE("towers stay consistent and compose exactly") {
    Budget::Scope budget(Budget::kDefault);
    NilMap a = alpha();
    REQUIRE(maps::is_translation(a).passed());
    NilMap cx = verified_fibration(maps::constant_map(xstar(), build_point(), 0));
    NilMap p = verified_fibration(psi());

    auto tower = refine::consistent_tower({cx, p}, {a});
    CHECK(tower.report.passed());
    REQUIRE(tower.psis.size() == 2);
    CHECK(tower.psis[0].codomain->size() == 1);
    CHECK(tower.psis[1].codomain->size() == 4);
    for (const auto& stage : tower.psis) CHECK(dynamics::is_consistent(stage, a).passed());
    // independent composition check over the returned connecting maps
    REQUIRE(tower.connect.size() == 2);
    const NilMap& c10 = tower.connect[1][0];
    for (PointId x = 0; x < 4; ++x)
        CHECK(c10.table[tower.psis[1].table[x]] == tower.psis[0].table[x]);
    CHECK(maps::refines(tower.psis[1], p));
    CHECK(maps::refines(tower.psis[0], cx));
}
