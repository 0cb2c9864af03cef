#include "nilab/dynamics.hpp"

#include <algorithm>

#include "nilab/errors.hpp"

namespace nilab::dynamics {

namespace {

void require_translation(const NilMap& alpha) {
    if (!alpha.cache->translation || !alpha.cache->translation->passed())
        throw InputError("a verified translation is needed; run the translation check on " +
                         alpha.name + " first");
}

void require_fibration(const NilMap& psi) {
    if (!psi.cache->fibration || !psi.cache->fibration->passed())
        throw InputError("a verified fibration is needed; run the fibration check on " +
                         psi.name + " first");
}

} // namespace

NilspaceSystem make_system(const SpacePtr& space, const NilMap& trans) {
    if (trans.domain.get() != space.get() || trans.codomain.get() != space.get())
        throw InputError("the translation " + trans.name + " does not act on " + space->name());
    require_translation(trans);
    return {space, trans};
}

Report is_consistent(const NilMap& psi, const NilMap& alpha) {
    if (alpha.domain.get() != psi.domain.get())
        throw InputError("consistency check: " + alpha.name + " must act on the domain of " +
                         psi.name);
    require_translation(alpha);

    Report rep("is_consistent");
    rep.values["map"] = psi.name;
    rep.values["translation"] = alpha.name;
    int size = psi.domain->size();
    std::int64_t pairs = 0;
    for (PointId x = 0; x < size; ++x)
        for (PointId y = 0; y < size; ++y) {
            if (psi.table[x] != psi.table[y]) continue;
            ++pairs;
            if (psi.table[alpha.table[x]] != psi.table[alpha.table[y]]) {
                rep.fail("equal values split after one application");
                rep.witness["x"] = point_json(psi.domain, x);
                rep.witness["y"] = point_json(psi.domain, y);
                rep.witness["value"] = point_json(psi.codomain, psi.table[x]);
                rep.witness["value_after_x"] = point_json(psi.codomain, psi.table[alpha.table[x]]);
                rep.witness["value_after_y"] = point_json(psi.codomain, psi.table[alpha.table[y]]);
                rep.counts["pairs_checked"] = pairs;
                return rep;
            }
        }
    rep.counts["pairs_checked"] = pairs;
    return rep;
}

InducedTranslation induced_translation(const NilMap& psi, const NilMap& alpha) {
    require_fibration(psi);
    require_translation(alpha);
    if (alpha.domain.get() != psi.domain.get())
        throw InputError("induced translation: " + alpha.name + " must act on the domain of " +
                         psi.name);

    InducedTranslation result;
    Report& rep = result.report;
    rep = Report("induced_translation");
    rep.values["map"] = psi.name;
    rep.values["translation"] = alpha.name;

    Report cons = is_consistent(psi, alpha);
    if (!cons.passed()) {
        rep.fail("not consistent: " + cons.message);
        rep.witness = cons.witness;
        return result;
    }

    std::vector<PointId> beta_table(psi.codomain->size(), -1);
    for (int x = 0; x < psi.domain->size(); ++x) beta_table[psi.table[x]] = psi.table[alpha.table[x]];
    for (PointId v : beta_table)
        if (v < 0)
            throw InternalError("the verified fibration " + psi.name + " is not surjective");

    NilMap beta = maps::make_map("hat[" + alpha.name + "]", psi.codomain, psi.codomain,
                                 std::move(beta_table));
    Report tr = maps::is_translation(beta);
    if (!tr.passed()) {
        rep.fail("the induced map is not a translation downstairs");
        rep.witness["translation_check"] = tr.to_json();
        return result;
    }

    std::int64_t checks = 0;
    for (int x = 0; x < psi.domain->size(); ++x) {
        ++checks;
        if (beta.table[psi.table[x]] != psi.table[alpha.table[x]]) {
            rep.fail("the intertwining identity fails");
            rep.witness["x"] = point_json(psi.domain, x);
            return result;
        }
    }
    rep.counts["intertwining_checks"] = checks;
    rep.values["beta"] = maps::map_json(beta);
    result.beta = std::move(beta);
    return result;
}

Report hat_hom_check(const NilMap& psi) {
    require_fibration(psi);
    Report rep("hat_hom_check");
    rep.values["map"] = psi.name;

    auto tg = maps::tran_group(psi.domain);
    int order = static_cast<int>(tg.elements.size());
    rep.counts["upstairs_order"] = order;

    std::vector<NilMap> alphas;
    std::vector<NilMap> hats;
    for (int i = 0; i < order; ++i) {
        NilMap a = maps::make_map("t" + std::to_string(i), psi.domain, psi.domain,
                                  tg.elements[i]);
        Report tr = maps::is_translation(a);
        if (!tr.passed())
            throw InternalError("a member of the translation group fails the translation test");
        auto ind = induced_translation(psi, a);
        if (!ind.report.passed()) {
            rep.fail("translation " + std::to_string(i) + " does not induce a translation: " +
                     ind.report.message);
            rep.witness["detail"] = ind.report.witness;
            return rep;
        }
        alphas.push_back(std::move(a));
        hats.push_back(std::move(*ind.beta));
    }

    std::int64_t comp_pairs = 0;
    std::vector<PointId> up(psi.domain->size()), down(psi.codomain->size());
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            ++comp_pairs;
            for (int x = 0; x < psi.domain->size(); ++x)
                up[x] = alphas[i].table[alphas[j].table[x]];
            for (int y = 0; y < psi.codomain->size(); ++y)
                down[y] = hats[i].table[hats[j].table[y]];
            // the composite upstairs must induce exactly the composite downstairs
            for (int x = 0; x < psi.domain->size(); ++x)
                if (psi.table[up[x]] != down[psi.table[x]]) {
                    rep.fail("the induced assignment is not a homomorphism");
                    rep.witness["i"] = i;
                    rep.witness["j"] = j;
                    rep.witness["x"] = point_json(psi.domain, x);
                    return rep;
                }
        }
    rep.counts["composition_pairs"] = comp_pairs;

    std::int64_t equi = 0;
    for (int i = 0; i < order; ++i)
        for (int x = 0; x < psi.domain->size(); ++x) {
            ++equi;
            if (psi.table[alphas[i].table[x]] != hats[i].table[psi.table[x]]) {
                rep.fail("an intertwining pair fails");
                rep.witness["i"] = i;
                rep.witness["x"] = point_json(psi.domain, x);
                return rep;
            }
        }
    rep.counts["intertwining_checks"] = equi;

    nlohmann::ordered_json hj = nlohmann::ordered_json::array();
    for (const auto& h : hats) hj.push_back(h.table);
    rep.values["hat_tables"] = hj;
    return rep;
}

Rational metric_distance(const SpacePtr& product, const ProductMetric& m, PointId x, PointId y) {
    const auto* pp = std::get_if<ProvProduct>(&product->provenance());
    if (!pp) throw InputError("the metric lives on a product space");
    if (m.weights.size() != pp->factors.size())
        throw InputError("one weight per product factor is required");
    if (x < 0 || x >= product->size() || y < 0 || y >= product->size())
        throw InputError("metric distance: point out of range");
    Rational d(0);
    for (size_t f = 0; f < m.weights.size(); ++f)
        if (pp->comp[x][f] != pp->comp[y][f]) d = d + m.weights[f];
    return d;
}

FiberDiameters fiber_diameters(const NilMap& psi, const ProductMetric& m) {
    const auto* pp = std::get_if<ProvProduct>(&psi.domain->provenance());
    if (!pp) throw InputError("fiber diameters need a product domain");
    if (m.weights.size() != pp->factors.size())
        throw InputError("one weight per product factor is required");

    FiberDiameters result;
    Report& rep = result.report;
    rep = Report("fiber_diameters");
    rep.values["map"] = psi.name;

    std::vector<std::vector<PointId>> fibers(psi.codomain->size());
    for (int x = 0; x < psi.domain->size(); ++x) fibers[psi.table[x]].push_back(x);
    for (size_t y = 0; y < fibers.size(); ++y)
        if (fibers[y].empty())
            throw InputError("fiber diameters: " + psi.name + " misses the point " +
                             psi.codomain->points()[y].str());

    result.per_fiber.assign(fibers.size(), Rational(0));
    result.sup = Rational(0);
    nlohmann::ordered_json fj = nlohmann::ordered_json::array();
    for (size_t y = 0; y < fibers.size(); ++y) {
        Rational diam(0);
        const auto& fib = fibers[y];
        for (size_t i = 0; i < fib.size(); ++i)
            for (size_t j = i + 1; j < fib.size(); ++j) {
                Budget::tick("fiber diameter");
                Rational d = metric_distance(psi.domain, m, fib[i], fib[j]);
                if (diam < d) diam = d;
            }
        result.per_fiber[y] = diam;
        if (result.sup < diam) result.sup = diam;
        nlohmann::ordered_json e;
        e["base"] = point_json(psi.codomain, static_cast<PointId>(y));
        e["diameter"] = diam.str();
        fj.push_back(e);
    }
    rep.values["fibers"] = fj;
    rep.values["sup"] = result.sup.str();
    rep.counts["fibers"] = static_cast<std::int64_t>(fibers.size());
    return result;
}

Report is_transitive(const NilspaceSystem& sys) {
    Report rep("is_transitive");
    rep.values["space"] = sys.space->name();
    rep.values["translation"] = sys.trans.name;
    int size = sys.space->size();
    std::vector<char> seen(size, 0);
    PointId x = 0;
    std::int64_t orbit = 0;
    while (!seen[x]) {
        seen[x] = 1;
        ++orbit;
        x = sys.trans.table[x];
    }
    rep.counts["orbit_size"] = orbit;
    if (orbit != size) {
        for (PointId p = 0; p < size; ++p)
            if (!seen[p]) {
                rep.fail("the orbit does not reach every point");
                rep.witness["outside"] = point_json(sys.space, p);
                break;
            }
    }
    return rep;
}

} // namespace nilab::dynamics
