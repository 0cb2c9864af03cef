#include "nilab/refine.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "nilab/dynamics.hpp"
#include "nilab/errors.hpp"

namespace nilab::refine {

namespace {

void require_fibration(const NilMap& f) {
    if (!f.cache->fibration || !f.cache->fibration->passed())
        throw InputError("a verified fibration is needed; run the fibration check on " + f.name +
                         " first");
}

void require_translation(const NilMap& f) {
    if (!f.cache->translation || !f.cache->translation->passed())
        throw InputError("a verified translation is needed; run the translation check on " +
                         f.name + " first");
}

NilMap product_projection(const SpacePtr& prod, int idx, const SpacePtr& target) {
    const auto* pp = std::get_if<ProvProduct>(&prod->provenance());
    if (!pp || idx < 0 || idx >= static_cast<int>(pp->factors.size()) ||
        pp->factors[idx].get() != target.get())
        throw InternalError("projection requested from a mismatched product");
    std::vector<PointId> table(prod->size());
    for (int x = 0; x < prod->size(); ++x) table[x] = pp->comp[x][idx];
    return maps::make_map("proj" + std::to_string(idx + 1) + "[" + prod->name() + "]", prod,
                          target, std::move(table));
}

} // namespace

// ---- fiber products ----

FiberProductResult fiber_product(const NilMap& f, const NilMap& g, std::string name) {
    require_fibration(f);
    require_fibration(g);
    if (f.codomain.get() != g.codomain.get())
        throw InputError("fiber product: " + f.name + " and " + g.name +
                         " must share a codomain");

    SpacePtr y = f.domain;
    SpacePtr w = g.domain;
    SpacePtr ambient = build_product({y, w});
    std::vector<PointId> carrier;
    for (int yi = 0; yi < y->size(); ++yi)
        for (int wi = 0; wi < w->size(); ++wi)
            if (f.table[yi] == g.table[wi]) carrier.push_back(yi * w->size() + wi);
    if (carrier.empty()) throw InputError("the fiber product of " + f.name + " and " + g.name +
                                          " is empty");

    std::vector<Point> points;
    std::vector<PointId> a2s(ambient->size(), -1);
    for (size_t i = 0; i < carrier.size(); ++i) {
        points.push_back(ambient->points()[carrier[i]]);
        a2s[carrier[i]] = static_cast<PointId>(i);
    }
    if (name.empty()) name = y->name() + "x_" + f.codomain->name() + "_" + w->name();
    auto q = std::make_shared<Nilspace>(
        name, std::move(points), ambient->step_hint(),
        ProvFiberProduct{ambient, f, g, carrier, std::move(a2s)});

    const auto* pf = std::get_if<ProvFiberProduct>(&q->provenance());
    std::vector<PointId> lt(q->size()), rt(q->size());
    for (int i = 0; i < q->size(); ++i) {
        lt[i] = pf->carrier[i] / w->size();
        rt[i] = pf->carrier[i] % w->size();
    }
    FiberProductResult result;
    result.space = q;
    result.proj_left = maps::make_map("left[" + name + "]", q, y, std::move(lt));
    result.proj_right = maps::make_map("right[" + name + "]", q, w, std::move(rt));

    Report& rep = result.report;
    rep = Report("fiber_product");
    rep.values["space"] = name;
    rep.counts["points"] = q->size();

    Report ax = verify_axioms(q, -1);
    if (!ax.passed()) {
        rep.fail("the fiber product fails the space checks: " + ax.message);
        rep.witness["axioms"] = ax.to_json();
        return result;
    }
    for (const auto& [k, v] : ax.counts) rep.counts[k] = v;

    Report lf = maps::is_fibration(result.proj_left);
    if (!lf.passed()) {
        rep.fail("the left projection is not a fibration");
        rep.witness["left"] = lf.to_json();
        return result;
    }
    Report rf = maps::is_fibration(result.proj_right);
    if (!rf.passed()) {
        rep.fail("the right projection is not a fibration");
        rep.witness["right"] = rf.to_json();
        return result;
    }

    // corner completion by the construction's own recipe: complete the
    // right coordinate first, then lift the left corner through f
    int step = step_of(q);
    std::int64_t completed = 0;
    for (int n = 1; n <= step + 1; ++n) {
        for (const auto& corner : enumerate_corners(q, n)) {
            Budget::tick("fiber corner lift");
            size_t nv = corner.size();
            CornerVals cy(nv), cw(nv);
            for (size_t v = 0; v < nv; ++v) {
                PointId amb = pf->carrier[corner[v]];
                cy[v] = amb / w->size();
                cw[v] = amb % w->size();
            }
            auto wvals = completions(w, n, cw);
            if (wvals.empty()) {
                rep.fail("a corner loses its right completion");
                rep.counts["dim"] = n;
                rep.witness["corner"] = cube_json(q, corner);
                return result;
            }
            PointId wv = wvals.front();
            PointId down = g.table[wv];
            PointId lifted = -1;
            for (PointId yv : completions(y, n, cy))
                if (f.table[yv] == down) {
                    lifted = yv;
                    break;
                }
            if (lifted < 0) {
                rep.fail("the left corner does not lift over the chosen right completion");
                rep.counts["dim"] = n;
                rep.witness["corner"] = cube_json(q, corner);
                rep.witness["right_completion"] = point_json(w, wv);
                return result;
            }
            PointId sub = pf->ambient_to_sub[lifted * w->size() + wv];
            if (sub < 0) throw InternalError("a lifted completion left the fiber product");
            CubeVals full(corner);
            full.push_back(sub);
            if (!in_cube_set(q, n, full))
                throw InternalError("a lifted completion is not a cube of the fiber product");
            ++completed;
        }
    }
    rep.counts["corners_completed"] = completed;
    rep.message = "subspace verified; projections are fibrations; every corner completes by "
                  "completing the right coordinate and lifting the left";
    return result;
}

// ---- coarsest fibration factor ----

namespace {

// all partitions of one cell as restricted growth strings
void cell_partitions(const std::vector<PointId>& cell,
                     std::vector<std::vector<std::vector<PointId>>>& out) {
    size_t n = cell.size();
    std::vector<int> rgs(n, 0);
    std::function<void(size_t, int)> rec = [&](size_t i, int maxv) {
        if (i == n) {
            int ncells = maxv + 1;
            std::vector<std::vector<PointId>> cells(ncells);
            for (size_t j = 0; j < n; ++j) cells[rgs[j]].push_back(cell[j]);
            out.push_back(std::move(cells));
            return;
        }
        for (int v = 0; v <= maxv + 1; ++v) {
            rgs[i] = v;
            rec(i + 1, std::max(maxv, v));
        }
    };
    rec(1, 0); // rgs[0] stays 0
    if (n == 0) out.push_back({});
}

struct CandidateOutcome {
    bool ok = false;
    SpacePtr space;
    NilMap proj;
    NilMap induced;
};

CandidateOutcome try_candidate(const NilMap& m, const Partition& part) {
    CandidateOutcome out;
    auto [q, pi] = build_quotient(m.domain, part);
    Report lift = corner_lift_check(m.domain, q, pi.table, -1);
    if (!lift.passed()) return out;
    Report ax = verify_axioms(q, -1);
    if (!ax.passed()) return out;
    Report fib = maps::is_fibration(pi);
    if (!fib.passed()) return out;
    std::vector<PointId> ind(q->size(), -1);
    for (int x = 0; x < m.domain->size(); ++x) {
        if (ind[pi.table[x]] < 0) ind[pi.table[x]] = m.table[x];
        else if (ind[pi.table[x]] != m.table[x])
            return out; // candidate does not refine the map
    }
    NilMap induced = maps::make_map(m.name + "'", q, m.codomain,
                                    std::vector<PointId>(ind.begin(), ind.end()));
    if (!maps::is_morphism(induced).passed()) return out;
    out.ok = true;
    out.space = q;
    out.proj = pi;
    out.induced = std::move(induced);
    return out;
}

} // namespace

CoarsestFactorResult coarsest_fibration_factor(const NilMap& m) {
    Report mor = maps::is_morphism(m);
    if (!mor.passed())
        throw InputError("coarsest fibration factor: " + m.name +
                         " is not a morphism, so it admits no factorization");

    CoarsestFactorResult result;
    Report& rep = result.report;
    rep = Report("coarsest_fibration_factor");
    rep.values["map"] = m.name;

    Partition base = maps::partition_of(m);
    int n = m.domain->size();
    std::int64_t tried = 0;

    if (n <= 8) {
        // every admissible partition, coarsest first
        std::vector<std::vector<std::vector<std::vector<PointId>>>> per_cell(base.cells.size());
        for (size_t c = 0; c < base.cells.size(); ++c)
            cell_partitions(base.cells[c], per_cell[c]);
        std::vector<Partition> candidates;
        std::vector<size_t> pick(base.cells.size(), 0);
        while (true) {
            std::vector<std::vector<PointId>> cells;
            for (size_t c = 0; c < per_cell.size(); ++c)
                for (const auto& cell : per_cell[c][pick[c]]) cells.push_back(cell);
            candidates.push_back(Partition::from_cells(std::move(cells), n));
            size_t c = per_cell.size();
            bool done = false;
            while (true) {
                if (c == 0) { done = true; break; }
                --c;
                if (++pick[c] < per_cell[c].size()) break;
                pick[c] = 0;
            }
            if (done) break;
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Partition& a, const Partition& b) {
                             if (a.num_cells() != b.num_cells())
                                 return a.num_cells() < b.num_cells();
                             return a.cells < b.cells;
                         });
        for (const auto& cand : candidates) {
            Budget::tick("factor candidate");
            ++tried;
            auto out = try_candidate(m, cand);
            if (out.ok) {
                result.space = out.space;
                result.proj = out.proj;
                result.induced = out.induced;
                rep.values["method"] = "exhaustive";
                break;
            }
        }
    } else {
        // greedy: start from the fibers of the map, otherwise merge upward
        // from singletons; the result is admissible but maybe not optimal
        auto out = try_candidate(m, base);
        ++tried;
        Partition current = Partition::discrete(n);
        if (!out.ok) {
            bool improved = true;
            while (improved) {
                improved = false;
                int nc = current.num_cells();
                for (int i = 0; i < nc && !improved; ++i)
                    for (int j = i + 1; j < nc && !improved; ++j) {
                        if (base.cell_of[current.cells[i].front()] !=
                            base.cell_of[current.cells[j].front()])
                            continue;
                        Budget::tick("factor candidate");
                        std::vector<int> merged = current.cell_of;
                        for (PointId x : current.cells[j]) merged[x] = current.cells[i].front();
                        for (PointId x : current.cells[i]) merged[x] = current.cells[i].front();
                        Partition trial = Partition::from_cell_of(merged);
                        ++tried;
                        auto t = try_candidate(m, trial);
                        if (t.ok) {
                            current = trial;
                            out = std::move(t);
                            improved = true;
                        }
                    }
            }
            if (!out.ok) {
                ++tried;
                out = try_candidate(m, Partition::discrete(n));
            }
        }
        if (!out.ok)
            throw InternalError("even the identity partition fails for " + m.name);
        result.space = out.space;
        result.proj = out.proj;
        result.induced = out.induced;
        rep.values["method"] = "greedy";
    }

    if (!result.space)
        throw InternalError("no admissible partition found for " + m.name);
    rep.counts["candidates_tried"] = tried;
    rep.counts["cells"] = result.space->size();
    rep.values["factor_space"] = result.space->name();
    return result;
}

CommonRefinementResult common_refinement(const std::vector<NilMap>& fs, std::string name) {
    if (fs.empty()) throw InputError("common refinement needs at least one map");
    for (size_t i = 1; i < fs.size(); ++i)
        if (fs[i].domain.get() != fs[0].domain.get())
            throw InputError("common refinement: all maps must share one domain");

    std::vector<SpacePtr> codomains;
    for (const auto& f : fs) codomains.push_back(f.codomain);
    SpacePtr prod = build_product(codomains);
    NilMap bundle = maps::bundle_map(fs, prod, name.empty() ? "" : name + "_joint");

    auto cf = coarsest_fibration_factor(bundle);

    CommonRefinementResult result;
    result.space = cf.space;
    result.proj = cf.proj;
    Report& rep = result.report;
    rep = cf.report;
    rep.op = "common_refinement";
    rep.values.erase("map");
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& f : fs) inputs.push_back(f.name);
    rep.values["maps"] = inputs;

    for (size_t i = 0; i < fs.size(); ++i) {
        NilMap pr = product_projection(prod, static_cast<int>(i), fs[i].codomain);
        NilMap ind = maps::compose(pr, cf.induced, fs[i].name + "'");
        if (!maps::is_morphism(ind).passed())
            throw InternalError("an induced component of the common refinement is not a morphism");
        for (int x = 0; x < fs[i].domain->size(); ++x)
            if (ind.table[result.proj.table[x]] != fs[i].table[x])
                throw InternalError("the common refinement does not reproduce " + fs[i].name);
        result.induced.push_back(std::move(ind));
    }
    return result;
}

// ---- assembly of consistent refinements ----

DeltaFibrationResult delta_fibration(const NilMap& psi1, const NilMap& psi2,
                                     const NilMap& psi3, std::string name) {
    require_fibration(psi1);
    require_fibration(psi2);
    require_fibration(psi3);
    if (psi1.domain.get() != psi2.domain.get())
        throw InputError("the first two maps must share their domain");
    if (psi3.domain.get() != psi2.codomain.get())
        throw InputError("the third map must start where the second one lands");

    SpacePtr x = psi1.domain;
    SpacePtr y = psi1.codomain;
    SpacePtr w = psi2.codomain;
    int k = step_of(x);
    if (k < 1) throw InputError("the domain must have step at least 1");

    auto [xk1, pix] = factor(x, k - 1);
    if (!maps::refines(pix, psi2))
        throw InputError(psi2.name + " must factor through the level-" + std::to_string(k - 1) +
                         " factorization of the domain");
    auto [yk1, piy] = factor(y, k - 1);
    if (psi3.codomain.get() != yk1.get())
        throw InputError(psi3.name + " must land in the cached level-" + std::to_string(k - 1) +
                         " factor space of the codomain of " + psi1.name);
    for (int p = 0; p < x->size(); ++p)
        if (piy.table[psi1.table[p]] != psi3.table[psi2.table[p]])
            throw InputError("the square does not commute at " + x->points()[p].str());

    DeltaFibrationResult result;
    Report& rep = result.report;
    rep = Report("delta_fibration");
    rep.values["psi1"] = psi1.name;
    rep.values["psi2"] = psi2.name;
    rep.values["psi3"] = psi3.name;
    nlohmann::ordered_json claims;

    Report pf = maps::is_fibration(piy);
    if (!pf.passed())
        throw InternalError("the factor projection of " + y->name() + " is not a fibration");
    auto fp = fiber_product(piy, psi3, name);
    if (!fp.report.passed()) {
        rep.fail("the fiber product construction fails: " + fp.report.message);
        rep.witness["fiber_product"] = fp.report.to_json();
        return result;
    }
    SpacePtr q = fp.space;
    result.space = q;
    result.proj_y = fp.proj_left;
    result.proj_w = fp.proj_right;
    rep.counts["points"] = q->size();

    const auto* prov = std::get_if<ProvFiberProduct>(&q->provenance());
    std::vector<PointId> psit(x->size());
    for (int p = 0; p < x->size(); ++p) {
        PointId amb = psi1.table[p] * w->size() + psi2.table[p];
        PointId qe = prov->ambient_to_sub[amb];
        if (qe < 0) throw InternalError("a commuting pair landed outside the fiber product");
        psit[p] = qe;
    }
    result.psi = maps::make_map("delta[" + psi1.name + "," + psi2.name + "]", x, q,
                                std::move(psit));

    // claim 1: the joint map covers the whole fiber product
    {
        std::vector<char> hit(q->size(), 0);
        for (PointId v : result.psi.table) hit[v] = 1;
        bool all = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
        claims["image_covers"] = all ? "pass" : "fail";
        if (!all) {
            rep.fail("the joint map misses part of the fiber product");
            for (int i = 0; i < q->size(); ++i)
                if (!hit[i]) {
                    rep.witness["missed"] = point_json(q, i);
                    break;
                }
        }
    }

    // claim 2: the joint map is a fibration
    {
        Report fib = maps::is_fibration(result.psi);
        claims["fibration"] = fib.passed() ? "pass" : "fail";
        if (!fib.passed() && rep.passed()) {
            rep.fail("the joint map is not a fibration");
            rep.witness["fibration"] = fib.witness;
        }
    }

    // claim 3: the joint map carries the same level-(k-1) data as psi2
    {
        auto [qk1, piq] = factor(q, k - 1);
        NilMap down = maps::compose(piq, result.psi);
        bool same = maps::partition_of(down).cells == maps::partition_of(psi2).cells;
        claims["level_data_matches"] = same ? "pass" : "fail";
        if (!same && rep.passed())
            rep.fail("the level-" + std::to_string(k - 1) + " data differs from " + psi2.name);
    }

    // claim 4: the level-(k-1) factor of the fiber product corresponds to w
    {
        auto [qk1, piq] = factor(q, k - 1);
        bool ok = qk1->size() == w->size();
        std::vector<PointId> phi(w->size(), -1);
        if (ok) {
            for (int wi = 0; wi < w->size() && ok; ++wi) {
                for (int yi = 0; yi < y->size(); ++yi) {
                    if (piy.table[yi] != psi3.table[wi]) continue;
                    PointId qe = prov->ambient_to_sub[yi * w->size() + wi];
                    if (qe < 0) {
                        ok = false;
                        break;
                    }
                    PointId c = piq.table[qe];
                    if (phi[wi] < 0) phi[wi] = c;
                    else if (phi[wi] != c) {
                        ok = false; // depends on the chosen partner
                        break;
                    }
                }
                if (phi[wi] < 0) ok = false;
            }
        }
        if (ok) {
            std::vector<char> seen(qk1->size(), 0);
            for (PointId v : phi) {
                if (seen[v]) {
                    ok = false;
                    break;
                }
                seen[v] = 1;
            }
        }
        if (ok) {
            NilMap fwd = maps::make_map("corr[" + w->name() + "]", w, qk1, phi);
            std::vector<PointId> inv(qk1->size());
            for (int wi = 0; wi < w->size(); ++wi) inv[phi[wi]] = wi;
            NilMap bwd = maps::make_map("corr_inv[" + w->name() + "]", qk1, w, std::move(inv));
            ok = maps::is_morphism(fwd).passed() && maps::is_morphism(bwd).passed();
        }
        if (ok) rep.values["factor_iso"] = phi;
        claims["factor_correspondence"] = ok ? "pass" : "fail";
        if (!ok && rep.passed())
            rep.fail("the level-" + std::to_string(k - 1) +
                     " factor does not correspond to " + w->name());
    }

    // claim 5: the top structure groups of the fiber product and of y match
    {
        int kq = step_of(q);
        int ky = step_of(y);
        if (kq < k && ky < k) {
            claims["top_group_match"] = "pass";
            rep.values["top_groups"] = "both trivial below the top level";
        } else if (kq == k && ky == k) {
            auto gq = structure_group(q, k);
            auto gy = structure_group(y, k);
            if (gq.report.verdict == Report::Verdict::Error || gy.report.verdict == Report::Verdict::Error) {
                claims["top_group_match"] = "error";
                rep.error("structure data missing for the top-group comparison");
            } else if (!gq.report.passed() || !gy.report.passed()) {
                claims["top_group_match"] = "fail";
                if (rep.passed()) rep.fail("a structure group fails its own checks");
            } else {
                const auto& actq = *gq.action;
                const auto& acty = *gy.action;
                bool ok = gq.group.size() == gy.group.size();
                grp::Hom hom;
                hom.domain = gq.group;
                hom.codomain = gy.group;
                for (int z = 0; ok && z < gq.group.size(); ++z) {
                    int zy = -1;
                    for (int p = 0; p < q->size(); ++p) {
                        PointId yi = prov->carrier[p] / w->size();
                        PointId yj = prov->carrier[actq[z][p]] / w->size();
                        int cand = -1;
                        for (int t = 0; t < gy.group.size(); ++t)
                            if (acty[t][yi] == yj) {
                                cand = t;
                                break;
                            }
                        if (cand < 0) {
                            ok = false;
                            break;
                        }
                        if (zy < 0) zy = cand;
                        else if (zy != cand) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) hom.table.push_back(grp::elem_at(gy.group, zy));
                }
                if (ok) {
                    std::vector<char> seen(gy.group.size(), 0);
                    for (const auto& e : hom.table) {
                        int idx = grp::index_of(gy.group, e);
                        if (seen[idx]) {
                            ok = false;
                            break;
                        }
                        seen[idx] = 1;
                    }
                }
                if (ok) ok = grp::is_hom(hom).passed();
                claims["top_group_match"] = ok ? "pass" : "fail";
                if (ok) {
                    rep.values["top_group"] = gy.group.name;
                    nlohmann::ordered_json tbl = nlohmann::ordered_json::array();
                    for (const auto& e : hom.table) tbl.push_back(grp::elem_json(e));
                    rep.values["top_hom"] = tbl;
                } else if (rep.passed()) {
                    rep.fail("the top structure groups do not match by the action");
                }
            }
        } else {
            claims["top_group_match"] = "fail";
            if (rep.passed()) rep.fail("the top structure groups live at different levels");
        }
    }

    rep.values["claims"] = claims;
    if (rep.passed()) rep.message = "all five claims verified";
    return result;
}

KerWitnessResult ker_witness(const NilMap& psi, const NilMap& r, PointId x, PointId y) {
    require_fibration(psi);
    if (r.domain.get() != psi.domain.get())
        throw InputError("the finer map must share the domain of " + psi.name);
    if (!maps::refines(r, psi))
        throw InputError(r.name + " must refine " + psi.name);
    SpacePtr space = psi.domain;
    if (x < 0 || x >= space->size() || y < 0 || y >= space->size())
        throw InputError("point out of range");

    int k = step_of(space);
    if (k < 1) throw InputError("the domain must have step at least 1");
    auto [zk1, piz] = factor(r.codomain, k - 1);

    KerWitnessResult result;
    Report& rep = result.report;
    rep = Report("ker_witness");
    rep.values["map"] = psi.name;
    rep.values["finer"] = r.name;
    rep.values["x"] = point_json(space, x);
    rep.values["y"] = point_json(space, y);

    // not related by the combined map: the correct answer is "no witness"
    if (psi.table[x] != psi.table[y] ||
        piz.table[r.table[x]] != piz.table[r.table[y]]) {
        rep.values["related"] = false;
        rep.message = "the points are not related by the combined map";
        return result;
    }
    rep.values["related"] = true;

    auto sm = maps::structure_morphism(psi, k);
    if (!sm.report.passed()) {
        rep.fail("no structure morphism: " + sm.report.message);
        rep.witness = sm.report.witness;
        return result;
    }
    auto kern = grp::kernel(sm.hom);
    rep.counts["kernel_size"] = static_cast<std::int64_t>(kern.size());

    auto gx = structure_group(space, k);
    const auto& act = *gx.action;
    for (const auto& z : kern) {
        int zi = grp::index_of(gx.group, z);
        if (r.table[act[zi][y]] == r.table[x]) {
            result.z = z;
            result.z_index = zi;
            rep.values["z"] = grp::elem_json(z);
            rep.values["moved"] = point_json(space, act[zi][y]);
            return result;
        }
    }
    rep.fail("no kernel element moves the second point into the fiber of the first");
    return result;
}

Factorization h_consistent_refinement(const NilMap& psi_prime, const std::vector<NilMap>& h) {
    require_fibration(psi_prime);
    SpacePtr x = psi_prime.domain;
    for (const auto& a : h) {
        if (a.domain.get() != x.get() || a.codomain.get() != x.get())
            throw InputError("the translation " + a.name + " does not act on " + x->name());
        require_translation(a);
    }

    Factorization result;
    Report& rep = result.report;
    rep = Report("h_consistent_refinement");
    rep.values["map"] = psi_prime.name;
    rep.counts["translations"] = static_cast<std::int64_t>(h.size());

    int k = step_of(x);
    if (k == 0 || h.empty()) {
        result.psi = psi_prime;
        result.p = maps::identity_map(psi_prime.codomain);
        rep.values["method"] = k == 0 ? "step zero" : "no translations";
        for (const auto& a : h) {
            Report cons = dynamics::is_consistent(result.psi, a);
            if (!cons.passed()) {
                rep.fail("the map itself is not consistent with " + a.name);
                rep.witness = cons.witness;
                return result;
            }
        }
        return result;
    }

    // joint refinement of the map and all its translated copies
    std::vector<NilMap> pulled{psi_prime};
    for (const auto& a : h)
        pulled.push_back(maps::compose(psi_prime, a, psi_prime.name + "." + a.name));
    auto cr = common_refinement(pulled);
    rep.counts["refinement_size"] = cr.space->size();

    // recurse one level down with the induced data
    auto [xk1, pix] = factor(x, k - 1);
    NilMap qk1 = maps::induced_factor_map(cr.proj, k - 1);
    Report qf = maps::is_fibration(qk1);
    if (!qf.passed())
        throw InternalError("the induced level map of the refinement is not a fibration");
    std::vector<NilMap> hdown;
    for (const auto& a : h) {
        NilMap ad = maps::induced_factor_map(a, k - 1);
        Report at = maps::is_translation(ad);
        if (!at.passed()) {
            rep.fail("the translation " + a.name + " does not descend to level " +
                     std::to_string(k - 1));
            rep.witness["translation_check"] = at.to_json();
            return result;
        }
        hdown.push_back(std::move(ad));
    }
    Factorization below = h_consistent_refinement(qk1, hdown);
    if (!below.report.passed()) {
        rep.fail("the recursive stage fails: " + below.report.message);
        rep.witness["below"] = below.report.to_json();
        return result;
    }

    // assemble with the fiber product construction
    NilMap psi2 = maps::compose(below.psi, pix);
    Report f2 = maps::is_fibration(psi2);
    if (!f2.passed())
        throw InternalError("the assembled level map is not a fibration");
    NilMap m1 = maps::induced_factor_map(cr.induced[0], k - 1);
    NilMap psi3 = maps::compose(m1, below.p);
    Report f3 = maps::is_fibration(psi3);
    if (!f3.passed())
        throw InternalError("the connecting level map is not a fibration");

    auto delta = delta_fibration(psi_prime, psi2, psi3);
    rep.values["assembly"] = delta.report.to_json();
    if (!delta.report.passed()) {
        if (delta.report.verdict == Report::Verdict::Error)
            rep.error("the assembly step cannot be completed: " + delta.report.message);
        else rep.fail("the assembly step fails: " + delta.report.message);
        return result;
    }
    result.psi = delta.psi;
    result.p = delta.proj_y;
    rep.values["method"] = "assembled";

    for (const auto& a : h) {
        Report cons = dynamics::is_consistent(result.psi, a);
        if (!cons.passed()) {
            rep.fail("the refinement is not consistent with " + a.name);
            rep.witness = cons.witness;
            return result;
        }
    }
    for (int p = 0; p < x->size(); ++p)
        if (result.p.table[result.psi.table[p]] != psi_prime.table[p]) {
            rep.fail("the connecting map does not reproduce " + psi_prime.name);
            rep.witness["x"] = point_json(x, p);
            return result;
        }
    rep.counts["size"] = result.psi.codomain->size();
    return result;
}

Tower consistent_tower(const std::vector<NilMap>& rough, const std::vector<NilMap>& h) {
    if (rough.empty()) throw InputError("a tower needs at least one rough factor map");
    SpacePtr x = rough[0].domain;
    for (const auto& r : rough) {
        if (r.domain.get() != x.get())
            throw InputError("all rough factor maps must share one domain");
        require_fibration(r);
    }

    Tower tower;
    Report& rep = tower.report;
    rep = Report("consistent_tower");
    rep.counts["stages"] = static_cast<std::int64_t>(rough.size());
    rep.counts["translations"] = static_cast<std::int64_t>(h.size());
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();

    for (size_t i = 0; i < rough.size(); ++i) {
        NilMap target = rough[i];
        if (i > 0) {
            auto cr = common_refinement({tower.psis.back(), rough[i]});
            target = cr.proj;
        }
        Factorization f = h_consistent_refinement(target, h);
        if (!f.report.passed()) {
            rep.fail("stage " + std::to_string(i + 1) + " fails: " + f.report.message);
            rep.witness["stage"] = f.report.to_json();
            return tower;
        }
        nlohmann::ordered_json st;
        st["stage"] = i + 1;
        st["size"] = f.psi.codomain->size();
        stages.push_back(st);
        tower.psis.push_back(std::move(f.psi));
    }

    // connecting maps and their composition identities
    tower.connect.resize(tower.psis.size());
    for (size_t i = 0; i < tower.psis.size(); ++i) {
        tower.connect[i].resize(i + 1);
        tower.connect[i][i] = maps::identity_map(tower.psis[i].codomain);
        for (size_t j = 0; j < i; ++j) {
            std::vector<PointId> ct(tower.psis[i].codomain->size(), -1);
            for (int p = 0; p < x->size(); ++p) {
                PointId yi = tower.psis[i].table[p];
                PointId yj = tower.psis[j].table[p];
                if (ct[yi] < 0) ct[yi] = yj;
                else if (ct[yi] != yj) {
                    rep.fail("stage " + std::to_string(i + 1) +
                             " does not refine stage " + std::to_string(j + 1));
                    rep.witness["x"] = point_json(x, p);
                    return tower;
                }
            }
            for (PointId v : ct)
                if (v < 0)
                    throw InternalError("a stage map of the tower is not surjective");
            tower.connect[i][j] =
                maps::make_map("c" + std::to_string(i + 1) + std::to_string(j + 1),
                               tower.psis[i].codomain, tower.psis[j].codomain, ct);
            Report cf = maps::is_fibration(tower.connect[i][j]);
            if (!cf.passed()) {
                rep.fail("a connecting map is not a fibration");
                rep.witness["connector"] = cf.to_json();
                return tower;
            }
        }
    }
    for (size_t i = 0; i < tower.psis.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            for (size_t l = j; l <= i; ++l)
                for (int v = 0; v < tower.psis[i].codomain->size(); ++v)
                    if (tower.connect[l][j].table[tower.connect[i][l].table[v]] !=
                        tower.connect[i][j].table[v]) {
                        rep.fail("the connecting maps do not compose");
                        rep.counts["bad_i"] = static_cast<std::int64_t>(i);
                        rep.counts["bad_j"] = static_cast<std::int64_t>(j);
                        return tower;
                    }

    // every stage still factors its rough input
    for (size_t i = 0; i < rough.size(); ++i)
        if (!maps::refines(tower.psis[i], rough[i])) {
            rep.fail("stage " + std::to_string(i + 1) + " does not refine its rough input");
            return tower;
        }
    rep.values["stages"] = stages;
    rep.message = "all stages consistent; connecting maps compose";
    return tower;
}

} // namespace nilab::refine
