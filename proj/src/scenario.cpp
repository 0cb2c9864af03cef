#include "nilab/scenario.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "nilab/dynamics.hpp"
#include "nilab/maps.hpp"
#include "nilab/nilspace.hpp"
#include "nilab/refine.hpp"

namespace nilab::scenario {

namespace {

using nlohmann::json;

const json& need(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
    return *it;
}

int need_int(const json& obj, const char* key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_number_integer()) throw InputError(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

std::string need_str(const json& obj, const char* key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_string()) throw InputError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<PointId> pid_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw InputError(where + ": expected an array of point indices");
    std::vector<PointId> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw InputError(where + ": point indices must be integers");
        out.push_back(e.get<PointId>());
    }
    return out;
}

/// Lazily resolved registries over the document's sections. Task outputs are
/// registered under their requested names and resolve like declared entries.
struct Doc {
    const json& root;
    const RunFlags& flags;

    std::map<std::string, grp::Group> groups;
    std::map<std::string, SpacePtr> spaces;
    std::map<std::string, NilMap> maps;
    struct MetricEntry {
        std::string space;
        dynamics::ProductMetric metric;
    };
    std::map<std::string, MetricEntry> metrics;
    std::set<std::string> resolving;

    explicit Doc(const json& r, const RunFlags& f) : root(r), flags(f) {}

    const json* section_entry(const char* section, const std::string& name) const {
        auto sec = root.find(section);
        if (sec == root.end()) return nullptr;
        auto it = sec->find(name);
        if (it == sec->end()) return nullptr;
        return &*it;
    }

    struct Guard {
        std::set<std::string>& set;
        std::string key;
        Guard(std::set<std::string>& s, std::string k) : set(s), key(std::move(k)) {
            if (!set.insert(key).second)
                throw InputError("cyclic definition involving '" + key + "'");
        }
        ~Guard() { set.erase(key); }
    };

    const grp::Group& group(const std::string& name) {
        auto hit = groups.find(name);
        if (hit != groups.end()) return hit->second;
        const json* e = section_entry("groups", name);
        if (!e) throw InputError("unknown group '" + name + "'");
        const std::string where = "group '" + name + "'";
        const json& ords = need(*e, "orders", where);
        std::vector<int> orders;
        for (const auto& o : ords) orders.push_back(o.get<int>());
        return groups.emplace(name, grp::make_group(orders, name)).first->second;
    }

    SpacePtr space(const std::string& name) {
        auto hit = spaces.find(name);
        if (hit != spaces.end()) return hit->second;
        const json* e = section_entry("spaces", name);
        if (!e) throw InputError("unknown space '" + name + "'");
        Guard g(resolving, "space:" + name);
        SpacePtr s = build_space(name, *e);
        if (flags.paranoid > 0) {
            Report check = verify_axioms(s, flags.paranoid);
            if (!check.passed())
                throw InputError("space '" + name + "' fails verification: " + check.message);
        }
        spaces.emplace(name, s);
        return s;
    }

    SpacePtr build_space(const std::string& name, const json& e) {
        const std::string where = "space '" + name + "'";
        if (!e.is_object() || e.size() != 1)
            throw InputError(where + ": expected exactly one construction");
        const std::string kind = e.begin().key();
        const json& a = e.begin().value();
        if (kind == "dk") {
            return build_dk(group(need_str(a, "group", where)), need_int(a, "k", where), name);
        }
        if (kind == "point") {
            return build_point(name);
        }
        if (kind == "product") {
            std::vector<SpacePtr> factors;
            for (const auto& f : need(a, "factors", where)) factors.push_back(space(f));
            return build_product(factors, name);
        }
        if (kind == "quotient") {
            SpacePtr base = space(need_str(a, "base", where));
            std::vector<std::vector<PointId>> cells;
            for (const auto& c : need(a, "cells", where)) cells.push_back(pid_list(c, where));
            auto [q, pi] = build_quotient(base, Partition::from_cells(cells, base->size()), name);
            return q;
        }
        if (kind == "sub") {
            return build_sub(space(need_str(a, "base", where)),
                             pid_list(need(a, "carrier", where), where), name);
        }
        if (kind == "perturb") {
            std::set<CubeVals> removed;
            for (const auto& c : need(a, "remove", where)) removed.insert(pid_list(c, where));
            return build_perturbed(space(need_str(a, "base", where)), need_int(a, "dim", where),
                                   std::move(removed), name);
        }
        if (kind == "factor") {
            return factor(space(need_str(a, "base", where)), need_int(a, "n", where)).first;
        }
        if (kind == "fiber-product") {
            auto r = refine::fiber_product(map(need_str(a, "left", where)),
                                           map(need_str(a, "right", where)), name);
            if (!r.report.passed())
                throw InputError(where + ": fiber product fails: " + r.report.message);
            return r.space;
        }
        throw InputError(where + ": unknown construction '" + kind + "'");
    }

    const NilMap& map(const std::string& name) {
        auto hit = maps.find(name);
        if (hit != maps.end()) return hit->second;
        const json* e = section_entry("maps", name);
        if (!e) throw InputError("unknown map '" + name + "'");
        Guard g(resolving, "map:" + name);
        NilMap m = build_map(name, *e);
        return maps.emplace(name, std::move(m)).first->second;
    }

    NilMap build_map(const std::string& name, const json& e) {
        const std::string where = "map '" + name + "'";
        if (!e.is_object() || e.size() != 1)
            throw InputError(where + ": expected exactly one construction");
        const std::string kind = e.begin().key();
        const json& a = e.begin().value();
        if (kind == "table") {
            return maps::make_map(name, space(need_str(a, "domain", where)),
                                  space(need_str(a, "codomain", where)),
                                  pid_list(need(a, "values", where), where));
        }
        if (kind == "identity") {
            return maps::identity_map(space(need_str(a, "space", where)));
        }
        if (kind == "constant") {
            return maps::constant_map(space(need_str(a, "domain", where)),
                                      space(need_str(a, "codomain", where)),
                                      need_int(a, "value", where));
        }
        if (kind == "compose") {
            return maps::compose(map(need_str(a, "outer", where)),
                                 map(need_str(a, "inner", where)), name);
        }
        if (kind == "factor-proj") {
            return factor(space(need_str(a, "base", where)), need_int(a, "n", where)).second;
        }
        if (kind == "product-map") {
            SpacePtr dom = space(need_str(a, "domain", where));
            SpacePtr cod = space(need_str(a, "codomain", where));
            const auto* cp = std::get_if<ProvProduct>(&cod->provenance());
            size_t ncomp = cp ? cp->factors.size() : 1;
            std::vector<int> from(ncomp, -1);
            std::vector<NilMap> comps(ncomp);
            for (const auto& asg : need(a, "assign", where)) {
                int to = need_int(asg, "to", where);
                if (to < 0 || to >= static_cast<int>(ncomp) || from[to] >= 0)
                    throw InputError(where + ": bad or repeated component index");
                from[to] = need_int(asg, "from", where);
                comps[to] = map(need_str(asg, "via", where));
            }
            for (int f : from)
                if (f < 0) throw InputError(where + ": a codomain factor is unassigned");
            return maps::product_map(dom, cod, std::move(from), std::move(comps), name);
        }
        throw InputError(where + ": unknown construction '" + kind + "'");
    }

    const MetricEntry& metric(const std::string& name) {
        auto hit = metrics.find(name);
        if (hit != metrics.end()) return hit->second;
        const json* e = section_entry("metrics", name);
        if (!e) throw InputError("unknown metric '" + name + "'");
        const std::string where = "metric '" + name + "'";
        MetricEntry entry;
        entry.space = need_str(*e, "space", where);
        for (const auto& w : need(*e, "weights", where))
            entry.metric.weights.push_back(Rational::parse(w.get<std::string>()));
        return metrics.emplace(name, std::move(entry)).first->second;
    }

    void register_space(const std::string& name, SpacePtr s) {
        if (!spaces.emplace(name, std::move(s)).second || section_entry("spaces", name))
            throw InputError("name '" + name + "' is already taken");
    }
    void register_map(const std::string& name, NilMap m) {
        if (!maps.emplace(name, std::move(m)).second || section_entry("maps", name))
            throw InputError("name '" + name + "' is already taken");
    }
};

/// One executed task: its report plus a short text label.
struct TaskOutcome {
    Report report;
    std::string label;
};

TaskOutcome run_task(Doc& doc, const json& t, const std::string& where, const RunFlags& flags) {
    const std::string op = need_str(t, "op", where);
    TaskOutcome out;
    out.label = op;
    auto label_add = [&](const std::string& s) { out.label += " " + s; };

    if (op == "verify-nilspace") {
        std::string sn = need_str(t, "space", where);
        label_add(sn);
        int nmax = t.contains("nmax") ? need_int(t, "nmax", where) : flags.nmax;
        out.report = verify_axioms(doc.space(sn), nmax);
    } else if (op == "step") {
        std::string sn = need_str(t, "space", where);
        label_add(sn);
        out.report = Report("step");
        out.report.values["space"] = sn;
        out.report.values["step"] = step_of(doc.space(sn));
    } else if (op == "cube-count") {
        std::string sn = need_str(t, "space", where);
        int n = need_int(t, "n", where);
        label_add(sn + " n=" + std::to_string(n));
        out.report = Report("cube_count");
        out.report.values["space"] = sn;
        out.report.counts["dim"] = n;
        out.report.counts["count"] =
            static_cast<std::int64_t>(enumerate_cubes(doc.space(sn), n).size());
    } else if (op == "check-cube") {
        std::string sn = need_str(t, "space", where);
        int n = need_int(t, "n", where);
        label_add(sn);
        SpacePtr s = doc.space(sn);
        CubeVals q = pid_list(need(t, "cube", where), where);
        out.report = Report("check_cube");
        out.report.counts["dim"] = n;
        out.report.values["member"] = in_cube_set(s, n, q);
    } else if (op == "corner-completions") {
        std::string sn = need_str(t, "space", where);
        int n = need_int(t, "n", where);
        label_add(sn);
        SpacePtr s = doc.space(sn);
        auto vals = completions(s, n, pid_list(need(t, "corner", where), where));
        out.report = Report("corner_completions");
        out.report.counts["count"] = static_cast<std::int64_t>(vals.size());
        out.report.values["completions"] = vals;
    } else if (op == "factor") {
        std::string sn = need_str(t, "space", where);
        int n = need_int(t, "n", where);
        label_add(sn + " n=" + std::to_string(n));
        auto [f, pi] = factor(doc.space(sn), n);
        out.report = Report("factor");
        out.report.values["space"] = f->name();
        out.report.counts["size"] = f->size();
        if (t.contains("as")) {
            const json& as = t["as"];
            if (as.contains("space")) doc.register_space(as["space"], f);
            if (as.contains("map")) doc.register_map(as["map"], pi);
        }
    } else if (op == "structure-group") {
        std::string sn = need_str(t, "space", where);
        int level = need_int(t, "level", where);
        label_add(sn + " level=" + std::to_string(level));
        auto r = structure_group(doc.space(sn), level);
        out.report = std::move(r.report);
        out.report.values["order"] = r.group.size();
        out.report.values["orders"] = r.group.orders;
    } else if (op == "find-isomorphism") {
        std::string a = need_str(t, "left", where), b = need_str(t, "right", where);
        label_add(a + " ~ " + b);
        auto iso = find_nilspace_isomorphism(doc.space(a), doc.space(b));
        out.report = Report("find_isomorphism");
        out.report.values["found"] = iso.has_value();
        if (iso) out.report.values["table"] = *iso;
    } else if (op == "morphism") {
        std::string mn = need_str(t, "map", where);
        label_add(mn);
        out.report = maps::is_morphism(doc.map(mn));
    } else if (op == "fibration") {
        std::string mn = need_str(t, "map", where);
        label_add(mn);
        out.report = maps::is_fibration(doc.map(mn));
    } else if (op == "translation") {
        std::string mn = need_str(t, "map", where);
        label_add(mn);
        int extra = t.contains("extra-levels") ? need_int(t, "extra-levels", where) : 0;
        out.report = maps::is_translation(doc.map(mn), extra);
    } else if (op == "tran-group") {
        std::string sn = need_str(t, "space", where);
        label_add(sn);
        out.report = maps::tran_group(doc.space(sn)).report;
    } else if (op == "structure-morphism") {
        std::string mn = need_str(t, "map", where);
        int level = need_int(t, "level", where);
        label_add(mn + " level=" + std::to_string(level));
        auto r = maps::structure_morphism(doc.map(mn), level);
        out.report = std::move(r.report);
        nlohmann::json tbl = nlohmann::json::array();
        for (const auto& e : r.hom.table) tbl.push_back(nlohmann::json(grp::elem_json(e)));
        out.report.values["hom"] = tbl;
    } else if (op == "induced-factor-map") {
        std::string mn = need_str(t, "map", where);
        int n = need_int(t, "n", where);
        label_add(mn + " n=" + std::to_string(n));
        NilMap ind = maps::induced_factor_map(doc.map(mn), n);
        out.report = Report("induced_factor_map");
        out.report.values["map"] = maps::map_json(ind);
        if (t.contains("as")) doc.register_map(t["as"], ind);
    } else if (op == "consistency") {
        std::string mn = need_str(t, "map", where), an = need_str(t, "translation", where);
        label_add(mn + " with " + an);
        out.report = dynamics::is_consistent(doc.map(mn), doc.map(an));
    } else if (op == "check-consistency-pair") {
        std::string mn = need_str(t, "map", where), an = need_str(t, "translation", where);
        label_add(mn + " with " + an);
        const NilMap& psi = doc.map(mn);
        const NilMap& alpha = doc.map(an);
        PointId x = need_int(t, "x", where), y = need_int(t, "y", where);
        if (x < 0 || x >= psi.domain->size() || y < 0 || y >= psi.domain->size())
            throw InputError(where + ": point out of range");
        out.report = Report("check_consistency_pair");
        out.report.values["value_x"] = point_json(psi.codomain, psi.table[x]);
        out.report.values["value_y"] = point_json(psi.codomain, psi.table[y]);
        out.report.values["value_after_x"] = point_json(psi.codomain, psi.table[alpha.table[x]]);
        out.report.values["value_after_y"] = point_json(psi.codomain, psi.table[alpha.table[y]]);
        out.report.values["reproduces"] = psi.table[x] == psi.table[y] &&
                                          psi.table[alpha.table[x]] != psi.table[alpha.table[y]];
    } else if (op == "check-face-cert") {
        std::string mn = need_str(t, "map", where);
        label_add(mn);
        const NilMap& m = doc.map(mn);
        if (m.domain.get() != m.codomain.get())
            throw InputError(where + ": the map must act on one space");
        int dim = need_int(t, "dim", where);
        int axis = need_int(t, "axis", where);
        int side = need_int(t, "side", where);
        if (dim < 1 || axis < 1 || axis > dim || side < 0 || side > 1)
            throw InputError(where + ": bad face description");
        CubeVals q = pid_list(need(t, "cube", where), where);
        if (q.size() != (size_t{1} << dim)) throw InputError(where + ": cube has wrong size");
        CubeVals image = q;
        for (size_t v = 0; v < q.size(); ++v)
            if (((v >> (axis - 1)) & 1) == static_cast<size_t>(side))
                image[v] = m.table[q[v]];
        out.report = Report("check_face_cert");
        bool base = in_cube_set(m.domain, dim, q);
        bool img = in_cube_set(m.domain, dim, image);
        out.report.values["cube_is_cube"] = base;
        out.report.values["image_is_cube"] = img;
        out.report.values["reproduces"] = base && !img;
    } else if (op == "induced-translation") {
        std::string mn = need_str(t, "map", where), an = need_str(t, "translation", where);
        label_add(an + " through " + mn);
        auto r = dynamics::induced_translation(doc.map(mn), doc.map(an));
        out.report = std::move(r.report);
        if (r.beta && t.contains("as")) doc.register_map(t["as"], *r.beta);
    } else if (op == "hat-hom") {
        std::string mn = need_str(t, "map", where);
        label_add(mn);
        out.report = dynamics::hat_hom_check(doc.map(mn));
    } else if (op == "metric-distance") {
        std::string wn = need_str(t, "metric", where);
        PointId x = need_int(t, "x", where), y = need_int(t, "y", where);
        label_add(wn);
        const auto& entry = doc.metric(wn);
        Rational d = dynamics::metric_distance(doc.space(entry.space), entry.metric, x, y);
        out.report = Report("metric_distance");
        out.report.values["distance"] = d.str();
    } else if (op == "fiber-diameters") {
        std::string wn = need_str(t, "metric", where), mn = need_str(t, "map", where);
        label_add(mn);
        const auto& entry = doc.metric(wn);
        const NilMap& psi = doc.map(mn);
        if (psi.domain.get() != doc.space(entry.space).get())
            throw InputError(where + ": the metric lives on a different space");
        out.report = dynamics::fiber_diameters(psi, entry.metric).report;
    } else if (op == "transitive") {
        std::string sn = need_str(t, "space", where), an = need_str(t, "translation", where);
        label_add(sn + " under " + an);
        out.report = dynamics::is_transitive(dynamics::make_system(doc.space(sn), doc.map(an)));
    } else if (op == "fiber-product") {
        std::string ln = need_str(t, "left", where), rn = need_str(t, "right", where);
        label_add(ln + " x " + rn);
        auto r = refine::fiber_product(doc.map(ln), doc.map(rn));
        out.report = std::move(r.report);
        if (t.contains("as")) {
            const json& as = t["as"];
            if (as.contains("space")) doc.register_space(as["space"], r.space);
            if (as.contains("left")) doc.register_map(as["left"], r.proj_left);
            if (as.contains("right")) doc.register_map(as["right"], r.proj_right);
        }
    } else if (op == "coarsest-factor") {
        std::string mn = need_str(t, "map", where);
        label_add(mn);
        auto r = refine::coarsest_fibration_factor(doc.map(mn));
        out.report = std::move(r.report);
        if (t.contains("as")) {
            const json& as = t["as"];
            if (as.contains("space")) doc.register_space(as["space"], r.space);
            if (as.contains("proj")) doc.register_map(as["proj"], r.proj);
            if (as.contains("induced")) doc.register_map(as["induced"], r.induced);
        }
    } else if (op == "common-refinement") {
        std::vector<NilMap> ms;
        std::string names;
        for (const auto& n : need(t, "maps", where)) {
            ms.push_back(doc.map(n));
            names += (names.empty() ? "" : ",") + n.get<std::string>();
        }
        label_add(names);
        auto r = refine::common_refinement(ms);
        out.report = std::move(r.report);
        if (t.contains("as")) {
            const json& as = t["as"];
            if (as.contains("space")) doc.register_space(as["space"], r.space);
            if (as.contains("proj")) doc.register_map(as["proj"], r.proj);
            if (as.contains("induced")) {
                const json& inds = as["induced"];
                if (inds.size() != r.induced.size())
                    throw InputError(where + ": one induced name per input map is required");
                for (size_t i = 0; i < r.induced.size(); ++i)
                    doc.register_map(inds[i], r.induced[i]);
            }
        }
    } else if (op == "delta-fibration") {
        std::string p1 = need_str(t, "psi1", where), p2 = need_str(t, "psi2", where),
                    p3 = need_str(t, "psi3", where);
        label_add(p1 + "," + p2 + "," + p3);
        auto r = refine::delta_fibration(doc.map(p1), doc.map(p2), doc.map(p3));
        out.report = std::move(r.report);
        if (t.contains("as")) {
            const json& as = t["as"];
            if (as.contains("space")) doc.register_space(as["space"], r.space);
            if (as.contains("psi")) doc.register_map(as["psi"], r.psi);
            if (as.contains("proj_y")) doc.register_map(as["proj_y"], r.proj_y);
            if (as.contains("proj_w")) doc.register_map(as["proj_w"], r.proj_w);
        }
    } else if (op == "ker-witness") {
        std::string mn = need_str(t, "map", where), rn = need_str(t, "finer", where);
        label_add(mn + " <= " + rn);
        PointId x = need_int(t, "x", where), y = need_int(t, "y", where);
        auto r = refine::ker_witness(doc.map(mn), doc.map(rn), x, y);
        out.report = std::move(r.report);
        out.report.values["z_index"] = r.z_index;
    } else if (op == "h-consistent") {
        std::string mn = need_str(t, "map", where);
        std::vector<NilMap> h;
        std::string names;
        for (const auto& n : need(t, "translations", where)) {
            h.push_back(doc.map(n));
            names += (names.empty() ? "" : ",") + n.get<std::string>();
        }
        label_add(mn + " h={" + names + "}");
        auto r = refine::h_consistent_refinement(doc.map(mn), h);
        out.report = std::move(r.report);
        if (t.contains("as")) {
            const json& as = t["as"];
            if (as.contains("psi")) doc.register_map(as["psi"], r.psi);
            if (as.contains("p")) doc.register_map(as["p"], r.p);
        }
    } else if (op == "tower") {
        std::vector<NilMap> rough, h;
        for (const auto& n : need(t, "rough", where)) rough.push_back(doc.map(n));
        for (const auto& n : need(t, "translations", where)) h.push_back(doc.map(n));
        label_add(std::to_string(rough.size()) + " stages");
        out.report = refine::consistent_tower(rough, h).report;
    } else {
        throw InputError(where + ": unknown op '" + op + "'");
    }
    return out;
}

/// Every key present in `expect` must match the actual value; objects match
/// by subset recursively, everything else by equality.
bool subset_match(const json& expect, const json& actual) {
    if (expect.is_object()) {
        if (!actual.is_object()) return false;
        for (auto it = expect.begin(); it != expect.end(); ++it) {
            if (!actual.contains(it.key())) return false;
            if (!subset_match(it.value(), actual[it.key()])) return false;
        }
        return true;
    }
    return expect == actual;
}

void validate_expect(const json& expect, const std::string& where) {
    static const std::set<std::string> known{"verdict", "message_contains", "counts", "values",
                                             "witness"};
    if (!expect.is_object()) throw InputError(where + ": 'expect' must be an object");
    for (auto it = expect.begin(); it != expect.end(); ++it)
        if (!known.count(it.key()))
            throw InputError(where + ": unknown expectation key '" + it.key() + "'");
}

bool expectation_met(const json& expect, const Report& rep) {
    if (expect.contains("verdict") &&
        expect["verdict"].get<std::string>() != Report::verdict_name(rep.verdict))
        return false;
    if (expect.contains("message_contains") &&
        rep.message.find(expect["message_contains"].get<std::string>()) == std::string::npos)
        return false;
    if (expect.contains("counts")) {
        for (auto it = expect["counts"].begin(); it != expect["counts"].end(); ++it) {
            auto hit = rep.counts.find(it.key());
            if (hit == rep.counts.end() || hit->second != it.value().get<std::int64_t>())
                return false;
        }
    }
    if (expect.contains("values") && !subset_match(expect["values"], rep.values)) return false;
    if (expect.contains("witness") && !subset_match(expect["witness"], rep.witness)) return false;
    return true;
}

} // namespace

int run_document(const nlohmann::json& doc, const RunFlags& flags, std::ostream& out) {
    const bool machine = flags.report == "machine";
    std::string name = doc.contains("name") ? doc["name"].get<std::string>() : "";

    nlohmann::ordered_json mtasks = nlohmann::ordered_json::array();
    std::ostringstream text;
    if (!name.empty()) text << "== " << name << " ==\n";

    int unmet = 0, errors = 0, passed = 0;
    Doc reg(doc, flags);
    Budget::Scope budget(flags.budget);

    const json tasks = doc.contains("tasks") ? doc["tasks"] : json::array();
    if (!tasks.is_array()) {
        out << "error: 'tasks' must be an array\n";
        return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < tasks.size(); ++i) {
        const std::string where = "task " + std::to_string(i + 1);
        auto start = std::chrono::steady_clock::now();
        TaskOutcome outcome;
        bool errored = false;
        bool has_expect = tasks[i].is_object() && tasks[i].contains("expect");
        try {
            if (has_expect) validate_expect(tasks[i]["expect"], where);
            outcome = run_task(reg, tasks[i], where, flags);
        } catch (const InputError& e) {
            errored = true;
            outcome.report = Report("error");
            outcome.report.error(e.what());
            outcome.report.values["error_kind"] = "input";
        } catch (const ResourceError& e) {
            errored = true;
            outcome.report = Report("error");
            outcome.report.error(e.what());
            outcome.report.values["error_kind"] = "resource";
        } catch (const InternalError& e) {
            errored = true;
            outcome.report = Report("error");
            outcome.report.error(e.what());
            outcome.report.values["error_kind"] = "internal";
        }
        if (outcome.label.empty()) {
            outcome.label = tasks[i].contains("op") && tasks[i]["op"].is_string()
                                ? tasks[i]["op"].get<std::string>()
                                : "?";
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();

        bool ok;
        if (has_expect) {
            ok = expectation_met(tasks[i]["expect"], outcome.report);
            // an expected error is a matched outcome, not a run failure
            if (ok) errored = false;
        } else {
            ok = outcome.report.passed();
        }
        if (errored) ++errors;
        else if (!ok) ++unmet;
        else ++passed;

        if (machine) {
            nlohmann::ordered_json entry;
            entry["index"] = i + 1;
            entry["ok"] = ok;
            nlohmann::ordered_json rj = outcome.report.to_json();
            for (auto it = rj.begin(); it != rj.end(); ++it) entry[it.key()] = it.value();
            if (has_expect) entry["expect"] = tasks[i]["expect"];
            if (flags.timings) entry["elapsed_ms"] = ms;
            mtasks.push_back(std::move(entry));
        } else {
            text << "[" << (i + 1 < 10 ? " " : "") << (i + 1) << "] "
                 << (ok ? "ok   " : errored ? "ERROR" : "UNMET") << " " << outcome.label << ": "
                 << Report::verdict_name(outcome.report.verdict);
            if (has_expect && ok && !outcome.report.passed()) text << " (as expected)";
            if (!outcome.report.message.empty()) text << " - " << outcome.report.message;
            if (flags.timings) text << " [" << ms << " ms]";
            text << "\n";
            if (!ok && !outcome.report.witness.empty())
                text << "      witness: " << outcome.report.witness.dump() << "\n";
            if (!ok && has_expect) text << "      expected: " << tasks[i]["expect"].dump() << "\n";
        }
    }
    auto total_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count();

    int exit = errors ? 2 : unmet ? 1 : 0;
    if (machine) {
        nlohmann::ordered_json m;
        m["version"] = 1;
        m["document"] = name;
        m["seed"] = flags.seed;
        m["flags"] = {{"nmax", flags.nmax},
                      {"paranoid", flags.paranoid},
                      {"budget", flags.budget},
                      {"report", flags.report}};
        m["tasks"] = std::move(mtasks);
        m["summary"] = {{"tasks", tasks.size()},
                        {"ok", passed},
                        {"unmet", unmet},
                        {"errors", errors},
                        {"exit", exit}};
        if (flags.timings) m["summary"]["elapsed_ms"] = total_ms;
        out << m.dump(2) << "\n";
    } else {
        text << "summary: " << tasks.size() << " tasks, " << passed << " ok, " << unmet
             << " unmet, " << errors << " errors; exit " << exit << "\n";
        out << text.str();
    }
    return exit;
}

int run_file(const std::string& path, const RunFlags& flags, std::ostream& out) {
    std::ifstream in(path);
    if (!in) {
        out << "error: cannot open '" << path << "'\n";
        return 2;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        out << "error: " << path << ": parse error at byte " << e.byte << ": " << e.what() << "\n";
        return 2;
    }
    try {
        return run_document(doc, flags, out);
    } catch (const InputError& e) {
        out << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        out << "error: " << e.what() << "\n";
        return 2;
    }
}

std::vector<std::string> builtin_scenario_names() {
    return {"example-2-1", "example-2-2-m2", "example-2-2-m3", "lemma-4-4-demo",
            "theorem-4-2-demo"};
}

int run_scenario(const std::string& name, const RunFlags& flags, std::ostream& out) {
    auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        out << "error: unknown scenario '" << name << "'; known:";
        for (const auto& n : names) out << " " << n;
        out << "\n";
        return 2;
    }
    if (flags.scenario_dir.empty()) {
        out << "error: no scenario directory configured\n";
        return 2;
    }
    return run_file(flags.scenario_dir + "/" + name + ".json", flags, out);
}

} // namespace nilab::scenario
