#include "nilab/maps.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "nilab/errors.hpp"

namespace nilab::maps {

namespace {

constexpr long long kDirectLimit = 100000;

// over-approximation that never enumerates a large product cube set
long long cube_count_estimate(const SpacePtr& s, int n, long long limit) {
    if (const auto* pp = std::get_if<ProvProduct>(&s->provenance())) {
        long long est = 1;
        for (const auto& f : pp->factors) {
            est *= cube_count_estimate(f, n, limit);
            if (est > limit) return limit + 1;
        }
        return est;
    }
    return static_cast<long long>(enumerate_cubes(s, n).size());
}

// componentwise shape of a product-structured map, validated at build time
struct Shape {
    const ProvProduct* dom;
    bool single_codomain;
    const ProvProduct* cod; // null when single_codomain
};

Shape shape_of(const NilMap& f) {
    Shape sh{};
    sh.dom = std::get_if<ProvProduct>(&f.domain->provenance());
    const auto& ps = *f.product_structure;
    const auto* cp = std::get_if<ProvProduct>(&f.codomain->provenance());
    if (cp && cp->factors.size() == ps.component.size()) {
        sh.cod = cp;
        sh.single_codomain = false;
    } else {
        sh.single_codomain = true;
        sh.cod = nullptr;
    }
    return sh;
}

bool from_is_injective(const std::vector<int>& from, size_t nfactors) {
    std::vector<char> used(nfactors, 0);
    for (int i : from) {
        if (used[i]) return false;
        used[i] = 1;
    }
    return true;
}

void validate_table(const NilMap& f) {
    if (!f.domain || !f.codomain) throw InputError("map " + f.name + " has no spaces attached");
    if (f.table.size() != static_cast<size_t>(f.domain->size()))
        throw InputError("map " + f.name + " has the wrong table size");
    for (PointId v : f.table)
        if (v < 0 || v >= f.codomain->size())
            throw InputError("map " + f.name + " has a value out of range");
}

} // namespace

NilMap make_map(std::string name, SpacePtr domain, SpacePtr codomain,
                std::vector<PointId> table) {
    NilMap f;
    f.name = std::move(name);
    f.domain = std::move(domain);
    f.codomain = std::move(codomain);
    f.table = std::move(table);
    validate_table(f);
    return f;
}

NilMap identity_map(const SpacePtr& s) {
    std::vector<PointId> table(s->size());
    std::iota(table.begin(), table.end(), 0);
    return make_map("id[" + s->name() + "]", s, s, std::move(table));
}

NilMap constant_map(const SpacePtr& domain, const SpacePtr& codomain, PointId value) {
    if (value < 0 || value >= codomain->size())
        throw InputError("constant map value out of range");
    return make_map("const[" + codomain->points()[value].str() + "]", domain, codomain,
                    std::vector<PointId>(domain->size(), value));
}

NilMap compose(const NilMap& outer, const NilMap& inner, std::string name) {
    if (inner.codomain.get() != outer.domain.get())
        throw InputError("cannot compose " + outer.name + " after " + inner.name +
                         ": the spaces do not match");
    std::vector<PointId> table(inner.table.size());
    for (size_t x = 0; x < table.size(); ++x) table[x] = outer.table[inner.table[x]];
    if (name.empty()) name = outer.name + "." + inner.name;
    return make_map(std::move(name), inner.domain, outer.codomain, std::move(table));
}

NilMap product_map(const SpacePtr& domain, const SpacePtr& codomain, std::vector<int> from,
                   std::vector<NilMap> components, std::string name) {
    const auto* dp = std::get_if<ProvProduct>(&domain->provenance());
    if (!dp) throw InputError("product map needs a product domain");
    if (from.size() != components.size())
        throw InputError("product map: one source index per component is required");
    if (components.empty()) throw InputError("product map needs at least one component");
    for (size_t j = 0; j < from.size(); ++j) {
        if (from[j] < 0 || from[j] >= static_cast<int>(dp->factors.size()))
            throw InputError("product map: source factor index out of range");
        if (components[j].domain.get() != dp->factors[from[j]].get())
            throw InputError("product map: component " + std::to_string(j) +
                             " does not start at domain factor " + std::to_string(from[j]));
    }
    const auto* cp = std::get_if<ProvProduct>(&codomain->provenance());
    bool tupled = cp && cp->factors.size() == components.size();
    if (tupled) {
        for (size_t j = 0; j < components.size(); ++j)
            if (components[j].codomain.get() != cp->factors[j].get()) {
                tupled = false;
                break;
            }
    }
    std::vector<int> out_sizes;
    if (tupled) {
        for (const auto& f : cp->factors) out_sizes.push_back(f->size());
    } else {
        if (components.size() != 1 || components[0].codomain.get() != codomain.get())
            throw InputError("product map: components do not assemble into the codomain");
    }

    std::vector<PointId> table(domain->size());
    std::vector<PointId> outc(components.size());
    for (int x = 0; x < domain->size(); ++x) {
        const auto& comps = dp->comp[x];
        for (size_t j = 0; j < components.size(); ++j)
            outc[j] = components[j].table[comps[from[j]]];
        if (tupled) {
            PointId id = 0;
            for (size_t j = 0; j < outc.size(); ++j) id = id * out_sizes[j] + outc[j];
            table[x] = id;
        } else {
            table[x] = outc[0];
        }
    }
    if (name.empty()) {
        name = "(";
        for (size_t j = 0; j < components.size(); ++j) {
            if (j) name += ",";
            name += components[j].name;
        }
        name += ")";
    }
    NilMap f = make_map(std::move(name), domain, codomain, std::move(table));
    auto ps = std::make_shared<ProductMapStructure>();
    ps->from = std::move(from);
    ps->component = std::move(components);
    f.product_structure = ps;
    return f;
}

NilMap bundle_map(const std::vector<NilMap>& parts, const SpacePtr& codomain, std::string name) {
    if (parts.empty()) throw InputError("bundle map needs at least one part");
    const auto* cp = std::get_if<ProvProduct>(&codomain->provenance());
    if (!cp || cp->factors.size() != parts.size())
        throw InputError("bundle map: the codomain must be the product of the part codomains");
    SpacePtr dom = parts[0].domain;
    for (size_t j = 0; j < parts.size(); ++j) {
        if (parts[j].domain.get() != dom.get())
            throw InputError("bundle map: all parts must share one domain");
        if (parts[j].codomain.get() != cp->factors[j].get())
            throw InputError("bundle map: part " + std::to_string(j) +
                             " does not land in codomain factor " + std::to_string(j));
    }
    std::vector<PointId> table(dom->size());
    for (int x = 0; x < dom->size(); ++x) {
        PointId id = 0;
        for (size_t j = 0; j < parts.size(); ++j)
            id = id * cp->factors[j]->size() + parts[j].table[x];
        table[x] = id;
    }
    if (name.empty()) {
        name = "<";
        for (size_t j = 0; j < parts.size(); ++j) {
            if (j) name += ",";
            name += parts[j].name;
        }
        name += ">";
    }
    return make_map(std::move(name), dom, codomain, std::move(table));
}

Partition partition_of(const NilMap& f) {
    return Partition::from_cell_of(f.table);
}

bool refines(const NilMap& fine, const NilMap& coarse) {
    if (fine.domain.get() != coarse.domain.get())
        throw InputError("refinement compares maps with a common domain");
    return partition_of(fine).refines(partition_of(coarse));
}

// ---- morphism ----

Report is_morphism(const NilMap& f) {
    if (f.cache->morphism) return *f.cache->morphism;
    validate_table(f);
    Report rep("is_morphism");
    rep.values["map"] = f.name;
    int nm = std::max(f.domain->nmax(), f.codomain->nmax());

    bool componentwise = false;
    if (f.product_structure &&
        cube_count_estimate(f.domain, nm, kDirectLimit) > kDirectLimit) {
        Shape sh = shape_of(f);
        if (sh.dom) {
            componentwise = true;
            const auto& ps = *f.product_structure;
            for (size_t j = 0; j < ps.component.size() && rep.passed(); ++j) {
                Report sub = is_morphism(ps.component[j]);
                if (!sub.passed()) {
                    rep.fail("component " + std::to_string(j) + " (" + ps.component[j].name +
                             ") is not a morphism");
                    rep.witness["component"] = sub.to_json();
                }
            }
            if (rep.passed()) {
                rep.message = "componentwise: every component maps cubes to cubes, and "
                              "product cubes are exactly the tuples of factor cubes";
                rep.counts["components"] =
                    static_cast<std::int64_t>(ps.component.size());
            }
        }
    }

    if (!componentwise) {
        std::int64_t checked = 0;
        CubeVals mapped;
        for (int n = 0; n <= nm && rep.passed(); ++n) {
            const auto& cubes = enumerate_cubes(f.domain, n);
            mapped.resize(size_t{1} << n);
            for (const auto& q : cubes) {
                Budget::tick("morphism check");
                for (size_t v = 0; v < q.size(); ++v) mapped[v] = f.table[q[v]];
                ++checked;
                if (!in_cube_set(f.codomain, n, mapped)) {
                    rep.fail("a cube does not map to a cube");
                    rep.witness["dim"] = n;
                    rep.witness["cube"] = cube_json(f.domain, q);
                    rep.witness["image"] = cube_json(f.codomain, mapped);
                    break;
                }
            }
        }
        rep.counts["cubes_checked"] = checked;
    }

    f.cache->morphism = rep;
    return rep;
}

// ---- fibration ----

namespace {

// value replacement classes must map onto value replacement classes
Report cell_onto_cell_check(const NilMap& f) {
    Report rep("fiber_cells");
    int ks = std::max(step_of(f.domain), step_of(f.codomain));
    std::int64_t cells_checked = 0;
    for (int n = 1; n <= ks; ++n) {
        auto [dq, dpi] = factor(f.domain, n);
        auto [cq, cpi] = factor(f.codomain, n);
        auto dcells = partition_of(dpi);
        auto ccells = partition_of(cpi);
        for (const auto& cell : dcells.cells) {
            Budget::tick("fiber cell check");
            std::vector<PointId> img;
            for (PointId x : cell) img.push_back(f.table[x]);
            std::sort(img.begin(), img.end());
            img.erase(std::unique(img.begin(), img.end()), img.end());
            int target = ccells.cell_of[img.front()];
            for (PointId y : img)
                if (ccells.cell_of[y] != target) {
                    rep.fail("a class at level " + std::to_string(n) +
                             " maps into two different classes");
                    rep.witness["level"] = n;
                    rep.witness["x"] = point_json(f.domain, cell.front());
                    return rep;
                }
            if (img != ccells.cells[target]) {
                rep.fail("a class at level " + std::to_string(n) +
                         " does not map onto a full class");
                rep.witness["level"] = n;
                rep.witness["class"] = cube_json(f.domain, cell);
                rep.witness["image"] = cube_json(f.codomain, img);
                rep.witness["target_class"] = cube_json(f.codomain, ccells.cells[target]);
                return rep;
            }
            ++cells_checked;
        }
    }
    rep.counts["cells_checked"] = cells_checked;
    return rep;
}

} // namespace

Report is_fibration(const NilMap& f) {
    if (f.cache->fibration) return *f.cache->fibration;
    Report rep("is_fibration");
    rep.values["map"] = f.name;

    Report mor = is_morphism(f);
    if (!mor.passed()) {
        rep.fail("not a morphism: " + mor.message);
        rep.witness = mor.witness;
        f.cache->fibration = rep;
        return rep;
    }

    int nm = std::max(f.domain->nmax(), f.codomain->nmax());
    bool componentwise = false;
    if (f.product_structure &&
        cube_count_estimate(f.domain, nm, kDirectLimit) > kDirectLimit) {
        Shape sh = shape_of(f);
        const auto& ps = *f.product_structure;
        // injective sources: the map is a product of fibrations composed with
        // a coordinate projection, and both preserve corner completion
        if (sh.dom && from_is_injective(ps.from, sh.dom->factors.size())) {
            componentwise = true;
            for (size_t j = 0; j < ps.component.size() && rep.passed(); ++j) {
                Report sub = is_fibration(ps.component[j]);
                if (!sub.passed()) {
                    rep.fail("component " + std::to_string(j) + " (" + ps.component[j].name +
                             ") is not a fibration");
                    rep.witness["component"] = sub.to_json();
                }
            }
            if (rep.passed()) {
                rep.message = "componentwise: corners complete factor by factor, so a "
                              "projection followed by a product of fibrations lifts them";
                rep.counts["components"] =
                    static_cast<std::int64_t>(ps.component.size());
            }
        }
    }

    if (!componentwise) {
        Report lift = corner_lift_check(f.domain, f.codomain, f.table, -1);
        Report cells = cell_onto_cell_check(f);
        if (lift.passed() != cells.passed())
            throw InternalError("fibration criteria disagree on " + f.name +
                                ": corner lifting says " +
                                Report::verdict_name(lift.verdict) + ", class images say " +
                                Report::verdict_name(cells.verdict));
        for (const auto& [k, v] : lift.counts) rep.counts[k] = v;
        for (const auto& [k, v] : cells.counts) rep.counts[k] = v;
        if (!lift.passed()) {
            rep.fail(lift.message);
            rep.witness["corner_route"] = lift.witness;
            rep.witness["class_route"] = cells.witness;
        } else {
            rep.message = "corner lifting and class image routes agree";
        }
    }

    f.cache->fibration = rep;
    return rep;
}

// ---- translation ----

namespace {

// facet criterion at one dimension; returns first failure as a witness
bool translation_at_dim(const SpacePtr& s, const std::vector<PointId>& table, int n,
                        Report* rep, std::int64_t& checks) {
    const auto& cubes = enumerate_cubes(s, n);
    CubeVals shifted(size_t{1} << n);
    for (const auto& q : cubes) {
        for (int i = 0; i < n; ++i) {
            for (int side = 0; side <= 1; ++side) {
                Budget::tick("translation check");
                for (size_t v = 0; v < q.size(); ++v)
                    shifted[v] = (static_cast<int>(v >> i) & 1) == side ? table[q[v]] : q[v];
                ++checks;
                if (!std::binary_search(cubes.begin(), cubes.end(), shifted)) {
                    if (rep) {
                        rep->fail("applying the map on a half-space breaks a cube");
                        rep->witness["dim"] = n;
                        rep->witness["cube"] = cube_json(s, q);
                        rep->witness["axis"] = i + 1;
                        rep->witness["side"] = side;
                        rep->witness["image"] = cube_json(s, shifted);
                    }
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace

Report is_translation(const NilMap& f, int extra_levels) {
    if (extra_levels < 0) throw InputError("extra check levels must be nonnegative");
    if (f.cache->translation) {
        const auto& prev = *f.cache->translation;
        auto it = prev.counts.find("extra_levels");
        if (it != prev.counts.end() && it->second >= extra_levels) return prev;
    }
    if (f.domain.get() != f.codomain.get())
        throw InputError("translation test: " + f.name + " must map a space to itself");
    validate_table(f);
    const SpacePtr& s = f.domain;

    Report rep("is_translation");
    rep.values["map"] = f.name;
    rep.counts["extra_levels"] = extra_levels;

    std::vector<char> seen(s->size(), 0);
    for (PointId v : f.table) {
        if (seen[v]) {
            rep.fail("not a bijection");
            rep.witness["value"] = point_json(s, v);
            f.cache->translation = rep;
            return rep;
        }
        seen[v] = 1;
    }

    int k = step_of(s);
    int base = k + 1;

    bool componentwise = false;
    if (f.product_structure &&
        cube_count_estimate(s, base + extra_levels, kDirectLimit) > kDirectLimit) {
        const auto* dp = std::get_if<ProvProduct>(&s->provenance());
        const auto& ps = *f.product_structure;
        bool identity_shaped = dp && ps.component.size() == dp->factors.size();
        if (identity_shaped)
            for (size_t j = 0; j < ps.component.size(); ++j)
                if (ps.from[j] != static_cast<int>(j) ||
                    ps.component[j].domain.get() != dp->factors[j].get() ||
                    ps.component[j].codomain.get() != dp->factors[j].get()) {
                    identity_shaped = false;
                    break;
                }
        if (identity_shaped) {
            componentwise = true;
            for (size_t j = 0; j < ps.component.size() && rep.passed(); ++j) {
                Report sub = is_translation(ps.component[j], extra_levels);
                if (!sub.passed()) {
                    rep.fail("component " + std::to_string(j) + " (" + ps.component[j].name +
                             ") is not a translation");
                    rep.witness["component"] = sub.to_json();
                }
            }
            if (rep.passed()) {
                rep.message = "componentwise: half-space application acts factor by factor";
                rep.counts["components"] =
                    static_cast<std::int64_t>(ps.component.size());
            }
        }
    }

    if (!componentwise) {
        std::int64_t checks = 0;
        for (int n = base; n <= base + extra_levels && rep.passed(); ++n)
            translation_at_dim(s, f.table, n, &rep, checks);
        rep.counts["checks"] = checks;
    }

    f.cache->translation = rep;
    return rep;
}

// ---- translation group ----

namespace {

// all cube-set preserving bijections, found by backtracking over images
std::vector<std::vector<PointId>> all_automorphisms(const SpacePtr& s) {
    int size = s->size();
    int nm = s->nmax();

    auto signature = [&](int nlo) {
        std::vector<std::vector<std::int64_t>> sig(size);
        for (int n = nlo; n <= nm; ++n) {
            size_t width = size_t{1} << n;
            std::vector<std::vector<std::int64_t>> cnt(size,
                                                       std::vector<std::int64_t>(width, 0));
            for (const auto& q : enumerate_cubes(s, n))
                for (size_t v = 0; v < width; ++v) ++cnt[q[v]][v];
            for (int p = 0; p < size; ++p)
                sig[p].insert(sig[p].end(), cnt[p].begin(), cnt[p].end());
        }
        return sig;
    };
    auto sig = signature(2);

    std::vector<std::vector<PointId>> cands(size);
    for (int p = 0; p < size; ++p)
        for (int q = 0; q < size; ++q)
            if (sig[p] == sig[q]) cands[p].push_back(q);

    std::vector<int> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int p, int q) { return cands[p].size() < cands[q].size(); });
    std::vector<int> pos_of(size);
    for (int t = 0; t < size; ++t) pos_of[order[t]] = t;

    struct Ready {
        int n;
        const CubeVals* q;
    };
    std::vector<std::vector<Ready>> buckets(size);
    for (int n = 1; n <= nm; ++n)
        for (const auto& q : enumerate_cubes(s, n)) {
            int last = 0;
            for (PointId v : q) last = std::max(last, pos_of[v]);
            buckets[last].push_back({n, &q});
        }

    std::vector<std::vector<PointId>> found;
    std::vector<PointId> image(size, -1);
    std::vector<char> used(size, 0);
    CubeVals mapped;
    std::function<void(int)> rec = [&](int t) {
        if (t == size) {
            found.push_back(image);
            return;
        }
        int p = order[t];
        for (PointId cand : cands[p]) {
            if (used[cand]) continue;
            Budget::tick("automorphism search");
            image[p] = cand;
            used[cand] = 1;
            bool ok = true;
            for (const auto& r : buckets[t]) {
                mapped.resize(r.q->size());
                for (size_t v = 0; v < r.q->size(); ++v) mapped[v] = image[(*r.q)[v]];
                const auto& list = enumerate_cubes(s, r.n);
                if (!std::binary_search(list.begin(), list.end(), mapped)) {
                    ok = false;
                    break;
                }
            }
            if (ok) rec(t + 1);
            image[p] = -1;
            used[cand] = 0;
        }
    };
    rec(0);
    std::sort(found.begin(), found.end());
    return found;
}

} // namespace

TranGroupResult tran_group(const SpacePtr& s) {
    require_verified(s);
    if (s->size() > 20)
        throw InputError("translation group enumeration is supported up to 20 points; "
                         "test explicit candidate maps with the translation check instead");

    TranGroupResult result;
    Report& rep = result.report;
    rep = Report("tran_group");
    rep.values["space"] = s->name();

    auto autos = all_automorphisms(s);
    rep.counts["automorphisms"] = static_cast<std::int64_t>(autos.size());

    int k = step_of(s);
    std::vector<std::vector<PointId>> trans;
    for (const auto& table : autos) {
        std::int64_t checks = 0;
        if (translation_at_dim(s, table, k + 1, nullptr, checks)) trans.push_back(table);
    }
    rep.counts["order"] = static_cast<std::int64_t>(trans.size());

    // sorted tables, identity pulled to the front
    std::vector<PointId> ident(s->size());
    std::iota(ident.begin(), ident.end(), 0);
    auto it = std::find(trans.begin(), trans.end(), ident);
    if (it == trans.end())
        throw InternalError("the identity map failed the translation test on " + s->name());
    std::rotate(trans.begin(), it, it + 1);

    auto lookup = [&](const std::vector<PointId>& t) {
        return std::find(trans.begin(), trans.end(), t) != trans.end();
    };
    std::vector<PointId> comp(s->size());
    for (const auto& a : trans)
        for (const auto& b : trans) {
            for (int x = 0; x < s->size(); ++x) comp[x] = a[b[x]];
            if (!lookup(comp))
                throw InternalError("translations of " + s->name() +
                                    " are not closed under composition");
        }
    for (const auto& a : trans) {
        std::vector<PointId> inv(s->size());
        for (int x = 0; x < s->size(); ++x) inv[a[x]] = x;
        if (!lookup(inv))
            throw InternalError("translations of " + s->name() + " are not closed under inverse");
    }

    result.abelian = true;
    for (size_t i = 0; i < trans.size() && result.abelian; ++i)
        for (size_t j = i + 1; j < trans.size(); ++j) {
            std::vector<PointId> ab(s->size()), ba(s->size());
            for (int x = 0; x < s->size(); ++x) {
                ab[x] = trans[i][trans[j][x]];
                ba[x] = trans[j][trans[i][x]];
            }
            if (ab != ba) {
                result.abelian = false;
                rep.witness["noncommuting_a"] = trans[i];
                rep.witness["noncommuting_b"] = trans[j];
                break;
            }
        }
    rep.values["abelian"] = result.abelian;

    nlohmann::ordered_json elems = nlohmann::ordered_json::array();
    for (const auto& t : trans) elems.push_back(t);
    rep.values["elements"] = elems;

    result.elements = std::move(trans);
    return result;
}

// ---- induced maps ----

NilMap induced_factor_map(const NilMap& f, int n, std::string name) {
    auto [dq, dpi] = factor(f.domain, n);
    auto [cq, cpi] = factor(f.codomain, n);
    std::vector<PointId> table(dq->size(), -1);
    for (int x = 0; x < f.domain->size(); ++x) {
        PointId cell = dpi.table[x];
        PointId val = cpi.table[f.table[x]];
        if (table[cell] < 0) table[cell] = val;
        else if (table[cell] != val)
            throw InputError("map " + f.name + " does not descend to the level-" +
                             std::to_string(n) + " factors");
    }
    if (name.empty()) name = f.name + "_(" + std::to_string(n) + ")";
    return make_map(std::move(name), dq, cq, std::move(table));
}

StructureMorphismResult structure_morphism(const NilMap& psi, int level) {
    if (!psi.cache->fibration || !psi.cache->fibration->passed())
        throw InputError("structure morphism needs a verified fibration; run the fibration "
                         "check on " + psi.name + " first");
    int kx = step_of(psi.domain);
    if (kx == 0) throw InputError("the domain has step 0 and carries no structure group");
    if (level != kx)
        throw InputError("structure morphism is only supported at the domain step");

    StructureMorphismResult result;
    Report& rep = result.report;
    rep = Report("structure_morphism");
    rep.values["map"] = psi.name;
    rep.values["level"] = level;

    auto gx = structure_group(psi.domain, kx);
    if (!gx.report.passed() || !gx.action)
        throw InputError("the domain structure group at level " + std::to_string(kx) +
                         " is not available: " + gx.report.message);
    const auto& actx = *gx.action;
    int nx = gx.group.size();

    grp::Hom hom;
    hom.domain = gx.group;
    int ky = step_of(psi.codomain);
    std::int64_t pairs = 0;

    if (ky < kx) {
        hom.codomain = grp::trivial_group();
        hom.table.assign(nx, grp::Elem{});
        for (int z = 0; z < nx; ++z)
            for (int x = 0; x < psi.domain->size(); ++x) {
                ++pairs;
                if (psi.table[actx[z][x]] != psi.table[x]) {
                    rep.fail("the fibration does not collapse the top action");
                    rep.witness["z"] = grp::elem_json(grp::elem_at(gx.group, z));
                    rep.witness["x"] = point_json(psi.domain, x);
                    result.hom = hom;
                    return result;
                }
            }
        rep.message = "the codomain sits below the top level; the induced map is zero";
    } else if (ky == kx) {
        auto gy = structure_group(psi.codomain, kx);
        if (!gy.report.passed() || !gy.action)
            throw InputError("the codomain structure group at level " + std::to_string(kx) +
                             " is not available: " + gy.report.message);
        const auto& acty = *gy.action;
        int ny = gy.group.size();
        hom.codomain = gy.group;
        hom.table.resize(nx);
        PointId y0 = psi.table[0];
        for (int z = 0; z < nx; ++z) {
            PointId target = psi.table[actx[z][0]];
            int zp = -1;
            for (int w = 0; w < ny; ++w)
                if (acty[w][y0] == target) {
                    zp = w;
                    break;
                }
            if (zp < 0) {
                rep.fail("no codomain element matches the shifted image");
                rep.witness["z"] = grp::elem_json(grp::elem_at(gx.group, z));
                result.hom = hom;
                return result;
            }
            for (int x = 0; x < psi.domain->size(); ++x) {
                ++pairs;
                if (psi.table[actx[z][x]] != acty[zp][psi.table[x]]) {
                    rep.fail("the induced element depends on the base point");
                    rep.witness["z"] = grp::elem_json(grp::elem_at(gx.group, z));
                    rep.witness["x"] = point_json(psi.domain, x);
                    result.hom = hom;
                    return result;
                }
            }
            hom.table[z] = grp::elem_at(gy.group, zp);
        }
    } else {
        throw InternalError("codomain step exceeds domain step for the verified fibration " +
                            psi.name);
    }

    Report homcheck = grp::is_hom(hom);
    if (!homcheck.passed())
        throw InternalError("the induced structure map of " + psi.name +
                            " is not a homomorphism");
    rep.counts["pairs_checked"] = pairs;
    rep.counts["kernel_size"] = static_cast<std::int64_t>(grp::kernel(hom).size());
    result.hom = std::move(hom);
    return result;
}

nlohmann::ordered_json map_json(const NilMap& f) {
    nlohmann::ordered_json j;
    j["name"] = f.name;
    j["domain"] = f.domain->name();
    j["codomain"] = f.codomain->name();
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (int x = 0; x < f.domain->size(); ++x) {
        nlohmann::ordered_json pair = nlohmann::ordered_json::array();
        pair.push_back(point_json(f.domain, x));
        pair.push_back(point_json(f.codomain, f.table[x]));
        table.push_back(pair);
    }
    j["table"] = table;
    return j;
}

} // namespace nilab::maps
