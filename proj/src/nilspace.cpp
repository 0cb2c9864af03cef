#include "nilab/nilspace.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <numeric>

#include "nilab/errors.hpp"

namespace nilab {

namespace {

// distribute the bits of u onto the set bits of mask S, ascending
unsigned spread_bits(unsigned u, unsigned S) {
    unsigned out = 0;
    int j = 0;
    for (unsigned bit = 1; bit <= S; bit <<= 1) {
        if (S & bit) {
            if (u & (1u << j)) out |= bit;
            ++j;
        }
    }
    return out;
}

const std::vector<cube::Morphism>& face_maps_cached(int m, int n) {
    static std::map<std::pair<int, int>, std::vector<cube::Morphism>> cache;
    auto key = std::make_pair(m, n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, cube::face_maps(m, n)).first;
    return it->second;
}

const std::vector<cube::Morphism>& all_morphisms_cached(int m, int n) {
    static std::map<std::pair<int, int>, std::vector<cube::Morphism>> cache;
    auto key = std::make_pair(m, n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, cube::all_morphisms(m, n)).first;
    return it->second;
}

nlohmann::ordered_json morphism_json(const cube::Morphism& phi) {
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const auto& o : phi.out) {
        switch (o.kind) {
        case cube::Morphism::Const0: coords.push_back("0"); break;
        case cube::Morphism::Const1: coords.push_back("1"); break;
        case cube::Morphism::Coord: coords.push_back("v" + std::to_string(o.idx + 1)); break;
        default: coords.push_back("1-v" + std::to_string(o.idx + 1)); break;
        }
    }
    nlohmann::ordered_json j;
    j["src_dim"] = phi.src_dim;
    j["out"] = coords;
    return j;
}

// All faces of {0,1}^n whose top vertex is m have the form
// {base | u : u subset of S} with S a nonempty subset of bits(m) and
// base = m & ~S. Checking them at the moment m is assigned checks every face
// exactly once over a full enumeration.
bool faces_ok(const Nilspace& s, const CubeVals& vals, unsigned m, int cap, CubeVals& scratch) {
    for (unsigned S = m; S; S = (S - 1) & m) {
        int d = std::popcount(S);
        if (d > cap) continue;
        unsigned base = m & ~S;
        scratch.resize(1u << d);
        for (unsigned u = 0; u < (1u << d); ++u)
            scratch[u] = vals[base | spread_bits(u, S)];
        if (!s.is_cube(d, scratch)) return false;
    }
    return true;
}

std::string default_product_name(const std::vector<SpacePtr>& fs) {
    std::string out;
    for (size_t i = 0; i < fs.size(); ++i) {
        if (i) out += "*";
        out += fs[i]->name();
    }
    return out;
}

PointId radix_pid(const std::vector<int>& sizes, const std::vector<PointId>& comps) {
    PointId id = 0;
    for (size_t f = 0; f < sizes.size(); ++f) id = id * sizes[f] + comps[f];
    return id;
}

} // namespace

// ---- Partition ----

Partition Partition::from_cell_of(const std::vector<int>& raw) {
    int n = static_cast<int>(raw.size());
    Partition p;
    p.cell_of.assign(n, -1);
    std::map<int, int> renumber;
    for (int x = 0; x < n; ++x) {
        auto it = renumber.find(raw[x]);
        if (it == renumber.end()) {
            it = renumber.emplace(raw[x], static_cast<int>(p.cells.size())).first;
            p.cells.emplace_back();
        }
        p.cell_of[x] = it->second;
        p.cells[it->second].push_back(x);
    }
    return p;
}

Partition Partition::from_cells(std::vector<std::vector<PointId>> cells, int npoints) {
    std::vector<int> raw(npoints, -1);
    for (auto& c : cells) {
        std::sort(c.begin(), c.end());
        if (c.empty()) throw InputError("partition has an empty cell");
        for (PointId x : c) {
            if (x < 0 || x >= npoints) throw InputError("partition cell member out of range");
            if (raw[x] != -1) throw InputError("partition cells overlap");
            raw[x] = c.front();
        }
    }
    for (int x = 0; x < npoints; ++x)
        if (raw[x] == -1) throw InputError("partition does not cover every point");
    return from_cell_of(raw);
}

Partition Partition::discrete(int npoints) {
    std::vector<int> raw(npoints);
    std::iota(raw.begin(), raw.end(), 0);
    return from_cell_of(raw);
}

Partition Partition::indiscrete(int npoints) {
    return from_cell_of(std::vector<int>(npoints, 0));
}

bool Partition::refines(const Partition& coarser) const {
    if (cell_of.size() != coarser.cell_of.size()) return false;
    for (const auto& c : cells) {
        int target = coarser.cell_of[c.front()];
        for (PointId x : c)
            if (coarser.cell_of[x] != target) return false;
    }
    return true;
}

nlohmann::ordered_json Partition::encode() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : cells) j.push_back(c);
    return j;
}

// ---- Nilspace ----

Nilspace::Nilspace(std::string name, std::vector<Point> points, int step_hint, Provenance prov)
    : name_(std::move(name)), points_(std::move(points)), step_hint_(step_hint),
      prov_(std::move(prov)), caches_(std::make_unique<Caches>()) {
    if (points_.empty()) throw InputError("space " + name_ + " has no points");
    if (step_hint_ < 0) throw InputError("space " + name_ + " has a negative step bound");
    for (size_t i = 1; i < points_.size(); ++i)
        if (!(points_[i - 1] < points_[i]))
            throw InternalError("space " + name_ + " constructed with unsorted or duplicate points");
}

PointId Nilspace::index_of(const Point& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || !(*it == p)) return -1;
    return static_cast<PointId>(it - points_.begin());
}

PointId Nilspace::require_index(const Point& p) const {
    PointId id = index_of(p);
    if (id < 0) throw InputError("point " + p.str() + " is not in space " + name_);
    return id;
}

bool Nilspace::is_cube(int n, const CubeVals& vals) const {
    if (n < 0) throw InputError("negative cube dimension");
    if (vals.size() != (size_t{1} << n)) throw InputError("cube value table has the wrong size");
    int nm = nmax();
    if (n <= nm) return native_is_cube(n, vals);
    // above the decisive dimension a map is a cube iff all its nm-dimensional
    // face restrictions are
    CubeVals face(size_t{1} << nm);
    for (const auto& phi : face_maps_cached(nm, n)) {
        for (cube::Vertex v = 0; v < face.size(); ++v) face[v] = vals[phi.apply(v)];
        if (!native_is_cube(nm, face)) return false;
    }
    return true;
}

bool Nilspace::native_is_cube(int n, const CubeVals& vals) const {
    if (const auto* dk = std::get_if<ProvDk>(&prov_)) {
        int m = dk->k + 1;
        if (m > n) return true;
        const auto& g = dk->group;
        for (const auto& phi : face_maps_cached(m, n)) {
            grp::Elem acc = grp::zero(g);
            for (cube::Vertex u = 0; u < (1u << m); ++u) {
                const grp::Elem& e = dk->elems[vals[phi.apply(u)]];
                acc = (cube::weight(u) % 2 == 0) ? grp::add(g, acc, e) : grp::sub(g, acc, e);
            }
            if (acc != grp::zero(g)) return false;
        }
        return true;
    }
    if (const auto* pp = std::get_if<ProvProduct>(&prov_)) {
        CubeVals part(vals.size());
        for (size_t f = 0; f < pp->factors.size(); ++f) {
            for (size_t v = 0; v < vals.size(); ++v) part[v] = pp->comp[vals[v]][f];
            if (!pp->factors[f]->is_cube(n, part)) return false;
        }
        return true;
    }
    if (const auto* ps = std::get_if<ProvSub>(&prov_)) {
        CubeVals amb(vals.size());
        for (size_t v = 0; v < vals.size(); ++v) amb[v] = ps->carrier[vals[v]];
        return ps->ambient->is_cube(n, amb);
    }
    if (const auto* pf = std::get_if<ProvFiberProduct>(&prov_)) {
        CubeVals amb(vals.size());
        for (size_t v = 0; v < vals.size(); ++v) amb[v] = pf->carrier[vals[v]];
        return pf->ambient->is_cube(n, amb);
    }
    if (std::get_if<ProvQuotient>(&prov_)) {
        ensure_quotient_image(n);
        return caches_->quotient_image.at(n).count(vals) > 0;
    }
    const auto& pb = std::get<ProvPerturbed>(prov_);
    if (!pb.base->is_cube(n, vals)) return false;
    return !(n == pb.dim && pb.removed.count(vals) > 0);
}

void Nilspace::ensure_quotient_image(int n) const {
    auto& qi = caches_->quotient_image;
    if (qi.count(n)) return;
    const auto& pq = std::get<ProvQuotient>(prov_);
    const auto& base_list = enumerate_cubes(pq.base, n);
    std::set<CubeVals> img;
    CubeVals m(size_t{1} << n);
    for (const auto& q : base_list) {
        Budget::tick("quotient cube image");
        for (size_t v = 0; v < m.size(); ++v) m[v] = pq.proj[q[v]];
        img.insert(m);
    }
    qi.emplace(n, std::move(img));
}

// ---- constructions ----

SpacePtr build_dk(const grp::Group& g, int k, std::string name) {
    if (k < 0) throw InputError("degree must be nonnegative");
    auto elems = grp::enumerate(g);
    std::vector<Point> points;
    points.reserve(elems.size());
    for (const auto& e : elems) points.push_back(Point::atom(e));
    if (name.empty()) name = "D" + std::to_string(k) + "(" + g.name + ")";
    int hint = g.size() == 1 ? 0 : k;
    return std::make_shared<Nilspace>(std::move(name), std::move(points), hint,
                                      ProvDk{g, k, std::move(elems)});
}

SpacePtr build_point(std::string name) {
    return build_dk(grp::trivial_group(), 0, std::move(name));
}

SpacePtr build_product(const std::vector<SpacePtr>& factors, std::string name) {
    if (factors.empty()) throw InputError("a product needs at least one factor");
    long long total = 1;
    int hint = 0;
    for (const auto& f : factors) {
        total *= f->size();
        hint = std::max(hint, f->step_hint());
        if (total > 4096) throw InputError("product space exceeds the supported size");
    }
    std::vector<Point> points;
    std::vector<std::vector<PointId>> comp;
    points.reserve(total);
    comp.reserve(total);
    std::vector<PointId> ids(factors.size(), 0);
    for (long long c = 0; c < total; ++c) {
        std::vector<Point> parts;
        parts.reserve(factors.size());
        for (size_t f = 0; f < factors.size(); ++f) parts.push_back(factors[f]->points()[ids[f]]);
        points.push_back(Point::tuple(std::move(parts)));
        comp.push_back(ids);
        for (int f = static_cast<int>(factors.size()) - 1; f >= 0; --f) {
            if (++ids[f] < factors[f]->size()) break;
            ids[f] = 0;
        }
    }
    if (name.empty()) name = default_product_name(factors);
    return std::make_shared<Nilspace>(std::move(name), std::move(points), hint,
                                      ProvProduct{factors, std::move(comp)});
}

std::pair<SpacePtr, NilMap> build_quotient(const SpacePtr& base, const Partition& p,
                                           std::string name) {
    if (static_cast<int>(p.cell_of.size()) != base->size())
        throw InputError("partition size does not match the space");
    std::vector<Point> points;
    points.reserve(p.cells.size());
    for (const auto& c : p.cells) {
        std::vector<Point> members;
        members.reserve(c.size());
        for (PointId x : c) members.push_back(base->points()[x]);
        points.push_back(Point::cell(std::move(members)));
    }
    if (name.empty()) name = base->name() + "/" + std::to_string(p.num_cells());
    auto q = std::make_shared<Nilspace>(name, std::move(points), base->step_hint(),
                                        ProvQuotient{base, p, p.cell_of});
    NilMap pi;
    pi.name = "pi[" + name + "]";
    pi.domain = base;
    pi.codomain = q;
    pi.table = p.cell_of;
    return {q, pi};
}

SpacePtr build_sub(const SpacePtr& ambient, std::vector<PointId> carrier, std::string name) {
    std::sort(carrier.begin(), carrier.end());
    carrier.erase(std::unique(carrier.begin(), carrier.end()), carrier.end());
    if (carrier.empty()) throw InputError("subspace carrier is empty");
    for (PointId x : carrier)
        if (x < 0 || x >= ambient->size()) throw InputError("subspace carrier point out of range");
    std::vector<Point> points;
    std::vector<PointId> a2s(ambient->size(), -1);
    for (size_t i = 0; i < carrier.size(); ++i) {
        points.push_back(ambient->points()[carrier[i]]);
        a2s[carrier[i]] = static_cast<PointId>(i);
    }
    if (name.empty()) name = ambient->name() + "|sub" + std::to_string(carrier.size());
    return std::make_shared<Nilspace>(std::move(name), std::move(points), ambient->step_hint(),
                                      ProvSub{ambient, std::move(carrier), std::move(a2s)});
}

SpacePtr build_perturbed(const SpacePtr& base, int dim, std::set<CubeVals> removed,
                         std::string name) {
    if (dim < 0) throw InputError("perturbation dimension must be nonnegative");
    for (const auto& q : removed)
        if (q.size() != (size_t{1} << dim))
            throw InputError("perturbation cube has the wrong size");
    if (name.empty()) name = base->name() + "~";
    return std::make_shared<Nilspace>(std::move(name), base->points(), base->step_hint(),
                                      ProvPerturbed{base, dim, std::move(removed)});
}

// ---- enumeration ----

namespace {

void enumerate_generic(const SpacePtr& s, int n, unsigned nvertices, std::vector<CubeVals>& out,
                       const char* what) {
    int cap = std::min(s->nmax(), n);
    CubeVals vals(nvertices);
    CubeVals scratch;
    int size = s->size();
    std::function<void(unsigned)> rec = [&](unsigned m) {
        if (m == nvertices) {
            out.push_back(vals);
            return;
        }
        for (PointId x = 0; x < size; ++x) {
            Budget::tick(what);
            vals[m] = x;
            if (faces_ok(*s, vals, m, cap, scratch)) rec(m + 1);
        }
    };
    rec(0);
}

} // namespace

const std::vector<CubeVals>& enumerate_cubes(const SpacePtr& s, int n) {
    if (n < 0) throw InputError("negative cube dimension");
    auto& c = s->caches();
    auto it = c.cubes.find(n);
    if (it != c.cubes.end()) return it->second;

    std::vector<CubeVals> out;
    if (const auto* pq = std::get_if<ProvQuotient>(&s->provenance())) {
        const auto& base_list = enumerate_cubes(pq->base, n);
        std::set<CubeVals> img;
        CubeVals m(size_t{1} << n);
        for (const auto& q : base_list) {
            Budget::tick("quotient cube image");
            for (size_t v = 0; v < m.size(); ++v) m[v] = pq->proj[q[v]];
            img.insert(m);
        }
        out.assign(img.begin(), img.end());
        if (!c.quotient_image.count(n)) c.quotient_image.emplace(n, std::move(img));
    } else if (const auto* pp = std::get_if<ProvProduct>(&s->provenance())) {
        std::vector<const std::vector<CubeVals>*> lists;
        std::vector<int> sizes;
        for (const auto& f : pp->factors) {
            lists.push_back(&enumerate_cubes(f, n));
            sizes.push_back(f->size());
        }
        size_t nf = lists.size();
        std::vector<size_t> idx(nf, 0);
        bool any_empty = false;
        for (const auto* l : lists) any_empty |= l->empty();
        if (!any_empty) {
            CubeVals vals(size_t{1} << n);
            std::vector<PointId> comps(nf);
            while (true) {
                Budget::tick("product cube enumeration");
                for (size_t v = 0; v < vals.size(); ++v) {
                    for (size_t f = 0; f < nf; ++f) comps[f] = (*lists[f])[idx[f]][v];
                    vals[v] = radix_pid(sizes, comps);
                }
                out.push_back(vals);
                bool done = false;
                size_t f = nf;
                while (true) {
                    if (f == 0) { done = true; break; }
                    --f;
                    if (++idx[f] < lists[f]->size()) break;
                    idx[f] = 0;
                }
                if (done) break;
            }
        }
        // block order of the odometer is not value order
        std::sort(out.begin(), out.end());
    } else {
        enumerate_generic(s, n, 1u << n, out, "cube enumeration");
    }
    auto [pos, inserted] = c.cubes.emplace(n, std::move(out));
    (void)inserted;
    return pos->second;
}

const std::vector<CornerVals>& enumerate_corners(const SpacePtr& s, int n) {
    if (n < 1) throw InputError("corner dimension must be at least 1");
    auto& c = s->caches();
    auto it = c.corners.find(n);
    if (it != c.corners.end()) return it->second;
    std::vector<CornerVals> out;
    enumerate_generic(s, n, (1u << n) - 1, out, "corner enumeration");
    auto [pos, inserted] = c.corners.emplace(n, std::move(out));
    (void)inserted;
    return pos->second;
}

namespace {

constexpr long long kMembershipLimit = 100000;

// over-approximation that never expands a product's own cube list
long long list_size_estimate(const SpacePtr& s, int n, long long limit) {
    if (const auto* pp = std::get_if<ProvProduct>(&s->provenance())) {
        long long est = 1;
        for (const auto& f : pp->factors) {
            est *= list_size_estimate(f, n, limit);
            if (est > limit) return limit + 1;
        }
        return est;
    }
    return static_cast<long long>(enumerate_cubes(s, n).size());
}

} // namespace

bool in_cube_set(const SpacePtr& s, int n, const CubeVals& vals) {
    auto& c = s->caches();
    if (!c.cubes.count(n)) {
        const auto* pp = std::get_if<ProvProduct>(&s->provenance());
        if (pp && list_size_estimate(s, n, kMembershipLimit) > kMembershipLimit) {
            // the product's list is a plain odometer over the factor lists, so
            // membership splits componentwise; answer without building it
            CubeVals part(vals.size());
            for (size_t f = 0; f < pp->factors.size(); ++f) {
                Budget::tick("cube membership");
                for (size_t v = 0; v < vals.size(); ++v) part[v] = pp->comp[vals[v]][f];
                if (!in_cube_set(pp->factors[f], n, part)) return false;
            }
            return true;
        }
    }
    const auto& list = enumerate_cubes(s, n);
    return std::binary_search(list.begin(), list.end(), vals);
}

std::vector<PointId> completions_unchecked(const SpacePtr& s, int n, const CornerVals& corner) {
    CubeVals full(size_t{1} << n);
    std::copy(corner.begin(), corner.end(), full.begin());
    std::vector<PointId> out;
    for (PointId x = 0; x < s->size(); ++x) {
        full.back() = x;
        if (s->is_cube(n, full)) out.push_back(x);
    }
    return out;
}

std::vector<PointId> completions(const SpacePtr& s, int n, const CornerVals& corner) {
    if (n < 1) throw InputError("corner dimension must be at least 1");
    if (corner.size() != (size_t{1} << n) - 1)
        throw InputError("corner value table has the wrong size");
    for (PointId x : corner)
        if (x < 0 || x >= s->size()) throw InputError("corner value out of range");
    // the faces avoiding the missing vertex all sit inside a lower facet
    CubeVals fv(size_t{1} << (n - 1));
    for (int i = 0; i < n; ++i) {
        for (unsigned u = 0; u < fv.size(); ++u) {
            unsigned v = ((u >> i) << (i + 1)) | (u & ((1u << i) - 1));
            fv[u] = corner[v];
        }
        if (!s->is_cube(n - 1, fv))
            throw InputError("invalid corner: the face {v" + std::to_string(i + 1) +
                             "=0} is not a cube");
    }
    return completions_unchecked(s, n, corner);
}

// ---- verification ----

namespace {

constexpr long long kStructuralVerifyLimit = 100000;

void verify_by_enumeration(const SpacePtr& s, int nmax, Report& rep) {
    std::vector<const std::vector<CubeVals>*> lists(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
        lists[n] = &enumerate_cubes(s, n);
        rep.counts["cubes_dim" + std::to_string(n)] = static_cast<std::int64_t>(lists[n]->size());
    }
    int size = s->size();

    if (lists[0]->size() != static_cast<size_t>(size)) {
        rep.fail("some point is missing from the zero-cubes");
        return;
    }
    if (nmax >= 1 && lists[1]->size() != static_cast<size_t>(size) * size) {
        for (PointId x = 0; x < size && rep.passed(); ++x)
            for (PointId y = 0; y < size; ++y) {
                CubeVals pair{x, y};
                if (!std::binary_search(lists[1]->begin(), lists[1]->end(), pair)) {
                    rep.fail("a pair of points is not a one-cube");
                    rep.witness["x"] = point_json(s, x);
                    rep.witness["y"] = point_json(s, y);
                    return;
                }
            }
    }

    // closure of the cube sets under all cube morphisms
    std::int64_t comp_checks = 0;
    CubeVals composite;
    for (int n = 0; n <= nmax; ++n) {
        for (int m = 0; m <= nmax; ++m) {
            for (const auto& phi : all_morphisms_cached(m, n)) {
                std::vector<cube::Vertex> vmap(size_t{1} << m);
                for (cube::Vertex v = 0; v < vmap.size(); ++v) vmap[v] = phi.apply(v);
                composite.resize(vmap.size());
                for (const auto& q : *lists[n]) {
                    Budget::tick("composition check");
                    for (size_t v = 0; v < vmap.size(); ++v) composite[v] = q[vmap[v]];
                    ++comp_checks;
                    if (!std::binary_search(lists[m]->begin(), lists[m]->end(), composite)) {
                        rep.fail("cube set is not closed under a cube morphism");
                        rep.witness["dim"] = n;
                        rep.witness["cube"] = cube_json(s, q);
                        rep.witness["morphism"] = morphism_json(phi);
                        rep.witness["composite"] = cube_json(s, composite);
                        rep.counts["composition_checks"] = comp_checks;
                        return;
                    }
                }
            }
        }
    }
    rep.counts["composition_checks"] = comp_checks;

    // corner completion
    for (int n = 1; n <= nmax; ++n) {
        const auto& corners = enumerate_corners(s, n);
        rep.counts["corners_dim" + std::to_string(n)] =
            static_cast<std::int64_t>(corners.size());
        std::int64_t multi = 0;
        for (const auto& cor : corners) {
            Budget::tick("completion check");
            auto comps = completions_unchecked(s, n, cor);
            if (comps.empty()) {
                rep.fail("a corner has no completion");
                rep.witness["dim"] = n;
                rep.witness["corner"] = cube_json(s, cor);
                return;
            }
            if (comps.size() > 1) ++multi;
        }
        if (n == nmax) rep.counts["top_corners_multi"] = multi;
    }
}

} // namespace

Report verify_axioms(const SpacePtr& s, int nmax) {
    if (nmax < 0) nmax = s->nmax();
    auto& cache = s->caches().verify;
    auto it = cache.find(nmax);
    if (it != cache.end()) return it->second;

    Report rep("verify_axioms");
    rep.values["space"] = s->name();
    rep.counts["points"] = s->size();

    bool structural = false;
    if (const auto* pp = std::get_if<ProvProduct>(&s->provenance())) {
        long long est = 1;
        for (const auto& f : pp->factors) {
            est *= static_cast<long long>(enumerate_cubes(f, nmax).size());
            if (est > kStructuralVerifyLimit) break;
        }
        if (est > kStructuralVerifyLimit) {
            structural = true;
            for (const auto& f : pp->factors) {
                Report sub = verify_axioms(f, nmax);
                if (!sub.passed()) {
                    rep.fail("factor " + f->name() + " fails verification");
                    rep.witness["factor"] = sub.to_json();
                    break;
                }
            }
            if (rep.passed()) {
                rep.message = "factors verified; product cube sets are closed under "
                              "morphisms and complete componentwise";
                rep.counts["factors"] = static_cast<std::int64_t>(pp->factors.size());
            }
        }
    }
    if (!structural) verify_by_enumeration(s, nmax, rep);

    cache.emplace(nmax, rep);
    return rep;
}

void require_verified(const SpacePtr& s) {
    Report rep = verify_axioms(s, -1);
    if (!rep.passed())
        throw InputError("space " + s->name() + " fails verification: " + rep.message);
}

int step_of(const SpacePtr& s) {
    auto& c = s->caches();
    if (c.step) return *c.step;
    if (const auto* pp = std::get_if<ProvProduct>(&s->provenance())) {
        // completion in a product is componentwise, so uniqueness holds at
        // level n exactly when it holds in every factor
        int k = 0;
        for (const auto& f : pp->factors) k = std::max(k, step_of(f));
        c.step = k;
        return k;
    }
    for (int k = 0; k <= s->step_hint(); ++k) {
        const auto& corners = enumerate_corners(s, k + 1);
        bool unique = true;
        for (const auto& cor : corners) {
            if (completions_unchecked(s, k + 1, cor).size() != 1) {
                unique = false;
                break;
            }
        }
        if (unique) {
            c.step = k;
            return k;
        }
    }
    throw InputError("space " + s->name() +
                     " has no step within its construction bound; it is not a valid nilspace");
}

// ---- factors ----

std::pair<SpacePtr, NilMap> factor(const SpacePtr& s, int n) {
    if (n < 0) throw InputError("factor level must be nonnegative");
    auto& c = s->caches();
    auto it = c.factors.find(n);
    if (it != c.factors.end()) return it->second;

    int k = step_of(s);
    std::pair<SpacePtr, NilMap> result;
    if (n >= k) {
        NilMap id;
        id.name = "id[" + s->name() + "]";
        id.domain = s;
        id.codomain = s;
        id.table.resize(s->size());
        std::iota(id.table.begin(), id.table.end(), 0);
        result = {s, std::move(id)};
    } else {
        // x ~ y iff every cube ending at x still ends in a cube after the top
        // value is replaced by y; equivalently y completes every corner x does
        const auto& corners = enumerate_corners(s, n + 1);
        int size = s->size();
        std::vector<std::vector<char>> rel(size, std::vector<char>(size, 1));
        std::vector<char> inc(size);
        for (const auto& cor : corners) {
            Budget::tick("factor relation");
            auto comps = completions_unchecked(s, n + 1, cor);
            std::fill(inc.begin(), inc.end(), 0);
            for (PointId x : comps) inc[x] = 1;
            for (PointId x : comps)
                for (PointId y = 0; y < size; ++y)
                    if (!inc[y]) rel[x][y] = 0;
        }
        for (int x = 0; x < size; ++x)
            for (int y = 0; y < size; ++y)
                if (rel[x][y] != rel[y][x])
                    throw InternalError("value replacement at level " + std::to_string(n) +
                                        " is not symmetric on " + s->name());
        for (int x = 0; x < size; ++x)
            for (int y = 0; y < size; ++y) {
                if (!rel[x][y]) continue;
                for (int z = 0; z < size; ++z)
                    if (rel[y][z] && !rel[x][z])
                        throw InternalError("value replacement at level " + std::to_string(n) +
                                            " is not transitive on " + s->name());
            }
        std::vector<int> cell_of(size);
        for (int x = 0; x < size; ++x) {
            int least = x;
            for (int y = 0; y < x; ++y)
                if (rel[y][x]) { least = y; break; }
            cell_of[x] = least;
        }
        auto part = Partition::from_cell_of(cell_of);
        auto [q, pi] = build_quotient(s, part, s->name() + "_(" + std::to_string(n) + ")");
        Report vq = verify_axioms(q, -1);
        if (!vq.passed())
            throw InternalError("factor space " + q->name() + " fails verification: " + vq.message);
        Report lift = corner_lift_check(s, q, pi.table, -1);
        if (!lift.passed())
            throw InternalError("factor projection onto " + q->name() +
                                " fails corner lifting: " + lift.message);
        result = {q, std::move(pi)};
    }
    c.factors.emplace(n, result);
    return result;
}

Report corner_lift_check(const SpacePtr& x, const SpacePtr& y,
                         const std::vector<PointId>& table, int nmax) {
    Report rep("corner_lift");
    if (table.size() != static_cast<size_t>(x->size()))
        throw InputError("corner lifting: value table does not match the domain");
    int nm = nmax < 0 ? std::max(x->nmax(), y->nmax()) : nmax;
    std::int64_t corners_checked = 0, completions_checked = 0;
    CornerVals ic;
    std::vector<PointId> imgs;
    for (int n = 1; n <= nm; ++n) {
        for (const auto& cor : enumerate_corners(x, n)) {
            Budget::tick("corner lifting");
            ic.resize(cor.size());
            for (size_t v = 0; v < cor.size(); ++v) ic[v] = table[cor[v]];
            auto cx = completions_unchecked(x, n, cor);
            imgs.clear();
            for (PointId p : cx) imgs.push_back(table[p]);
            std::sort(imgs.begin(), imgs.end());
            imgs.erase(std::unique(imgs.begin(), imgs.end()), imgs.end());
            auto cy = completions_unchecked(y, n, ic);
            for (PointId py : cy) {
                if (!std::binary_search(imgs.begin(), imgs.end(), py)) {
                    rep.fail("a completion downstairs does not lift");
                    rep.witness["dim"] = n;
                    rep.witness["corner"] = cube_json(x, cor);
                    rep.witness["completion"] = point_json(y, py);
                    rep.counts["corners_checked"] = corners_checked;
                    return rep;
                }
            }
            ++corners_checked;
            completions_checked += static_cast<std::int64_t>(cy.size());
        }
    }
    rep.counts["corners_checked"] = corners_checked;
    rep.counts["completions_checked"] = completions_checked;
    return rep;
}

// ---- structure data ----

namespace {

std::optional<TopStructure> compute_top(const SpacePtr& s);
std::optional<TopStructure> top_via_base(const SpacePtr& q_space, const SpacePtr& base,
                                         std::vector<PointId> sigma);

// B acts on its own points and projects onto the class set via sigma; the
// induced group is B modulo the classwise stabilizer, acting on classes.
std::optional<TopStructure> image_rule(const TopStructure& tb, const std::vector<PointId>& sigma,
                                       int qsize) {
    const grp::Group& gb = tb.group;
    int nb = gb.size();
    int bsize = static_cast<int>(sigma.size());

    std::vector<PointId> rep_point(qsize, -1);
    for (int x = 0; x < bsize; ++x)
        if (rep_point[sigma[x]] < 0) rep_point[sigma[x]] = x;
    for (int q = 0; q < qsize; ++q)
        if (rep_point[q] < 0) return std::nullopt;

    // every group element must act classwise
    std::vector<std::vector<int>> classmap(nb, std::vector<int>(qsize, -1));
    for (int z = 0; z < nb; ++z) {
        const auto& act = tb.action[z];
        for (int x = 0; x < bsize; ++x) {
            int q = sigma[x];
            int img = sigma[act[x]];
            if (classmap[z][q] < 0) classmap[z][q] = img;
            else if (classmap[z][q] != img) return std::nullopt;
        }
    }

    auto elems = grp::enumerate(gb);
    auto addb = [&](int i, int j) {
        return grp::index_of(gb, grp::add(gb, elems[i], elems[j]));
    };
    std::vector<int> kern;
    for (int z = 0; z < nb; ++z) {
        bool fixes = true;
        for (int q = 0; q < qsize && fixes; ++q) fixes = classmap[z][q] == q;
        if (fixes) kern.push_back(z);
    }
    std::vector<int> coset_rep(nb);
    for (int z = 0; z < nb; ++z) {
        int m = z;
        for (int kk : kern) m = std::min(m, addb(z, kk));
        coset_rep[z] = m;
    }
    std::vector<int> reps;
    for (int z = 0; z < nb; ++z)
        if (coset_rep[z] == z) reps.push_back(z);
    std::map<int, int> pos;
    for (size_t i = 0; i < reps.size(); ++i) pos[reps[i]] = static_cast<int>(i);

    grp::AbstractGroup abs;
    abs.n = static_cast<int>(reps.size());
    abs.zero = pos.at(coset_rep[0]);
    abs.add = [reps, coset_rep, pos, addb](int i, int j) {
        return pos.at(coset_rep[addb(reps[i], reps[j])]);
    };
    auto dec = grp::decompose(abs);

    TopStructure out;
    out.group = dec.canonical;
    out.action.resize(dec.canonical.size());
    for (int gi = 0; gi < dec.canonical.size(); ++gi)
        out.action[gi] = classmap[reps[dec.elem_of[gi]]];
    for (int q = 0; q < qsize; ++q)
        if (out.action[0][q] != q)
            throw InternalError("derived class action does not fix classes at zero");
    return out;
}

std::optional<TopStructure> top_via_base(const SpacePtr& q_space, const SpacePtr& base,
                                         std::vector<PointId> sigma) {
    int k = step_of(q_space);
    if (step_of(base) == k) {
        const auto& tb = top_structure(base);
        if (!tb) return std::nullopt;
        return image_rule(*tb, sigma, q_space->size());
    }
    if (const auto* q2 = std::get_if<ProvQuotient>(&base->provenance())) {
        std::vector<PointId> sig2(q2->base->size());
        for (int x = 0; x < q2->base->size(); ++x) sig2[x] = sigma[q2->proj[x]];
        return top_via_base(q_space, q2->base, std::move(sig2));
    }
    if (const auto* pp = std::get_if<ProvProduct>(&base->provenance())) {
        // descend through the product of the factors' level-k factors
        std::vector<std::pair<SpacePtr, NilMap>> fparts;
        std::vector<SpacePtr> parts;
        std::vector<int> sizes;
        for (const auto& f : pp->factors) {
            fparts.push_back(factor(f, k));
            parts.push_back(fparts.back().first);
            sizes.push_back(fparts.back().first->size());
        }
        SpacePtr prod = build_product(parts, base->name() + "@" + std::to_string(k));
        std::vector<PointId> m(base->size());
        std::vector<PointId> comps(parts.size());
        for (int x = 0; x < base->size(); ++x) {
            for (size_t f = 0; f < parts.size(); ++f)
                comps[f] = fparts[f].second.table[pp->comp[x][f]];
            m[x] = radix_pid(sizes, comps);
        }
        std::vector<PointId> sigp(prod->size(), -1);
        for (int x = 0; x < base->size(); ++x) {
            if (sigp[m[x]] < 0) sigp[m[x]] = sigma[x];
            else if (sigp[m[x]] != sigma[x]) return std::nullopt;
        }
        for (PointId v : sigp)
            if (v < 0) return std::nullopt;
        return top_via_base(q_space, prod, std::move(sigp));
    }
    return std::nullopt;
}

std::optional<TopStructure> compute_top(const SpacePtr& s) {
    int k = step_of(s);
    if (k == 0) {
        TopStructure t;
        t.group = grp::trivial_group();
        std::vector<PointId> id(s->size());
        std::iota(id.begin(), id.end(), 0);
        t.action = {std::move(id)};
        return t;
    }
    if (const auto* dk = std::get_if<ProvDk>(&s->provenance())) {
        if (dk->k != k) return std::nullopt;
        TopStructure t;
        t.group = dk->group;
        int n = s->size();
        t.action.assign(n, std::vector<PointId>(n));
        for (int z = 0; z < n; ++z)
            for (int x = 0; x < n; ++x)
                t.action[z][x] =
                    grp::index_of(dk->group, grp::add(dk->group, dk->elems[x], dk->elems[z]));
        return t;
    }
    if (const auto* pp = std::get_if<ProvProduct>(&s->provenance())) {
        size_t nf = pp->factors.size();
        std::vector<const TopStructure*> tops(nf, nullptr);
        std::vector<grp::Group> gs;
        std::vector<int> sizes;
        for (size_t f = 0; f < nf; ++f) {
            const auto& fac = pp->factors[f];
            sizes.push_back(fac->size());
            if (step_of(fac) == k) {
                const auto& tf = top_structure(fac);
                if (!tf) return std::nullopt;
                tops[f] = &*tf;
                gs.push_back(tf->group);
            } else {
                gs.push_back(grp::trivial_group());
            }
        }
        grp::Group big = grp::direct_sum(gs);
        auto elems = grp::enumerate(big);
        TopStructure t;
        t.group = big;
        t.action.resize(elems.size());
        std::vector<PointId> comps(nf);
        for (size_t ei = 0; ei < elems.size(); ++ei) {
            // slice the element into per-factor components
            std::vector<int> zidx(nf, 0);
            size_t off = 0;
            for (size_t f = 0; f < nf; ++f) {
                size_t w = gs[f].orders.size();
                grp::Elem part(elems[ei].begin() + off, elems[ei].begin() + off + w);
                zidx[f] = grp::index_of(gs[f], part);
                off += w;
            }
            auto& row = t.action[ei];
            row.resize(s->size());
            for (int x = 0; x < s->size(); ++x) {
                for (size_t f = 0; f < nf; ++f) {
                    PointId cx = pp->comp[x][f];
                    comps[f] = tops[f] ? tops[f]->action[zidx[f]][cx] : cx;
                }
                row[x] = radix_pid(sizes, comps);
            }
        }
        return t;
    }
    if (const auto* pq = std::get_if<ProvQuotient>(&s->provenance()))
        return top_via_base(s, pq->base, pq->proj);

    const SpacePtr* amb = nullptr;
    const std::vector<PointId>* carrier = nullptr;
    const std::vector<PointId>* a2s = nullptr;
    if (const auto* ps = std::get_if<ProvSub>(&s->provenance())) {
        amb = &ps->ambient;
        carrier = &ps->carrier;
        a2s = &ps->ambient_to_sub;
    } else if (const auto* pf = std::get_if<ProvFiberProduct>(&s->provenance())) {
        amb = &pf->ambient;
        carrier = &pf->carrier;
        a2s = &pf->ambient_to_sub;
    }
    if (amb) {
        if (step_of(*amb) != k) return std::nullopt;
        const auto& ta = top_structure(*amb);
        if (!ta) return std::nullopt;
        int na = ta->group.size();
        std::vector<int> stab;
        for (int z = 0; z < na; ++z) {
            bool keeps = true;
            for (PointId p : *carrier) {
                if ((*a2s)[ta->action[z][p]] < 0) {
                    keeps = false;
                    break;
                }
            }
            if (keeps) stab.push_back(z);
        }
        std::map<int, int> pos;
        for (size_t i = 0; i < stab.size(); ++i) pos[stab[i]] = static_cast<int>(i);
        auto elems = grp::enumerate(ta->group);
        auto adda = [&](int i, int j) {
            return grp::index_of(ta->group, grp::add(ta->group, elems[i], elems[j]));
        };
        for (size_t i = 0; i < stab.size(); ++i)
            for (size_t j = 0; j < stab.size(); ++j)
                if (!pos.count(adda(stab[i], stab[j])))
                    throw InternalError("carrier stabilizer is not closed under addition on " +
                                        s->name());
        grp::AbstractGroup abs;
        abs.n = static_cast<int>(stab.size());
        abs.zero = pos.at(0);
        std::vector<int> stab_copy = stab;
        abs.add = [stab_copy, pos, adda](int i, int j) {
            return pos.at(adda(stab_copy[i], stab_copy[j]));
        };
        auto dec = grp::decompose(abs);
        TopStructure t;
        t.group = dec.canonical;
        t.action.resize(dec.canonical.size());
        for (int gi = 0; gi < dec.canonical.size(); ++gi) {
            int z = stab[dec.elem_of[gi]];
            auto& row = t.action[gi];
            row.resize(carrier->size());
            for (size_t p = 0; p < carrier->size(); ++p)
                row[p] = (*a2s)[ta->action[z][(*carrier)[p]]];
        }
        return t;
    }
    return std::nullopt; // perturbed spaces carry no derived structure data
}

} // namespace

const std::optional<TopStructure>& top_structure(const SpacePtr& s) {
    auto& c = s->caches();
    if (!c.top_computed) {
        c.top = compute_top(s);
        c.top_computed = true;
    }
    return c.top;
}

StructureGroupResult structure_group(const SpacePtr& s, int i) {
    require_verified(s);
    int k = step_of(s);
    if (i < 1 || i > k)
        throw InputError("structure group level must be between 1 and the step");

    if (i < k) {
        auto [fi, pi] = factor(s, i);
        if (step_of(fi) < i) {
            // the level collapses inside the factor, so the group is trivial
            Report rep("structure_group");
            rep.values["space"] = s->name();
            rep.values["via_factor"] = fi->name();
            rep.values["level"] = i;
            rep.counts["group_order"] = 1;
            grp::Group g = grp::trivial_group();
            rep.values["group"] = g.name;
            rep.values["orders"] = g.orders;
            rep.message = "level " + std::to_string(i) + " is trivial in the factor";
            return {std::move(g), std::nullopt, std::move(rep)};
        }
        auto sub = structure_group(fi, i);
        sub.action.reset();
        sub.report.values["space"] = s->name();
        sub.report.values["via_factor"] = fi->name();
        return sub;
    }

    Report rep("structure_group");
    rep.values["space"] = s->name();
    rep.values["level"] = i;
    const auto& top = top_structure(s);
    if (!top) {
        rep.error("structure data is not derivable for this construction");
        return {grp::trivial_group(), std::nullopt, rep};
    }
    const grp::Group& g = top->group;
    const auto& act = top->action;
    int gn = g.size();
    rep.counts["group_order"] = gn;
    rep.values["group"] = g.name;
    rep.values["orders"] = g.orders;

    for (int x = 0; x < s->size(); ++x)
        if (act[0][x] != x) {
            rep.fail("the zero element acts nontrivially");
            return {g, std::nullopt, rep};
        }

    auto [fk1, pi] = factor(s, k - 1);
    std::vector<std::vector<PointId>> fibers(fk1->size());
    for (int x = 0; x < s->size(); ++x) fibers[pi.table[x]].push_back(x);
    rep.counts["fibers"] = static_cast<std::int64_t>(fibers.size());

    std::vector<char> in_fiber(s->size());
    for (const auto& fib : fibers) {
        if (static_cast<int>(fib.size()) != gn) {
            rep.fail("fiber size differs from the group order");
            rep.witness["fiber_size"] = fib.size();
            rep.witness["group_order"] = gn;
            return {g, std::nullopt, rep};
        }
        std::fill(in_fiber.begin(), in_fiber.end(), 0);
        for (PointId x : fib) in_fiber[x] = 1;
        for (PointId x : fib) {
            std::vector<char> hit(s->size(), 0);
            for (int z = 0; z < gn; ++z) {
                PointId y = act[z][x];
                if (!in_fiber[y]) {
                    rep.fail("the action moves a point out of its fiber");
                    rep.witness["x"] = point_json(s, x);
                    rep.witness["image"] = point_json(s, y);
                    return {g, std::nullopt, rep};
                }
                if (hit[y]) {
                    rep.fail("the action is not free on a fiber");
                    rep.witness["x"] = point_json(s, x);
                    return {g, std::nullopt, rep};
                }
                hit[y] = 1;
            }
        }
    }

    // constant shifts preserve every cube set
    std::int64_t shift_checks = 0;
    CubeVals shifted;
    for (int n = 0; n <= s->nmax(); ++n) {
        const auto& cs = enumerate_cubes(s, n);
        shifted.resize(size_t{1} << n);
        for (int z = 1; z < gn; ++z) {
            for (const auto& q : cs) {
                Budget::tick("shift check");
                for (size_t v = 0; v < q.size(); ++v) shifted[v] = act[z][q[v]];
                ++shift_checks;
                if (!std::binary_search(cs.begin(), cs.end(), shifted)) {
                    rep.fail("a constant shift does not preserve the cube set");
                    rep.witness["dim"] = n;
                    rep.witness["cube"] = cube_json(s, q);
                    rep.witness["shift"] = grp::elem_json(grp::elem_at(g, z));
                    return {g, std::nullopt, rep};
                }
            }
        }
    }
    rep.counts["shift_checks"] = shift_checks;

    // each fiber carries exactly the degree-k cube structure of the group
    SpacePtr deg = build_dk(g, k, "deg" + std::to_string(k) + "(" + g.name + ")");
    std::int64_t fiber_iso_checks = 0;
    for (const auto& fib : fibers) {
        std::fill(in_fiber.begin(), in_fiber.end(), 0);
        for (PointId x : fib) in_fiber[x] = 1;
        PointId x0 = fib.front();
        for (int n = 0; n <= s->nmax(); ++n) {
            const auto& dcs = enumerate_cubes(deg, n);
            const auto& cs = enumerate_cubes(s, n);
            CubeVals mapped(size_t{1} << n);
            for (const auto& q : dcs) {
                Budget::tick("fiber structure check");
                for (size_t v = 0; v < q.size(); ++v) mapped[v] = act[q[v]][x0];
                ++fiber_iso_checks;
                if (!std::binary_search(cs.begin(), cs.end(), mapped)) {
                    rep.fail("a fiber is missing a degree-space cube");
                    rep.witness["dim"] = n;
                    rep.witness["cube"] = cube_json(s, mapped);
                    return {g, std::nullopt, rep};
                }
            }
            std::int64_t inside = 0;
            for (const auto& q : cs) {
                bool all = true;
                for (PointId v : q)
                    if (!in_fiber[v]) {
                        all = false;
                        break;
                    }
                if (all) ++inside;
            }
            if (inside != static_cast<std::int64_t>(dcs.size())) {
                rep.fail("a fiber carries more cubes than the degree space");
                rep.witness["dim"] = n;
                rep.witness["fiber_cubes"] = inside;
                rep.witness["degree_cubes"] = dcs.size();
                return {g, std::nullopt, rep};
            }
        }
    }
    rep.counts["fiber_structure_checks"] = fiber_iso_checks;
    rep.message = "group acts freely and transitively on fibers; shifts preserve cubes; "
                  "fibers carry the degree-space structure";
    return {g, top->action, rep};
}

SpacePtr sub_fiber(const NilMap& psi, PointId y) {
    if (!psi.cache->fibration || !psi.cache->fibration->passed())
        throw InputError("sub_fiber needs a verified fibration; run the fibration check on " +
                         psi.name + " first");
    if (y < 0 || y >= psi.codomain->size()) throw InputError("fiber base point out of range");
    std::vector<PointId> carrier;
    for (int x = 0; x < psi.domain->size(); ++x)
        if (psi.table[x] == y) carrier.push_back(x);
    if (carrier.empty()) throw InputError("empty fiber");
    return build_sub(psi.domain, std::move(carrier),
                     psi.domain->name() + "|" + psi.codomain->points()[y].str());
}

// ---- isomorphism search ----

std::optional<std::vector<PointId>> find_nilspace_isomorphism(const SpacePtr& a,
                                                              const SpacePtr& b) {
    if (a->size() != b->size()) return std::nullopt;
    int size = a->size();
    int nm = std::max(a->nmax(), b->nmax());
    for (int n = 0; n <= nm; ++n)
        if (enumerate_cubes(a, n).size() != enumerate_cubes(b, n).size()) return std::nullopt;

    // per-slot occurrence counts are invariant under isomorphism
    auto signature = [&](const SpacePtr& s) {
        std::vector<std::vector<std::int64_t>> sig(size);
        for (int n = 2; n <= nm; ++n) {
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
    auto siga = signature(a);
    auto sigb = signature(b);

    std::vector<std::vector<PointId>> cands(size);
    for (int p = 0; p < size; ++p) {
        for (int q = 0; q < size; ++q)
            if (siga[p] == sigb[q]) cands[p].push_back(q);
        if (cands[p].empty()) return std::nullopt;
    }

    // assign scarce points first
    std::vector<int> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int p, int q) { return cands[p].size() < cands[q].size(); });
    std::vector<int> pos_of(size);
    for (int t = 0; t < size; ++t) pos_of[order[t]] = t;

    // bucket the cubes of a by the assignment position at which they close
    struct Ready {
        int n;
        const CubeVals* q;
    };
    std::vector<std::vector<Ready>> buckets(size);
    for (int n = 1; n <= nm; ++n)
        for (const auto& q : enumerate_cubes(a, n)) {
            int last = 0;
            for (PointId v : q) last = std::max(last, pos_of[v]);
            buckets[last].push_back({n, &q});
        }

    std::vector<PointId> image(size, -1);
    std::vector<char> used(size, 0);
    CubeVals mapped;
    std::function<bool(int)> rec = [&](int t) -> bool {
        if (t == size) return true;
        int p = order[t];
        for (PointId cand : cands[p]) {
            if (used[cand]) continue;
            Budget::tick("isomorphism search");
            image[p] = cand;
            used[cand] = 1;
            bool ok = true;
            for (const auto& r : buckets[t]) {
                mapped.resize(r.q->size());
                for (size_t v = 0; v < r.q->size(); ++v) mapped[v] = image[(*r.q)[v]];
                const auto& list = enumerate_cubes(b, r.n);
                if (!std::binary_search(list.begin(), list.end(), mapped)) {
                    ok = false;
                    break;
                }
            }
            if (ok && rec(t + 1)) return true;
            image[p] = -1;
            used[cand] = 0;
        }
        return false;
    };
    if (!rec(0)) return std::nullopt;
    return image;
}

// ---- json helpers ----

nlohmann::ordered_json cube_json(const SpacePtr& s, const CubeVals& vals) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (PointId v : vals) j.push_back(s->points()[v].to_json());
    return j;
}

nlohmann::ordered_json point_json(const SpacePtr& s, PointId p) {
    return s->points()[p].to_json();
}

} // namespace nilab
