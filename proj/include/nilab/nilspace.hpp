#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nilab/cube.hpp"
#include "nilab/grp.hpp"
#include "nilab/point.hpp"
#include "nilab/report.hpp"

namespace nilab {

/// Index into a nilspace's canonical point list.
using PointId = int;

/// A cube map {0,1}^n -> X stored by vertex mask; size 2^n.
using CubeVals = std::vector<PointId>;
/// A corner: values on every vertex except 1^n; size 2^n - 1, mask order.
using CornerVals = std::vector<PointId>;

class Nilspace;
using SpacePtr = std::shared_ptr<const Nilspace>;

/// Partition of 0..n-1 in canonical form: members of each cell sorted, cells
/// ordered by least member.
struct Partition {
    std::vector<int> cell_of;
    std::vector<std::vector<PointId>> cells;

    static Partition from_cell_of(const std::vector<int>& raw);
    static Partition from_cells(std::vector<std::vector<PointId>> cells, int npoints);
    static Partition discrete(int npoints); // singletons
    static Partition indiscrete(int npoints); // one cell

    int num_cells() const { return static_cast<int>(cells.size()); }
    /// True when every cell of *this lies inside a cell of `coarser`.
    bool refines(const Partition& coarser) const;
    bool operator==(const Partition& o) const { return cells == o.cells; }
    /// Canonical nested-list encoding, used for deterministic tie-breaking.
    nlohmann::ordered_json encode() const;
};

/// Verification status shared between copies of a map value.
struct MapCache {
    std::optional<Report> morphism;
    std::optional<Report> fibration;
    std::optional<Report> translation;
};

/// Componentwise description of a map between product spaces: output factor
/// `to` is fed from domain factor `from[to]` through `component[to]`.
/// Domain factors not mentioned are collapsed.
struct ProductMapStructure;

/// A map between nilspaces as a full value table over the domain points.
struct NilMap {
    std::string name;
    SpacePtr domain;
    SpacePtr codomain;
    std::vector<PointId> table;
    std::shared_ptr<MapCache> cache = std::make_shared<MapCache>();
    std::shared_ptr<const ProductMapStructure> product_structure; // usually null

    PointId operator()(PointId x) const { return table[x]; }
};

struct ProductMapStructure {
    std::vector<int> from;       // per codomain factor: domain factor index
    std::vector<NilMap> component; // per codomain factor: map factor_from -> factor_to
};

/// Structure group at the space's own step: the group together with its
/// action on points (action[elem index][point id]).
struct TopStructure {
    grp::Group group;
    std::vector<std::vector<PointId>> action;
};

// ---- construction provenance ----

struct ProvDk {
    grp::Group group;
    int k;
    std::vector<grp::Elem> elems; // elems[pid], enumeration order
};
struct ProvProduct {
    std::vector<SpacePtr> factors;
    std::vector<std::vector<PointId>> comp; // comp[pid][f] = factor point id
};
struct ProvSub {
    SpacePtr ambient;
    std::vector<PointId> carrier;      // sub pid -> ambient pid, sorted
    std::vector<PointId> ambient_to_sub; // -1 outside carrier
};
struct ProvQuotient {
    SpacePtr base;
    Partition part;
    std::vector<PointId> proj; // base pid -> quotient pid
};
struct ProvFiberProduct {
    SpacePtr ambient; // product of the two map domains
    NilMap left;      // psi1 : X1 -> Z
    NilMap right;     // psi2 : X2 -> Z
    std::vector<PointId> carrier;
    std::vector<PointId> ambient_to_sub;
};
struct ProvPerturbed {
    SpacePtr base;
    int dim;
    std::set<CubeVals> removed;
};

using Provenance =
    std::variant<ProvDk, ProvProduct, ProvSub, ProvQuotient, ProvFiberProduct, ProvPerturbed>;

/// A finite nilspace candidate: points in canonical order plus a membership
/// oracle derived from how the space was constructed. Verification is
/// separate (verify_axioms); constructions are optimistic.
class Nilspace : public std::enable_shared_from_this<Nilspace> {
public:
    Nilspace(std::string name, std::vector<Point> points, int step_hint, Provenance prov);

    const std::string& name() const { return name_; }
    const std::vector<Point>& points() const { return points_; }
    int size() const { return static_cast<int>(points_.size()); }
    int step_hint() const { return step_hint_; }
    /// Default check depth: every property is decided by dimensions <= nmax.
    int nmax() const { return step_hint_ + 1; }
    const Provenance& provenance() const { return prov_; }

    PointId index_of(const Point& p) const; // -1 when absent
    PointId require_index(const Point& p) const;

    /// Membership oracle. For n <= step_hint+1 this is the construction's
    /// native rule; above that a map is a cube iff all its (step_hint+1)-face
    /// restrictions are.
    bool is_cube(int n, const CubeVals& vals) const;

    // per-space mutable caches, managed by the free functions below
    struct Caches;
    Caches& caches() const { return *caches_; }

private:
    bool native_is_cube(int n, const CubeVals& vals) const;
    void ensure_quotient_image(int n) const;

    std::string name_;
    std::vector<Point> points_;
    int step_hint_;
    Provenance prov_;
    std::unique_ptr<Caches> caches_;
};

struct Nilspace::Caches {
    std::map<int, std::vector<CubeVals>> cubes;          // sorted
    std::map<int, std::vector<CornerVals>> corners;      // sorted
    std::map<int, std::set<CubeVals>> quotient_image;    // quotient membership
    std::optional<int> step;
    std::map<int, Report> verify;                        // by nmax
    std::map<int, std::pair<SpacePtr, NilMap>> factors;  // by level
    bool top_computed = false;
    std::optional<TopStructure> top;
};

// ---- constructions ----

SpacePtr build_dk(const grp::Group& g, int k, std::string name = "");
SpacePtr build_point(std::string name = "pt");
SpacePtr build_product(const std::vector<SpacePtr>& factors, std::string name = "");
/// Optimistic quotient: cubes are the projections of the base's cubes.
std::pair<SpacePtr, NilMap> build_quotient(const SpacePtr& base, const Partition& p,
                                           std::string name = "");
SpacePtr build_sub(const SpacePtr& ambient, std::vector<PointId> carrier, std::string name = "");
/// Base space with `removed` taken out of the dimension-`dim` cube set.
SpacePtr build_perturbed(const SpacePtr& base, int dim, std::set<CubeVals> removed,
                         std::string name = "");

// ---- queries ----

/// All n-cubes, lexicographically sorted, cached. Backtracking over corner
/// extensions with face pruning; never a raw |X|^(2^n) scan.
const std::vector<CubeVals>& enumerate_cubes(const SpacePtr& s, int n);
/// All n-corners (values off the top vertex), same strategy.
const std::vector<CornerVals>& enumerate_corners(const SpacePtr& s, int n);
/// Is `vals` in the cached cube list? (enumerates on first use)
bool in_cube_set(const SpacePtr& s, int n, const CubeVals& vals);

/// Completions of an n-corner: all x making corner+x an n-cube. Validates the
/// corner first and names the failing face on invalid input.
std::vector<PointId> completions(const SpacePtr& s, int n, const CornerVals& corner);
std::vector<PointId> completions_unchecked(const SpacePtr& s, int n, const CornerVals& corner);

/// Checks the cubespace axioms plus corner completion up to `nmax`
/// (default step_hint+1): nonempty, C^0/C^1 full, cube sets closed under
/// composition with every cube morphism, every corner completes.
Report verify_axioms(const SpacePtr& s, int nmax = -1);
/// Cached verify_axioms that throws InputError when the space is invalid.
void require_verified(const SpacePtr& s);

/// Least k such that every (k+1)-corner completes uniquely.
int step_of(const SpacePtr& s);

/// Canonical factor: quotient by the value-replacement relation at level n
/// together with the projection. factor(s, n) for n >= step is the identity.
std::pair<SpacePtr, NilMap> factor(const SpacePtr& s, int n);

/// Corner-lifting check for `table : X -> Y` over all corners of dimension
/// <= nmax: every completion of the image corner is hit by a completion of
/// the corner. This is one of the two fibration criteria.
Report corner_lift_check(const SpacePtr& x, const SpacePtr& y,
                         const std::vector<PointId>& table, int nmax = -1);

/// Structure data at the space's own step, derived from provenance
/// (degree spaces: the group; products: direct sums; quotients: image of the
/// base group; subspaces: the carrier's stabilizer). Null when the
/// construction does not support derivation.
const std::optional<TopStructure>& top_structure(const SpacePtr& s);

struct StructureGroupResult {
    grp::Group group;
    std::optional<std::vector<std::vector<PointId>>> action; // only at i == step
    Report report;
};
/// Structure group at level i with verification: uniform fiber sizes, free
/// transitive action (top level), cubes preserved under the action, and each
/// fiber isomorphic to the degree-i space of the group.
StructureGroupResult structure_group(const SpacePtr& s, int i);

/// Fiber of a verified fibration over codomain point y, as a subspace.
SpacePtr sub_fiber(const NilMap& psi, PointId y);

/// Cube-structure-preserving bijection between two spaces, if any
/// (backtracking over point signatures).
std::optional<std::vector<PointId>> find_nilspace_isomorphism(const SpacePtr& a,
                                                              const SpacePtr& b);

// small helpers shared across modules
nlohmann::ordered_json cube_json(const SpacePtr& s, const CubeVals& vals);
nlohmann::ordered_json point_json(const SpacePtr& s, PointId p);

} // namespace nilab
