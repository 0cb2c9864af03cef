#pragma once

#include "nilab/grp.hpp"
#include "nilab/nilspace.hpp"

namespace nilab::maps {

/// Maps are full value tables between fixed spaces. Spaces are compared by
/// identity: two maps compose only when the inner codomain is the very same
/// space object as the outer domain.

NilMap make_map(std::string name, SpacePtr domain, SpacePtr codomain,
                std::vector<PointId> table);
NilMap identity_map(const SpacePtr& s);
NilMap constant_map(const SpacePtr& domain, const SpacePtr& codomain, PointId value);

/// outer after inner.
NilMap compose(const NilMap& outer, const NilMap& inner, std::string name = "");

/// Componentwise map between product spaces: codomain factor j receives
/// components[j] applied to domain factor from[j]. Factors may be reused.
/// The result carries its componentwise structure, which the checks below
/// exploit when full cube sets are too large to enumerate.
NilMap product_map(const SpacePtr& domain, const SpacePtr& codomain, std::vector<int> from,
                   std::vector<NilMap> components, std::string name = "");

/// x maps to the tuple (parts[0](x), ..., parts[m-1](x)). All parts share one
/// domain; the codomain must be the product of their codomains in order.
NilMap bundle_map(const std::vector<NilMap>& parts, const SpacePtr& codomain,
                  std::string name = "");

/// Fibers of f as a partition of the domain.
Partition partition_of(const NilMap& f);

/// True when every fiber of `fine` lies inside a fiber of `coarse`, i.e.
/// coarse factors through fine. Both maps must share their domain space.
bool refines(const NilMap& fine, const NilMap& coarse);

/// Checks that every cube of the domain maps to a cube of the codomain, over
/// all dimensions where either side has genuine constraints. The verdict is
/// cached on the map.
Report is_morphism(const NilMap& f);

/// Checks the fibration property along two independent routes and requires
/// the verdicts to agree: (a) every completion of the image of a corner lifts
/// to a completion of the corner, (b) at every level the map sends value
/// replacement classes onto value replacement classes. The verdict is cached
/// on the map.
Report is_fibration(const NilMap& f);

/// Checks the translation property: the map is a bijection of the space and
/// applying it along any coordinate half-space of a top-dimension cube yields
/// a cube. extra_levels extends the check that many dimensions higher.
/// The verdict is cached on the map.
Report is_translation(const NilMap& f, int extra_levels = 0);

struct TranGroupResult {
    std::vector<std::vector<PointId>> elements; // image tables, identity first
    bool abelian = true;
    Report report;
};

/// Enumerates the full translation group by searching the automorphisms of
/// the space and filtering by the translation test, then verifies closure,
/// identity and inverses. Supported up to 20 points.
TranGroupResult tran_group(const SpacePtr& s);

/// The map induced on the level-n factor spaces. Errors if the table does not
/// descend, which cannot happen for a morphism.
NilMap induced_factor_map(const NilMap& f, int n, std::string name = "");

struct StructureMorphismResult {
    grp::Hom hom;
    Report report;
};

/// The homomorphism induced by a verified fibration between the top structure
/// groups of its domain and codomain. Only the level equal to the domain step
/// is supported. The defining identity psi(z.x) = h(z).psi(x) is verified for
/// every pair (z, x); the choice of base point is immaterial and this is
/// checked rather than assumed.
StructureMorphismResult structure_morphism(const NilMap& psi, int level);

nlohmann::ordered_json map_json(const NilMap& f);

} // namespace nilab::maps
