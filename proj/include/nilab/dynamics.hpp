#pragma once

#include "nilab/maps.hpp"
#include "nilab/nilspace.hpp"
#include "nilab/rational.hpp"

namespace nilab::dynamics {

/// A space together with a verified translation acting on it.
struct NilspaceSystem {
    SpacePtr space;
    NilMap trans;
};

/// Requires the translation verdict to be cached and passing.
NilspaceSystem make_system(const SpacePtr& space, const NilMap& trans);

/// psi is consistent with alpha when equal psi-values stay equal after one
/// application of alpha. The first failing pair in scan order is reported,
/// along with the values on both sides. alpha must be a verified translation
/// on the domain of psi.
Report is_consistent(const NilMap& psi, const NilMap& alpha);

struct InducedTranslation {
    std::optional<NilMap> beta;
    Report report;
};

/// The downstairs map beta with beta(psi(x)) = psi(alpha(x)). psi must be a
/// verified fibration and alpha a verified translation on its domain. Fails
/// with a witness when the pair is not consistent, and verifies that beta is
/// itself a translation and that the intertwining identity holds everywhere.
InducedTranslation induced_translation(const NilMap& psi, const NilMap& alpha);

/// For a verified fibration psi, enumerates the full translation group of the
/// domain, induces every element downstairs, and checks that the assignment
/// is a group homomorphism into the translations of the codomain: every
/// composition pair and every intertwining pair is verified.
Report hat_hom_check(const NilMap& psi);

/// Weighted Hamming metric on a product space: coordinates that differ
/// contribute their factor weight.
struct ProductMetric {
    std::vector<Rational> weights;
};

Rational metric_distance(const SpacePtr& product, const ProductMetric& m, PointId x, PointId y);

struct FiberDiameters {
    std::vector<Rational> per_fiber; // indexed by codomain point
    Rational sup;
    Report report;
};

/// Exact diameter of every fiber of psi under the metric, plus the largest.
/// The domain must be a product with one weight per factor and psi must be
/// surjective.
FiberDiameters fiber_diameters(const NilMap& psi, const ProductMetric& m);

/// A system is transitive when the orbit of any point under the translation
/// and its inverse is the whole space.
Report is_transitive(const NilspaceSystem& sys);

} // namespace nilab::dynamics
