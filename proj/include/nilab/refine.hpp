#pragma once

#include "nilab/grp.hpp"
#include "nilab/maps.hpp"
#include "nilab/nilspace.hpp"

namespace nilab::refine {

struct FiberProductResult {
    SpacePtr space;    // {(y, w) : f(y) = g(w)} inside the product of the domains
    NilMap proj_left;  // onto the domain of f
    NilMap proj_right; // onto the domain of g
    Report report;     // axioms of the subspace plus both projection fibrations
};

/// Fiber product of two verified fibrations with one codomain. The resulting
/// space is verified from scratch and both projections are checked to be
/// fibrations; nothing is assumed from the construction.
FiberProductResult fiber_product(const NilMap& f, const NilMap& g, std::string name = "");

struct CoarsestFactorResult {
    SpacePtr space;  // quotient of the domain
    NilMap proj;     // the coarsest fibration through which the map factors
    NilMap induced;  // the remaining map, a morphism
    Report report;
};

/// The coarsest fibration psi on the domain of m such that m = induced . psi
/// with induced a morphism. Up to 8 points every admissible partition is
/// tried, coarsest first, so the result is optimal; beyond that cells are
/// merged greedily and the report says so. The identity partition always
/// works, so the search terminates.
CoarsestFactorResult coarsest_fibration_factor(const NilMap& m);

struct CommonRefinementResult {
    SpacePtr space;              // Q
    NilMap proj;                 // X -> Q, a fibration refining every input
    std::vector<NilMap> induced; // induced[i] . proj == input[i]
    Report report;
};

/// Coarsest common fibration refinement of finitely many maps with one
/// domain.
CommonRefinementResult common_refinement(const std::vector<NilMap>& fs, std::string name = "");

struct DeltaFibrationResult {
    SpacePtr space; // Q, the fiber product of Y and W over the level-(k-1) factor of Y
    NilMap psi;     // X -> Q, of x it is the pair (psi1(x), psi2(x))
    NilMap proj_y;  // Q -> Y
    NilMap proj_w;  // Q -> W
    Report report;  // the five claims below
};

/// Assembly step for consistent refinements. Inputs: fibrations psi1: X -> Y,
/// psi2: X -> W with psi2 factoring through the level-(k-1) factor of X, and
/// psi3: W -> Y_(k-1) commuting with them, where k is the step of X and the
/// codomain of psi3 is the cached level-(k-1) factor space of Y itself.
/// Verifies five claims: the joint map covers the whole fiber product; it is
/// a fibration; it induces the same level-(k-1) data as psi2; the level-(k-1)
/// factor of Q corresponds to W by an explicit isomorphism; and the top
/// structure groups of Q and Y match by an explicit homomorphism read off
/// from the actions.
DeltaFibrationResult delta_fibration(const NilMap& psi1, const NilMap& psi2,
                                     const NilMap& psi3, std::string name = "");

struct KerWitnessResult {
    grp::Elem z;
    int z_index = -1; // -1 when the points are not related at all
    Report report;
};

/// For a verified fibration psi and a finer map r, two points with equal psi
/// value and equal level-(k-1) data of r are related by an element of the
/// kernel of the induced structure homomorphism: the first such element in
/// enumeration order moving y into the r-fiber of x is returned. Points not
/// related in that sense are a pass with no witness (z_index -1).
KerWitnessResult ker_witness(const NilMap& psi, const NilMap& r, PointId x, PointId y);

struct Factorization {
    NilMap psi; // refinement of the input, consistent with every given translation
    NilMap p;   // p . psi == input
    Report report;
};

/// Consistent refinement: given a fibration psi_prime and translations h on
/// its domain, produces a fibration psi refining psi_prime that is consistent
/// with every member of h, together with the connecting map. Works down the
/// factor levels recursively and assembles the answer with delta_fibration.
Factorization h_consistent_refinement(const NilMap& psi_prime, const std::vector<NilMap>& h);

struct Tower {
    std::vector<NilMap> psis;                  // one consistent fibration per stage
    std::vector<std::vector<NilMap>> connect;  // connect[i][j] . psis[i] == psis[j], j <= i
    Report report;
};

/// Builds a tower of consistent refinements over the given rough factor maps:
/// stage i refines both the previous stage and rough[i], stays consistent
/// with every translation in h, and all connecting maps compose correctly.
Tower consistent_tower(const std::vector<NilMap>& rough, const std::vector<NilMap>& h);

} // namespace nilab::refine
