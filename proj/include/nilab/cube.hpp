#pragma once

#include <cstdint>
#include <vector>

#include "nilab/grp.hpp"

namespace nilab::cube {

/// Vertices of {0,1}^n are bitmasks 0..2^n-1, bit i = coordinate i.
using Vertex = unsigned;

inline int weight(Vertex v) { return __builtin_popcount(v); }

/// A morphism {0,1}^m -> {0,1}^n: every output coordinate is a constant, a
/// source coordinate, or a negated source coordinate (the restrictions of
/// affine maps Z^m -> Z^n that preserve the cube).
struct Morphism {
    enum Kind : std::uint8_t { Const0, Const1, Coord, NegCoord };
    struct Out {
        Kind kind;
        int idx; // source coordinate for Coord / NegCoord
    };

    int src_dim = 0;
    int dst_dim = 0;
    std::vector<Out> out; // one entry per output coordinate

    Vertex apply(Vertex v) const;
    bool injective() const;

    /// this after g: {0,1}^l -g-> {0,1}^m -this-> {0,1}^n.
    Morphism compose(const Morphism& g) const;
};

/// All morphisms {0,1}^m -> {0,1}^n in a fixed deterministic order
/// ((2+2m)^n of them).
std::vector<Morphism> all_morphisms(int m, int n);

/// Injective morphisms {0,1}^m -> {0,1}^n whose output coordinates are
/// constants plus each source coordinate exactly once, never negated: the
/// m-dimensional faces of {0,1}^n, counted once per coordinate order.
/// Requires m <= n. For m = n this is the n! coordinate permutations.
std::vector<Morphism> face_maps(int m, int n);

/// Composes a value table with a morphism: result[v] = q[phi(v)].
template <typename T>
std::vector<T> restrict_map(const std::vector<T>& q, const Morphism& phi) {
    std::vector<T> out(static_cast<size_t>(1) << phi.src_dim);
    for (Vertex v = 0; v < out.size(); ++v) out[v] = q[phi.apply(v)];
    return out;
}

/// Alternating Gray-code sum: sum over vertices of (-1)^{weight(v)} q(v).
/// For n = 2 this is q(00) - q(01) - q(10) + q(11).
grp::Elem sigma(const grp::Group& g, const std::vector<grp::Elem>& values);

} // namespace nilab::cube
