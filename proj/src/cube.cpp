#include "nilab/cube.hpp"

#include "nilab/errors.hpp"

namespace nilab::cube {

Vertex Morphism::apply(Vertex v) const {
    Vertex r = 0;
    for (int j = 0; j < dst_dim; ++j) {
        const Out& o = out[j];
        unsigned bit;
        switch (o.kind) {
        case Const0: bit = 0; break;
        case Const1: bit = 1; break;
        case Coord: bit = (v >> o.idx) & 1u; break;
        default: bit = ((v >> o.idx) & 1u) ^ 1u; break;
        }
        r |= bit << j;
    }
    return r;
}

bool Morphism::injective() const {
    std::vector<bool> seen(static_cast<size_t>(1) << dst_dim, false);
    for (Vertex v = 0; v < (1u << src_dim); ++v) {
        Vertex w = apply(v);
        if (seen[w]) return false;
        seen[w] = true;
    }
    return true;
}

Morphism Morphism::compose(const Morphism& g) const {
    if (g.dst_dim != src_dim)
        throw InputError("morphism composition dimension mismatch");
    Morphism r;
    r.src_dim = g.src_dim;
    r.dst_dim = dst_dim;
    r.out.resize(dst_dim);
    for (int j = 0; j < dst_dim; ++j) {
        const Out& o = out[j];
        if (o.kind == Const0 || o.kind == Const1) {
            r.out[j] = o;
            continue;
        }
        Out inner = g.out[o.idx];
        if (o.kind == NegCoord) {
            // negate the inner expression
            switch (inner.kind) {
            case Const0: inner.kind = Const1; break;
            case Const1: inner.kind = Const0; break;
            case Coord: inner.kind = NegCoord; break;
            default: inner.kind = Coord; break;
            }
        }
        r.out[j] = inner;
    }
    return r;
}

std::vector<Morphism> all_morphisms(int m, int n) {
    if (m < 0 || n < 0) throw InputError("morphism dimensions must be nonnegative");
    // per output coordinate: Const0, Const1, Coord(0..m-1), NegCoord(0..m-1)
    const int choices = 2 + 2 * m;
    std::vector<Morphism> result;
    std::vector<int> pick(n, 0);
    for (;;) {
        Morphism phi;
        phi.src_dim = m;
        phi.dst_dim = n;
        phi.out.resize(n);
        for (int j = 0; j < n; ++j) {
            int c = pick[j];
            if (c == 0) phi.out[j] = {Morphism::Const0, 0};
            else if (c == 1) phi.out[j] = {Morphism::Const1, 0};
            else if (c < 2 + m) phi.out[j] = {Morphism::Coord, c - 2};
            else phi.out[j] = {Morphism::NegCoord, c - 2 - m};
        }
        result.push_back(std::move(phi));
        int i = n - 1;
        while (i >= 0 && ++pick[i] == choices) pick[i--] = 0;
        if (i < 0) break;
    }
    return result;
}

std::vector<Morphism> face_maps(int m, int n) {
    if (m < 0 || n < 0 || m > n)
        throw InputError("face_maps requires 0 <= m <= n, got m=" + std::to_string(m) +
                         " n=" + std::to_string(n));
    std::vector<Morphism> result;
    // entry codes per output: 0 = Const0, 1 = Const1, 2+i = Coord(i);
    // keep assignments where every source coordinate appears exactly once
    std::vector<int> pick(n, 0);
    const int choices = 2 + m;
    for (;;) {
        std::vector<int> used(m, 0);
        bool ok = true;
        for (int j = 0; j < n && ok; ++j)
            if (pick[j] >= 2 && ++used[pick[j] - 2] > 1) ok = false;
        if (ok)
            for (int i = 0; i < m; ++i)
                if (used[i] != 1) { ok = false; break; }
        if (ok) {
            Morphism phi;
            phi.src_dim = m;
            phi.dst_dim = n;
            phi.out.resize(n);
            for (int j = 0; j < n; ++j) {
                if (pick[j] == 0) phi.out[j] = {Morphism::Const0, 0};
                else if (pick[j] == 1) phi.out[j] = {Morphism::Const1, 0};
                else phi.out[j] = {Morphism::Coord, pick[j] - 2};
            }
            result.push_back(std::move(phi));
        }
        int i = n - 1;
        while (i >= 0 && ++pick[i] == choices) pick[i--] = 0;
        if (i < 0) break;
    }
    return result;
}

grp::Elem sigma(const grp::Group& g, const std::vector<grp::Elem>& values) {
    if (values.empty() || (values.size() & (values.size() - 1)) != 0)
        throw InputError("sigma needs 2^n values");
    grp::Elem acc = grp::zero(g);
    for (Vertex v = 0; v < values.size(); ++v) {
        if (weight(v) % 2 == 0)
            acc = grp::add(g, acc, values[v]);
        else
            acc = grp::sub(g, acc, values[v]);
    }
    return acc;
}

} // namespace nilab::cube
