#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nilab/report.hpp"

namespace nilab::grp {

/// An element of a direct sum of cyclic groups: one reduced residue per factor.
using Elem = std::vector<int>;

/// Finite abelian group presented as a direct sum of cyclic factors.
/// `orders` empty means the trivial group (one element, the empty tuple).
struct Group {
    std::vector<int> orders;
    std::string name;

    int size() const {
        int n = 1;
        for (int o : orders) n *= o;
        return n;
    }
};

Group make_group(std::vector<int> orders, std::string name = "");
Group trivial_group();
Group direct_sum(const std::vector<Group>& parts, const std::string& name = "");

Elem zero(const Group& g);
Elem add(const Group& g, const Elem& a, const Elem& b);
Elem neg(const Group& g, const Elem& a);
Elem sub(const Group& g, const Elem& a, const Elem& b);

/// All elements in lexicographic order of their coordinate tuples.
std::vector<Elem> enumerate(const Group& g);
/// Position of `e` in enumerate(g) (mixed-radix index).
int index_of(const Group& g, const Elem& e);
Elem elem_at(const Group& g, int index);
int order_of(const Group& g, const Elem& e);

/// Group homomorphism as a full value table over the domain enumeration.
struct Hom {
    Group domain;
    Group codomain;
    std::vector<Elem> table; // table[index_of(domain, x)] = f(x)
};

Hom identity_hom(const Group& g);
Hom zero_hom(const Group& domain, const Group& codomain);

/// Checks totality and f(x+y) = f(x)+f(y) over all pairs. On failure the
/// witness carries the offending pair and both evaluations.
Report is_hom(const Hom& f);

/// Kernel elements in enumeration order. Requires is_hom to pass.
std::vector<Elem> kernel(const Hom& f);

/// A finite abelian group given only by an addition table, e.g. a subgroup or
/// a quotient materialized elsewhere. Elements are indices 0..n-1.
struct AbstractGroup {
    int n = 0;
    int zero = 0;
    std::function<int(int, int)> add;
};

/// Writes an abstract abelian group as a direct sum of prime-power cyclic
/// factors (sorted ascending) together with an explicit correspondence:
/// elem_of[index_of(canonical, e)] = the abstract element representing e.
struct Decomposition {
    Group canonical;
    std::vector<int> elem_of;
};
Decomposition decompose(const AbstractGroup& g);

/// Invariant factors as a sorted multiset of prime powers; equal multisets
/// characterize isomorphic finite abelian groups.
std::vector<int> primary_invariants(const Group& g);

/// Explicit isomorphism table when the groups are isomorphic.
std::optional<Hom> find_isomorphism(const Group& g, const Group& h);

nlohmann::ordered_json elem_json(const Elem& e);

} // namespace nilab::grp
