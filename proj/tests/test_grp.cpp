#include <doctest.h>

#include <algorithm>

#include "nilab/grp.hpp"

using namespace nilab;
using namespace nilab::grp;

TEST_CASE("group arithmetic and enumeration") {
    Group z6 = make_group({2, 3}, "z2xz3");
    CHECK(z6.size() == 6);
    auto elems = enumerate(z6);
    REQUIRE(elems.size() == 6);
    CHECK(elems.front() == Elem{0, 0});
    CHECK(elems.back() == Elem{1, 2});
    for (int i = 0; i < 6; ++i) CHECK(index_of(z6, elems[i]) == i);

    CHECK(add(z6, {1, 2}, {1, 2}) == Elem{0, 1});
    CHECK(neg(z6, {1, 1}) == Elem{1, 2});
    CHECK(sub(z6, {0, 0}, {1, 2}) == Elem{1, 1});
    CHECK(order_of(z6, {1, 1}) == 6);
    CHECK(order_of(z6, {0, 1}) == 3);
    CHECK(order_of(z6, zero(z6)) == 1);

    Group t = trivial_group();
    CHECK(t.size() == 1);
    CHECK(enumerate(t) == std::vector<Elem>{Elem{}});
}

TEST_CASE("homomorphism check and kernel") {
    Group z4 = make_group({4});
    Group z2 = make_group({2});

    Hom red{z4, z2, {}};
    for (int i = 0; i < 4; ++i) red.table.push_back({i % 2});
    CHECK(is_hom(red).passed());
    auto ker = kernel(red);
    REQUIRE(ker.size() == 2);
    CHECK(ker[0] == Elem{0});
    CHECK(ker[1] == Elem{2});

    Hom broken = red;
    broken.table[3] = {0}; // 3 = 1+2 now maps to 0 while images add to 1
    Report r = is_hom(broken);
    CHECK(r.failed());
    CHECK(!r.witness.empty());

    CHECK(is_hom(identity_hom(z4)).passed());
    CHECK(kernel(zero_hom(z4, z2)).size() == 4);
}

TEST_CASE("decomposition recovers cyclic structure from an addition table") {
    // Z6 given only as a table
    AbstractGroup a;
    a.n = 6;
    a.zero = 0;
    a.add = [](int x, int y) { return (x + y) % 6; };
    Decomposition d = decompose(a);
    CHECK(primary_invariants(d.canonical) == std::vector<int>{2, 3});
    // the correspondence maps the canonical zero to the abstract zero
    CHECK(d.elem_of[index_of(d.canonical, zero(d.canonical))] == 0);

    // Klein four group as XOR on {0..3}
    AbstractGroup v4;
    v4.n = 4;
    v4.zero = 0;
    v4.add = [](int x, int y) { return x ^ y; };
    CHECK(primary_invariants(decompose(v4).canonical) == std::vector<int>{2, 2});
}

TEST_CASE("isomorphism classification") {
    Group z4 = make_group({4});
    Group z22 = make_group({2, 2});
    Group z6 = make_group({6});
    Group z23 = make_group({2, 3});

    CHECK(!find_isomorphism(z4, z22).has_value());
    auto iso = find_isomorphism(z6, z23);
    REQUIRE(iso.has_value());
    CHECK(is_hom(*iso).passed());
    // bijective: every codomain element hit exactly once
    std::vector<Elem> images = iso->table;
    std::sort(images.begin(), images.end());
    CHECK(std::adjacent_find(images.begin(), images.end()) == images.end());

    CHECK(primary_invariants(z6) == primary_invariants(z23));
    CHECK(primary_invariants(z4) != primary_invariants(z22));
}
