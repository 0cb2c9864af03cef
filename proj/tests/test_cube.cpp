#include <doctest.h>

#include <set>

#include "nilab/cube.hpp"

using namespace nilab;
using namespace nilab::cube;

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e--) r *= b;
    return r;
}

} // namespace

TEST_CASE("discrete cube morphism counts and composition") {
    for (int m = 0; m <= 2; ++m)
        for (int n = 0; n <= 3; ++n)
            CHECK(all_morphisms(m, n).size() == static_cast<size_t>(ipow(2 + 2 * m, n)));

    auto fs = all_morphisms(2, 2);
    auto gs = all_morphisms(1, 2);
    // spot check composition against pointwise application on a sample
    for (size_t i = 0; i < fs.size(); i += 7)
        for (size_t j = 0; j < gs.size(); j += 3) {
            Morphism c = fs[i].compose(gs[j]);
            for (Vertex v = 0; v < 2; ++v) CHECK(c.apply(v) == fs[i].apply(gs[j].apply(v)));
        }
}

TEST_CASE("morphisms are pairwise distinct as vertex maps of their shape") {
    // distinct descriptions can agree pointwise only across source dims
    auto ms = all_morphisms(2, 2);
    std::set<std::vector<Vertex>> tables;
    for (const auto& m : ms) {
        std::vector<Vertex> t;
        for (Vertex v = 0; v < 4; ++v) t.push_back(m.apply(v));
        tables.insert(t);
    }
    CHECK(tables.size() == ms.size());
}

TEST_CASE("face maps are the injective coordinate embeddings") {
    // m = n: coordinate permutations
    CHECK(face_maps(2, 2).size() == 2);
    CHECK(face_maps(3, 3).size() == 6);
    // n choose m orderings times 2^(n-m) positions
    CHECK(face_maps(1, 2).size() == 4);
    CHECK(face_maps(2, 3).size() == 12);
    CHECK(face_maps(0, 2).size() == 4);
    for (const auto& f : face_maps(2, 3)) {
        CHECK(f.injective());
        std::set<Vertex> img;
        for (Vertex v = 0; v < 4; ++v) img.insert(f.apply(v));
        CHECK(img.size() == 4);
    }
}

TEST_CASE("restriction composes value tables") {
    std::vector<int> q{10, 11, 12, 13}; // values on {0,1}^2
    auto faces = face_maps(1, 2);
    for (const auto& f : faces) {
        auto r = restrict_map(q, f);
        REQUIRE(r.size() == 2);
        CHECK(r[0] == q[f.apply(0)]);
        CHECK(r[1] == q[f.apply(1)]);
    }
}

TEST_CASE("alternating sum") {
    grp::Group z4 = grp::make_group({4});
    // n = 2: q(00) - q(01) - q(10) + q(11)
    std::vector<grp::Elem> q{{1}, {2}, {3}, {0}};
    CHECK(sigma(z4, q) == grp::Elem{0});
    std::vector<grp::Elem> r{{1}, {0}, {0}, {0}};
    CHECK(sigma(z4, r) == grp::Elem{1});
    std::vector<grp::Elem> s{{0}, {1}, {0}, {0}};
    CHECK(sigma(z4, s) == grp::Elem{3});

    grp::Group z2 = grp::make_group({2});
    // over Z2 the alternating sum is plain XOR
    std::vector<grp::Elem> t{{1}, {1}, {0}, {1}};
    CHECK(sigma(z2, t) == grp::Elem{1});
}
