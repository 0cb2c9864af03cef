#include "nilab/grp.hpp"

#include "nilab/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace nilab::grp {

Group make_group(std::vector<int> orders, std::string name) {
    for (int o : orders)
        if (o < 2) throw InputError("cyclic factor order must be >= 2, got " + std::to_string(o));
    if (name.empty()) {
        if (orders.empty()) name = "1";
        for (size_t i = 0; i < orders.size(); ++i)
            name += (i ? "+Z" : "Z") + std::to_string(orders[i]);
    }
    return Group{std::move(orders), std::move(name)};
}

Group trivial_group() { return make_group({}, "1"); }

Group direct_sum(const std::vector<Group>& parts, const std::string& name) {
    std::vector<int> orders;
    for (const Group& p : parts)
        orders.insert(orders.end(), p.orders.begin(), p.orders.end());
    Group g = make_group(std::move(orders));
    if (!name.empty()) g.name = name;
    return g;
}

static void check_elem(const Group& g, const Elem& e, const char* what) {
    if (e.size() != g.orders.size())
        throw InputError(std::string(what) + ": element arity mismatch for group " + g.name);
    for (size_t i = 0; i < e.size(); ++i)
        if (e[i] < 0 || e[i] >= g.orders[i])
            throw InputError(std::string(what) + ": coordinate out of range for group " + g.name);
}

Elem zero(const Group& g) { return Elem(g.orders.size(), 0); }

Elem add(const Group& g, const Elem& a, const Elem& b) {
    check_elem(g, a, "add");
    check_elem(g, b, "add");
    Elem r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) % g.orders[i];
    return r;
}

Elem neg(const Group& g, const Elem& a) {
    check_elem(g, a, "neg");
    Elem r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = (g.orders[i] - a[i]) % g.orders[i];
    return r;
}

Elem sub(const Group& g, const Elem& a, const Elem& b) { return add(g, a, neg(g, b)); }

std::vector<Elem> enumerate(const Group& g) {
    std::vector<Elem> out;
    out.reserve(g.size());
    Elem cur = zero(g);
    for (;;) {
        out.push_back(cur);
        int i = static_cast<int>(cur.size()) - 1;
        while (i >= 0 && ++cur[i] == g.orders[i]) cur[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

int index_of(const Group& g, const Elem& e) {
    check_elem(g, e, "index_of");
    int idx = 0;
    for (size_t i = 0; i < e.size(); ++i) idx = idx * g.orders[i] + e[i];
    return idx;
}

Elem elem_at(const Group& g, int index) {
    if (index < 0 || index >= g.size()) throw InputError("element index out of range");
    Elem e(g.orders.size());
    for (int i = static_cast<int>(e.size()) - 1; i >= 0; --i) {
        e[i] = index % g.orders[i];
        index /= g.orders[i];
    }
    return e;
}

int order_of(const Group& g, const Elem& e) {
    check_elem(g, e, "order_of");
    int ord = 1;
    for (size_t i = 0; i < e.size(); ++i) {
        int oi = g.orders[i] / std::gcd(g.orders[i], e[i] == 0 ? g.orders[i] : e[i]);
        ord = std::lcm(ord, oi);
    }
    return ord;
}

Hom identity_hom(const Group& g) {
    return Hom{g, g, enumerate(g)};
}

Hom zero_hom(const Group& domain, const Group& codomain) {
    return Hom{domain, codomain, std::vector<Elem>(domain.size(), zero(codomain))};
}

Report is_hom(const Hom& f) {
    Report rep("is_hom");
    if (static_cast<int>(f.table.size()) != f.domain.size())
        throw InputError("hom table is not total: " + std::to_string(f.table.size()) +
                         " entries for a domain of size " + std::to_string(f.domain.size()));
    for (const Elem& v : f.table) check_elem(f.codomain, v, "is_hom");
    const auto elems = enumerate(f.domain);
    const int n = f.domain.size();
    rep.counts["pairs_checked"] = static_cast<std::int64_t>(n) * n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Elem sum = add(f.domain, elems[i], elems[j]);
            Elem lhs = f.table[index_of(f.domain, sum)];
            Elem rhs = add(f.codomain, f.table[i], f.table[j]);
            if (lhs != rhs) {
                rep.witness["x"] = elem_json(elems[i]);
                rep.witness["y"] = elem_json(elems[j]);
                rep.witness["f_of_sum"] = elem_json(lhs);
                rep.witness["sum_of_f"] = elem_json(rhs);
                return rep.fail("additivity fails at the witness pair");
            }
        }
    }
    return rep;
}

std::vector<Elem> kernel(const Hom& f) {
    Report h = is_hom(f);
    if (!h.passed()) throw InputError("kernel requires a homomorphism: " + h.message);
    std::vector<Elem> out;
    const auto elems = enumerate(f.domain);
    const Elem z = zero(f.codomain);
    for (int i = 0; i < f.domain.size(); ++i)
        if (f.table[i] == z) out.push_back(elems[i]);
    return out;
}

// ---- decomposition of abstract abelian groups ----

namespace {

std::vector<int> abstract_orders(const AbstractGroup& g) {
    std::vector<int> ord(g.n);
    for (int x = 0; x < g.n; ++x) {
        int cur = x, k = 1;
        while (cur != g.zero) {
            cur = g.add(cur, x);
            ++k;
            if (k > g.n) throw InternalError("abstract group element order exceeds group size");
        }
        ord[x] = k;
    }
    return ord;
}

/// Multiset of prime-power cyclic orders for the group, from the counting
/// function d_j = #{x : p^j * x = 0}: the exponent partition of the p-part is
/// the conjugate of (log_p d_j - log_p d_{j-1})_j.
std::vector<int> primary_type(int n, const std::vector<int>& ord) {
    std::vector<int> result;
    std::vector<int> primes;
    int m = n;
    for (int p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            primes.push_back(p);
            while (m % p == 0) m /= p;
        }
    if (m > 1) primes.push_back(m);
    for (int p : primes) {
        std::vector<int> mj; // mj[j-1] = #{parts of the partition >= j}
        long long prev = 1;
        for (int j = 1;; ++j) {
            long long pj = 1;
            for (int t = 0; t < j; ++t) pj *= p;
            // count = #{x : ord(x) divides p^j}, i.e. ord(x) is a power of p at most p^j
            long long count = 0;
            for (int o : ord) {
                int oo = o;
                while (oo % p == 0) oo /= p;
                if (oo == 1 && o <= pj) ++count;
            }
            int steps = 0;
            long long c = count / prev;
            while (c > 1) { c /= p; ++steps; }
            mj.push_back(steps);
            if (count == prev) { mj.pop_back(); break; }
            prev = count;
            if (j > 30) throw InternalError("primary type computation ran away");
        }
        // conjugate partition: lambda_i = #{j : mj[j] >= i}
        int maxm = 0;
        for (int v : mj) maxm = std::max(maxm, v);
        for (int i = 1; i <= maxm; ++i) {
            int lam = 0;
            for (int v : mj) lam += (v >= i) ? 1 : 0;
            long long pw = 1;
            for (int t = 0; t < lam; ++t) pw *= p;
            if (lam > 0) result.push_back(static_cast<int>(pw));
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace

std::vector<int> primary_invariants(const Group& g) {
    std::vector<int> result;
    for (int o : g.orders) {
        int m = o;
        for (int p = 2; p * p <= m; ++p) {
            if (m % p == 0) {
                int pw = 1;
                while (m % p == 0) { m /= p; pw *= p; }
                result.push_back(pw);
            }
        }
        if (m > 1) result.push_back(m);
    }
    std::sort(result.begin(), result.end());
    return result;
}

Decomposition decompose(const AbstractGroup& g) {
    if (g.n <= 0) throw InputError("abstract group must be nonempty");
    const auto ord = abstract_orders(g);
    const auto type = primary_type(g.n, ord);

    // pick generators matching the type, largest order first, requiring the
    // running span to stay a direct sum (size multiplies exactly)
    std::vector<int> want(type.rbegin(), type.rend());
    std::vector<int> gens;
    std::set<int> span{g.zero};
    std::function<bool(size_t)> dfs = [&](size_t i) -> bool {
        if (i == want.size()) return true;
        for (int x = 0; x < g.n; ++x) {
            if (ord[x] != want[i]) continue;
            std::set<int> next(span);
            int cur = x;
            bool direct = true;
            std::vector<int> added;
            for (int k = 1; k < want[i]; ++k) {
                for (int s : span) {
                    int v = g.add(s, cur);
                    if (!next.insert(v).second) { direct = false; break; }
                }
                if (!direct) break;
                cur = g.add(cur, x);
            }
            if (!direct) continue;
            std::swap(span, next);
            gens.push_back(x);
            if (dfs(i + 1)) return true;
            gens.pop_back();
            std::swap(span, next);
        }
        return false;
    };
    if (!dfs(0)) throw InternalError("no cyclic decomposition found; group not abelian?");

    // canonical factor order is ascending, so reverse the generator list
    std::reverse(gens.begin(), gens.end());
    std::vector<int> orders(want.rbegin(), want.rend());
    Group canonical = orders.empty() ? trivial_group() : make_group(orders);

    Decomposition dec;
    dec.canonical = canonical;
    dec.elem_of.assign(canonical.size(), g.zero);
    for (int idx = 0; idx < canonical.size(); ++idx) {
        Elem e = elem_at(canonical, idx);
        int v = g.zero;
        for (size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) v = g.add(v, gens[i]);
        dec.elem_of[idx] = v;
    }
    // sanity: the correspondence must be bijective
    std::set<int> seen(dec.elem_of.begin(), dec.elem_of.end());
    if (static_cast<int>(seen.size()) != g.n)
        throw InternalError("cyclic decomposition correspondence is not bijective");
    return dec;
}

std::optional<Hom> find_isomorphism(const Group& g, const Group& h) {
    if (primary_invariants(g) != primary_invariants(h)) return std::nullopt;
    // route both through their canonical primary decompositions
    auto as_abstract = [](const Group& grp_) {
        AbstractGroup a;
        a.n = grp_.size();
        a.zero = 0;
        a.add = [grp_](int x, int y) {
            return index_of(grp_, add(grp_, elem_at(grp_, x), elem_at(grp_, y)));
        };
        return a;
    };
    Decomposition dg = decompose(as_abstract(g));
    Decomposition dh = decompose(as_abstract(h));
    if (dg.canonical.orders != dh.canonical.orders) return std::nullopt;

    // g -> canonical index -> h
    std::vector<int> canon_of_g(g.size(), -1);
    for (int c = 0; c < dg.canonical.size(); ++c) canon_of_g[dg.elem_of[c]] = c;
    Hom iso;
    iso.domain = g;
    iso.codomain = h;
    iso.table.resize(g.size());
    for (int x = 0; x < g.size(); ++x)
        iso.table[x] = elem_at(h, dh.elem_of[canon_of_g[x]]);
    Report check = is_hom(iso);
    if (!check.passed()) throw InternalError("constructed group isomorphism fails is_hom");
    return iso;
}

nlohmann::ordered_json elem_json(const Elem& e) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (int c : e) j.push_back(c);
    return j;
}

} // namespace nilab::grp
