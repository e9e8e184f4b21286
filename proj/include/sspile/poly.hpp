#pragma once

// Dense univariate polynomials over a field context, with division, gcd,
// modular exponentiation, squarefree/distinct-degree/equal-degree
// factorization (Cantor-Zassenhaus, odd characteristic), and the degree-m
// tower extension context built on an irreducible modulus.

#include <map>

#include "fields.hpp"

namespace sspile {

template <class C>
struct Poly {
  using E = typename C::Elem;
  std::vector<E> c;  // c[i] is the coefficient of x^i, trailing zeros trimmed

  int deg() const { return (int)c.size() - 1; }
  bool is_zero() const { return c.empty(); }
};

template <class C>
void poly_trim(const C& K, Poly<C>& f) {
  while (!f.c.empty() && K.is_zero(f.c.back())) f.c.pop_back();
}

template <class C>
Poly<C> poly_from(const C& K, std::vector<typename C::Elem> cs) {
  Poly<C> f{std::move(cs)};
  poly_trim(K, f);
  return f;
}

template <class C>
Poly<C> poly_const(const C& K, const typename C::Elem& v) {
  Poly<C> f;
  if (!K.is_zero(v)) f.c.push_back(v);
  return f;
}

template <class C>
Poly<C> poly_x(const C& K) {
  return Poly<C>{{K.zero(), K.one()}};
}

template <class C>
Poly<C> poly_add(const C& K, const Poly<C>& f, const Poly<C>& g) {
  Poly<C> r;
  r.c.resize(std::max(f.c.size(), g.c.size()), K.zero());
  for (std::size_t i = 0; i < f.c.size(); ++i) r.c[i] = f.c[i];
  for (std::size_t i = 0; i < g.c.size(); ++i) r.c[i] = K.add(r.c[i], g.c[i]);
  poly_trim(K, r);
  return r;
}

template <class C>
Poly<C> poly_sub(const C& K, const Poly<C>& f, const Poly<C>& g) {
  Poly<C> r;
  r.c.resize(std::max(f.c.size(), g.c.size()), K.zero());
  for (std::size_t i = 0; i < f.c.size(); ++i) r.c[i] = f.c[i];
  for (std::size_t i = 0; i < g.c.size(); ++i) r.c[i] = K.sub(r.c[i], g.c[i]);
  poly_trim(K, r);
  return r;
}

template <class C>
Poly<C> poly_mul(const C& K, const Poly<C>& f, const Poly<C>& g) {
  if (f.is_zero() || g.is_zero()) return {};
  Poly<C> r;
  r.c.assign(f.c.size() + g.c.size() - 1, K.zero());
  for (std::size_t i = 0; i < f.c.size(); ++i) {
    if (K.is_zero(f.c[i])) continue;
    for (std::size_t j = 0; j < g.c.size(); ++j)
      r.c[i + j] = K.add(r.c[i + j], K.mul(f.c[i], g.c[j]));
  }
  poly_trim(K, r);
  return r;
}

template <class C>
Poly<C> poly_scale(const C& K, const Poly<C>& f, const typename C::Elem& v) {
  Poly<C> r = f;
  for (auto& x : r.c) x = K.mul(x, v);
  poly_trim(K, r);
  return r;
}

template <class C>
std::pair<Poly<C>, Poly<C>> poly_divmod(const C& K, const Poly<C>& f, const Poly<C>& g) {
  if (g.is_zero()) throw std::domain_error("division by zero polynomial");
  Poly<C> q, r = f;
  if (f.deg() < g.deg()) return {q, r};
  q.c.assign(f.deg() - g.deg() + 1, K.zero());
  auto lg = K.inv(g.c.back());
  while (!r.is_zero() && r.deg() >= g.deg()) {
    int k = r.deg() - g.deg();
    auto coef = K.mul(r.c.back(), lg);
    q.c[k] = coef;
    for (int i = 0; i <= g.deg(); ++i)
      r.c[i + k] = K.sub(r.c[i + k], K.mul(coef, g.c[i]));
    poly_trim(K, r);
  }
  poly_trim(K, q);
  return {q, r};
}

template <class C>
Poly<C> poly_mod(const C& K, const Poly<C>& f, const Poly<C>& g) {
  return poly_divmod(K, f, g).second;
}

template <class C>
Poly<C> poly_monic(const C& K, const Poly<C>& f) {
  if (f.is_zero()) return f;
  return poly_scale(K, f, K.inv(f.c.back()));
}

template <class C>
Poly<C> poly_gcd(const C& K, Poly<C> a, Poly<C> b) {
  while (!b.is_zero()) {
    auto r = poly_mod(K, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(K, a);
}

// g, u with u*a = g (mod m), g = gcd(a, m).
template <class C>
std::pair<Poly<C>, Poly<C>> poly_half_extgcd(const C& K, Poly<C> a, Poly<C> m) {
  Poly<C> u0 = poly_const(K, K.one()), u1;
  Poly<C> r0 = std::move(a), r1 = std::move(m);
  while (!r1.is_zero()) {
    auto [q, r] = poly_divmod(K, r0, r1);
    Poly<C> u2 = poly_sub(K, u0, poly_mul(K, q, u1));
    r0 = std::move(r1);
    r1 = std::move(r);
    u0 = std::move(u1);
    u1 = std::move(u2);
  }
  if (r0.is_zero()) return {r0, u0};
  auto lc = K.inv(r0.c.back());
  return {poly_scale(K, r0, lc), poly_scale(K, u0, lc)};
}

template <class C>
Poly<C> poly_invmod(const C& K, const Poly<C>& a, const Poly<C>& m) {
  auto [g, u] = poly_half_extgcd(K, poly_mod(K, a, m), m);
  if (g.deg() != 0) throw std::domain_error("polynomial not invertible modulo m");
  return poly_mod(K, u, m);
}

template <class C>
Poly<C> poly_powmod(const C& K, Poly<C> b, BigInt e, const Poly<C>& m) {
  Poly<C> r = poly_const(K, K.one());
  b = poly_mod(K, b, m);
  while (e > 0) {
    if (boost::multiprecision::bit_test(e, 0)) r = poly_mod(K, poly_mul(K, r, b), m);
    b = poly_mod(K, poly_mul(K, b, b), m);
    e >>= 1;
  }
  return r;
}

template <class C>
Poly<C> poly_derivative(const C& K, const Poly<C>& f) {
  Poly<C> r;
  for (int i = 1; i <= f.deg(); ++i)
    r.c.push_back(K.mul(f.c[i], K.from_int(i)));
  poly_trim(K, r);
  return r;
}

template <class C>
typename C::Elem poly_eval(const C& K, const Poly<C>& f, const typename C::Elem& x) {
  auto r = K.zero();
  for (int i = f.deg(); i >= 0; --i) r = K.add(K.mul(r, x), f.c[i]);
  return r;
}

template <class C>
bool poly_eq(const C& K, const Poly<C>& f, const Poly<C>& g) {
  if (f.c.size() != g.c.size()) return false;
  for (std::size_t i = 0; i < f.c.size(); ++i)
    if (!K.eq(f.c[i], g.c[i])) return false;
  return true;
}

// Strict total order on polynomials: by degree, then coefficient
// representatives from the leading coefficient down. Used to sort
// factorizations canonically.
template <class C>
bool poly_less(const C& K, const Poly<C>& f, const Poly<C>& g) {
  if (f.deg() != g.deg()) return f.deg() < g.deg();
  for (int i = f.deg(); i >= 0; --i) {
    auto a = K.sort_key(f.c[i]), b = K.sort_key(g.c[i]);
    if (a != b) return a < b;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Factorization over a finite field of odd characteristic.
// ---------------------------------------------------------------------------

template <class C>
Poly<C> random_poly_below(const C& K, int deg_bound, Rng& rng) {
  Poly<C> f;
  f.c.reserve(deg_bound);
  for (int i = 0; i < deg_bound; ++i) f.c.push_back(random_elem(K, rng));
  poly_trim(K, f);
  return f;
}

// Squarefree part decomposition: returns (g, multiplicity) with f monic
// = prod g_i^{m_i} and the g_i squarefree and pairwise coprime.
template <class C>
std::vector<std::pair<Poly<C>, int>> poly_squarefree_decomp(const C& K, Poly<C> f) {
  std::vector<std::pair<Poly<C>, int>> out;
  f = poly_monic(K, f);
  u64 p = K.char_p();
  int pe = 1;  // current p-power multiplier from p-th root descents
  while (f.deg() > 0) {
    Poly<C> d = poly_derivative(K, f);
    if (d.is_zero()) {
      // f = g(x^p); take the p-th root coefficientwise.
      Poly<C> g;
      BigInt root_exp = K.size() / p;  // a^(size/p) is the p-th root
      for (int i = 0; i <= f.deg(); i += (int)p)
        g.c.push_back(K.pow(f.c[i], root_exp));
      poly_trim(K, g);
      f = g;
      pe *= (int)p;
      continue;
    }
    Poly<C> c = poly_gcd(K, f, d);
    Poly<C> w = poly_divmod(K, f, c).first;  // product of squarefree factors
    int m = 1;
    while (w.deg() > 0) {
      Poly<C> y = poly_gcd(K, w, c);
      Poly<C> z = poly_divmod(K, w, y).first;  // factors of exact multiplicity m
      if (z.deg() > 0) out.push_back({z, m * pe});
      c = poly_divmod(K, c, y).first;
      w = y;
      ++m;
    }
    f = c;
  }
  return out;
}

// Distinct-degree: splits a squarefree monic f into (product, degree) pairs.
template <class C>
std::vector<std::pair<Poly<C>, int>> poly_distinct_degree(const C& K, Poly<C> f) {
  std::vector<std::pair<Poly<C>, int>> out;
  BigInt qsize = K.size();
  Poly<C> h = poly_mod(K, poly_x(K), f);
  int d = 0;
  while (f.deg() > 2 * (d + 1) - 1 && f.deg() > 0) {
    ++d;
    h = poly_powmod(K, h, qsize, f);
    Poly<C> g = poly_gcd(K, poly_sub(K, h, poly_x(K)), f);
    if (g.deg() > 0) {
      out.push_back({g, d});
      f = poly_divmod(K, f, g).first;
      h = poly_mod(K, h, f);
    }
  }
  if (f.deg() > 0) out.push_back({f, f.deg()});
  return out;
}

// Equal-degree splitting of a monic squarefree product of degree-d
// irreducibles (Cantor-Zassenhaus, odd characteristic).
template <class C>
void poly_equal_degree(const C& K, const Poly<C>& f, int d, Rng& rng,
                       std::vector<Poly<C>>& out) {
  if (f.deg() == d) {
    out.push_back(poly_monic(K, f));
    return;
  }
  BigInt e = (bigpow(K.size(), (unsigned)d) - 1) / 2;
  for (;;) {
    Poly<C> u = random_poly_below(K, f.deg(), rng);
    if (u.deg() < 1) continue;
    Poly<C> w = poly_powmod(K, u, e, f);
    w = poly_sub(K, w, poly_const(K, K.one()));
    Poly<C> g = poly_gcd(K, w, f);
    if (g.deg() > 0 && g.deg() < f.deg()) {
      poly_equal_degree(K, g, d, rng, out);
      poly_equal_degree(K, poly_divmod(K, f, g).first, d, rng, out);
      return;
    }
  }
}

// Full factorization, canonically sorted: (irreducible monic factor,
// multiplicity) by (degree, coefficient representatives). The leading unit
// is returned separately by reference when wanted.
template <class C>
std::vector<std::pair<Poly<C>, int>> poly_factor(const C& K, const Poly<C>& f,
                                                 typename C::Elem* lead = nullptr) {
  if (f.is_zero()) throw std::domain_error("factoring the zero polynomial");
  if (lead) *lead = f.c.back();
  std::vector<std::pair<Poly<C>, int>> out;
  if (f.deg() == 0) return out;
  Rng rng(0x9e3779b9u ^ (u64)f.deg());
  for (auto& [sf, mult] : poly_squarefree_decomp(K, f)) {
    for (auto& [prod, d] : poly_distinct_degree(K, sf)) {
      std::vector<Poly<C>> irr;
      poly_equal_degree(K, prod, d, rng, irr);
      for (auto& g : irr) out.push_back({g, mult});
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    return poly_less(K, x.first, y.first);
  });
  return out;
}

// Roots in the coefficient field, with multiplicity, canonically sorted.
template <class C>
std::vector<std::pair<typename C::Elem, int>> poly_roots(const C& K, const Poly<C>& f) {
  std::vector<std::pair<typename C::Elem, int>> out;
  for (auto& [g, m] : poly_factor(K, f)) {
    if (g.deg() == 1) out.push_back({K.neg(g.c[0]), m});
  }
  return out;
}

template <class C>
bool poly_is_irreducible(const C& K, const Poly<C>& f) {
  if (f.deg() <= 0) return false;
  if (f.deg() == 1) return true;
  int n = f.deg();
  Poly<C> x = poly_x(K);
  Poly<C> xq = poly_powmod(K, x, bigpow(K.size(), (unsigned)n), f);
  if (!poly_eq(K, xq, poly_mod(K, x, f))) return false;
  for (auto [r, e] : factorize((u64)n)) {
    Poly<C> h = poly_powmod(K, x, bigpow(K.size(), (unsigned)(n / r)), f);
    if (poly_gcd(K, poly_sub(K, h, x), f).deg() != 0) return false;
  }
  return true;
}

// Deterministic scan for a monic irreducible of the given degree.
template <class C>
Poly<C> find_irreducible(const C& K, int degree) {
  if (degree == 1) return poly_x(K);
  // Enumerate sparse candidates x^d + a*x + b first, then denser tails.
  Rng rng(0x1057 + (u64)degree);
  for (u64 t = 0;; ++t) {
    Poly<C> f;
    f.c.assign(degree + 1, K.zero());
    f.c[degree] = K.one();
    if (t < 4096) {
      f.c[0] = K.from_int((i64)(t & 63));
      f.c[1] = K.from_int((i64)(t >> 6));
    } else {
      for (int i = 0; i < degree; ++i) f.c[i] = random_elem(K, rng);
    }
    if (poly_is_irreducible(K, f)) return f;
  }
}

// ---------------------------------------------------------------------------
// Tower extension F_{p^2}[y]/(modulus), modulus monic irreducible of degree m.
// ---------------------------------------------------------------------------

struct TowerCtx {
  using Elem = std::vector<Fp2E>;  // length == degree(), coefficients of y^i
  Fp2Ctx base;
  Poly<Fp2Ctx> modulus;

  TowerCtx() = default;
  TowerCtx(const Fp2Ctx& b, Poly<Fp2Ctx> mod) : base(b), modulus(std::move(mod)) {
    if (modulus.deg() < 1) throw std::domain_error("tower modulus must have degree >= 1");
    if (!base.eq(modulus.c.back(), base.one()))
      throw std::domain_error("tower modulus must be monic");
  }
  static TowerCtx make(const Fp2Ctx& b, int degree) {
    return TowerCtx(b, find_irreducible(b, degree));
  }

  int degree() const { return modulus.deg(); }

  Elem zero() const { return Elem(degree(), base.zero()); }
  Elem one() const {
    Elem e(degree(), base.zero());
    e[0] = base.one();
    return e;
  }
  Elem from_int(i64 v) const {
    Elem e(degree(), base.zero());
    e[0] = base.from_int(v);
    return e;
  }
  Elem from_big(const BigInt& v) const {
    Elem e(degree(), base.zero());
    e[0] = base.from_big(v);
    return e;
  }
  Elem embed(const Fp2E& v) const {
    Elem e(degree(), base.zero());
    e[0] = v;
    return e;
  }
  Elem gen_y() const {
    Elem e(degree(), base.zero());
    if (degree() == 1)
      e[0] = base.neg(modulus.c[0]);
    else
      e[1] = base.one();
    return e;
  }

  bool is_zero(const Elem& x) const {
    for (auto& v : x)
      if (!base.is_zero(v)) return false;
    return true;
  }
  bool eq(const Elem& x, const Elem& y) const { return x == y; }

  Elem add(const Elem& x, const Elem& y) const {
    Elem r(degree());
    for (int i = 0; i < degree(); ++i) r[i] = base.add(x[i], y[i]);
    return r;
  }
  Elem sub(const Elem& x, const Elem& y) const {
    Elem r(degree());
    for (int i = 0; i < degree(); ++i) r[i] = base.sub(x[i], y[i]);
    return r;
  }
  Elem neg(const Elem& x) const {
    Elem r(degree());
    for (int i = 0; i < degree(); ++i) r[i] = base.neg(x[i]);
    return r;
  }
  Elem mul(const Elem& x, const Elem& y) const {
    int m = degree();
    std::vector<Fp2E> prod(2 * m - 1, base.zero());
    for (int i = 0; i < m; ++i) {
      if (base.is_zero(x[i])) continue;
      for (int j = 0; j < m; ++j)
        prod[i + j] = base.add(prod[i + j], base.mul(x[i], y[j]));
    }
    // reduce by the monic modulus
    for (int k = 2 * m - 2; k >= m; --k) {
      Fp2E coef = prod[k];
      if (base.is_zero(coef)) continue;
      prod[k] = base.zero();
      for (int i = 0; i < m; ++i)
        prod[k - m + i] = base.sub(prod[k - m + i], base.mul(coef, modulus.c[i]));
    }
    prod.resize(m);
    return prod;
  }
  Elem inv(const Elem& x) const {
    Poly<Fp2Ctx> f;
    f.c.assign(x.begin(), x.end());
    poly_trim(base, f);
    if (f.is_zero()) throw std::domain_error("inverse of zero");
    Poly<Fp2Ctx> r = poly_invmod(base, f, modulus);
    Elem e(degree(), base.zero());
    for (int i = 0; i <= r.deg(); ++i) e[i] = r.c[i];
    return e;
  }
  Elem pow(Elem a, BigInt e) const {
    if (e < 0) { a = inv(a); e = -e; }
    Elem r = one();
    while (e > 0) {
      if (boost::multiprecision::bit_test(e, 0)) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  BigInt size() const { return bigpow(base.size(), (unsigned)degree()); }
  u64 char_p() const { return base.char_p(); }

  // Does the element lie in the F_{p^2} subfield, and if so what is it?
  std::optional<Fp2E> descend(const Elem& x) const {
    for (int i = 1; i < degree(); ++i)
      if (!base.is_zero(x[i])) return std::nullopt;
    return x[0];
  }

  std::vector<u128> sort_key(const Elem& x) const {
    std::vector<u128> k;
    k.reserve(x.size());
    for (auto& v : x) k.push_back(base.sort_key(v));
    return k;
  }
  std::string to_string(const Elem& x) const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < x.size(); ++i)
      os << (i ? "," : "") << base.to_string(x[i]);
    os << "]";
    return os.str();
  }
};

inline TowerCtx::Elem random_elem(const TowerCtx& K, Rng& rng) {
  TowerCtx::Elem e(K.degree());
  for (auto& v : e) v = random_elem(K.base, rng);
  return e;
}

}  // namespace sspile
