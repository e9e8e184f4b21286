#pragma once

// Exact arithmetic in F_p, F_{p^2} = F_p(s) with s^2 = nu (nu the least
// quadratic non-residue mod p), and small tower extensions of F_{p^2}.
// Every context is immutable after construction; all operations are pure.
// Moduli are capped below 2^62 so products always fit in 128-bit
// intermediates.

#include <optional>
#include <sstream>
#include <tuple>

#include "nt.hpp"

namespace sspile {

// ---------------------------------------------------------------------------
// F_p
// ---------------------------------------------------------------------------

struct FpCtx {
  using Elem = u64;
  u64 p = 0;

  FpCtx() = default;
  explicit FpCtx(u64 prime) : p(prime) {
    if (p >= (1ull << 62)) throw std::domain_error("modulus exceeds 2^62");
    if (!is_prime_u64(p)) throw std::domain_error("modulus fails primality test");
  }

  Elem zero() const { return 0; }
  Elem one() const { return 1 % p; }
  Elem from_int(i64 v) const {
    i64 r = v % (i64)p;
    if (r < 0) r += (i64)p;
    return (u64)r;
  }
  Elem from_big(const BigInt& v) const {
    BigInt r = v % (BigInt)p;
    if (r < 0) r += p;
    return (u64)r;
  }
  Elem add(Elem a, Elem b) const { return addmod(a, b, p); }
  Elem sub(Elem a, Elem b) const { return submod(a, b, p); }
  Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
  Elem mul(Elem a, Elem b) const { return mulmod(a, b, p); }
  Elem inv(Elem a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return powmod(a, p - 2, p);
  }
  Elem pow(Elem a, const BigInt& e) const {
    if (e < 0) return inv(pow(a, BigInt(-e)));
    return powmod(a, e, p);
  }
  bool is_zero(Elem a) const { return a == 0; }
  bool eq(Elem a, Elem b) const { return a == b; }
  BigInt size() const { return BigInt(p); }
  u64 char_p() const { return p; }
  Elem frobenius(Elem a) const { return a; }

  // Canonical strictly-increasing key for deterministic sorts.
  u64 sort_key(Elem a) const { return a; }
  std::string to_string(Elem a) const { return std::to_string(a); }
};

// Tonelli-Shanks. Returns the smaller of the two roots, or nullopt.
inline std::optional<u64> sqrt_fp(const FpCtx& F, u64 a) {
  u64 p = F.p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  u64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) { q /= 2; ++s; }
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  u64 m = (u64)s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) { tt = mulmod(tt, tt, p); ++i; }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return std::min(r, p - r);
}

// ---------------------------------------------------------------------------
// F_{p^2}
// ---------------------------------------------------------------------------

struct Fp2E {
  u64 a = 0, b = 0;  // a + b*s
  bool operator==(const Fp2E&) const = default;
};

struct Fp2Ctx {
  using Elem = Fp2E;
  FpCtx base;
  u64 nu = 0;  // least quadratic non-residue mod p, s^2 = nu

  Fp2Ctx() = default;
  explicit Fp2Ctx(u64 prime) : base(prime) {
    for (u64 c = 2;; ++c) {
      if (jacobi((i64)c, prime) == -1) { nu = c; break; }
    }
  }

  u64 p() const { return base.p; }
  Elem zero() const { return {0, 0}; }
  Elem one() const { return {1, 0}; }
  Elem from_int(i64 v) const { return {base.from_int(v), 0}; }
  Elem from_big(const BigInt& v) const { return {base.from_big(v), 0}; }
  Elem from_base(u64 a) const { return {a % base.p, 0}; }
  Elem gen_s() const { return {0, 1}; }

  Elem add(const Elem& x, const Elem& y) const { return {base.add(x.a, y.a), base.add(x.b, y.b)}; }
  Elem sub(const Elem& x, const Elem& y) const { return {base.sub(x.a, y.a), base.sub(x.b, y.b)}; }
  Elem neg(const Elem& x) const { return {base.neg(x.a), base.neg(x.b)}; }
  Elem mul(const Elem& x, const Elem& y) const {
    // (a+bs)(c+ds) = ac + nu*bd + (ad+bc)s
    u64 ac = base.mul(x.a, y.a), bd = base.mul(x.b, y.b);
    u64 ad = base.mul(x.a, y.b), bc = base.mul(x.b, y.a);
    return {base.add(ac, base.mul(nu, bd)), base.add(ad, bc)};
  }
  Elem inv(const Elem& x) const {
    // (a+bs)^-1 = (a-bs)/(a^2 - nu b^2)
    u64 n = base.sub(base.mul(x.a, x.a), base.mul(nu, base.mul(x.b, x.b)));
    if (n == 0) throw std::domain_error("inverse of zero");
    u64 ni = base.inv(n);
    return {base.mul(x.a, ni), base.mul(base.neg(x.b), ni)};
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
  bool is_zero(const Elem& x) const { return x.a == 0 && x.b == 0; }
  bool eq(const Elem& x, const Elem& y) const { return x == y; }
  BigInt size() const { return BigInt(base.p) * base.p; }
  u64 char_p() const { return base.p; }

  // x -> x^p, the conjugation a + bs -> a - bs (s^p = -s since nu is a
  // non-residue).
  Elem frobenius(const Elem& x) const { return {x.a, base.neg(x.b)}; }
  u64 norm(const Elem& x) const {
    return base.sub(base.mul(x.a, x.a), base.mul(nu, base.mul(x.b, x.b)));
  }
  bool in_base(const Elem& x) const { return x.b == 0; }

  u128 sort_key(const Elem& x) const { return (u128)x.a * (base.p + 1) + x.b; }
  std::string to_string(const Elem& x) const {
    if (x.b == 0) return std::to_string(x.a);
    std::ostringstream os;
    os << x.a << "+" << x.b << "*s";
    return os.str();
  }
};

// Deterministic square root in F_{p^2}: returns the root whose (a,b)
// representation is lexicographically smaller, or nullopt for non-squares.
inline std::optional<Fp2E> sqrt_fp2(const Fp2Ctx& K, const Fp2E& x) {
  const FpCtx& F = K.base;
  if (K.is_zero(x)) return Fp2E{0, 0};
  auto pick = [&](Fp2E r) {
    Fp2E m = K.neg(r);
    return std::tuple(r.a, r.b) <= std::tuple(m.a, m.b) ? r : m;
  };
  if (x.b == 0) {
    if (auto r = sqrt_fp(F, x.a)) return pick({*r, 0});
    // x = nu * (x/nu) with x/nu a square in F_p, so the root is t*s.
    u64 t = *sqrt_fp(F, F.mul(x.a, F.inv(K.nu)));
    return pick({0, t});
  }
  u64 n = K.norm(x);
  auto rn = sqrt_fp(F, n);
  if (!rn) return std::nullopt;  // Euler test: x is not a square
  u64 half = F.inv(2);
  for (u64 cand : {F.mul(F.add(x.a, *rn), half), F.mul(F.sub(x.a, *rn), half)}) {
    if (auto c = sqrt_fp(F, cand)) {
      if (*c == 0) continue;
      u64 d = F.mul(x.b, F.inv(F.mul(2, *c)));
      Fp2E r{*c, d};
      if (K.eq(K.mul(r, r), x)) return pick(r);
    }
  }
  return std::nullopt;
}

// Generic Tonelli-Shanks over any odd-size field context (used for towers).
template <class C>
std::optional<typename C::Elem> sqrt_generic(const C& K, const typename C::Elem& x,
                                             u64 rng_seed = 0x5eed) {
  using E = typename C::Elem;
  if (K.is_zero(x)) return x;
  BigInt sz = K.size();
  BigInt half = (sz - 1) / 2;
  if (!K.eq(K.pow(x, half), K.one())) return std::nullopt;
  BigInt q = sz - 1;
  int s = 0;
  while (q % 2 == 0) { q /= 2; ++s; }
  Rng rng(rng_seed);
  E z = K.one();
  for (;;) {
    z = random_elem(K, rng);
    if (!K.is_zero(z) && K.eq(K.pow(z, half), K.neg(K.one()))) break;
  }
  int m = s;
  E c = K.pow(z, q);
  E t = K.pow(x, q);
  E r = K.pow(x, (q + 1) / 2);
  while (!K.eq(t, K.one())) {
    int i = 0;
    E tt = t;
    while (!K.eq(tt, K.one())) { tt = K.mul(tt, tt); ++i; }
    E b = c;
    for (int j = 0; j < m - i - 1; ++j) b = K.mul(b, b);
    m = i;
    c = K.mul(b, b);
    t = K.mul(t, c);
    r = K.mul(r, b);
  }
  return r;
}

inline u64 random_elem(const FpCtx& F, Rng& rng) { return rng.below(F.p); }
inline Fp2E random_elem(const Fp2Ctx& K, Rng& rng) {
  return {rng.below(K.p()), rng.below(K.p())};
}

}  // namespace sspile
