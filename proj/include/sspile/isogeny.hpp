#pragma once

// Supersingular isogeny graphs: vertex enumeration over F_{p^2} by
// 2-isogeny closure, q-division polynomials, order-q kernel polynomials via
// explicit q-torsion bases over tower extensions, Velu codomains in kernel
// polynomial form, and the Hecke/adjacency matrix T_q of X_{p,q}.
//
// Throughout p = 1 (mod 12), so j = 0 and j = 1728 never occur and every
// vertex model has Frobenius acting as the scalar eps*p for eps in {+1,-1}.

#include <deque>
#include <map>
#include <unordered_map>

#include "poly.hpp"

namespace sspile {

// ---------------------------------------------------------------------------
// Elliptic curve points, affine, over a generic field context.
// ---------------------------------------------------------------------------

template <class C>
struct ECPoint {
  bool inf = true;
  typename C::Elem x{}, y{};
};

template <class C>
ECPoint<C> ec_neg(const C& K, const ECPoint<C>& P) {
  if (P.inf) return P;
  return {false, P.x, K.neg(P.y)};
}

template <class C>
bool ec_eq(const C& K, const ECPoint<C>& P, const ECPoint<C>& Q) {
  if (P.inf || Q.inf) return P.inf == Q.inf;
  return K.eq(P.x, Q.x) && K.eq(P.y, Q.y);
}

template <class C>
ECPoint<C> ec_add(const C& K, const typename C::Elem& A, const ECPoint<C>& P,
                  const ECPoint<C>& Q) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  typename C::Elem lambda;
  if (K.eq(P.x, Q.x)) {
    if (K.eq(P.y, K.neg(Q.y))) return {};
    // doubling: lambda = (3x^2 + A) / 2y
    auto num = K.add(K.mul(K.from_int(3), K.mul(P.x, P.x)), A);
    lambda = K.mul(num, K.inv(K.mul(K.from_int(2), P.y)));
  } else {
    lambda = K.mul(K.sub(Q.y, P.y), K.inv(K.sub(Q.x, P.x)));
  }
  auto x3 = K.sub(K.sub(K.mul(lambda, lambda), P.x), Q.x);
  auto y3 = K.sub(K.mul(lambda, K.sub(P.x, x3)), P.y);
  return {false, x3, y3};
}

template <class C>
ECPoint<C> ec_mul(const C& K, const typename C::Elem& A, ECPoint<C> P, BigInt n) {
  if (n < 0) { P = ec_neg(K, P); n = -n; }
  ECPoint<C> R;
  while (n > 0) {
    if (boost::multiprecision::bit_test(n, 0)) R = ec_add(K, A, R, P);
    P = ec_add(K, A, P, P);
    n >>= 1;
  }
  return R;
}

template <class C>
std::optional<ECPoint<C>> ec_lift_x(const C& K, const typename C::Elem& A,
                                    const typename C::Elem& B, const typename C::Elem& x) {
  auto rhs = K.add(K.add(K.mul(K.mul(x, x), x), K.mul(A, x)), B);
  auto y = sqrt_generic(K, rhs);
  if (!y) return std::nullopt;
  return ECPoint<C>{false, x, *y};
}

// ---------------------------------------------------------------------------
// Models and normalization.
// ---------------------------------------------------------------------------

template <class C>
typename C::Elem j_invariant(const C& K, const typename C::Elem& A, const typename C::Elem& B) {
  auto A3 = K.mul(K.mul(A, A), A);
  auto c = K.mul(K.from_int(4), A3);
  auto disc = K.add(c, K.mul(K.from_int(27), K.mul(B, B)));
  if (K.is_zero(disc)) throw ParamError("singular cubic (4A^3 + 27B^2 = 0)");
  return K.mul(K.mul(K.from_int(1728), c), K.inv(disc));
}

// A model y^2 = x^3 + Ax + B of the vertex j together with the sign eps of
// the scalar by which the F_{p^2}-Frobenius acts (pi = eps * p).
struct CurveModel {
  Fp2E A, B;
  int eps = +1;
};

// Any short Weierstrass model with the given j != 0, 1728.
inline std::pair<Fp2E, Fp2E> model_from_j(const Fp2Ctx& K, const Fp2E& j) {
  Fp2E k1728 = K.from_int(1728);
  if (K.is_zero(j) || K.eq(j, k1728))
    throw ParamError("j in {0,1728} is outside the p = 1 (mod 12) setting");
  Fp2E d = K.sub(k1728, j);
  Fp2E A = K.mul(K.from_int(3), K.mul(j, d));
  Fp2E B = K.mul(K.from_int(2), K.mul(j, K.mul(d, d)));
  return {A, B};
}

inline std::pair<Fp2E, Fp2E> quadratic_twist(const Fp2Ctx& K, const Fp2E& A, const Fp2E& B) {
  // s is a non-square in F_{p^2} when p = 1 (mod 4).
  Fp2E g = K.gen_s();
  Fp2E g2 = K.mul(g, g);
  return {K.mul(g2, A), K.mul(K.mul(g2, g), B)};
}

// Determines eps for a supersingular model by multiplying random points by
// p -+ 1; returns 0 if the curve fails both tests (i.e. is not supersingular
// with scalar Frobenius).
inline int detect_eps(const Fp2Ctx& K, const Fp2E& A, const Fp2E& B, Rng& rng) {
  u64 p = K.p();
  int votes_plus = 0, votes_minus = 0;
  for (int trial = 0; trial < 64; ++trial) {
    Fp2E x = random_elem(K, rng);
    auto P = ec_lift_x(K, A, B, x);
    if (!P) continue;
    bool kp = ec_mul(K, A, *P, BigInt(p) - 1).inf;   // eps = +1 => (p-1)P = O
    bool km = ec_mul(K, A, *P, BigInt(p) + 1).inf;   // eps = -1 => (p+1)P = O
    if (kp && !km) ++votes_plus;
    if (km && !kp) ++votes_minus;
    if (!kp && !km) return 0;
    if (votes_plus >= 2) return +1;
    if (votes_minus >= 2) return -1;
  }
  return 0;
}

// Model of j with the requested eps (twisting if needed).
inline CurveModel normalized_model(const Fp2Ctx& K, const Fp2E& j, int eps_wanted) {
  auto [A, B] = model_from_j(K, j);
  Rng rng(0xAB1E ^ K.p() ^ (u64)K.sort_key(j));
  int eps = detect_eps(K, A, B, rng);
  if (eps == 0) throw InternalError("vertex model is not supersingular");
  if (eps != eps_wanted) {
    std::tie(A, B) = quadratic_twist(K, A, B);
    eps = -eps;
  }
  return {A, B, eps};
}

// ---------------------------------------------------------------------------
// Supersingular vertex enumeration.
// ---------------------------------------------------------------------------

inline void require_p_1_mod_12(u64 p) {
  if (!is_prime_u64(p)) throw ParamError("p must be prime");
  if (p % 12 != 1) throw ParamError("only p = 1 (mod 12) is supported");
}

// First supersingular j-invariant: scan the rational CM j-invariants of
// class number one and pick the first whose discriminant is inert at p;
// falls back to random search with a scalar-Frobenius test.
inline Fp2E find_supersingular_j(const Fp2Ctx& K) {
  u64 p = K.p();
  require_p_1_mod_12(p);
  static const std::pair<i64, i64> cm[] = {
      {3, 0},
      {4, 1728},
      {7, -3375},
      {8, 8000},
      {11, -32768},
      {19, -884736},
      {43, -884736000},
      {67, -147197952000},
      {163, -262537412640768000LL},
  };
  for (auto [D, j] : cm) {
    if (p % (u64)D == 0) continue;
    if (jacobi(-D, p) == -1) return K.from_int(j);
  }
  Rng rng(0x5afe ^ p);
  for (int tries = 0; tries < 1 << 20; ++tries) {
    Fp2E j = random_elem(K, rng);
    if (K.is_zero(j) || K.eq(j, K.from_int(1728))) continue;
    auto [A, B] = model_from_j(K, j);
    auto disc = K.add(K.mul(K.from_int(4), K.mul(K.mul(A, A), A)),
                      K.mul(K.from_int(27), K.mul(B, B)));
    if (K.is_zero(disc)) continue;
    if (detect_eps(K, A, B, rng) != 0) return j;
  }
  throw InternalError("no supersingular j found");
}

struct VertexSet {
  Fp2Ctx K;
  std::vector<Fp2E> js;  // canonical order: F_p-rational first, then (a,b)

  int index_of(const Fp2E& j) const {
    for (std::size_t i = 0; i < js.size(); ++i)
      if (js[i] == j) return (int)i;
    return -1;
  }
};

// The three 2-isogeny neighbours (with multiplicity) of the model (A,B):
// the curve cubic splits completely over F_{p^2} on supersingular vertices.
inline std::vector<Fp2E> two_isogeny_neighbours(const Fp2Ctx& K, const Fp2E& A, const Fp2E& B) {
  Poly<Fp2Ctx> cubic = poly_from(K, {B, A, K.zero(), K.one()});
  auto roots = poly_roots(K, cubic);
  int count = 0;
  for (auto& [r, m] : roots) count += m;
  if (count != 3)
    throw InternalError("curve cubic does not split over F_{p^2}; arithmetic bug");
  std::vector<Fp2E> out;
  for (auto& [x0, m] : roots) {
    for (int i = 0; i < m; ++i) {
      // Velu through the 2-torsion point (x0, 0)
      Fp2E t = K.add(K.mul(K.from_int(3), K.mul(x0, x0)), A);
      Fp2E w = K.mul(x0, t);
      Fp2E A2 = K.sub(A, K.mul(K.from_int(5), t));
      Fp2E B2 = K.sub(B, K.mul(K.from_int(7), w));
      out.push_back(j_invariant(K, A2, B2));
    }
  }
  return out;
}

// Breadth-first closure of find_supersingular_j under 2-isogeny; size must
// come out to (p-1)/12.
inline VertexSet enumerate_vertices(u64 p) {
  require_p_1_mod_12(p);
  Fp2Ctx K(p);
  Fp2E seed = find_supersingular_j(K);
  std::map<std::pair<u64, u64>, Fp2E> seen;
  auto key = [](const Fp2E& j) { return std::pair<u64, u64>{j.a, j.b}; };
  std::deque<Fp2E> queue{seed};
  seen[key(seed)] = seed;
  while (!queue.empty()) {
    Fp2E j = queue.front();
    queue.pop_front();
    auto [A, B] = model_from_j(K, j);
    for (const Fp2E& jn : two_isogeny_neighbours(K, A, B)) {
      if (!seen.count(key(jn))) {
        seen[key(jn)] = jn;
        queue.push_back(jn);
      }
    }
  }
  u64 n = (p - 1) / 12;
  if (seen.size() != n)
    throw InternalError("2-isogeny closure has size " + std::to_string(seen.size()) +
                        ", expected " + std::to_string(n));
  VertexSet V{K, {}};
  for (auto& [k, j] : seen) V.js.push_back(j);
  std::sort(V.js.begin(), V.js.end(), [&](const Fp2E& x, const Fp2E& y) {
    auto kx = std::tuple(x.b != 0, x.a, x.b);
    auto ky = std::tuple(y.b != 0, y.a, y.b);
    return kx < ky;
  });
  return V;
}

// ---------------------------------------------------------------------------
// Division polynomials (x-only form): psi_m = g_m(x) for odd m and
// psi_m = y*g_m(x) for even m, with y^2 = x^3 + Ax + B substituted.
// ---------------------------------------------------------------------------

template <class C>
std::vector<Poly<C>> division_polys(const C& K, const typename C::Elem& A,
                                    const typename C::Elem& B, int upto) {
  using P = Poly<C>;
  std::vector<P> g(std::max(upto + 1, 5));
  P f = poly_from(K, {B, A, K.zero(), K.one()});
  P f2 = poly_mul(K, f, f);
  g[0] = {};
  g[1] = poly_const(K, K.one());
  g[2] = poly_const(K, K.from_int(2));
  {
    auto A2 = K.mul(A, A);
    g[3] = poly_from(K, {K.neg(A2), K.mul(K.from_int(12), B), K.mul(K.from_int(6), A),
                         K.zero(), K.from_int(3)});
    auto AB = K.mul(A, B);
    auto B2 = K.mul(B, B);
    auto A3 = K.mul(A2, A);
    g[4] = poly_from(
        K, {K.mul(K.from_int(4), K.sub(K.neg(K.mul(K.from_int(8), B2)), A3)),
            K.mul(K.from_int(-16), AB), K.mul(K.from_int(-20), A2),
            K.mul(K.from_int(80), B), K.mul(K.from_int(20), A), K.zero(), K.from_int(4)});
  }
  auto half = K.inv(K.from_int(2));
  for (int m = 5; m <= upto; ++m) {
    if (m % 2 == 1) {
      int k = (m - 1) / 2;
      P t1 = poly_mul(K, g[k + 2], poly_mul(K, g[k], poly_mul(K, g[k], g[k])));
      P t2 = poly_mul(K, g[k - 1], poly_mul(K, g[k + 1], poly_mul(K, g[k + 1], g[k + 1])));
      if (k % 2 == 0)
        g[m] = poly_sub(K, poly_mul(K, f2, t1), t2);
      else
        g[m] = poly_sub(K, t1, poly_mul(K, f2, t2));
    } else {
      int k = m / 2;
      P d = poly_sub(K, poly_mul(K, g[k + 2], poly_mul(K, g[k - 1], g[k - 1])),
                     poly_mul(K, g[k - 2], poly_mul(K, g[k + 1], g[k + 1])));
      g[m] = poly_scale(K, poly_mul(K, g[k], d), half);
    }
  }
  return g;
}

// psi_q as an x-polynomial for odd prime q (degree (q^2-1)/2).
template <class C>
Poly<C> division_poly_q(const C& K, const typename C::Elem& A, const typename C::Elem& B,
                        u64 q) {
  if (q % 2 == 0) throw ParamError("division_poly_q expects odd q");
  auto g = division_polys(K, A, B, (int)q);
  return g[q];
}

// ---------------------------------------------------------------------------
// Kernel polynomials of the q+1 order-q subgroups.
// ---------------------------------------------------------------------------

using KernelPoly = Poly<Fp2Ctx>;

namespace detail {

// x-coordinates of G, 2G, ..., ((q-1)/2)G in the tower, then the monic
// product of (x - x_i) with all coefficients descended to F_{p^2}.
template <class C>
KernelPoly kernel_poly_from_generator(const Fp2Ctx& K2, const C& T,
                                      const typename C::Elem& A, const ECPoint<C>& G,
                                      u64 q) {
  int d = (int)((q - 1) / 2);
  std::vector<typename C::Elem> xs;
  xs.reserve(d);
  ECPoint<C> R = G;
  for (int i = 1; i <= d; ++i) {
    if (R.inf) throw InternalError("generator has order < q");
    xs.push_back(R.x);
    R = ec_add(T, A, R, G);
  }
  // product of (x - x_i) over the tower
  std::vector<typename C::Elem> h{T.one()};
  for (auto& xi : xs) {
    std::vector<typename C::Elem> next(h.size() + 1, T.zero());
    for (std::size_t i = 0; i < h.size(); ++i) {
      next[i + 1] = T.add(next[i + 1], h[i]);
      next[i] = T.sub(next[i], T.mul(h[i], xi));
    }
    h = std::move(next);
  }
  KernelPoly out;
  out.c.reserve(h.size());
  for (auto& coef : h) {
    auto down = T.descend(coef);
    if (!down)
      throw InternalError("kernel polynomial fails to descend to F_{p^2}; "
                          "twist normalization broken");
    out.c.push_back(*down);
  }
  poly_trim(K2, out);
  return out;
}

template <class C>
std::vector<KernelPoly> kernel_polys_in_tower(const Fp2Ctx& K2, const C& T,
                                              const CurveModel& E, u64 p, u64 q, int r) {
  typename C::Elem A = T.embed(E.A), B = T.embed(E.B);
  // #E(tower) = (c-1)^2 for the integer scalar c = (eps*p)^r.
  BigInt c = bigpow(BigInt(p), (unsigned)r);
  if (E.eps < 0 && r % 2 == 1) c = -c;
  BigInt N = c - 1;
  if (N < 0) N = -N;
  if (N % q != 0) throw InternalError("tower degree does not rationalize E[q]");
  BigInt cof = N / q;

  Rng rng(0x7071 ^ (p * 1315423911ull) ^ (q << 20) ^ (u64)K2.sort_key(E.A));
  auto sample_torsion = [&]() -> ECPoint<C> {
    for (int tries = 0; tries < 4096; ++tries) {
      auto P = ec_lift_x(T, A, B, random_elem(T, rng));
      if (!P) continue;
      ECPoint<C> Q = ec_mul(T, A, *P, cof);
      // force exact order q (cof*P lands in E[q^e]/... only when e = 1;
      // in general multiply down to the q-torsion layer)
      int guard = 0;
      while (!Q.inf && !ec_mul(T, A, Q, BigInt(q)).inf) {
        Q = ec_mul(T, A, Q, BigInt(q));
        if (++guard > 64) throw InternalError("runaway q-power order");
      }
      if (!Q.inf) return Q;
    }
    throw InternalError("failed to sample a q-torsion point");
  };

  ECPoint<C> P1 = sample_torsion();
  // x-coordinates of the multiples of P1, for the independence test
  std::vector<typename C::Elem> orbit1;
  {
    ECPoint<C> R = P1;
    for (u64 i = 1; i <= (q - 1) / 2; ++i) {
      orbit1.push_back(R.x);
      R = ec_add(T, A, R, P1);
    }
  }
  ECPoint<C> P2;
  for (int tries = 0;; ++tries) {
    if (tries > 512) throw InternalError("failed to find an independent q-torsion point");
    P2 = sample_torsion();
    bool dep = false;
    for (auto& x : orbit1)
      if (T.eq(x, P2.x)) { dep = true; break; }
    if (!dep) break;
  }

  std::vector<KernelPoly> out;
  out.reserve(q + 1);
  out.push_back(kernel_poly_from_generator(K2, T, A, P1, q));
  ECPoint<C> G = P2;
  for (u64 k = 0; k < q; ++k) {
    out.push_back(kernel_poly_from_generator(K2, T, A, G, q));
    G = ec_add(T, A, G, P1);
  }
  return out;
}

}  // namespace detail

inline int multiplicative_order(u64 a, u64 q) {
  a %= q;
  if (a == 0) throw ParamError("order of 0");
  u64 x = a;
  for (int r = 1;; ++r) {
    if (x == 1) return r;
    x = mulmod(x, a, q);
  }
}

// Twist E to whichever eps makes E[q] rational over the smallest tower
// (E[q] is rational over the degree-r extension of F_{p^2} with
// r = ord_q(eps*p)).
inline CurveModel normalize_for_q(const Fp2Ctx& K, CurveModel E, u64 q) {
  u64 p = K.p();
  int r_plus = multiplicative_order(p % q, q);
  int r_minus = multiplicative_order((q - p % q) % q, q);
  int eps = r_plus <= r_minus ? +1 : -1;
  if (E.eps != eps) {
    std::tie(E.A, E.B) = quadratic_twist(K, E.A, E.B);
    E.eps = -E.eps;
  }
  return E;
}

// The q+1 kernel polynomials of E. The caller supplies the twist; the tower
// degree is read off E.eps. Output sorted canonically; each polynomial is
// monic of degree (q-1)/2.
inline std::vector<KernelPoly> q_kernel_polynomials(const Fp2Ctx& K, const CurveModel& E,
                                                    u64 q) {
  u64 p = K.p();
  if (q == p) throw ParamError("q must differ from p");
  if (q == 2 || !is_prime_u64(q)) throw ParamError("q must be an odd prime");
  int r = multiplicative_order(E.eps > 0 ? p % q : (q - p % q) % q, q);

  std::vector<KernelPoly> out;
  if (r == 1) {
    TowerCtx T(K, poly_x(K));
    out = detail::kernel_polys_in_tower(K, T, E, p, q, r);
  } else {
    TowerCtx T = TowerCtx::make(K, r);
    out = detail::kernel_polys_in_tower(K, T, E, p, q, r);
  }
  for (auto& h : out) {
    if (h.deg() != (int)((q - 1) / 2) || !K.eq(h.c.back(), K.one()))
      throw InternalError("kernel polynomial has wrong shape");
  }
  std::sort(out.begin(), out.end(),
            [&](const KernelPoly& a, const KernelPoly& b) { return poly_less(K, a, b); });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (poly_eq(K, out[i - 1], out[i]))
      throw InternalError("duplicate kernel polynomial; subgroup count broken");
  return out;
}

// ---------------------------------------------------------------------------
// Velu codomain from a kernel polynomial (Kohel form, power sums).
// ---------------------------------------------------------------------------

inline Fp2E velu_codomain_j(const Fp2Ctx& K, const CurveModel& E, const KernelPoly& h,
                            u64 q, bool validate = false) {
  int d = h.deg();
  if (d < 1 || !K.eq(h.c.back(), K.one())) throw ParamError("kernel polynomial must be monic");
  if (validate) {
    if (q == 2) {
      Poly<Fp2Ctx> cubic = poly_from(K, {E.B, E.A, K.zero(), K.one()});
      if (!poly_mod(K, cubic, h).is_zero())
        throw ParamError("kernel does not divide the 2-division cubic");
    } else {
      Poly<Fp2Ctx> psi = division_poly_q(K, E.A, E.B, q);
      if (!poly_mod(K, psi, h).is_zero())
        throw ParamError("kernel polynomial does not divide psi_q");
    }
  }
  Fp2E A2, B2;
  if (q == 2) {
    Fp2E x0 = K.neg(h.c[0]);
    Fp2E t = K.add(K.mul(K.from_int(3), K.mul(x0, x0)), E.A);
    Fp2E w = K.mul(x0, t);
    A2 = K.sub(E.A, K.mul(K.from_int(5), t));
    B2 = K.sub(E.B, K.mul(K.from_int(7), w));
  } else {
    // elementary symmetric -> power sums of the kernel x-coordinates
    Fp2E s1 = d >= 1 ? K.neg(h.c[d - 1]) : K.zero();
    Fp2E s2 = d >= 2 ? h.c[d - 2] : K.zero();
    Fp2E s3 = d >= 3 ? K.neg(h.c[d - 3]) : K.zero();
    Fp2E p1 = s1;
    Fp2E p2 = K.sub(K.mul(s1, s1), K.mul(K.from_int(2), s2));
    Fp2E p3 = K.add(K.sub(K.mul(s1, K.mul(s1, s1)), K.mul(K.from_int(3), K.mul(s1, s2))),
                    K.mul(K.from_int(3), s3));
    Fp2E dA = K.mul(K.from_int(d), E.A);
    Fp2E dB = K.mul(K.from_int(d), E.B);
    Fp2E t = K.add(K.mul(K.from_int(6), p2), K.mul(K.from_int(2), dA));
    Fp2E w = K.add(K.add(K.mul(K.from_int(10), p3), K.mul(K.from_int(6), K.mul(E.A, p1))),
                   K.mul(K.from_int(4), dB));
    A2 = K.sub(E.A, K.mul(K.from_int(5), t));
    B2 = K.sub(E.B, K.mul(K.from_int(7), w));
  }
  return j_invariant(K, A2, B2);
}

// ---------------------------------------------------------------------------
// The Hecke operator T_q as an integer matrix.
// ---------------------------------------------------------------------------

struct HeckeMatrix {
  u64 p = 0, q = 0;
  std::vector<Fp2E> order;              // canonical vertex j-invariants
  std::vector<std::vector<i64>> m;      // m[i][j] = #subgroups C of E_i with j(E_i/C) = j_j

  int n() const { return (int)order.size(); }
};

inline constexpr u64 kDefaultQMax = 97;

inline HeckeMatrix hecke_matrix(const VertexSet& V, u64 q, u64 q_max = kDefaultQMax) {
  u64 p = V.K.p();
  if (q == p) throw ParamError("q must differ from p");
  if (!is_prime_u64(q)) throw ParamError("q must be prime");
  if (q > q_max)
    throw ResourceLimitError("q exceeds the graph-route bound q_max = " + std::to_string(q_max));
  const Fp2Ctx& K = V.K;
  int n = (int)V.js.size();
  HeckeMatrix T{p, q, V.js, std::vector<std::vector<i64>>(n, std::vector<i64>(n, 0))};

  std::map<std::pair<u64, u64>, int> index;
  for (int i = 0; i < n; ++i) index[{V.js[i].a, V.js[i].b}] = i;

  for (int i = 0; i < n; ++i) {
    CurveModel E = normalized_model(K, V.js[i], +1);
    std::vector<Fp2E> codomains;
    if (q == 2) {
      codomains = two_isogeny_neighbours(K, E.A, E.B);
    } else {
      E = normalize_for_q(K, E, q);
      for (const KernelPoly& h : q_kernel_polynomials(K, E, q))
        codomains.push_back(velu_codomain_j(K, E, h, q));
    }
    if (codomains.size() != q + 1)
      throw InternalError("expected q+1 codomains");
    for (const Fp2E& j : codomains) {
      auto it = index.find({j.a, j.b});
      if (it == index.end())
        throw InternalError("codomain j-invariant is not a known vertex");
      ++T.m[i][it->second];
    }
  }
  for (int i = 0; i < n; ++i) {
    i64 row = 0;
    for (int j = 0; j < n; ++j) row += T.m[i][j];
    if (row != (i64)q + 1) throw InternalError("row sum != q+1");
  }
  return T;
}

inline HeckeMatrix hecke_matrix(u64 p, u64 q, u64 q_max = kDefaultQMax) {
  return hecke_matrix(enumerate_vertices(p), q, q_max);
}

}  // namespace sspile
