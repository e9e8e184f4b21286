#pragma once

// The Hecke algebra T on Div^0: Z-basis by multiplicative closure of the
// span of the T_q, discriminant of the trace form, splitting of T (x) Z_ell
// into unramified factors by Hensel lifting a squarefree characteristic
// polynomial, and the valuation tuples v_i(q+1-T_q) that determine
// J_{p,q}[ell^infty].

#include "sandpile.hpp"

namespace sspile {

struct ExcludedPrimeError : ParamError {
  using ParamError::ParamError;
};
struct GeneratorUnsuitableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Integer/rational matrix helpers.
// ---------------------------------------------------------------------------

inline IntMat mat_identity(int n) {
  IntMat I(n, std::vector<BigInt>(n, 0));
  for (int i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline IntMat mat_mul(const IntMat& A, const IntMat& B) {
  int n = (int)A.size(), m = (int)B[0].size(), k = (int)B.size();
  IntMat C(n, std::vector<BigInt>(m, 0));
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < k; ++t) {
      if (A[i][t] == 0) continue;
      for (int j = 0; j < m; ++j) C[i][j] += A[i][t] * B[t][j];
    }
  return C;
}

inline BigInt mat_trace(const IntMat& A) {
  BigInt t = 0;
  for (std::size_t i = 0; i < A.size(); ++i) t += A[i][i];
  return t;
}

// Row-style Hermite normal form of the lattice spanned by `rows`; returns
// the canonical basis (pivots positive, entries above pivots reduced).
inline std::vector<std::vector<BigInt>> hnf_rows(std::vector<std::vector<BigInt>> rows) {
  if (rows.empty()) return rows;
  int cols = (int)rows[0].size();
  int r = 0;
  for (int c = 0; c < cols && r < (int)rows.size(); ++c) {
    // gcd-reduce column c below row r
    for (;;) {
      int piv = -1;
      BigInt best;
      for (int i = r; i < (int)rows.size(); ++i) {
        BigInt a = rows[i][c] < 0 ? BigInt(-rows[i][c]) : rows[i][c];
        if (a != 0 && (piv < 0 || a < best)) { piv = i; best = a; }
      }
      if (piv < 0) break;
      std::swap(rows[r], rows[piv]);
      if (rows[r][c] < 0)
        for (auto& v : rows[r]) v = -v;
      bool done = true;
      for (int i = r + 1; i < (int)rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        BigInt f = rows[i][c] / rows[r][c];
        for (int j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        if (rows[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[r][c] != 0) {
      // reduce entries above the pivot
      for (int i = 0; i < r; ++i) {
        BigInt f = rows[i][c] / rows[r][c];
        if (rows[i][c] < 0 && rows[i][c] % rows[r][c] != 0) f -= 1;
        for (int j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
      }
      ++r;
    }
  }
  rows.resize(r);
  return rows;
}

// Is v in the lattice spanned by the HNF rows?
inline bool hnf_member(const std::vector<std::vector<BigInt>>& H, std::vector<BigInt> v) {
  int cols = H.empty() ? (int)v.size() : (int)H[0].size();
  std::size_t r = 0;
  for (int c = 0; c < cols; ++c) {
    if (r < H.size() && H[r][c] != 0) {
      if (v[c] % H[r][c] != 0 && v[c] != 0) {
        BigInt f = v[c] / H[r][c];
        for (int j = 0; j < cols; ++j) v[j] -= f * H[r][j];
        if (v[c] != 0) return false;
      } else if (v[c] != 0) {
        BigInt f = v[c] / H[r][c];
        for (int j = 0; j < cols; ++j) v[j] -= f * H[r][j];
      }
      ++r;
    } else if (v[c] != 0) {
      return false;
    }
  }
  return true;
}

// Characteristic polynomial of an integer matrix (Faddeev-LeVerrier; the
// divisions are exact). Returned monic, coeff[i] multiplies x^i.
inline std::vector<BigInt> charpoly_int(const IntMat& A) {
  int n = (int)A.size();
  std::vector<BigInt> c(n + 1, 0);
  c[n] = 1;
  IntMat M = mat_identity(n);
  for (int k = 1; k <= n; ++k) {
    M = mat_mul(A, M);
    BigInt ck = -mat_trace(M) / k;
    c[n - k] = ck;
    for (int i = 0; i < n; ++i) M[i][i] += ck;
  }
  return c;
}

// Exact rational linear solve A x = b (A square, nonsingular).
inline std::vector<BigRat> solve_rational(std::vector<std::vector<BigRat>> A,
                                          std::vector<BigRat> b) {
  int n = (int)A.size();
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (A[i][c] != 0) { piv = i; break; }
    if (piv < 0) throw InternalError("singular system");
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (int i = 0; i < n; ++i) {
      if (i == c || A[i][c] == 0) continue;
      BigRat f = A[i][c] / A[c][c];
      for (int j = c; j < n; ++j) A[i][j] -= f * A[c][j];
      b[i] -= f * b[c];
    }
  }
  std::vector<BigRat> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

// ---------------------------------------------------------------------------
// Integer polynomials (dense, BigInt coefficients).
// ---------------------------------------------------------------------------

using ZPoly = std::vector<BigInt>;  // coeff[i] of x^i, trailing zeros trimmed

inline void zp_trim(ZPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int zp_deg(const ZPoly& f) { return (int)f.size() - 1; }

inline ZPoly zp_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  zp_trim(r);
  return r;
}

inline ZPoly zp_sub(const ZPoly& a, const ZPoly& b) {
  ZPoly r = a;
  if (r.size() < b.size()) r.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  zp_trim(r);
  return r;
}

inline void zp_reduce_mod(ZPoly& f, const BigInt& M) {
  for (auto& v : f) {
    v %= M;
    if (v < 0) v += M;
  }
  zp_trim(f);
}

inline BigInt zp_eval(const ZPoly& f, const BigInt& x) {
  BigInt r = 0;
  for (int i = zp_deg(f); i >= 0; --i) r = r * x + f[i];
  return r;
}

// resultant(f, g) over Z by Sylvester determinant (small degrees only)
inline BigInt zp_resultant(const ZPoly& f, const ZPoly& g) {
  int m = zp_deg(f), n = zp_deg(g);
  if (m < 0 || n < 0) return 0;
  int N = m + n;
  if (N == 0) return 1;
  IntMat S(N, std::vector<BigInt>(N, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) S[i][i + j] = f[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) S[n + i][i + j] = g[n - j];
  return det_bareiss(S);
}

inline BigInt zp_disc(const ZPoly& f) {
  int n = zp_deg(f);
  ZPoly d;
  for (int i = 1; i <= n; ++i) d.push_back(f[i] * i);
  zp_trim(d);
  BigInt res = zp_resultant(f, d);
  BigInt lc = f[n];
  BigInt sign = ((i64)n * (n - 1) / 2) % 2 == 0 ? 1 : -1;
  return sign * res / lc;
}

inline Poly<FpCtx> zp_to_fp(const FpCtx& F, const ZPoly& f) {
  Poly<FpCtx> r;
  for (auto& v : f) r.c.push_back(F.from_big(v));
  poly_trim(F, r);
  return r;
}

inline ZPoly fp_to_zp(const Poly<FpCtx>& f) {
  ZPoly r;
  for (auto v : f.c) r.push_back(BigInt(v));
  return r;
}

// Hensel: lift the coprime monic factorization P = f*g (mod ell) to
// (mod ell^m). P monic over Z.
inline std::pair<ZPoly, ZPoly> hensel_lift_pair(const ZPoly& P, ZPoly f, ZPoly g, u64 ell,
                                                int m) {
  FpCtx F(ell);
  Poly<FpCtx> fb = zp_to_fp(F, f), gb = zp_to_fp(F, g);
  auto [gcd_fg, u] = poly_half_extgcd(F, fb, gb);  // u*f = gcd (mod g)
  if (gcd_fg.deg() != 0) throw InternalError("hensel: factors not coprime");
  // v with u*f + v*g = 1
  Poly<FpCtx> one = poly_const(F, F.one());
  Poly<FpCtx> vf = poly_divmod(F, poly_sub(F, one, poly_mul(F, u, fb)), gb).first;
  BigInt M = ell;
  for (int j = 1; j < m; ++j) {
    ZPoly prod = zp_mul(f, g);
    ZPoly err = zp_sub(P, prod);
    // err / M mod ell
    Poly<FpCtx> e;
    for (auto& v : err) {
      if (v % M != 0) throw InternalError("hensel: error term not divisible");
      e.c.push_back(F.from_big(v / M));
    }
    poly_trim(F, e);
    // df*g + dg*f = e (mod ell), deg df < deg f
    Poly<FpCtx> ev = poly_mul(F, e, vf);
    auto [quot, df] = poly_divmod(F, ev, fb);
    Poly<FpCtx> num = poly_sub(F, e, poly_mul(F, df, gb));
    auto [dg, rem] = poly_divmod(F, num, fb);
    if (!rem.is_zero()) throw InternalError("hensel: correction not exact");
    for (int i = 0; i <= df.deg(); ++i) {
      if ((int)f.size() <= i) f.resize(i + 1, 0);
      f[i] += M * df.c[i];
    }
    for (int i = 0; i <= dg.deg(); ++i) {
      if ((int)g.size() <= i) g.resize(i + 1, 0);
      g[i] += M * dg.c[i];
    }
    M *= ell;
  }
  zp_reduce_mod(f, M);
  zp_reduce_mod(g, M);
  // keep monic representatives
  if (f.back() != 1) throw InternalError("hensel: lift lost monicity");
  return {f, g};
}

// ---------------------------------------------------------------------------
// The algebra.
// ---------------------------------------------------------------------------

struct HeckeAlgebra {
  u64 p = 0;
  int rank = 0;                           // n - 1
  std::vector<u64> gen_qs;                // primes q of the stored generators
  std::vector<IntMat> gens;               // T_q | Div^0
  std::vector<IntMat> basis;              // Z-basis of the algebra
  BigInt disc = 0;                        // det Tr(b_i b_j)
  IntMat theta;                           // chosen generator
  std::string theta_desc;
  std::vector<BigInt> charpoly;           // of theta, monic, degree == rank
};

namespace detail {

inline std::vector<BigInt> mat_vec(const IntMat& M) {
  std::vector<BigInt> v;
  v.reserve(M.size() * M.size());
  for (auto& row : M)
    for (auto& x : row) v.push_back(x);
  return v;
}

inline IntMat vec_mat(const std::vector<BigInt>& v, int n) {
  IntMat M(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = v[(std::size_t)i * n + j];
  return M;
}

// candidate generators: T_q, then T_2 + c*T_3 combinations
inline std::vector<std::pair<IntMat, std::string>> theta_candidates(const HeckeAlgebra& A) {
  std::vector<std::pair<IntMat, std::string>> out;
  for (std::size_t i = 0; i < A.gens.size(); ++i)
    out.push_back({A.gens[i], "T" + std::to_string(A.gen_qs[i])});
  if (A.gens.size() >= 2) {
    for (int c = 1; c <= 24; ++c) {
      IntMat M = A.gens[0];
      for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M.size(); ++j) M[i][j] += c * A.gens[1][i][j];
      out.push_back({M, "T" + std::to_string(A.gen_qs[0]) + "+" + std::to_string(c) + "T" +
                            std::to_string(A.gen_qs[1])});
    }
  }
  return out;
}

}  // namespace detail

// Builds T from the graphs X_{p,q} for the listed primes q (extend the list
// until the rank reaches n-1).
// The default generator list covers the Sturm bound (p+1)/6 for every p
// handled here (p <= 109 needs primes through 17).
inline HeckeAlgebra build_algebra(const VertexSet& V,
                                  std::vector<u64> primes = {2, 3, 5, 7, 11, 13, 17, 19}) {
  HeckeAlgebra A;
  A.p = V.K.p();
  int n = (int)V.js.size();
  A.rank = n - 1;
  if (n == 1) return A;  // trivial algebra

  std::vector<std::vector<BigInt>> vecs{detail::mat_vec(mat_identity(n - 1))};
  for (u64 q : primes) {
    if (q == A.p) continue;
    IntMat T0 = restrict_div0(hecke_to_mat(hecke_matrix(V, q)));
    A.gen_qs.push_back(q);
    A.gens.push_back(T0);
    vecs.push_back(detail::mat_vec(T0));
  }

  // close under multiplication
  auto H = hnf_rows(vecs);
  for (;;) {
    std::vector<std::vector<BigInt>> next = H;
    bool grew = false;
    std::vector<IntMat> basis_mats;
    for (auto& row : H) basis_mats.push_back(detail::vec_mat(row, n - 1));
    for (std::size_t i = 0; i < basis_mats.size(); ++i)
      for (std::size_t j = i; j < basis_mats.size(); ++j) {
        auto prod = detail::mat_vec(mat_mul(basis_mats[i], basis_mats[j]));
        if (!hnf_member(H, prod)) {
          next.push_back(prod);
          grew = true;
        }
      }
    if (!grew) break;
    H = hnf_rows(next);
  }
  if ((int)H.size() != A.rank)
    throw InternalError(
        "Hecke algebra rank " + std::to_string(H.size()) + " != n-1 = " +
        std::to_string(A.rank) + "; supply more generator primes");

  for (auto& row : H) A.basis.push_back(detail::vec_mat(row, n - 1));

  // trace form discriminant
  IntMat gram(A.rank, std::vector<BigInt>(A.rank));
  for (int i = 0; i < A.rank; ++i)
    for (int j = 0; j < A.rank; ++j)
      gram[i][j] = mat_trace(mat_mul(A.basis[i], A.basis[j]));
  A.disc = det_bareiss(gram);
  if (A.disc == 0) throw InternalError("degenerate trace form; algebra not semisimple");

  // generator: first candidate with squarefree characteristic polynomial
  for (auto& [M, desc] : detail::theta_candidates(A)) {
    auto cp = charpoly_int(M);
    if (zp_disc(cp) != 0) {
      A.theta = M;
      A.theta_desc = desc;
      A.charpoly = cp;
      break;
    }
  }
  if (A.charpoly.empty())
    throw InternalError("no squarefree generator found among candidates");
  return A;
}

inline HeckeAlgebra build_algebra(u64 p,
                                  std::vector<u64> primes = {2, 3, 5, 7, 11, 13, 17, 19}) {
  return build_algebra(enumerate_vertices(p), std::move(primes));
}

// ---------------------------------------------------------------------------
// Local splitting of T (x) Z_ell.
// ---------------------------------------------------------------------------

struct LocalSplitting {
  u64 ell = 0;
  int m = 0;                    // working precision: factors are mod ell^m
  int candidate_offset = 0;     // how many suitable generators were skipped
  IntMat theta;                 // generator used (charpoly squarefree mod ell)
  std::vector<BigInt> charpoly;
  std::vector<ZPoly> factors;   // monic, pairwise coprime, sorted by (deg, rep)
  std::vector<int> degrees;     // d_i = deg factors[i]
  int t = 0;
  int t1 = 0;
};

inline LocalSplitting local_split(const HeckeAlgebra& A, u64 ell, int m = 16,
                                  int candidate_offset = 0) {
  if (!is_prime_u64(ell)) throw ParamError("ell must be prime");
  if (A.rank == 0) throw ParamError("trivial algebra has no splitting data");
  FpCtx F(ell);

  // candidate generators until the charpoly is squarefree mod ell
  std::vector<BigInt> P;
  IntMat theta;
  bool found = false;
  int skipped = 0;
  for (auto& [M, desc] : detail::theta_candidates(A)) {
    auto cp = charpoly_int(M);
    if (zp_disc(cp) == 0) continue;
    Poly<FpCtx> pf = zp_to_fp(F, cp);
    if (pf.deg() != A.rank) continue;
    if (poly_gcd(F, pf, poly_derivative(F, pf)).deg() == 0) {
      if (skipped < candidate_offset) { ++skipped; continue; }
      P = cp;
      theta = M;
      found = true;
      break;
    }
  }
  if (!found) {
    if (A.disc % ell == 0)
      throw ExcludedPrimeError("ell divides Disc(T); splitting theory does not apply");
    throw InternalError("no generator with squarefree reduction found");
  }

  LocalSplitting S;
  S.ell = ell;
  S.m = m;
  S.candidate_offset = candidate_offset;
  S.theta = theta;
  S.charpoly = P;

  auto fac = poly_factor(F, zp_to_fp(F, P));
  std::vector<ZPoly> lifted;
  BigInt M = bigpow(BigInt(ell), (unsigned)m);
  for (auto& [g, mult] : fac) {
    if (mult != 1) throw InternalError("squarefree reduction factored with multiplicity");
    ZPoly g0 = fp_to_zp(g);
    if (g.deg() == A.rank) {
      lifted.push_back(P);  // single factor: the lift is P itself
      ZPoly& f = lifted.back();
      zp_reduce_mod(f, M);
      continue;
    }
    Poly<FpCtx> comp = poly_divmod(F, zp_to_fp(F, P), g).first;
    auto [fl, gl] = hensel_lift_pair(P, g0, fp_to_zp(comp), ell, m);
    lifted.push_back(fl);
  }
  // verify the lift multiplies back to P mod ell^m
  ZPoly prod{1};
  for (auto& f : lifted) prod = zp_mul(prod, f);
  ZPoly diff = zp_sub(prod, P);
  zp_reduce_mod(diff, M);
  if (!diff.empty()) throw InternalError("hensel product check failed");

  std::sort(lifted.begin(), lifted.end(), [&](const ZPoly& a, const ZPoly& b) {
    if (zp_deg(a) != zp_deg(b)) return zp_deg(a) < zp_deg(b);
    for (int i = zp_deg(a); i >= 0; --i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  S.factors = std::move(lifted);
  for (auto& f : S.factors) {
    S.degrees.push_back(zp_deg(f));
    if (zp_deg(f) == 1) ++S.t1;
  }
  S.t = (int)S.factors.size();
  int total = 0;
  for (int d : S.degrees) total += d;
  if (total != A.rank) throw InternalError("factor degrees do not sum to the rank");
  return S;
}

// ---------------------------------------------------------------------------
// Valuation tuples.
// ---------------------------------------------------------------------------

using ValTuple = std::vector<int>;

namespace detail {

// T_q as a Q-polynomial in theta (coefficients of theta^j).
inline std::vector<BigRat> in_theta_basis(const IntMat& theta, const std::vector<BigInt>& P,
                                          const IntMat& Tq) {
  int n = (int)theta.size();
  std::vector<IntMat> pows{mat_identity(n)};
  for (int j = 1; j < n; ++j) pows.push_back(mat_mul(pows.back(), theta));
  // solve on n independent coordinates of the flattened system
  std::vector<std::vector<BigRat>> A;
  std::vector<BigRat> b;
  for (int i = 0; i < n && (int)A.size() < n; ++i)
    for (int k = 0; k < n && (int)A.size() < n; ++k) {
      std::vector<BigRat> row(n);
      for (int j = 0; j < n; ++j) row[j] = BigRat(pows[j][i][k]);
      // accept the row if it increases the rank (probe with rational GE)
      A.push_back(row);
      b.push_back(BigRat(Tq[i][k]));
      auto test = A;
      int rank = 0;
      for (int c = 0; c < n && rank < (int)test.size(); ++c) {
        int piv = -1;
        for (int r2 = rank; r2 < (int)test.size(); ++r2)
          if (test[r2][c] != 0) { piv = r2; break; }
        if (piv < 0) continue;
        std::swap(test[rank], test[piv]);
        for (int r2 = 0; r2 < (int)test.size(); ++r2) {
          if (r2 == rank || test[r2][c] == 0) continue;
          BigRat f = test[r2][c] / test[rank][c];
          for (int cc = c; cc < n; ++cc) test[r2][cc] -= f * test[rank][cc];
        }
        ++rank;
      }
      if (rank < (int)A.size()) { A.pop_back(); b.pop_back(); }
    }
  if ((int)A.size() != n) throw InternalError("theta powers do not span");
  auto c = solve_rational(A, b);
  // consistency: verify sum c_j theta^j == Tq exactly
  IntMat num(n, std::vector<BigInt>(n, 0));
  BigInt den = 1;
  for (auto& cj : c) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(cj));
  for (int j = 0; j < n; ++j) {
    BigInt scaled = boost::multiprecision::numerator(c[j]) *
                    (den / boost::multiprecision::denominator(c[j]));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) num[i][k] += scaled * pows[j][i][k];
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (num[i][k] != den * Tq[i][k])
        throw InternalError("T_q is not a polynomial in theta");
  return c;
}

}  // namespace detail

// k_i = v_ell(N_i(q+1 - T_q)) / d_i per factor, where N_i is the norm from
// the unramified factor O_i = Z_ell[x]/(P_i). Precision is raised internally
// until the answer is certified by the Hasse bound |q+1-a_q| < 4q.
inline ValTuple valuation_tuple(const HeckeAlgebra& A, const LocalSplitting& S, u64 q,
                                const IntMat& Tq_div0) {
  if (q == A.p || q == S.ell) throw ParamError("q must avoid p and ell");
  auto c = detail::in_theta_basis(S.theta, S.charpoly, Tq_div0);
  for (auto& cj : c)
    if (boost::multiprecision::denominator(cj) % S.ell == 0)
      throw GeneratorUnsuitableError("theta-basis denominators are divisible by ell");

  int dmax = *std::max_element(S.degrees.begin(), S.degrees.end());
  double log_ell_4q = std::log(4.0 * (double)q) / std::log((double)S.ell);
  int m = std::max({S.m, (int)(dmax * std::ceil(log_ell_4q)) + 2, 4});

  for (;; m *= 2) {
    LocalSplitting Sm = (m == S.m) ? S : local_split(A, S.ell, m, S.candidate_offset);
    BigInt M = bigpow(BigInt(S.ell), (unsigned)m);
    // h(x) = (q+1) - sum c_j x^j (mod ell^m)
    ZPoly h(c.size(), 0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      BigInt numv = boost::multiprecision::numerator(c[j]) % M;
      if (numv < 0) numv += M;
      BigInt denv = boost::multiprecision::denominator(c[j]) % M;
      // modular inverse of the denominator by extended Euclid
      BigInt r0 = M, r1 = denv, s0 = 0, s1 = 1;
      while (r1 != 0) {
        BigInt f = r0 / r1;
        r0 -= f * r1;
        std::swap(r0, r1);
        s0 -= f * s1;
        std::swap(s0, s1);
      }
      if (r0 != 1 && r0 != -1) throw GeneratorUnsuitableError("denominator not invertible");
      BigInt inv = (r0 == 1 ? s0 : -s0) % M;
      if (inv < 0) inv += M;
      h[j] = (M - (numv * inv) % M) % M;
      if (h[j] < 0) h[j] += M;
    }
    h[0] = (h[0] + q + 1) % M;
    zp_trim(h);

    ValTuple ks;
    bool certified = true;
    for (std::size_t i = 0; i < Sm.factors.size(); ++i) {
      const ZPoly& Pi = Sm.factors[i];
      int d = zp_deg(Pi);
      // companion matrix of Pi over Z/ell^m
      IntMat C(d, std::vector<BigInt>(d, 0));
      for (int r = 1; r < d; ++r) C[r][r - 1] = 1;
      for (int r = 0; r < d; ++r) C[r][d - 1] = (M - Pi[r] % M) % M;
      // N = det(h(C)) mod ell^m
      IntMat H(d, std::vector<BigInt>(d, 0));
      for (int r = 0; r < d; ++r) H[r][r] = zp_deg(h) >= 0 ? h[zp_deg(h)] : 0;
      for (int j = zp_deg(h) - 1; j >= 0; --j) {
        H = mat_mul(H, C);
        for (int r = 0; r < d; ++r) H[r][r] += h[j];
        for (auto& row : H)
          for (auto& v : row) v %= M;
      }
      BigInt det = det_bareiss(H) % M;
      if (det < 0) det += M;
      if (det == 0) { certified = false; break; }
      int v = 0;
      BigInt x = det;
      while (x % S.ell == 0) { x /= S.ell; ++v; }
      if (v >= m) { certified = false; break; }
      if (v % d != 0) throw InternalError("norm valuation not divisible by the degree");
      ks.push_back(v / d);
    }
    if (certified) return ks;
    if (m > 4096) throw InternalError("valuation precision runaway");
  }
}

// Convenience: the tuple from integer eigenvalues a_q (all d_i = 1 route).
inline ValTuple valuation_tuple_from_aq(u64 ell, u64 q, const std::vector<i64>& aq) {
  ValTuple ks;
  for (i64 a : aq) {
    BigInt x = BigInt(q) + 1 - a;
    if (x == 0) throw InternalError("q+1-a_q vanishes; Hasse bound violated");
    ks.push_back(valuation(x, BigInt(ell)));
  }
  return ks;
}

// G = (+)_i (Z/ell^{k_i})^{d_i} as abstract invariants.
inline GroupInvariants l_part_group(const LocalSplitting& S, const ValTuple& ks) {
  if (ks.size() != S.degrees.size()) throw ParamError("tuple/shape mismatch");
  std::vector<int> exps;
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (int r = 0; r < S.degrees[i]; ++r)
      if (ks[i] > 0) exps.push_back(ks[i]);
  std::sort(exps.begin(), exps.end());
  GroupInvariants g;
  for (int e : exps) g.factors.push_back(bigpow(BigInt(S.ell), (unsigned)e));
  return g;
}

// ---------------------------------------------------------------------------
// Eigensystems with rational eigenvalues (used for p = 37 class sweeps).
// ---------------------------------------------------------------------------

struct RationalEigensystem {
  std::vector<BigInt> theta_eigs;          // integer eigenvalues of theta
  std::vector<std::vector<BigRat>> vecs;   // one eigenvector per system
};

// All integer roots of the (squarefree) charpoly, or nullopt if the algebra
// has an irrational eigenvalue system.
inline std::optional<RationalEigensystem> rational_eigensystems(const HeckeAlgebra& A) {
  if (A.rank == 0) return RationalEigensystem{};
  std::vector<BigInt> roots;
  BigInt bound = 1;
  for (auto& c : A.charpoly) {
    BigInt a = c < 0 ? BigInt(-c) : c;
    if (a > bound) bound = a;
  }
  bound += 1;
  for (BigInt r = -bound; r <= bound; ++r)
    if (zp_eval(A.charpoly, r) == 0) roots.push_back(r);
  if ((int)roots.size() != A.rank) return std::nullopt;

  RationalEigensystem E;
  E.theta_eigs = roots;
  int n = A.rank;
  for (auto& r : roots) {
    // kernel vector of theta - r
    std::vector<std::vector<BigRat>> M(n, std::vector<BigRat>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        M[i][j] = BigRat(A.theta[i][j] - (i == j ? r : BigInt(0)));
    // row-reduce, find a free column
    int rank = 0;
    std::vector<int> pivcol;
    for (int c = 0; c < n && rank < n; ++c) {
      int piv = -1;
      for (int i = rank; i < n; ++i)
        if (M[i][c] != 0) { piv = i; break; }
      if (piv < 0) continue;
      std::swap(M[rank], M[piv]);
      BigRat f0 = M[rank][c];
      for (int j = 0; j < n; ++j) M[rank][j] /= f0;
      for (int i = 0; i < n; ++i) {
        if (i == rank || M[i][c] == 0) continue;
        BigRat f = M[i][c];
        for (int j = 0; j < n; ++j) M[i][j] -= f * M[rank][j];
      }
      pivcol.push_back(c);
      ++rank;
    }
    if (rank != n - 1) throw InternalError("eigenvalue multiplicity > 1");
    int freec = -1;
    for (int c2 = 0; c2 < n; ++c2)
      if (std::find(pivcol.begin(), pivcol.end(), c2) == pivcol.end()) { freec = c2; break; }
    std::vector<BigRat> v(n, BigRat(0));
    v[freec] = 1;
    for (int i = 0; i < rank; ++i) v[pivcol[i]] = -M[i][freec];
    E.vecs.push_back(v);
  }
  return E;
}

// Eigenvalue of the operator Tq on the given eigenvector; verifies
// Tq v = a v exactly.
inline BigInt operator_eigenvalue(const IntMat& Tq, const std::vector<BigRat>& v) {
  int n = (int)Tq.size();
  std::vector<BigRat> w(n, BigRat(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[i] += BigRat(Tq[i][j]) * v[j];
  int nz = -1;
  for (int i = 0; i < n; ++i)
    if (v[i] != 0) { nz = i; break; }
  BigRat a = w[nz] / v[nz];
  for (int i = 0; i < n; ++i)
    if (w[i] != a * v[i]) throw InternalError("not a simultaneous eigenvector");
  if (boost::multiprecision::denominator(a) != 1)
    throw InternalError("non-integral Hecke eigenvalue");
  return boost::multiprecision::numerator(a);
}

// ---------------------------------------------------------------------------
// Field discriminant of an irreducible monic integer cubic (for the p = 61
// eigenvalue field check).
// ---------------------------------------------------------------------------

namespace detail {

// Dedekind's criterion: is Z[x]/(g) maximal at rho?
inline bool dedekind_maximal_at(const ZPoly& g, u64 rho) {
  FpCtx F(rho);
  auto gf = zp_to_fp(F, g);
  auto fac = poly_factor(F, gf);
  Poly<FpCtx> gstar = poly_const(F, F.one()), hstar = poly_const(F, F.one());
  for (auto& [fi, e] : fac) {
    gstar = poly_mul(F, gstar, fi);
    for (int k = 1; k < e; ++k) hstar = poly_mul(F, hstar, fi);
  }
  // F = (g* h* - g)/rho lifted over Z
  ZPoly gz = fp_to_zp(gstar), hz = fp_to_zp(hstar);
  ZPoly diff = zp_sub(zp_mul(gz, hz), g);
  ZPoly Fq;
  for (auto& v : diff) {
    if (v % (i64)rho != 0) throw InternalError("dedekind: remainder not divisible");
    Fq.push_back(v / (i64)rho);
  }
  zp_trim(Fq);
  auto Fbar = zp_to_fp(F, Fq);
  auto gcd1 = poly_gcd(F, Fbar, gstar);
  auto gcd2 = poly_gcd(F, gcd1, hstar);
  return gcd2.deg() == 0;
}

}  // namespace detail

// Discriminant of the maximal order of Q[x]/(g), g a monic irreducible
// cubic. Non-maximal primes are handled by enlarging the order with
// integral elements (a + b th + c th^2)/rho found by exhaustive scan
// (rho here is tiny).
inline BigInt cubic_field_disc(const ZPoly& g) {
  if (zp_deg(g) != 3 || g[3] != 1) throw ParamError("expected a monic cubic");
  BigInt disc = zp_disc(g);
  if (disc == 0) throw ParamError("cubic is not separable");

  // power sums Tr(th^k), k = 0..4, via Newton from g = x^3 + a x^2 + b x + c
  BigInt a = g[2], b = g[1], c = g[0];
  std::vector<BigRat> tr(5);
  tr[0] = 3;
  tr[1] = -a;
  tr[2] = a * a - 2 * b;
  tr[3] = -a * tr[2] - b * tr[1] - 3 * c;
  tr[4] = -a * tr[3] - b * tr[2] - c * tr[1];

  // order basis rows over the power basis {1, th, th^2}, rational entries
  std::vector<std::vector<BigRat>> B{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  // multiply two power-basis vectors modulo g
  auto mul_vec = [&](const std::vector<BigRat>& u, const std::vector<BigRat>& v) {
    std::vector<BigRat> prod(5, BigRat(0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) prod[i + j] += u[i] * v[j];
    for (int k = 4; k >= 3; --k) {
      BigRat coef = prod[k];
      if (coef == 0) continue;
      prod[k] = 0;
      prod[k - 3] -= coef * BigRat(c);
      prod[k - 2] -= coef * BigRat(b);
      prod[k - 1] -= coef * BigRat(a);
    }
    prod.resize(3);
    return prod;
  };
  auto trace_of = [&](const std::vector<BigRat>& u) {
    return u[0] * tr[0] + u[1] * tr[1] + u[2] * tr[2];
  };
  auto order_disc = [&]() {
    std::vector<std::vector<BigRat>> G(3, std::vector<BigRat>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) G[i][j] = trace_of(mul_vec(B[i], B[j]));
    // 3x3 rational determinant
    BigRat det = G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1]) -
                 G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0]) +
                 G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0]);
    if (boost::multiprecision::denominator(BigRat(det)) != 1)
      throw InternalError("order discriminant not integral");
    return boost::multiprecision::numerator(det);
  };
  auto is_integral = [&](const std::vector<BigRat>& u) {
    // char poly of multiplication by u via traces of u, u^2, u^3
    std::vector<BigRat> u2 = mul_vec(u, u);
    std::vector<BigRat> u3 = mul_vec(u2, u);
    BigRat p1 = trace_of(u), p2 = trace_of(u2), p3 = trace_of(u3);
    BigRat e1 = p1;
    BigRat e2 = (e1 * p1 - p2) / 2;
    BigRat e3 = (e2 * p1 - e1 * p2 + p3) / 3;
    return boost::multiprecision::denominator(e1) == 1 &&
           boost::multiprecision::denominator(e2) == 1 &&
           boost::multiprecision::denominator(e3) == 1;
  };
  auto in_order = [&](const std::vector<BigRat>& u) {
    // solve B^T x = u over Q and check integrality
    std::vector<std::vector<BigRat>> Bt(3, std::vector<BigRat>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Bt[i][j] = B[j][i];
    auto x = solve_rational(Bt, u);
    for (auto& v : x)
      if (boost::multiprecision::denominator(v) != 1) return false;
    return true;
  };

  BigInt d = disc < 0 ? BigInt(-disc) : disc;
  for (auto [rho, e] : factorize(d)) {
    if (e < 2) continue;
    if (detail::dedekind_maximal_at(g, rho)) continue;
    if (rho > 97) throw ResourceLimitError("index prime too large for exhaustive scan");
    bool grew = true;
    while (grew) {
      grew = false;
      for (u64 ia = 0; ia < rho && !grew; ++ia)
        for (u64 ib = 0; ib < rho && !grew; ++ib)
          for (u64 ic = 0; ic < rho && !grew; ++ic) {
            if (ia == 0 && ib == 0 && ic == 0) continue;
            std::vector<BigRat> u(3, BigRat(0));
            for (int k = 0; k < 3; ++k)
              u[k] = (BigRat(ia) * B[0][k] + BigRat(ib) * B[1][k] + BigRat(ic) * B[2][k]) /
                     BigRat(rho);
            if (!is_integral(u) || in_order(u)) continue;
            // enlarge: HNF of the 4 rows scaled to integers
            BigInt den = 1;
            auto all = B;
            all.push_back(u);
            for (auto& row : all)
              for (auto& v : row)
                den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(v));
            std::vector<std::vector<BigInt>> rows;
            for (auto& row : all) {
              std::vector<BigInt> r(3);
              for (int k = 0; k < 3; ++k) {
                BigRat s = row[k] * BigRat(den);
                r[k] = boost::multiprecision::numerator(s);
              }
              rows.push_back(r);
            }
            auto H = hnf_rows(rows);
            if (H.size() != 3) throw InternalError("order lattice degenerated");
            for (int i = 0; i < 3; ++i)
              for (int k = 0; k < 3; ++k) B[i][k] = BigRat(H[i][k]) / BigRat(den);
            grew = true;
          }
    }
  }
  return order_disc();
}

}  // namespace sspile
