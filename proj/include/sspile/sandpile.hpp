#pragma once

// Sandpile (Jacobian) groups of X_{p,q} from integer Smith normal form,
// via both the reduced Laplacian and the Hecke-equivariant quotient of the
// Laplacian on degree-zero divisors. Arbitrary-precision integers
// throughout: intermediate SNF entries can exceed machine words.

#include "isogeny.hpp"

namespace sspile {

using IntMat = std::vector<std::vector<BigInt>>;

inline IntMat hecke_to_mat(const HeckeMatrix& T) {
  int n = T.n();
  IntMat M(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = T.m[i][j];
  return M;
}

// Laplacian L_q = (q+1) - T_q.
inline IntMat laplacian(const HeckeMatrix& T) {
  int n = T.n();
  IntMat L(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      L[i][j] = (i == j ? BigInt(T.q) + 1 : BigInt(0)) - T.m[i][j];
  return L;
}

// Matrix of the action on Div^0 in the basis {e_i - e_n : i < n}:
// M0[k][i] = M[k][i] - M[k][n-1] for k,i < n-1.
inline IntMat restrict_div0(const IntMat& M) {
  int n = (int)M.size();
  IntMat R(n - 1, std::vector<BigInt>(n - 1));
  for (int k = 0; k + 1 < n; ++k)
    for (int i = 0; i + 1 < n; ++i) R[k][i] = M[k][i] - M[k][n - 1];
  return R;
}

// Fraction-free determinant (Bareiss).
inline BigInt det_bareiss(IntMat a) {
  int n = (int)a.size();
  if (n == 0) return 1;
  BigInt sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) { piv = i; break; }
      if (piv < 0) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// ---------------------------------------------------------------------------
// Smith normal form.
// ---------------------------------------------------------------------------

struct SNFResult {
  std::vector<BigInt> factors;  // d_1 | d_2 | ... | d_r, positive, including 1s
  int rank = 0;
};

// Smallest-nonzero-pivot reduction; n is small here, entry growth is the
// enemy, not asymptotic complexity.
inline SNFResult smith_normal_form(IntMat a) {
  int rows = (int)a.size();
  int cols = rows ? (int)a[0].size() : 0;
  SNFResult out;
  int t = 0;
  auto abs_ = [](const BigInt& v) { return v < 0 ? BigInt(-v) : v; };
  while (t < rows && t < cols) {
    // locate the minimal nonzero |entry| in the trailing submatrix
    int pr = -1, pc = -1;
    BigInt best;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pr < 0 || abs_(a[i][j]) < best)) {
          best = abs_(a[i][j]);
          pr = i;
          pc = j;
        }
    if (pr < 0) break;
    std::swap(a[t], a[pr]);
    for (int i = t; i < rows; ++i) std::swap(a[i][t], a[i][pc]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        BigInt f = a[i][t] / a[t][t];
        for (int j = t; j < cols; ++j) a[i][j] -= f * a[t][j];
        if (a[i][t] != 0) {  // remainder smaller than pivot: swap up and redo
          std::swap(a[t], a[i]);
          clean = false;
        }
      }
      for (int j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        BigInt f = a[t][j] / a[t][t];
        for (int i = t; i < rows; ++i) a[i][j] -= f * a[i][t];
        if (a[t][j] != 0) {
          for (int i = t; i < rows; ++i) std::swap(a[i][t], a[i][j]);
          clean = false;
        }
      }
      if (clean) {
        // pivot must divide the rest of the submatrix
        for (int i = t + 1; i < rows && clean; ++i)
          for (int j = t + 1; j < cols && clean; ++j)
            if (a[i][j] % a[t][t] != 0) {
              for (int jj = t; jj < cols; ++jj) a[t][jj] += a[i][jj];
              clean = false;
            }
      }
    }
    out.factors.push_back(abs_(a[t][t]));
    ++t;
  }
  out.rank = (int)out.factors.size();
  // enforce the divisibility chain
  for (std::size_t i = 0; i + 1 < out.factors.size(); ++i)
    for (std::size_t j = i + 1; j < out.factors.size(); ++j) {
      BigInt g = boost::multiprecision::gcd(out.factors[i], out.factors[j]);
      BigInt l = out.factors[i] / g * out.factors[j];
      out.factors[i] = g;
      out.factors[j] = l;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Group invariants.
// ---------------------------------------------------------------------------

struct GroupInvariants {
  std::vector<BigInt> factors;  // nontrivial invariant factors, d_1 | d_2 | ...

  BigInt order() const {
    BigInt o = 1;
    for (auto& d : factors) o *= d;
    return o;
  }
  bool trivial() const { return factors.empty(); }
  bool cyclic() const { return factors.size() <= 1; }

  // exponents of the l-primary part, ascending (empty if l does not divide
  // the order)
  std::vector<int> l_part(u64 l) const {
    std::vector<int> e;
    for (auto& d : factors) {
      int v = 0;
      BigInt x = d;
      while (x % l == 0) { x /= l; ++v; }
      if (v > 0) e.push_back(v);
    }
    std::sort(e.begin(), e.end());
    return e;
  }

  bool operator==(const GroupInvariants&) const = default;
};

inline GroupInvariants invariants_from_snf(const SNFResult& s) {
  GroupInvariants g;
  for (auto& d : s.factors)
    if (d != 1) g.factors.push_back(d);
  for (auto& d : g.factors)
    if (d == 0) throw InternalError("cokernel is infinite; Laplacian rank too small");
  return g;
}

// J(X_{p,q}) as the cokernel of the reduced Laplacian (delete one vertex).
inline GroupInvariants jacobian_reduced_laplacian(const HeckeMatrix& T) {
  int n = T.n();
  if (n == 1) return {};
  IntMat L = laplacian(T);
  IntMat R(n - 1, std::vector<BigInt>(n - 1));
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) R[i - 1][j - 1] = L[i][j];
  SNFResult s = smith_normal_form(std::move(R));
  if (s.rank != n - 1) throw InternalError("reduced Laplacian is rank deficient");
  return invariants_from_snf(s);
}

// J via coker(L_q | Div^0) / <L_q(E_pivot)>: the Div^0 matrix with one
// appended column expressing L_q(e_pivot) in the basis {e_i - e_n}.
inline GroupInvariants jacobian_hecke_quotient(const HeckeMatrix& T, int pivot = 0) {
  int n = T.n();
  if (n == 1) return {};
  if (pivot < 0 || pivot >= n) throw ParamError("pivot out of range");
  IntMat L = laplacian(T);
  IntMat M = restrict_div0(L);
  // L(e_pivot) has degree zero, so its coordinates in the basis are simply
  // the first n-1 entries of the column.
  for (int k = 0; k + 1 < n; ++k) M[k].push_back(L[k][pivot]);
  SNFResult s = smith_normal_form(std::move(M));
  if (s.rank != n - 1) throw InternalError("L_q|Div^0 is rank deficient");
  return invariants_from_snf(s);
}

// #J = det(L_q | Div^0) / n; must divide exactly.
inline BigInt jacobian_order_det(const HeckeMatrix& T) {
  int n = T.n();
  if (n == 1) return 1;
  BigInt d = det_bareiss(restrict_div0(laplacian(T)));
  if (d < 0) d = -d;
  if (d % n != 0)
    throw InternalError("det(L_q|Div^0) is not divisible by n");
  return d / n;
}

}  // namespace sspile
