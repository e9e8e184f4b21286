#include <catch2/catch_amalgamated.hpp>

#include "sspile/sandpile.hpp"

using namespace sspile;

TEST_CASE("smith normal form basics") {
  SECTION("diag(4,6) -> [2,12]") {
    IntMat m{{4, 0}, {0, 6}};
    auto s = smith_normal_form(m);
    REQUIRE(s.factors == std::vector<BigInt>{2, 12});
  }
  SECTION("[[3,-2],[-2,3]] -> [1,5]") {
    IntMat m{{3, -2}, {-2, 3}};
    auto s = smith_normal_form(m);
    REQUIRE(s.factors == std::vector<BigInt>{1, 5});
  }
  SECTION("zero matrix has rank 0") {
    IntMat m{{0, 0}, {0, 0}};
    auto s = smith_normal_form(m);
    REQUIRE(s.rank == 0);
    REQUIRE(s.factors.empty());
  }
  SECTION("divisibility chain and product invariants on random matrices") {
    Rng rng(99);
    for (int t = 0; t < 40; ++t) {
      int n = 2 + (int)rng.below(3);
      IntMat m(n, std::vector<BigInt>(n));
      for (auto& row : m)
        for (auto& v : row) v = (i64)rng.below(21) - 10;
      auto s = smith_normal_form(m);
      for (std::size_t i = 0; i + 1 < s.factors.size(); ++i)
        REQUIRE(s.factors[i + 1] % s.factors[i] == 0);
      BigInt prod = 1;
      for (auto& d : s.factors) prod *= d;
      BigInt det = det_bareiss(m);
      if ((int)s.factors.size() == n) {
        REQUIRE((det == prod || det == -prod));
      } else {
        REQUIRE(det == 0);
      }
    }
  }
}

TEST_CASE("jacobian of X_{37,2} is Z/5 by all three routes") {
  HeckeMatrix T = hecke_matrix(37, 2);
  GroupInvariants r = jacobian_reduced_laplacian(T);
  REQUIRE(r.factors == std::vector<BigInt>{5});
  for (int pivot = 0; pivot < 3; ++pivot)
    REQUIRE(jacobian_hecke_quotient(T, pivot) == r);  // pivot invariance
  // det route: eigenvalues of T_2 on Div^0 are {0,-2}; (3-0)(3+2)/3 = 5
  REQUIRE(jacobian_order_det(T) == 5);
}

TEST_CASE("one-vertex graph has trivial jacobian") {
  HeckeMatrix T = hecke_matrix(13, 2);
  REQUIRE(jacobian_reduced_laplacian(T).trivial());
  REQUIRE(jacobian_hecke_quotient(T).trivial());
  REQUIRE(jacobian_order_det(T) == 1);
}

TEST_CASE("cross-method equality over small (p,q)") {
  for (u64 p : {37ull, 61ull}) {
    VertexSet V = enumerate_vertices(p);
    for (u64 q : {2ull, 3ull, 5ull, 7ull}) {
      HeckeMatrix T = hecke_matrix(V, q);
      GroupInvariants a = jacobian_reduced_laplacian(T);
      GroupInvariants b = jacobian_hecke_quotient(T);
      REQUIRE(a == b);
      REQUIRE(a.order() == jacobian_order_det(T));
    }
  }
}

TEST_CASE("the Laplacian annihilates the all-ones divisor") {
  HeckeMatrix T = hecke_matrix(61, 5);
  IntMat L = laplacian(T);
  for (int i = 0; i < T.n(); ++i) {
    BigInt rowsum = 0, colsum = 0;
    for (int j = 0; j < T.n(); ++j) { rowsum += L[i][j]; colsum += L[j][i]; }
    REQUIRE(rowsum == 0);
    REQUIRE(colsum == 0);
  }
}

TEST_CASE("group invariants accessors") {
  GroupInvariants g{{BigInt(5), BigInt(25)}};
  REQUIRE(g.order() == 125);
  REQUIRE_FALSE(g.cyclic());
  REQUIRE(g.l_part(5) == std::vector<int>{1, 2});
  REQUIRE(g.l_part(7).empty());
  GroupInvariants c{{BigInt(12)}};
  REQUIRE(c.cyclic());
  REQUIRE(c.l_part(2) == std::vector<int>{2});
  REQUIRE(c.l_part(3) == std::vector<int>{1});
}
