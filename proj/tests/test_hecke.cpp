#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "sspile/hecke.hpp"

using namespace sspile;

namespace {
BigInt isqrt_exact(const BigInt& n) {
  BigInt r = boost::multiprecision::sqrt(n);
  REQUIRE(r * r == n);
  return r;
}

std::multiset<std::pair<int, int>> tuple_shape(const LocalSplitting& S, const ValTuple& k) {
  std::multiset<std::pair<int, int>> out;
  for (std::size_t i = 0; i < k.size(); ++i) out.insert({S.degrees[i], k[i]});
  return out;
}
}  // namespace

TEST_CASE("integer linear algebra helpers") {
  // charpoly of the golden T_2 matrix is x^3 - x^2 - 6x
  IntMat T{{1, 1, 1}, {1, 0, 2}, {1, 2, 0}};
  REQUIRE(charpoly_int(T) == std::vector<BigInt>{0, -6, -1, 1});

  // HNF membership
  std::vector<std::vector<BigInt>> rows{{2, 0, 1}, {0, 3, 1}};
  auto H = hnf_rows(rows);
  REQUIRE(hnf_member(H, {2, 0, 1}));
  REQUIRE(hnf_member(H, {2, 3, 2}));
  REQUIRE(hnf_member(H, {4, 3, 3}));
  REQUIRE_FALSE(hnf_member(H, {1, 0, 1}));
  REQUIRE_FALSE(hnf_member(H, {0, 0, 1}));

  // discriminants
  REQUIRE(zp_disc({-1, 0, 1}) == 4);            // x^2 - 1
  REQUIRE(zp_disc({0, 2, 1}) == 4);             // x^2 + 2x
  REQUIRE(zp_disc({-2, -30, 0, 1}) == 107892);  // x^3 - 30x - 2 = 148 * 27^2
}

TEST_CASE("hensel lifting") {
  // x^2 - 1 = (x-1)(x+1) mod 3, lifted to mod 3^6
  ZPoly P{-1, 0, 1};
  ZPoly f{2, 1};  // x - 1 = x + 2 mod 3
  ZPoly g{1, 1};
  auto [fl, gl] = hensel_lift_pair(P, f, g, 3, 6);
  BigInt M = bigpow(3, 6);
  REQUIRE(zp_eval(fl, 1) % M == 0);
  REQUIRE(zp_eval(gl, BigInt(-1)) % M == 0);
  ZPoly prod = zp_mul(fl, gl);
  ZPoly diff = zp_sub(prod, P);
  zp_reduce_mod(diff, M);
  REQUIRE(diff.empty());
}

TEST_CASE("hecke algebra for p = 37: discriminant 4, index two in Z x Z") {
  HeckeAlgebra A = build_algebra(37);
  REQUIRE(A.rank == 2);
  REQUIRE(A.disc == 4);
  // maximal order Z x Z has discriminant 1, so the index is sqrt(4) = 2
  REQUIRE(isqrt_exact(A.disc) == 2);
  auto E = rational_eigensystems(A);
  REQUIRE(E.has_value());
  REQUIRE(E->theta_eigs.size() == 2);
}

TEST_CASE("hecke algebra for p = 61: discriminant 2^4*37, cubic field disc 148") {
  HeckeAlgebra A = build_algebra(61);
  REQUIRE(A.rank == 4);
  REQUIRE(A.disc == 592);
  REQUIRE_FALSE(rational_eigensystems(A).has_value());

  // the characteristic polynomial splits as (linear)*(irreducible cubic)
  // whose root field has discriminant 148; index then is sqrt(592/148) = 2
  BigInt bound = 1;
  for (auto& c : A.charpoly)
    if (boost::multiprecision::abs(c) > bound) bound = boost::multiprecision::abs(c);
  bound += 1;
  std::optional<BigInt> root;
  for (BigInt r = -bound; r <= bound; ++r)
    if (zp_eval(A.charpoly, r) == 0) { root = r; break; }
  REQUIRE(root.has_value());
  // divide out (x - root)
  ZPoly cubic(4);
  BigInt carry = 0;
  {
    ZPoly P = A.charpoly;
    std::vector<BigInt> qc(P.size() - 1);
    BigInt rem = 0;
    for (int i = (int)P.size() - 1; i >= 1; --i) {
      qc[i - 1] = P[i] + rem;
      rem = qc[i - 1] * *root;
    }
    REQUIRE(P[0] + rem == 0);
    cubic = qc;
  }
  (void)carry;
  REQUIRE(zp_deg(cubic) == 3);
  REQUIRE(cubic_field_disc(cubic) == 148);
  REQUIRE(isqrt_exact(A.disc / 148) == 2);
}

TEST_CASE("trivial algebra for p = 13") {
  HeckeAlgebra A = build_algebra(13);
  REQUIRE(A.rank == 0);
  REQUIRE_THROWS_AS(local_split(A, 5), ParamError);
}

TEST_CASE("local splittings") {
  HeckeAlgebra A37 = build_algebra(37);
  SECTION("p=37, ell=5: two rational factors") {
    LocalSplitting S = local_split(A37, 5);
    REQUIRE(S.t == 2);
    REQUIRE(S.degrees == std::vector<int>{1, 1});
    REQUIRE(S.t1 == 2);
  }
  HeckeAlgebra A61 = build_algebra(61);
  SECTION("p=61, ell=13: degrees (1,1,2)") {
    LocalSplitting S = local_split(A61, 13);
    REQUIRE(S.t == 3);
    REQUIRE(S.degrees == std::vector<int>{1, 1, 2});
    REQUIRE(S.t1 == 2);
  }
  SECTION("p=61, ell=37 is excluded (37 | Disc)") {
    REQUIRE_THROWS_AS(local_split(A61, 37), ExcludedPrimeError);
  }
  SECTION("p=61: splitting degrees match the cubic x^3 - 30x - 2 mod ell") {
    ZPoly cubic{-2, -30, 0, 1};
    for (u64 ell : {7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 41ull, 43ull, 47ull}) {
      LocalSplitting S = local_split(A61, ell);
      FpCtx F(ell);
      std::vector<int> want{1};  // the rational eigenform factor
      for (auto& [f, m] : poly_factor(F, zp_to_fp(F, cubic))) {
        REQUIRE(m == 1);
        want.push_back(f.deg());
      }
      std::sort(want.begin(), want.end());
      REQUIRE(S.degrees == want);
    }
  }
}

TEST_CASE("valuation tuples against the sandpile group") {
  VertexSet V = enumerate_vertices(37);
  HeckeAlgebra A = build_algebra(V);
  IntMat T2 = restrict_div0(hecke_to_mat(hecke_matrix(V, 2)));

  SECTION("p=37, q=2, ell=5: tuple {1,0} gives Z/5") {
    LocalSplitting S = local_split(A, 5);
    ValTuple k = valuation_tuple(A, S, 2, T2);
    std::multiset<int> ks(k.begin(), k.end());
    REQUIRE(ks == std::multiset<int>{0, 1});
    GroupInvariants g = l_part_group(S, k);
    REQUIRE(g.factors == std::vector<BigInt>{5});
    // matches the sandpile route
    REQUIRE(jacobian_reduced_laplacian(hecke_matrix(V, 2)).l_part(5) == g.l_part(5));
  }
  SECTION("p=37, q=2, ell=7: trivial 7-part") {
    LocalSplitting S = local_split(A, 7);
    ValTuple k = valuation_tuple(A, S, 2, T2);
    REQUIRE(k == ValTuple{0, 0});
  }
  SECTION("q in {p, ell} is rejected") {
    LocalSplitting S = local_split(A, 5);
    REQUIRE_THROWS_AS(valuation_tuple(A, S, 5, T2), ParamError);
    REQUIRE_THROWS_AS(valuation_tuple(A, S, 37, T2), ParamError);
  }
}

TEST_CASE("p=61, q=2, ell=13 matches the SNF 13-part") {
  VertexSet V = enumerate_vertices(61);
  HeckeAlgebra A = build_algebra(V);
  LocalSplitting S = local_split(A, 13);
  HeckeMatrix T = hecke_matrix(V, 2);
  ValTuple k = valuation_tuple(A, S, 2, restrict_div0(hecke_to_mat(T)));
  REQUIRE(l_part_group(S, k).l_part(13) == jacobian_reduced_laplacian(T).l_part(13));
}

TEST_CASE("valuation tuple is independent of the generator") {
  VertexSet V = enumerate_vertices(61);
  HeckeAlgebra A = build_algebra(V);
  IntMat T3 = restrict_div0(hecke_to_mat(hecke_matrix(V, 3)));
  LocalSplitting S1 = local_split(A, 7, 16, 0);
  LocalSplitting S2 = local_split(A, 7, 16, 1);
  REQUIRE_FALSE(S1.charpoly == S2.charpoly);
  ValTuple k1 = valuation_tuple(A, S1, 3, T3);
  ValTuple k2 = valuation_tuple(A, S2, 3, T3);
  REQUIRE(tuple_shape(S1, k1) == tuple_shape(S2, k2));
}

TEST_CASE("l-part equivalence mesh: Prop 3.4 route vs SNF route") {
  // for p in {37, 61, 73, 97, 109}, primes q <= 13, ell <= 50 admissible
  for (u64 p : {37ull, 61ull, 73ull, 97ull, 109ull}) {
    VertexSet V = enumerate_vertices(p);
    HeckeAlgebra A = build_algebra(V);
    u64 n = (p - 1) / 12;
    std::map<u64, LocalSplitting> splits;
    for (u64 ell : {5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull,
                    41ull, 43ull, 47ull}) {
      if ((BigInt(6) * n * A.disc) % ell == 0) continue;
      splits.emplace(ell, local_split(A, ell, 24));
    }
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
      if (q == p) continue;
      HeckeMatrix T = hecke_matrix(V, q);
      GroupInvariants J = jacobian_reduced_laplacian(T);
      IntMat T0 = restrict_div0(hecke_to_mat(T));
      for (auto& [ell, S] : splits) {
        if (ell == q) continue;
        ValTuple k = valuation_tuple(A, S, q, T0);
        INFO("p=" << p << " q=" << q << " ell=" << ell);
        REQUIRE(l_part_group(S, k).l_part(ell) == J.l_part(ell));
      }
    }
  }
}

TEST_CASE("valuation tuples from integer eigenvalues") {
  REQUIRE(valuation_tuple_from_aq(5, 2, {-2, 0}) == ValTuple{1, 0});
  REQUIRE(valuation_tuple_from_aq(7, 2, {-2, 0}) == ValTuple{0, 0});
  REQUIRE(valuation_tuple_from_aq(5, 101, {-2, 2}) == ValTuple{0, 2});  // v_5(104)=0, v_5(100)=2
}

TEST_CASE("cubic field discriminants") {
  REQUIRE(cubic_field_disc({-2, -30, 0, 1}) == 148);   // index 27 removed
  REQUIRE(cubic_field_disc({1, -3, -1, 1}) == 148);    // already maximal
  REQUIRE(cubic_field_disc({-1, -4, 0, 1}) == 229);    // squarefree disc
  REQUIRE(cubic_field_disc({-1, -1, 0, 1}) == -23);    // complex cubic
}
