#include <catch2/catch_amalgamated.hpp>

#include "sspile/nt.hpp"

using namespace sspile;

TEST_CASE("modular arithmetic through 128-bit intermediates") {
  u64 p = (1ull << 61) - 1;  // Mersenne prime
  u64 a = p - 12345, b = p - 6789;
  REQUIRE(mulmod(a, b, p) == (u64)((u128)a * b % p));
  REQUIRE(powmod(3, p - 1, p) == 1);
  REQUIRE(mulmod(invmod(a, p), a, p) == 1);
}

TEST_CASE("jacobi symbol matches Euler's criterion on a prime") {
  u64 p = 1000003;
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    u64 a = rng.below(p - 1) + 1;
    int e = powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
    REQUIRE(jacobi((i64)a, p) == e);
  }
}

TEST_CASE("deterministic Miller-Rabin") {
  REQUIRE(is_prime_u64(2));
  REQUIRE(is_prime_u64(37));
  REQUIRE(is_prime_u64((1ull << 61) - 1));
  REQUIRE_FALSE(is_prime_u64(1));
  REQUIRE_FALSE(is_prime_u64(561));        // Carmichael
  REQUIRE_FALSE(is_prime_u64((1ull << 32) + 1));
  // cross-check against trial division on a block
  for (u64 n = 2; n < 2000; ++n) {
    bool prime = n >= 2;
    for (u64 d = 2; d * d <= n; ++d)
      if (n % d == 0) { prime = false; break; }
    REQUIRE(is_prime_u64(n) == prime);
  }
}

TEST_CASE("factorize recombines") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    u64 n = rng.below(1ull << 40) + 2;
    u64 prod = 1;
    for (auto [p, e] : factorize(n)) {
      REQUIRE(is_prime_u64(p));
      for (int k = 0; k < e; ++k) prod *= p;
    }
    REQUIRE(prod == n);
  }
  auto f = factorize((u64)592);
  REQUIRE(f == std::vector<std::pair<u64, int>>{{2, 4}, {37, 1}});
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42, 0), b(42, 0), c(42, 1);
  REQUIRE(a.next() == b.next());
  REQUIRE(a.next() == b.next());
  Rng a2(42, 0);
  REQUIRE(a2.next() != c.next());
}

TEST_CASE("parallel_blocks covers every block exactly once") {
  std::vector<std::atomic<int>> hits(64);
  parallel_blocks(64, 8, [&](std::size_t b) { hits[b]++; });
  for (auto& h : hits) REQUIRE(h.load() == 1);
}
