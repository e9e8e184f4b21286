#pragma once

// Basic integer number theory used throughout: 64-bit modular arithmetic
// through 128-bit intermediates, primality, Jacobi symbols, valuations,
// deterministic seedable RNG, small-integer factorization, and a blocked
// parallel-for whose results are merged in block order (schedule independent).

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sspile {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Error taxonomy shared by all modules. CLI exit codes: usage/parameter
// errors -> 2, resource limits -> 3, verification failures -> 1.
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u128)a * b % m; }

inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  if (s >= m || s < a) s -= m;
  return s;
}

inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = m == 1 ? 0 : 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

inline u64 powmod(u64 a, const BigInt& e, u64 m) {
  u64 r = m == 1 ? 0 : 1;
  a %= m;
  BigInt k = e;
  while (k > 0) {
    if (boost::multiprecision::bit_test(k, 0)) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    k >>= 1;
  }
  return r;
}

// ax + by = gcd(a,b)
inline i64 extgcd(i64 a, i64 b, i64& x, i64& y) {
  if (b == 0) { x = 1; y = 0; return a; }
  i64 x1, y1;
  i64 g = extgcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

inline u64 invmod(u64 a, u64 m) {
  i64 x, y;
  i64 g = extgcd((i64)(a % m), (i64)m, x, y);
  if (g != 1 && g != -1) throw std::domain_error("invmod: not invertible");
  i64 r = x % (i64)m;
  if (r < 0) r += (i64)m;
  return (u64)r;
}

// Jacobi symbol (a|n) for odd n > 0.
inline int jacobi(i64 a, u64 n) {
  if (n % 2 == 0) throw std::domain_error("jacobi: even modulus");
  a %= (i64)n;
  if (a < 0) a += (i64)n;
  u64 ua = (u64)a, un = n;
  int t = 1;
  while (ua != 0) {
    while (ua % 2 == 0) {
      ua /= 2;
      u64 r = un % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(ua, un);
    if (ua % 4 == 3 && un % 4 == 3) t = -t;
    ua %= un;
  }
  return un == 1 ? t : 0;
}

// Deterministic Miller-Rabin, valid for all n < 2^64.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while (d % 2 == 0) { d /= 2; ++s; }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a % n, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { comp = false; break; }
    }
    if (comp) return false;
  }
  return true;
}

inline int valuation(u64 n, u64 p) {
  if (n == 0) throw std::domain_error("valuation of 0");
  int v = 0;
  while (n % p == 0) { n /= p; ++v; }
  return v;
}

inline int valuation(BigInt n, const BigInt& p) {
  if (n == 0) throw std::domain_error("valuation of 0");
  if (n < 0) n = -n;
  int v = 0;
  while (n % p == 0) { n /= p; ++v; }
  return v;
}

inline BigInt bigpow(BigInt b, unsigned e) {
  BigInt r = 1;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// --- RNG: splitmix64 for stream derivation, xoshiro256++ for the draws. ---

inline u64 splitmix64(u64& state) {
  u64 z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(u64 seed, u64 stream = 0) {
    u64 sm = seed ^ (0x7fb5d329728ea185ull * (stream + 1));
    for (auto& w : s_) w = splitmix64(sm);
    if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
  }

  u64 next() {
    u64 result = rotl(s_[0] + s_[3], 23) + s_[0];
    u64 t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, bound), bound > 0. Rejection keeps it exactly uniform.
  u64 below(u64 bound) {
    u64 threshold = (0 - bound) % bound;
    for (;;) {
      u64 r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

 private:
  static u64 rotl(u64 x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<u64, 4> s_;
};

// --- Small-integer factorization (trial division + Pollard rho). ---

namespace detail {
inline u64 pollard_rho(u64 n, Rng& rng) {
  if (n % 2 == 0) return 2;
  for (;;) {
    u64 x = rng.below(n - 2) + 2, y = x, c = rng.below(n - 1) + 1, d = 1;
    while (d == 1) {
      x = addmod(mulmod(x, x, n), c, n);
      y = addmod(mulmod(y, y, n), c, n);
      y = addmod(mulmod(y, y, n), c, n);
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}
}  // namespace detail

// Factorization of n as sorted (prime, exponent) pairs.
inline std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<u64> primes;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull}) {
    while (n % p == 0) { primes.push_back(p); n /= p; }
  }
  std::vector<u64> stack;
  if (n > 1) stack.push_back(n);
  Rng rng(0xfacade);
  while (!stack.empty()) {
    u64 m = stack.back();
    stack.pop_back();
    if (m == 1) continue;
    if (is_prime_u64(m)) { primes.push_back(m); continue; }
    u64 d = detail::pollard_rho(m, rng);
    stack.push_back(d);
    stack.push_back(m / d);
  }
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<u64, int>> out;
  for (u64 p : primes) {
    if (!out.empty() && out.back().first == p) ++out.back().second;
    else out.push_back({p, 1});
  }
  return out;
}

inline std::vector<std::pair<u64, int>> factorize(const BigInt& n_in) {
  BigInt n = n_in < 0 ? BigInt(-n_in) : n_in;
  if (n == 0) throw std::domain_error("factorize(0)");
  if (n > BigInt(std::numeric_limits<u64>::max()))
    throw std::domain_error("factorize: operand exceeds 64 bits");
  return factorize((u64)n);
}

// Runs fn(block) for block = 0..nblocks-1 on `workers` threads. Blocks are
// claimed from a shared counter; callers must combine per-block results by
// block index so output does not depend on the schedule.
inline void parallel_blocks(std::size_t nblocks, unsigned workers,
                            const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || nblocks <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      fn(b);
    }
  };
  std::vector<std::thread> pool;
  unsigned n = std::min<unsigned>(workers, (unsigned)nblocks);
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

}  // namespace sspile
