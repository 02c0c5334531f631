#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace scardet {

// ---------------------------------------------------------------------------
// Bit helpers. Site i of a chain lives on bit i of the word; the leftmost
// character of a printed configuration string is site 0.
// ---------------------------------------------------------------------------

using SpinWord = std::uint64_t;

inline int get_bit(SpinWord w, int site) { return static_cast<int>((w >> site) & 1u); }

inline SpinWord flip_bit(SpinWord w, int site) { return w ^ (SpinWord{1} << site); }

/// Flips both sites; exchanges their values when they differ.
inline SpinWord swap_bits(SpinWord w, int a, int b) {
  return w ^ (SpinWord{1} << a) ^ (SpinWord{1} << b);
}

inline SpinWord word_mask(int n_bits) {
  return n_bits >= 64 ? ~SpinWord{0} : (SpinWord{1} << n_bits) - 1;
}

inline int popcount(SpinWord w) { return std::popcount(w); }

/// Cyclic shift by r sites: site i of the input becomes site (i + r) mod n.
inline SpinWord rotate_sites(SpinWord w, int n, int r) {
  r = ((r % n) + n) % n;
  if (r == 0) return w;
  const SpinWord mask = word_mask(n);
  return ((w << r) | (w >> (n - r))) & mask;
}

/// Spatial inversion: site i maps to site n-1-i.
inline SpinWord reflect_sites(SpinWord w, int n) {
  SpinWord out = 0;
  for (int i = 0; i < n; ++i) out |= SpinWord(get_bit(w, i)) << (n - 1 - i);
  return out;
}

inline std::string word_to_string(SpinWord w, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = get_bit(w, i) ? '1' : '0';
  return s;
}

inline SpinWord string_to_word(const std::string& s) {
  if (s.size() > 63) throw std::invalid_argument("configuration string too long");
  SpinWord w = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      w |= SpinWord{1} << i;
    else if (s[i] != '0')
      throw std::invalid_argument("configuration string must be over {0,1}");
  }
  return w;
}

// ---------------------------------------------------------------------------
// Deterministic random numbers. Every stochastic component of the pipeline
// draws from mt19937_64 through the helpers below; the 53-bit mantissa
// construction keeps the double streams identical across platforms, which the
// reproducibility contract of the run configs relies on.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Mixes a base seed with up to two stream labels into an independent seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller on the uniform stream above.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Worker pool helpers.
// ---------------------------------------------------------------------------

/// Worker count: explicit request > SCARDET_WORKERS > hardware concurrency.
int worker_count(int requested = 0);

/// Runs fn(i) for i in [0, n), statically chunked over `workers` threads.
/// fn must only write to per-index state.
template <typename Fn>
void parallel_for(std::size_t n, const Fn& fn, int workers = 0) {
  const int t = std::min<std::size_t>(static_cast<std::size_t>(worker_count(workers)), n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Small numeric utilities.
// ---------------------------------------------------------------------------

inline double median_inplace(std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty range");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

/// Nearest-rank percentile (p in [0, 100]) of a copy of xs.
inline double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("percentile of empty range");
  std::sort(xs.begin(), xs.end());
  const double rank = p / 100.0 * static_cast<double>(xs.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(rank));
  if (k == 0) k = 1;
  if (k > xs.size()) k = xs.size();
  return xs[k - 1];
}

/// Shortest round-trip decimal form of a double (std::to_chars).
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// FNV-1a over a byte string; used to fingerprint resolved run configs.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace scardet
