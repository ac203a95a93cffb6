#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace snc {

using cplx = std::complex<double>;

constexpr double kDefaultTol = 1e-10;
constexpr double kPruneTol = 1e-14;

inline bool approx_zero(double x, double tol = kDefaultTol) { return std::abs(x) < tol; }

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small-int label vector used as hash keys for configurations, F-symbol
// entries and fusion-tree basis elements. Labels and multiplicity indices
// are assumed < 2^16.
struct Key {
  std::vector<int16_t> v;
  Key() = default;
  explicit Key(std::vector<int16_t> w) : v(std::move(w)) {}
  bool operator==(const Key& o) const { return v == o.v; }
  int16_t operator[](size_t i) const { return v[i]; }
  size_t size() const { return v.size(); }
};

struct KeyHash {
  size_t operator()(const Key& k) const {
    // FNV-1a over the raw label bytes
    uint64_t h = 1469598103934665603ull;
    for (int16_t x : k.v) {
      h ^= static_cast<uint64_t>(static_cast<uint16_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

template <typename T>
using KeyMap = std::unordered_map<Key, T, KeyHash>;

inline Key make_key(std::initializer_list<int> xs) {
  std::vector<int16_t> v;
  v.reserve(xs.size());
  for (int x : xs) v.push_back(static_cast<int16_t>(x));
  return Key(std::move(v));
}

// Deterministic RNG used for spectral splits; the seed is recorded in
// reports so runs are reproducible.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  double uniform() {
    return std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
  }
  cplx gauss() {
    std::normal_distribution<double> d(0.0, 1.0);
    return {d(gen), d(gen)};
  }
};

}  // namespace snc
