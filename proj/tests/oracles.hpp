// Copyright 2026 The lmpoll Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference computations used to check the library. These are written from
// the textbook definitions and deliberately share no code with include/.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

/// Pearson r from raw sums: (nΣxy − ΣxΣy) / sqrt((nΣx² − (Σx)²)(nΣy² − (Σy)²)),
/// accumulated in long double.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  long double num = n * sxy - sx * sy;
  long double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  return static_cast<double>(num / den);
}

/// l2 distance of a (pos%, 100-pos%) split from (ref_pos, 100-ref_pos).
inline double split_distance(double pos_pct, double ref_pos) {
  return std::sqrt(2.0) * std::fabs(pos_pct - ref_pos);
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // of the per-draw distance
};

/// Expected per-draw l2 distance under sampling without replacement, by
/// visiting every k-subset of a concrete population (labels[i] true = POS).
inline Moments enumerate_subsets(const std::vector<bool>& labels, std::size_t k,
                                 double ref_pos) {
  const std::size_t n = labels.size();
  long double sum = 0, sumsq = 0, count = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) pos += labels[i];
    double d = split_distance(100.0 * pos / k, ref_pos);
    sum += d;
    sumsq += static_cast<long double>(d) * d;
    count += 1;
  }
  Moments m;
  m.mean = static_cast<double>(sum / count);
  m.variance = static_cast<double>(sumsq / count - (sum / count) * (sum / count));
  return m;
}

inline long double choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  long double r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Same expectation via the hypergeometric law over positive counts
/// 0..k: P(j) = C(K,j) C(N-K,k-j) / C(N,k).
inline Moments hypergeometric(std::size_t N, std::size_t K, std::size_t k,
                              double ref_pos) {
  long double mean = 0, second = 0;
  const long double all = choose(N, k);
  for (std::size_t j = 0; j <= k; ++j) {
    long double p = choose(K, j) * choose(N - K, k - j) / all;
    long double d = split_distance(100.0 * j / k, ref_pos);
    mean += p * d;
    second += p * d * d;
  }
  return {static_cast<double>(mean), static_cast<double>(second - mean * mean)};
}

/// Same expectation for sampling with replacement (binomial law).
inline Moments binomial(std::size_t N, std::size_t K, std::size_t k,
                        double ref_pos) {
  const long double q = static_cast<long double>(K) / N;
  long double mean = 0, second = 0;
  for (std::size_t j = 0; j <= k; ++j) {
    long double p = choose(k, j) * std::pow(q, j) * std::pow(1 - q, k - j);
    long double d = split_distance(100.0 * j / k, ref_pos);
    mean += p * d;
    second += p * d * d;
  }
  return {static_cast<double>(mean), static_cast<double>(second - mean * mean)};
}

/// Frequency of each distinct value.
template <typename T>
std::map<T, std::size_t> frequencies(const std::vector<T>& xs) {
  std::map<T, std::size_t> out;
  for (const auto& x : xs) ++out[x];
  return out;
}

/// SplitMix64 as published by Vigna: state += golden; then finalize.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

}  // namespace oracle
