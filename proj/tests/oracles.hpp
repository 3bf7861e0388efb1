// Copyright 2026 The autoscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Naive reference formulas, deliberately computed by a different route than
// the library (pairwise sums instead of matrices and centered moments).

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace autoscore::oracle {

inline double Accuracy(const std::vector<int>& g, const std::vector<int>& p) {
  double hits = 0;
  for (std::size_t i = 0; i < g.size(); ++i) hits += g[i] == p[i] ? 1 : 0;
  return hits / static_cast<double>(g.size());
}

// 1 - sum_i (g_i - p_i)^2 / ((1/n) sum_a sum_b (g_a - p_b)^2): the quadratic
// weights' common factor 1/(K-1)^2 cancels, and the chance term is the mean
// disagreement over every cross pairing.
inline double Qwk(const std::vector<int>& g, const std::vector<int>& p) {
  const double n = static_cast<double>(g.size());
  double observed = 0, chance = 0;
  for (std::size_t i = 0; i < g.size(); ++i) observed += std::pow(g[i] - p[i], 2);
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = 0; b < p.size(); ++b) chance += std::pow(g[a] - p[b], 2);
  }
  chance /= n;
  if (chance == 0) return 1.0;
  return 1.0 - observed / chance;
}

inline double Mae(const std::vector<int>& g, const std::vector<int>& p) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += std::abs(g[i] - p[i]);
  return s / static_cast<double>(g.size());
}

inline double Rmse(const std::vector<int>& g, const std::vector<int>& p) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += std::pow(g[i] - p[i], 2);
  return std::sqrt(s / static_cast<double>(g.size()));
}

// r = sum_{i<j} dx dy / sqrt(sum_{i<j} dx^2 * sum_{i<j} dy^2).
inline std::optional<double> Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// Average rank by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> CountingRanks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (double w : v) {
      smaller += w < v[i] ? 1 : 0;
      equal += w == v[i] ? 1 : 0;
    }
    r[i] = 1 + smaller + (equal - 1) / 2;
  }
  return r;
}

inline std::optional<double> Spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return Pearson(CountingRanks(x), CountingRanks(y));
}

inline std::vector<double> AsDouble(const std::vector<int>& v) {
  return std::vector<double>(v.begin(), v.end());
}

inline double CohenKappa(const std::vector<bool>& g, const std::vector<bool>& p) {
  const double n = static_cast<double>(g.size());
  double agree = 0, g_true = 0, p_true = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    agree += g[i] == p[i] ? 1 : 0;
    g_true += g[i] ? 1 : 0;
    p_true += p[i] ? 1 : 0;
  }
  const double po = agree / n;
  const double pe = (g_true / n) * (p_true / n) + (1 - g_true / n) * (1 - p_true / n);
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1 - pe);
}

inline double F1(const std::vector<bool>& g, const std::vector<bool>& p) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    tp += g[i] && p[i] ? 1 : 0;
    fp += !g[i] && p[i] ? 1 : 0;
    fn += g[i] && !p[i] ? 1 : 0;
  }
  if (tp + fp + fn == 0) return 1.0;
  if (tp == 0) return 0.0;
  const double precision = tp / (tp + fp);
  const double recall = tp / (tp + fn);
  return 2 * precision * recall / (precision + recall);
}

/// One random scoring instance: n in [1, 50], range cardinality in [2, 7].
struct Instance {
  int min = 0;
  int max = 1;
  std::vector<int> gold;
  std::vector<int> pred;
  std::vector<bool> gold_flags;
  std::vector<bool> pred_flags;
};

inline Instance RandomInstance(std::mt19937_64& rng) {
  Instance in;
  in.min = std::uniform_int_distribution<int>(0, 3)(rng);
  in.max = in.min + std::uniform_int_distribution<int>(1, 6)(rng);
  const int n = std::uniform_int_distribution<int>(1, 50)(rng);
  // Skewed predictions so agreement varies from perfect to poor.
  const double noise = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::uniform_int_distribution<int> score(in.min, in.max);
  std::bernoulli_distribution flip(noise);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < n; ++i) {
    int g = score(rng);
    in.gold.push_back(g);
    in.pred.push_back(flip(rng) ? score(rng) : g);
    bool flag = coin(rng);
    in.gold_flags.push_back(flag);
    in.pred_flags.push_back(flip(rng) ? !flag : flag);
  }
  return in;
}

}  // namespace autoscore::oracle
