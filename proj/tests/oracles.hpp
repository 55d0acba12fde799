#pragma once

// Test-side reference computations. Nothing here calls into the library,
// so a test comparing against these checks the library against an
// independent implementation.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Frozen from an mpmath session at 30 digits.
inline constexpr double kSoftmax012[3] = {0.665240955774821889, 0.244728471054797652,
                                          0.0900305731703804580};
inline constexpr double kHalfExpMinus1 = 0.183939720585721161;
inline constexpr double kGumbelMedian = 0.366512920581664327;
inline constexpr double kLogistic2 = 0.119202922022117556;
inline constexpr double kWeightedMajority_10_4_half = 16.635532333438687;
inline constexpr double kLogisticHalfGapAt1 = 0.108599247428150315;

// Softmax of -beta*L in long double.
inline std::vector<double> softmax(const std::vector<double>& L, double beta) {
  long double lo = L.empty() ? 0.0L : L[0];
  for (double x : L) lo = std::min<long double>(lo, x);
  std::vector<long double> w;
  long double z = 0.0L;
  for (double x : L) {
    w.push_back(std::exp(-static_cast<long double>(beta) * (x - lo)));
    z += w.back();
  }
  std::vector<double> out;
  for (auto v : w) out.push_back(static_cast<double>(v / z));
  return out;
}

inline std::vector<double> killer_row(std::size_t t) {
  if (t == 1) return {0.0, 0.5};
  return t % 2 == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
}

struct FtlTally {
  double paid = 0.0;
  double best = 0.0;
  std::vector<std::size_t> leaders;
};

// Plays follow-the-leader on the alternating sequence by hand, ties to the
// lower index.
inline FtlTally ftl_on_killer(std::size_t T) {
  double L[2] = {0.0, 0.0};
  FtlTally out;
  for (std::size_t t = 1; t <= T; ++t) {
    const std::size_t leader = L[1] < L[0] ? 1 : 0;
    out.leaders.push_back(leader);
    const auto row = killer_row(t);
    out.paid += row[leader];
    L[0] += row[0];
    L[1] += row[1];
  }
  out.best = std::min(L[0], L[1]);
  return out;
}

inline std::vector<std::vector<double>> random_table(std::mt19937_64& gen, std::size_t rounds,
                                                     std::size_t n, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<std::vector<double>> rows(rounds, std::vector<double>(n));
  for (auto& r : rows)
    for (auto& x : r) x = u(gen);
  return rows;
}

}  // namespace oracle
