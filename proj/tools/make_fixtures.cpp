// Generates the synthetic quarterly fixtures in data/.
//
// Both files are drawn from the recursive buyback-program model with known
// parameters plus 1% Gaussian noise on EPS, so fitted values can be checked
// against the generator. They are synthetic and do not reproduce any real
// company or index.
//
//   fixture_apple_like.csv  24 quarters from 2012Q1, xi = 0.08, m median 0.25
//                           in [0.2, 0.4], gamma in [0, 0.04] with mean 0.01.
//   fixture_index_like.csv  65 quarters 2002Q1..2018Q1, xi = 0.065, m mean
//                           0.7, gamma mean 0.007. EPS emulates an
//                           operating-earnings convention.
//
// Usage: make_fixtures <output-dir>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "buyback/core_model.hpp"
#include "buyback/data_io.hpp"
#include "buyback/stochastic.hpp"

namespace {

using namespace buyback;

struct FixtureSpec {
  std::string name;
  int first_year;
  int quarters;
  double xi;
  double m_center;
  double m_low;
  double m_high;
  double gamma_mean;
  double gamma_max;
  int zero_buyback_quarters;
  double iota;
  double interest_swing;
  double tax_center;
  double e0;
  double market_cap0;
  double noise;
  std::uint64_t seed;
};

Date quarter_end(int year, int q) {
  static constexpr int month[] = {3, 6, 9, 12};
  static constexpr int day[] = {31, 30, 30, 31};
  return {year, month[q - 1], day[q - 1]};
}

// m values with the requested center as exact median and the given range.
std::vector<double> m_values(const FixtureSpec &s, SplitMix64 &rng) {
  const int n = s.quarters;
  const int lower = n / 2;
  const int upper = n - lower;
  std::vector<double> m;
  const double gap = 0.004;
  for (int k = 0; k < lower; ++k) {
    m.push_back(s.m_low + (s.m_center - gap - s.m_low) * k / std::max(1, lower - 1));
  }
  for (int k = 0; k < upper; ++k) {
    m.push_back(s.m_center + (n % 2 ? 0.0 : gap) +
                (s.m_high - s.m_center - gap) * k / std::max(1, upper - 1));
  }
  std::shuffle(m.begin(), m.end(), rng);
  return m;
}

// gamma values in [0, gamma_max] with exact mean gamma_mean; the first
// `zero_buyback_quarters` have no buyback.
std::vector<double> gamma_values(const FixtureSpec &s, SplitMix64 &rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> g(s.quarters, 0.0);
  for (int k = s.zero_buyback_quarters; k < s.quarters; ++k) {
    const double u = uniform(rng);
    g[k] = 0.2 + 0.8 * u * u;
  }
  for (int pass = 0; pass < 50; ++pass) {
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / s.quarters;
    for (double &v : g) {
      v = std::min(s.gamma_max, v * s.gamma_mean / mean);
    }
  }
  return g;
}

std::vector<QuarterRecord> generate(const FixtureSpec &s) {
  SplitMix64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto m = m_values(s, rng);
  const auto gamma = gamma_values(s, rng);

  const BuybackPolicy<double> policy{s.gamma_mean, s.m_center, s.xi, s.iota, 0.25};
  const auto program = program_series(policy, s.quarters - 1);

  std::vector<QuarterRecord> records;
  double cap = s.market_cap0;
  for (int k = 0; k < s.quarters; ++k) {
    const double phase = 2.0 * std::numbers::pi * k / s.quarters;
    const double interest = s.iota + s.interest_swing * std::sin(phase);
    const double tax = s.tax_center + 0.03 * std::cos(phase);
    const double pretax = 1000.0 * std::pow(1.0 + s.xi, 0.25 * k);

    QuarterRecord r;
    r.period_end = quarter_end(s.first_year + k / 4, k % 4 + 1);
    r[Field::Eps] = s.e0 * program.enhanced(k) * (1.0 + s.noise * normal(rng));
    r[Field::MarketCap] = cap;
    r[Field::BuybackValue] = gamma[k] * cap;
    r[Field::Pe] = m[k] * critical_pe(MarketParams<double>{interest, tax});
    r[Field::InterestRate] = interest;
    r[Field::PretaxProfit] = pretax;
    r[Field::PosttaxProfit] = pretax * (1.0 - tax);

    // Round to fixed decimals so the files stay readable.
    for (auto &v : r.values) {
      const double scale = std::abs(*v) >= 1e6 ? 1.0 : 1e6;
      v = std::round(*v * scale) / scale;
    }
    records.push_back(r);
    cap *= std::pow(1.0 + s.xi, 0.25) * (1.0 + 0.02 * normal(rng));
  }
  return records;
}

} // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  const std::vector<FixtureSpec> specs = {
      {"fixture_apple_like.csv", 2012, 24, 0.08, 0.25, 0.2, 0.4, 0.01, 0.04, 2,
       0.02, 0.004, 0.25, 2.0, 5.0e11, 0.01, 2012},
      {"fixture_index_like.csv", 2002, 65, 0.065, 0.7, 0.45, 0.95, 0.007, 0.02, 0,
       0.03, 0.01, 0.3, 25.0, 1.0e13, 0.01, 2002},
  };
  for (const auto &spec : specs) {
    save_csv(dir + "/" + spec.name, generate(spec));
  }
  return 0;
}
