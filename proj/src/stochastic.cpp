#include "buyback/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace buyback {

namespace {

void require(bool condition, const char *what) {
  if (!condition) {
    throw std::invalid_argument(what);
  }
}

} // namespace

void ArithParams::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
  require(m > 0.0, "m must be positive");
  require(dt_years > 0.0, "dt_years must be positive");
  require(1.0 + iota > 0.0, "1 + iota must be positive");
  require(std::isfinite(x_bar) && std::isfinite(e0),
          "x_bar and e0 must be finite");
}

double ArithParams::a() const {
  return (1.0 - std::pow(1.0 + iota, dt_years) * m * gamma) / (1.0 - gamma);
}

double ArithParams::b() const { return x_bar / (1.0 - gamma); }

ArithExpectation arith_expected_eps(const ArithParams &params, long k) {
  params.validate();
  require(k >= 0, "step count must be non-negative");
  const double a = params.a();
  const double b = params.b();
  if (std::abs(a - 1.0) < 1e-12) {
    return {params.e0 + static_cast<double>(k) * b, true};
  }
  const double ak = std::pow(a, static_cast<double>(k));
  return {ak * params.e0 + b * (1.0 - ak) / (1.0 - a), false};
}

void StochParams::validate() const {
  require(sigma_i2 >= 0.0 && sigma_x2 >= 0.0, "variances must be non-negative");
  require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
  require(m > 0.0, "m must be positive");
  require(std::isfinite(mu_i) && std::isfinite(mu_x), "locations must be finite");
}

double stoch_mean_enhancement(const StochParams &p, long t) {
  p.validate();
  require(t >= 0, "t must be non-negative");
  const double drift = p.mu_i - p.mu_x + 0.5 * (p.sigma_i2 + p.sigma_x2);
  return (1.0 - p.m * p.gamma * std::exp(static_cast<double>(t) * drift)) /
         (1.0 - p.gamma);
}

const char *to_string(SdMode mode) {
  return mode == SdMode::Derived ? "derived" : "paper-literal";
}

SdMode parse_sd_mode(const char *text) {
  if (std::strcmp(text, "derived") == 0) {
    return SdMode::Derived;
  }
  if (std::strcmp(text, "paper-literal") == 0 ||
      std::strcmp(text, "paper_literal") == 0) {
    return SdMode::PaperLiteral;
  }
  throw std::invalid_argument(std::string("unknown sd mode '") + text + "'");
}

double stoch_sd_enhancement(const StochParams &p, long t, SdMode mode) {
  p.validate();
  require(t >= 1, "t must be at least 1");
  const double scale = p.m * p.gamma / (1.0 - p.gamma);
  const double s2 = p.sigma_i2 + p.sigma_x2;
  const double mu = p.mu_i - p.mu_x;
  if (mode == SdMode::PaperLiteral) {
    return scale * std::exp(mu + s2 / 4.0) * std::sqrt(std::expm1(s2 / 2.0));
  }
  const double td = static_cast<double>(t);
  return scale * std::exp(td * mu + td * s2 / 2.0) * std::sqrt(std::expm1(td * s2));
}

namespace {

template <typename PathFn>
McReport run_paths(std::uint64_t paths, std::uint64_t seed, unsigned threads,
                   PathFn path_value) {
  require(paths >= 1, "paths must be at least 1");
  std::vector<double> values(paths);

  unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(std::min<std::uint64_t>(
                                          paths / 1024 + 1, 64))));
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t p = begin; p < end; ++p) {
      SplitMix64 rng(SplitMix64::stream_seed(seed, p));
      values[p] = path_value(rng);
    }
  };
  if (workers == 1) {
    work(0, paths);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(paths, begin + chunk);
      if (begin < end) {
        pool.emplace_back(work, begin, end);
      }
    }
  }

  // Sequential reduction keeps the report independent of the thread count.
  const double n = static_cast<double>(paths);
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }

  McReport report;
  report.estimate = mean;
  report.paths = paths;
  report.seed = seed;
  if (paths < 2) {
    report.standard_error = 0.0;
    report.standard_error_defined = false;
    report.sample_sd = 0.0;
    return report;
  }
  const double variance = m2 / (n - 1.0);
  report.sample_sd = std::sqrt(variance);
  report.standard_error = report.sample_sd / std::sqrt(n);
  report.standard_error_defined = true;
  const double central2 = m2 / n;
  const double central4 = m4 / n;
  if (report.sample_sd > 0.0) {
    const double var_of_variance =
        std::max(0.0, central4 - central2 * central2) / n;
    report.sd_standard_error = std::sqrt(var_of_variance) / (2.0 * report.sample_sd);
  } else {
    report.sd_standard_error = 0.0;
  }
  return report;
}

} // namespace

McReport simulate_enhancement(const StochParams &params, long t,
                              std::uint64_t paths, std::uint64_t seed,
                              const SimulationOptions &options) {
  params.validate();
  require(t >= 0, "t must be non-negative");
  const double sd_i = std::sqrt(params.sigma_i2);
  const double sd_x = std::sqrt(params.sigma_x2);
  const double m_gamma = params.m * params.gamma;
  const double inv = 1.0 / (1.0 - params.gamma);
  return run_paths(paths, seed, options.threads, [&](SplitMix64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double log_ratio = 0.0;
    for (long s = 0; s < t; ++s) {
      const double log_interest = params.mu_i + sd_i * normal(rng);
      const double log_growth = params.mu_x + sd_x * normal(rng);
      log_ratio += log_interest - log_growth;
    }
    return (1.0 - m_gamma * std::exp(log_ratio)) * inv;
  });
}

McReport simulate_arith(const ArithParams &params, long k, std::uint64_t paths,
                        std::uint64_t seed, const ArithSimOptions &options) {
  params.validate();
  require(k >= 0, "step count must be non-negative");
  require(options.increment_sd >= 0.0 && options.interest_log_sd >= 0.0,
          "simulation spreads must be non-negative");
  const double log_interest_mean =
      params.dt_years * std::log1p(params.iota) -
      0.5 * options.interest_log_sd * options.interest_log_sd;
  const double m_gamma = params.m * params.gamma;
  const double inv = 1.0 / (1.0 - params.gamma);
  return run_paths(paths, seed, options.threads, [&](SplitMix64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double e = params.e0;
    for (long s = 0; s < k; ++s) {
      const double increment = params.x_bar + options.increment_sd * normal(rng);
      const double interest =
          std::exp(log_interest_mean + options.interest_log_sd * normal(rng));
      // Buyback at the start of the step: E' = (E + dx - m gamma I E) / (1 - gamma).
      e = (e + increment - m_gamma * interest * e) * inv;
    }
    return e;
  });
}

} // namespace buyback
