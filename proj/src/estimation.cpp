#include "buyback/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "buyback/core_model.hpp"

namespace buyback {

void EarningsSeries::validate() const {
  if (steps.size() != static_cast<std::size_t>(values.size())) {
    throw std::invalid_argument("steps and values differ in length");
  }
  if (steps.size() < kMinObservations) {
    throw std::invalid_argument("series too short: " +
                                std::to_string(steps.size()) +
                                " observations, need at least " +
                                std::to_string(kMinObservations));
  }
  if (steps.front() != 0) {
    throw std::invalid_argument("first step must be 0");
  }
  for (std::size_t j = 1; j < steps.size(); ++j) {
    if (steps[j] <= steps[j - 1]) {
      throw std::invalid_argument("steps must be strictly increasing");
    }
  }
  if (!(period_length_years > 0.0)) {
    throw std::invalid_argument("period_length_years must be positive");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("series contains non-finite values");
  }
}

EarningsSeries EarningsSeries::from_dataset(const AlignedDataset &data,
                                            Field column) {
  const auto &col = data.column(column);
  EarningsSeries series;
  std::vector<double> values;
  long first = -1;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!col.present[i]) {
      continue;
    }
    const long ordinal = data.periods[i].ordinal();
    if (first < 0) {
      first = ordinal;
    }
    series.steps.push_back(ordinal - first);
    values.push_back(col.values(static_cast<Eigen::Index>(i)));
    series.labels.push_back(data.periods[i].label());
  }
  series.values = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  series.period_length_years = 0.25;
  return series;
}

Eigen::VectorXd model_eps(const EarningsSeries &series,
                          const BuybackPolicy<double> &policy, double xi,
                          double e0, ProgramMode mode) {
  BuybackPolicy<double> p = policy;
  p.xi = xi;
  const auto program = program_series(p, series.steps.back(), mode);
  Eigen::VectorXd out(static_cast<Eigen::Index>(series.steps.size()));
  for (std::size_t j = 0; j < series.steps.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = e0 * program.enhanced(series.steps[j]);
  }
  return out;
}

double sum_squared_residuals(const EarningsSeries &series,
                             const BuybackPolicy<double> &policy, double xi,
                             double e0, ProgramMode mode) {
  return (series.values - model_eps(series, policy, xi, e0, mode)).squaredNorm();
}

namespace {

using Point = Eigen::Vector2d; // (xi, E_0 / reference)

class Objective {
public:
  Objective(const EarningsSeries &series, const BuybackPolicy<double> &policy,
            ProgramMode mode, const FitOptions &options, double reference)
      : series_(series), policy_(policy), mode_(mode), options_(options),
        reference_(reference) {}

  double operator()(const Point &x) const {
    if (x(0) < options_.xi_min || x(0) > options_.xi_max || !(x(1) > 0.0) ||
        !std::isfinite(x(1))) {
      return std::numeric_limits<double>::infinity();
    }
    try {
      const double sse = sum_squared_residuals(series_, policy_, x(0),
                                               x(1) * reference_, mode_);
      return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
    } catch (const std::domain_error &) {
      return std::numeric_limits<double>::infinity();
    } catch (const std::invalid_argument &) {
      return std::numeric_limits<double>::infinity();
    }
  }

private:
  const EarningsSeries &series_;
  BuybackPolicy<double> policy_;
  ProgramMode mode_;
  const FitOptions &options_;
  double reference_;
};

struct Simplex {
  std::array<Point, 3> x;
  std::array<double, 3> f;

  void order() {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    Simplex sorted = *this;
    for (int i = 0; i < 3; ++i) {
      x[i] = sorted.x[idx[i]];
      f[i] = sorted.f[idx[i]];
    }
  }

  // Largest vertex offset from the best vertex, relative in the scale
  // coordinate.
  double diameter() const {
    double d = 0.0;
    for (int i = 1; i < 3; ++i) {
      const Point delta = x[i] - x[0];
      d = std::max({d, std::abs(delta(0)), std::abs(delta(1)) / std::max(1.0, x[0](1))});
    }
    return d;
  }
};

Simplex make_simplex(const Point &start, const Objective &objective) {
  Simplex s;
  s.x[0] = start;
  s.x[1] = start + Point(0.01, 0.0);
  s.x[2] = start + Point(0.0, 0.05 * start(1));
  for (int i = 0; i < 3; ++i) {
    s.f[i] = objective(s.x[i]);
  }
  s.order();
  return s;
}

// Standard Nelder-Mead coefficients.
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

bool nelder_mead(Simplex &s, const Objective &objective,
                 const FitOptions &options, int &iterations) {
  while (iterations < options.max_iterations) {
    s.order();
    const double spread = s.f[2] - s.f[0];
    if (s.diameter() < options.step_tol ||
        (std::isfinite(spread) && spread <= options.rel_sse_tol * s.f[0])) {
      return true;
    }
    ++iterations;

    const Point centroid = 0.5 * (s.x[0] + s.x[1]);
    const Point reflected = centroid + kReflect * (centroid - s.x[2]);
    const double f_reflected = objective(reflected);

    if (f_reflected < s.f[0]) {
      const Point expanded = centroid + kExpand * (reflected - centroid);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        s.x[2] = expanded;
        s.f[2] = f_expanded;
      } else {
        s.x[2] = reflected;
        s.f[2] = f_reflected;
      }
      continue;
    }
    if (f_reflected < s.f[1]) {
      s.x[2] = reflected;
      s.f[2] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < s.f[2];
    const Point contracted =
        outside ? centroid + kContract * (reflected - centroid)
                : centroid + kContract * (s.x[2] - centroid);
    const double f_contracted = objective(contracted);
    if (f_contracted < std::min(f_reflected, s.f[2])) {
      s.x[2] = contracted;
      s.f[2] = f_contracted;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      s.x[i] = s.x[0] + kShrink * (s.x[i] - s.x[0]);
      s.f[i] = objective(s.x[i]);
    }
  }
  s.order();
  return false;
}

double reference_level(const Eigen::VectorXd &values) {
  if (values(0) != 0.0) {
    return std::abs(values(0));
  }
  const double mean_abs = values.cwiseAbs().mean();
  return mean_abs > 0.0 ? mean_abs : 1.0;
}

} // namespace

FitResult fit_natural_growth(const EarningsSeries &series,
                             const BuybackPolicy<double> &policy,
                             ProgramMode mode, const FitOptions &options) {
  series.validate();
  BuybackPolicy<double> fixed = policy;
  fixed.xi = 0.0;
  fixed.validate();
  if (options.xi_grid < 2 || options.scale_grid < 2) {
    throw std::invalid_argument("fit grids need at least two points per axis");
  }

  const double reference = reference_level(series.values);
  const Objective objective(series, fixed, mode, options, reference);

  Point best(0.0, 1.0);
  double best_f = std::numeric_limits<double>::infinity();
  const double log_lo = std::log(options.scale_min);
  const double log_hi = std::log(options.scale_max);
  for (int a = 0; a < options.xi_grid; ++a) {
    const double xi = options.xi_min + (options.xi_max - options.xi_min) * a /
                                           (options.xi_grid - 1);
    for (int b = 0; b < options.scale_grid; ++b) {
      const double scale =
          std::exp(log_lo + (log_hi - log_lo) * b / (options.scale_grid - 1));
      const Point x(xi, scale);
      const double f = objective(x);
      if (f < best_f) {
        best_f = f;
        best = x;
      }
    }
  }
  if (!std::isfinite(best_f)) {
    throw std::domain_error("no admissible (xi, E0) on the search grid");
  }

  int iterations = 0;
  bool converged = false;
  // Restart from the incumbent until a fresh simplex no longer improves it.
  for (int restart = 0; restart < 4; ++restart) {
    Simplex s = make_simplex(best, objective);
    const double before = best_f;
    converged = nelder_mead(s, objective, options, iterations);
    if (s.f[0] <= best_f) {
      best = s.x[0];
      best_f = s.f[0];
    }
    if (!converged) {
      break;
    }
    if (before - best_f <= options.rel_sse_tol * before) {
      break;
    }
  }

  return {best(0), best(1) * reference, best_f, iterations, converged};
}

std::vector<double> FlaggedSeries::valid_values() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (valid[i]) {
      out.push_back(values(static_cast<Eigen::Index>(i)));
    }
  }
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) {
    throw std::invalid_argument("percentile of an empty set");
  }
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("percentile level must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double position = p * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const auto upper = std::min(lower + 1, values.size() - 1);
  const double weight = position - static_cast<double>(lower);
  return values[lower] + weight * (values[upper] - values[lower]);
}

Summary summarize(const FlaggedSeries &series) {
  const auto values = series.valid_values();
  if (values.empty()) {
    throw std::invalid_argument("no valid periods to summarise");
  }
  Summary s;
  s.count = values.size();
  s.median = percentile(values, 0.5);
  s.p20 = percentile(values, 0.2);
  s.p80 = percentile(values, 0.8);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  return s;
}

namespace {

FlaggedSeries make_flagged(std::size_t n) {
  FlaggedSeries out;
  out.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), std::nan(""));
  out.valid.assign(n, false);
  out.flags.assign(n, "");
  return out;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("series lengths differ (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

} // namespace

FlaggedSeries effective_tax_rate(std::span<const double> pretax,
                                 std::span<const double> posttax) {
  require_same_length(pretax.size(), posttax.size());
  auto out = make_flagged(pretax.size());
  for (std::size_t i = 0; i < pretax.size(); ++i) {
    if (!std::isfinite(pretax[i]) || !std::isfinite(posttax[i])) {
      out.flags[i] = "missing profit value";
    } else if (pretax[i] == 0.0) {
      out.flags[i] = "zero pretax profit";
    } else {
      out.values(static_cast<Eigen::Index>(i)) = (pretax[i] - posttax[i]) / pretax[i];
      out.valid[i] = true;
    }
  }
  return out;
}

FlaggedSeries estimate_m(std::span<const double> pe,
                         std::span<const MarketParams<double>> markets) {
  require_same_length(pe.size(), markets.size());
  auto out = make_flagged(pe.size());
  for (std::size_t i = 0; i < pe.size(); ++i) {
    if (!std::isfinite(pe[i])) {
      out.flags[i] = "missing pe";
      continue;
    }
    try {
      const double m = pe[i] / critical_pe(markets[i]);
      if (!(m > 0.0)) {
        out.flags[i] = "non-positive m";
        continue;
      }
      out.values(static_cast<Eigen::Index>(i)) = m;
      out.valid[i] = true;
    } catch (const std::exception &e) {
      out.flags[i] = e.what();
    }
  }
  return out;
}

FlaggedSeries estimate_gamma(std::span<const double> buyback_spend,
                             std::span<const double> market_cap) {
  require_same_length(buyback_spend.size(), market_cap.size());
  auto out = make_flagged(buyback_spend.size());
  for (std::size_t i = 0; i < buyback_spend.size(); ++i) {
    if (!std::isfinite(buyback_spend[i]) || !std::isfinite(market_cap[i])) {
      out.flags[i] = "missing buyback or market cap";
    } else if (!(market_cap[i] > 0.0)) {
      out.flags[i] = "non-positive market cap";
    } else {
      const double gamma = buyback_spend[i] / market_cap[i];
      if (gamma < 0.0 || gamma >= 1.0) {
        out.flags[i] = "gamma outside [0, 1)";
        continue;
      }
      out.values(static_cast<Eigen::Index>(i)) = gamma;
      out.valid[i] = true;
    }
  }
  return out;
}

double attribution(double observed_growth, double natural_growth) {
  if (!(observed_growth > 0.0)) {
    throw std::invalid_argument("observed growth must be positive");
  }
  return 1.0 - natural_growth / observed_growth;
}

} // namespace buyback
