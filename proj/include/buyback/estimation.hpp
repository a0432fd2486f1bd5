#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "buyback/data_io.hpp"
#include "buyback/types.hpp"

namespace buyback {

/// Realised EPS observations. `steps[j]` is the buyback index of
/// `values[j]` counted from the first observation, so gaps are allowed but
/// labels must be strictly increasing.
struct EarningsSeries {
  std::vector<long> steps;
  Eigen::VectorXd values;
  double period_length_years{0.25};
  std::vector<std::string> labels;

  static constexpr std::size_t kMinObservations = 4;

  void validate() const;

  /// Present `column` cells of an aligned quarterly dataset.
  static EarningsSeries from_dataset(const AlignedDataset &data,
                                     Field column = Field::Eps);
};

struct FitOptions {
  double xi_min{-0.5};
  double xi_max{1.0};
  int xi_grid{151};
  int scale_grid{61};
  /// E_0 search range as multiples of the first observation.
  double scale_min{0.1};
  double scale_max{10.0};
  double rel_sse_tol{1e-10};
  double step_tol{1e-9};
  int max_iterations{10000};
};

struct FitResult {
  double xi_hat{};
  double e0_hat{};
  double sse{};
  int iterations{};
  bool converged{};
};

/// Model EPS E_0 * E'_n / E_0 at each observation step, for the policy's
/// m, gamma, iota, interval and the given xi. Throws std::domain_error when
/// the program leaves its validity regime.
Eigen::VectorXd model_eps(const EarningsSeries &series,
                          const BuybackPolicy<double> &policy, double xi,
                          double e0, ProgramMode mode);

double sum_squared_residuals(const EarningsSeries &series,
                             const BuybackPolicy<double> &policy, double xi,
                             double e0, ProgramMode mode);

/// Least-squares fit of (xi, E_0) to realised EPS with m, gamma, iota and
/// interval fixed from `policy` (its xi is ignored). A coarse grid seeds a
/// Nelder-Mead refinement. Deterministic. Throws std::invalid_argument for
/// series shorter than four points.
FitResult fit_natural_growth(const EarningsSeries &series,
                             const BuybackPolicy<double> &policy,
                             ProgramMode mode = ProgramMode::Recursive,
                             const FitOptions &options = {});

/// A per-period series where some periods may be flagged and excluded.
struct FlaggedSeries {
  Eigen::VectorXd values;
  std::vector<bool> valid;
  std::vector<std::string> flags;

  std::size_t size() const { return valid.size(); }
  std::vector<double> valid_values() const;
};

struct Summary {
  double median{};
  double p20{};
  double p80{};
  double mean{};
  std::size_t count{};
};

/// Linear-interpolation percentile (p in [0, 1]) over the given values.
double percentile(std::vector<double> values, double p);
/// Summary of the valid entries; throws std::invalid_argument if none.
Summary summarize(const FlaggedSeries &series);

/// (pretax - posttax) / pretax per period. Zero or missing pretax values are
/// flagged and excluded.
FlaggedSeries effective_tax_rate(std::span<const double> pretax,
                                 std::span<const double> posttax);

/// pe / critical_pe per period. Periods whose critical P/E is undefined, or
/// whose ratio is non-positive, are flagged.
FlaggedSeries estimate_m(std::span<const double> pe,
                         std::span<const MarketParams<double>> markets);

/// S / (P N) per period. Non-positive market caps and ratios outside [0, 1)
/// are flagged.
FlaggedSeries estimate_gamma(std::span<const double> buyback_spend,
                             std::span<const double> market_cap);

struct RatioSeries {
  std::vector<std::string> periods;
  FlaggedSeries m_values;
  FlaggedSeries gamma_values;
  Summary m_summary;
  Summary gamma_summary;
};

/// Share of observed growth attributable to buybacks,
/// 1 - natural_growth / observed_growth, on growth-above-baseline amounts.
double attribution(double observed_growth, double natural_growth);

} // namespace buyback
