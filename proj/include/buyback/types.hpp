#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace buyback {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

inline void require(bool condition, const std::string &what) {
  if (!condition) {
    throw std::invalid_argument(what);
  }
}

template <typename Scalar> bool finite(Scalar x) {
  using std::isfinite;
  return isfinite(x);
}

} // namespace detail

/// Economy-level inputs shared by every formula. Rates are annualised
/// fractions; the retained fraction after tax is derived from `tax_rate`.
template <typename Scalar = double> struct MarketParams {
  Scalar interest_rate{};
  Scalar tax_rate{};
  Scalar period_years{1};

  Scalar retained() const { return Scalar(1) - tax_rate; }

  void validate() const {
    detail::require(detail::finite(interest_rate), "interest_rate must be finite");
    detail::require(tax_rate >= Scalar(0) && tax_rate < Scalar(1),
                    "tax_rate must lie in [0, 1)");
    detail::require(period_years > Scalar(0), "period_years must be positive");
  }
};

/// Balance-sheet snapshot of a single company. Currency amounts share a
/// unit; `dividend` and `price` are per share.
template <typename Scalar = double> struct CompanyState {
  Scalar trading_profit{};
  Scalar cash{};
  Scalar shares{1};
  Scalar price{1};
  Scalar dividend{};
  Scalar minority_charge{};

  void validate() const {
    detail::require(shares > Scalar(0), "shares must be positive");
    detail::require(price > Scalar(0), "price must be positive");
    detail::require(cash >= Scalar(0), "cash must be non-negative");
    detail::require(dividend >= Scalar(0), "dividend must be non-negative");
    detail::require(minority_charge >= Scalar(0),
                    "minority_charge must be non-negative");
  }
};

/// The unitless drivers of a buyback: spend as a fraction of market cap
/// (`gamma`), price paid as a fraction of the critical price (`m`), natural
/// EPS growth and interest growth per annum, and the spacing of repeated
/// buybacks in years.
template <typename Scalar = double> struct BuybackPolicy {
  Scalar gamma{};
  Scalar m{1};
  Scalar xi{};
  Scalar iota{};
  Scalar interval_years{1};

  void validate() const {
    detail::require(gamma >= Scalar(0) && gamma < Scalar(1),
                    "gamma must lie in [0, 1)");
    detail::require(m > Scalar(0), "m must be positive");
    detail::require(Scalar(1) + xi > Scalar(0), "1 + xi must be positive");
    detail::require(Scalar(1) + iota > Scalar(0), "1 + iota must be positive");
    detail::require(interval_years > Scalar(0),
                    "interval_years must be positive");
  }

  bool accretive() const { return m <= Scalar(1); }
};

/// How the compounded program series is evaluated.
///
/// `Recursive` compounds one instantaneous enhancement per buyback, buyback 0
/// included, and is used everywhere downstream. `PaperLiteral` evaluates the
/// closed form with the leading factor raised to the power n, which is
/// smaller than the recursion by exactly one factor of 1/(1 - gamma).
enum class ProgramMode { Recursive, PaperLiteral };

inline const char *to_string(ProgramMode mode) {
  return mode == ProgramMode::Recursive ? "recursive" : "paper-literal";
}

inline ProgramMode parse_program_mode(const std::string &text) {
  if (text == "recursive") {
    return ProgramMode::Recursive;
  }
  if (text == "paper-literal" || text == "paper_literal") {
    return ProgramMode::PaperLiteral;
  }
  throw std::invalid_argument("unknown mode '" + text +
                              "' (expected recursive or paper-literal)");
}

/// Normalised EPS paths over buyback indices 0..n: `enhanced` is E'_n/E_0
/// and `natural` is E_n/E_0 = (1 + xi)^(c n).
template <typename Scalar = double> struct EnhancementSeries {
  VectorX<Scalar> enhanced;
  VectorX<Scalar> natural;
  ProgramMode mode{ProgramMode::Recursive};

  Eigen::Index size() const { return enhanced.size(); }
};

} // namespace buyback
