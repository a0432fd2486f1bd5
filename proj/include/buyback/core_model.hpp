#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "buyback/types.hpp"

namespace buyback {

/// Earnings per share, ((O + C i) alpha - m_min) / N. Negative for
/// loss-makers.
template <typename Scalar>
Scalar eps(const CompanyState<Scalar> &state,
           const MarketParams<Scalar> &market) {
  state.validate();
  market.validate();
  return ((state.trading_profit + state.cash * market.interest_rate) *
              market.retained() -
          state.minority_charge) /
         state.shares;
}

/// Earnings per share after spending `spend` on a repurchase at the current
/// price. Keeps the dividend term, so this is the full formula rather than
/// the d << P simplification used by everything downstream.
template <typename Scalar>
Scalar eps_post_buyback(const CompanyState<Scalar> &state,
                        const MarketParams<Scalar> &market, Scalar spend) {
  state.validate();
  market.validate();
  detail::require(spend >= Scalar(0), "spend must be non-negative");
  const Scalar retired = spend / state.price;
  detail::require(retired < state.shares,
                  "spend retires every share (S/P >= N)");
  const Scalar remaining_cash =
      state.cash - spend * (Scalar(1) + state.dividend / state.price);
  return ((state.trading_profit + remaining_cash * market.interest_rate) *
              market.retained() -
          state.minority_charge) /
         (state.shares - retired);
}

/// Critical P/E 1/(alpha i): the ratio at which a repurchase leaves EPS
/// unchanged.
template <typename Scalar> Scalar critical_pe(const MarketParams<Scalar> &market) {
  market.validate();
  if (!(market.interest_rate > Scalar(0))) {
    throw std::domain_error(
        "critical P/E is undefined for a non-positive interest rate");
  }
  return Scalar(1) / market.interest_rate / market.retained();
}

template <typename Scalar>
Scalar critical_price(Scalar eps_value, const MarketParams<Scalar> &market) {
  return eps_value * critical_pe(market);
}

template <typename Scalar> struct AccretionCheck {
  bool accretive{};
  /// critical_pe - pe; zero on the boundary, which counts as accretive.
  Scalar margin{};
};

/// Screens a P/E ratio against the critical P/E. A negative P/E (negative
/// earnings at a positive price) is never accretive.
template <typename Scalar>
AccretionCheck<Scalar> is_accretive(Scalar pe,
                                    const MarketParams<Scalar> &market) {
  detail::require(detail::finite(pe), "pe must be finite");
  const Scalar critical = critical_pe(market);
  return {pe > Scalar(0) && pe <= critical, critical - pe};
}

/// Screens a company directly. Uses the earnings yield E/P >= alpha i, which
/// stays well defined when E <= 0.
template <typename Scalar>
AccretionCheck<Scalar> is_accretive(const CompanyState<Scalar> &state,
                                    const MarketParams<Scalar> &market) {
  const Scalar e = eps(state, market);
  const Scalar critical = critical_pe(market);
  const Scalar earnings_yield = e / state.price;
  const bool accretive = earnings_yield >= Scalar(1) / critical;
  const Scalar margin =
      e > Scalar(0) ? critical - state.price / e
                    : -std::numeric_limits<Scalar>::infinity();
  return {accretive, margin};
}

/// Exact relative EPS change gamma/(1 - gamma) (1 - m) for a single buyback.
template <typename Scalar>
Scalar instantaneous_enhancement(Scalar m, Scalar gamma) {
  detail::require(gamma >= Scalar(0) && gamma < Scalar(1),
                  "gamma must lie in [0, 1)");
  detail::require(m > Scalar(0), "m must be positive");
  return gamma / (Scalar(1) - gamma) * (Scalar(1) - m);
}

/// First-order form (S/(P* N)) (1/m - 1). A lower bound on the exact value
/// whenever m and gamma are in [0, 1].
template <typename Scalar>
Scalar instantaneous_enhancement_approx(Scalar m, Scalar s_over_pstar_n) {
  detail::require(m > Scalar(0), "m must be positive");
  return s_over_pstar_n * (Scalar(1) / m - Scalar(1));
}

/// E'_T / E_T after a single buyback at t = 0 under geometric growth of
/// earnings (xi) and interest (iota).
template <typename Scalar>
Scalar horizon_enhancement(const BuybackPolicy<Scalar> &policy, Scalar years) {
  using std::pow;
  policy.validate();
  detail::require(years >= Scalar(0), "horizon must be non-negative");
  const Scalar ratio = (Scalar(1) + policy.iota) / (Scalar(1) + policy.xi);
  return (Scalar(1) - policy.m * policy.gamma * pow(ratio, years)) /
         (Scalar(1) - policy.gamma);
}

/// First-order relative boost (E'_T - E_T)/E_T ~ (1 - m r^T) gamma.
template <typename Scalar>
Scalar horizon_boost_first_order(const BuybackPolicy<Scalar> &policy,
                                 Scalar years) {
  using std::pow;
  policy.validate();
  detail::require(years >= Scalar(0), "horizon must be non-negative");
  const Scalar ratio = (Scalar(1) + policy.iota) / (Scalar(1) + policy.xi);
  return (Scalar(1) - policy.m * pow(ratio, years)) * policy.gamma;
}

/// Long-horizon limits of the relative boost when xi > iota: the exact form
/// tends to gamma/(1 - gamma), the first-order form to gamma.
template <typename Scalar> struct BoostLimits {
  Scalar exact{};
  Scalar first_order{};
};

template <typename Scalar>
BoostLimits<Scalar> horizon_boost_limits(const BuybackPolicy<Scalar> &policy) {
  policy.validate();
  detail::require(policy.xi > policy.iota,
                  "boost limit requires xi > iota");
  return {policy.gamma / (Scalar(1) - policy.gamma), policy.gamma};
}

/// EPS at T given a buyback at t: (E_T - m gamma I E_t) / (1 - gamma).
template <typename Scalar>
Scalar future_eps(Scalar eps_T, Scalar eps_t, Scalar m, Scalar gamma,
                  Scalar accumulation) {
  detail::require(gamma >= Scalar(0) && gamma < Scalar(1),
                  "gamma must lie in [0, 1)");
  detail::require(accumulation > Scalar(0),
                  "accumulation factor must be positive");
  return (eps_T - m * gamma * accumulation * eps_t) / (Scalar(1) - gamma);
}

/// First-order companion E_T + (E_T - m I E_t) gamma; a lower bound on
/// future_eps when E_T >= m I E_t.
template <typename Scalar>
Scalar future_eps_first_order(Scalar eps_T, Scalar eps_t, Scalar m,
                              Scalar gamma, Scalar accumulation) {
  detail::require(gamma >= Scalar(0) && gamma < Scalar(1),
                  "gamma must lie in [0, 1)");
  detail::require(accumulation > Scalar(0),
                  "accumulation factor must be positive");
  return eps_T + (eps_T - m * accumulation * eps_t) * gamma;
}

namespace detail {
/// Series longer than this are accumulated in log space.
inline constexpr Eigen::Index kLogSpaceThreshold = 1000;
} // namespace detail

/// Compounded EPS for a program of buybacks every `interval_years`, indices
/// 0..n with the first buyback applied at index 0. Throws std::domain_error
/// when a factor 1 - m gamma r^(c k) is non-positive.
template <typename Scalar>
EnhancementSeries<Scalar> program_series(const BuybackPolicy<Scalar> &policy,
                                         Eigen::Index n,
                                         ProgramMode mode = ProgramMode::Recursive) {
  using std::exp;
  using std::log;
  using std::log1p;
  using std::pow;
  policy.validate();
  detail::require(n >= 0, "n must be non-negative");

  const Scalar c = policy.interval_years;
  const Scalar step_ratio =
      pow((Scalar(1) + policy.iota) / (Scalar(1) + policy.xi), c);
  const Scalar m_gamma = policy.m * policy.gamma;
  const Scalar log_growth = c * log1p(policy.xi);
  const Scalar log_inflation = -log1p(-policy.gamma);

  EnhancementSeries<Scalar> out;
  out.mode = mode;
  out.enhanced.resize(n + 1);
  out.natural.resize(n + 1);

  const bool log_space = n > detail::kLogSpaceThreshold;
  Scalar ratio_power(1);
  Scalar product(1);
  Scalar log_product(0);
  for (Eigen::Index k = 0; k <= n; ++k) {
    const Scalar factor = Scalar(1) - m_gamma * ratio_power;
    if (!(factor > Scalar(0))) {
      throw std::domain_error(
          "buyback factor 1 - m*gamma*r^(ck) is non-positive at k = " +
          std::to_string(k));
    }
    ratio_power *= step_ratio;
    const Scalar inflation_power =
        mode == ProgramMode::Recursive ? Scalar(k + 1) : Scalar(k);
    const Scalar growth_log = log_growth * Scalar(k);
    out.natural(k) = exp(growth_log);
    if (log_space) {
      log_product += log(factor);
      out.enhanced(k) =
          exp(growth_log + inflation_power * log_inflation + log_product);
    } else {
      product *= factor;
      out.enhanced(k) = out.natural(k) * product *
                        pow(Scalar(1) - policy.gamma, -inflation_power);
    }
  }
  return out;
}

/// Per-buyback log growth of the compounded EPS as n grows:
/// c log(1 + xi) - log(1 - gamma).
template <typename Scalar>
Scalar asymptotic_log_growth(const BuybackPolicy<Scalar> &policy) {
  using std::log1p;
  policy.validate();
  detail::require(policy.xi >= policy.iota,
                  "asymptotic rate requires xi >= iota");
  return policy.interval_years * log1p(policy.xi) - log1p(-policy.gamma);
}

/// Per-buyback log growth without buybacks, c log(1 + xi).
template <typename Scalar>
Scalar natural_log_growth(const BuybackPolicy<Scalar> &policy) {
  using std::log1p;
  policy.validate();
  return policy.interval_years * log1p(policy.xi);
}

} // namespace buyback
