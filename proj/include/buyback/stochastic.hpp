#pragma once

#include <cstdint>
#include <limits>

namespace buyback {

/// Arithmetic random-walk earnings with regular buybacks every `dt_years`.
struct ArithParams {
  double x_bar{};
  double iota{};
  double m{1};
  double gamma{};
  double dt_years{0.25};
  double e0{1};

  void validate() const;
  /// Per-step multiplier a = (1 - (1 + iota)^dt m gamma) / (1 - gamma).
  double a() const;
  /// Per-step offset b = x_bar / (1 - gamma).
  double b() const;
};

struct ArithExpectation {
  double value{};
  /// True when |a - 1| was below 1e-12 and E_0 + k b was used instead.
  bool limit_form{};
};

/// Expected EPS after k regular buybacks, a^k E_0 + b (1 - a^k) / (1 - a).
ArithExpectation arith_expected_eps(const ArithParams &params, long k);

/// Independent lognormal interest and growth factors per step, with a single
/// buyback at time 0.
struct StochParams {
  double mu_i{};
  double sigma_i2{};
  double mu_x{};
  double sigma_x2{};
  double m{1};
  double gamma{};

  void validate() const;
};

/// E[G(t)] for G(t) = E'_t / E_t.
double stoch_mean_enhancement(const StochParams &params, long t);

enum class SdMode {
  /// Closed form with no t in its exponents, kept verbatim for comparison.
  PaperLiteral,
  /// Standard deviation of a lognormal with log-mean t (mu_i - mu_x) and
  /// log-variance t (sigma_i2 + sigma_x2), scaled by m gamma / (1 - gamma).
  Derived,
};

const char *to_string(SdMode mode);
SdMode parse_sd_mode(const char *text);

double stoch_sd_enhancement(const StochParams &params, long t,
                            SdMode mode = SdMode::Derived);

struct McReport {
  double estimate{};
  /// Standard error of `estimate`. Zero and flagged undefined for one path.
  double standard_error{};
  bool standard_error_defined{};
  double sample_sd{};
  /// Delta-method standard error of `sample_sd`; NaN when undefined.
  double sd_standard_error{std::numeric_limits<double>::quiet_NaN()};
  std::uint64_t paths{};
  std::uint64_t seed{};

  friend bool operator==(const McReport &, const McReport &) = default;
};

struct SimulationOptions {
  /// Worker threads; 0 picks the hardware concurrency. The report does not
  /// depend on this value.
  unsigned threads{0};
};

struct ArithSimOptions : SimulationOptions {
  /// Standard deviation of the Gaussian EPS increment per step.
  double increment_sd{0.05};
  /// Log-scale of the per-step interest factor, whose mean stays
  /// (1 + iota)^dt. Zero makes interest deterministic.
  double interest_log_sd{0.0};
};

/// Monte-Carlo estimate of G(t). Each path draws its own stream from
/// (seed, path index), so results are reproducible and thread-count free.
McReport simulate_enhancement(const StochParams &params, long t,
                              std::uint64_t paths, std::uint64_t seed,
                              const SimulationOptions &options = {});

/// Monte-Carlo estimate of E(k dt) under the arithmetic model.
McReport simulate_arith(const ArithParams &params, long k, std::uint64_t paths,
                        std::uint64_t seed, const ArithSimOptions &options = {});

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Seed for the stream of one path.
  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 base(seed);
    SplitMix64 stream(base() + index * 0xD1B54A32D192ED03ULL);
    return stream();
  }

private:
  std::uint64_t state_;
};

} // namespace buyback
