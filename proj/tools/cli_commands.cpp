#include "cli_commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "buyback/core_model.hpp"
#include "buyback/data_io.hpp"
#include "buyback/estimation.hpp"
#include "buyback/stochastic.hpp"

namespace buyback::cli {

namespace {

using nlohmann::json;

enum class Format { Json, Csv };

/// Usage problems that are not CLI11 parse errors.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string format{"json"};
  std::string out_path;
};

Format parse_format(const std::string &text) {
  if (text == "json") {
    return Format::Json;
  }
  if (text == "csv") {
    return Format::Csv;
  }
  throw UsageError("unknown format '" + text + "' (expected json or csv)");
}

std::string num(double v) {
  if (!std::isfinite(v)) {
    return "";
  }
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json meta(const std::string &command, const json &params) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"params", params}};
}

/// CSV output: metadata as leading comment lines, then header and rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const json &metadata, const CsvTable &table,
                       const json &results = json::object()) {
  std::ostringstream os;
  os << "# tool=" << kToolName << " version=" << kToolVersion
     << " command=" << metadata.at("command").get<std::string>() << '\n';
  os << "# params=" << metadata.at("params").dump() << '\n';
  if (!results.empty()) {
    os << "# results=" << results.dump() << '\n';
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    os << (i ? "," : "") << table.header[i];
  }
  os << '\n';
  for (const auto &row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << row[i];
    }
    os << '\n';
  }
  return os.str();
}

void emit(const Common &common, const std::string &text, std::ostream &out) {
  if (common.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(common.out_path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot write '" + common.out_path + "'");
  }
  file << text;
}

json summary_json(const Summary &s) {
  return {{"median", s.median}, {"p20", s.p20}, {"p80", s.p80},
          {"mean", s.mean},     {"count", s.count}};
}

json report_json(const McReport &r) {
  return {{"estimate", r.estimate},
          {"standard_error", r.standard_error},
          {"standard_error_defined", r.standard_error_defined},
          {"sample_sd", r.sample_sd},
          {"sd_standard_error", number_or_null(r.sd_standard_error)},
          {"paths", r.paths},
          {"seed", r.seed}};
}

// ---------------------------------------------------------------- critical

struct CriticalArgs {
  double interest{};
  double tax{};
  std::optional<double> pe;
  Common common;
};

// Sensitivity grid: interest 1%..10% in 0.5% steps, tax 10%..50% in 5% steps.
std::vector<double> interest_grid() {
  std::vector<double> g;
  for (int k = 2; k <= 20; ++k) {
    g.push_back(k / 200.0);
  }
  return g;
}

std::vector<double> tax_grid() {
  std::vector<double> g;
  for (int k = 2; k <= 10; ++k) {
    g.push_back(k / 20.0);
  }
  return g;
}

std::string cmd_critical(const CriticalArgs &a) {
  const MarketParams<double> market{a.interest, a.tax};
  const double value = critical_pe(market);
  json params = {{"interest", a.interest}, {"tax", a.tax}};
  json results = {{"critical_pe", value}};
  if (a.pe) {
    params["pe"] = *a.pe;
    const auto check = is_accretive(*a.pe, market);
    results["accretive"] = check.accretive;
    results["margin"] = check.margin;
    if (*a.pe <= 0.0) {
      results["note"] = "non-positive P/E (negative earnings) is never accretive";
    }
  }

  CsvTable table{{"interest", "tax", "critical_pe"}, {}};
  json grid = json::array();
  for (double i : interest_grid()) {
    for (double t : tax_grid()) {
      const double v = critical_pe(MarketParams<double>{i, t});
      grid.push_back({{"interest", i}, {"tax", t}, {"critical_pe", v}});
      table.rows.push_back({num(i), num(t), num(v)});
    }
  }
  const auto m = meta("critical", params);
  if (parse_format(a.common.format) == Format::Csv) {
    return render_csv(m, table, results);
  }
  results["grid"] = grid;
  return json{{"meta", m}, {"results", results}}.dump(2) + "\n";
}

// ----------------------------------------------------------------- enhance

struct EnhanceArgs {
  double m{};
  double gamma{};
  std::optional<double> horizon;
  double iota{0.0};
  double xi{0.0};
  Common common;
};

std::string cmd_enhance(const EnhanceArgs &a) {
  const double exact = instantaneous_enhancement(a.m, a.gamma);
  const double approx = instantaneous_enhancement_approx(a.m, a.m * a.gamma);
  json params = {{"m", a.m}, {"gamma", a.gamma}, {"iota", a.iota}, {"xi", a.xi}};
  json results = {{"instantaneous",
                   {{"exact", exact},
                    {"first_order", approx},
                    {"s_over_pstar_n", a.m * a.gamma}}}};

  CsvTable table{{"years", "ratio", "boost_exact", "boost_first_order",
                  "enhanced_over_e0", "natural_over_e0"},
                 {}};
  if (a.horizon) {
    params["horizon"] = *a.horizon;
    const BuybackPolicy<double> policy{a.gamma, a.m, a.xi, a.iota, 1.0};
    if (*a.horizon < 0.0) {
      throw std::invalid_argument("horizon must be non-negative");
    }
    std::vector<double> years;
    for (int t = 0; t <= static_cast<int>(std::floor(*a.horizon)); ++t) {
      years.push_back(t);
    }
    if (years.back() < *a.horizon) {
      years.push_back(*a.horizon);
    }
    json curve = json::array();
    for (double T : years) {
      const double ratio = horizon_enhancement(policy, T);
      const double first = horizon_boost_first_order(policy, T);
      const double natural = std::pow(1.0 + a.xi, T);
      curve.push_back({{"years", T},
                       {"ratio", ratio},
                       {"boost_exact", ratio - 1.0},
                       {"boost_first_order", first},
                       {"enhanced_over_e0", ratio * natural},
                       {"natural_over_e0", natural}});
      table.rows.push_back({num(T), num(ratio), num(ratio - 1.0), num(first),
                            num(ratio * natural), num(natural)});
    }
    results["horizon"] = curve;
    if (a.xi > a.iota) {
      const auto limits = horizon_boost_limits(policy);
      results["limits"] = {{"exact", limits.exact},
                           {"first_order", limits.first_order}};
    }
  } else {
    table.rows.push_back({"0", num(1.0 + exact), num(exact), num(approx), "", ""});
  }

  const auto m = meta("enhance", params);
  if (parse_format(a.common.format) == Format::Csv) {
    json scalar = results;
    scalar.erase("horizon");
    return render_csv(m, table, scalar);
  }
  return json{{"meta", m}, {"results", results}}.dump(2) + "\n";
}

// ----------------------------------------------------------------- program

struct ProgramArgs {
  double m{};
  double gamma{};
  double xi{};
  double iota{};
  double interval{0.25};
  long n{};
  std::string mode{"recursive"};
  Common common{"csv", ""};
};

std::string cmd_program(const ProgramArgs &a) {
  const BuybackPolicy<double> policy{a.gamma, a.m, a.xi, a.iota, a.interval};
  const ProgramMode mode = parse_program_mode(a.mode);
  const auto series = program_series(policy, a.n, mode);

  json params = {{"m", a.m},       {"gamma", a.gamma},       {"xi", a.xi},
                 {"iota", a.iota}, {"interval", a.interval}, {"n", a.n},
                 {"mode", to_string(mode)}};
  json results = {{"natural_log_growth", natural_log_growth(policy)}};
  if (a.xi >= a.iota) {
    results["asymptotic_log_growth"] = asymptotic_log_growth(policy);
  }

  CsvTable table{{"n", "years", "enhanced", "natural", "ratio"}, {}};
  json rows = json::array();
  for (Eigen::Index k = 0; k < series.size(); ++k) {
    const double years = a.interval * static_cast<double>(k);
    const double e = series.enhanced(k);
    const double nat = series.natural(k);
    table.rows.push_back({std::to_string(k), num(years), num(e), num(nat),
                          num(e / nat)});
    rows.push_back({{"n", k},
                    {"years", years},
                    {"enhanced", e},
                    {"natural", nat},
                    {"ratio", e / nat}});
  }
  const auto m = meta("program", params);
  if (parse_format(a.common.format) == Format::Csv) {
    return render_csv(m, table, results);
  }
  results["series"] = rows;
  return json{{"meta", m}, {"results", results}}.dump(2) + "\n";
}

// ------------------------------------------------------- dataset pipelines

struct DatasetArgs {
  std::string input;
  std::optional<double> interest;
  std::optional<double> tax;
  Common common;
};

struct LoadedDataset {
  AlignedDataset data;
  std::vector<RowError> row_errors;
};

LoadedDataset load_dataset(const std::string &path) {
  auto loaded = load_csv(path);
  if (loaded.records.empty()) {
    throw std::runtime_error("no valid rows in '" + path + "'");
  }
  return {align(loaded.records), std::move(loaded.errors)};
}

std::vector<double> column_values(const AlignedDataset &data, Field f) {
  const auto &c = data.column(f);
  return {c.values.data(), c.values.data() + c.values.size()};
}

struct DatasetRatios {
  RatioSeries ratios;
  FlaggedSeries tax;
  std::vector<double> critical;
  std::vector<double> interest;
};

DatasetRatios dataset_ratios(const AlignedDataset &data, const DatasetArgs &a) {
  const std::size_t n = data.size();
  DatasetRatios out;

  if (a.tax) {
    out.tax.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), *a.tax);
    out.tax.valid.assign(n, true);
    out.tax.flags.assign(n, "");
  } else {
    out.tax = effective_tax_rate(column_values(data, Field::PretaxProfit),
                                 column_values(data, Field::PosttaxProfit));
  }
  out.interest = a.interest ? std::vector<double>(n, *a.interest)
                            : column_values(data, Field::InterestRate);

  std::vector<MarketParams<double>> markets(n);
  std::vector<double> pe = column_values(data, Field::Pe);
  out.critical.assign(n, std::nan(""));
  for (std::size_t i = 0; i < n; ++i) {
    const double tax = out.tax.values(static_cast<Eigen::Index>(i));
    if (!out.tax.valid[i] || !std::isfinite(out.interest[i]) || tax < 0.0 ||
        tax >= 1.0) {
      markets[i] = {0.0, 0.0};
      pe[i] = std::nan("");
      continue;
    }
    markets[i] = {out.interest[i], tax};
    if (out.interest[i] > 0.0) {
      out.critical[i] = critical_pe(markets[i]);
    }
  }

  for (const auto &q : data.periods) {
    out.ratios.periods.push_back(q.label());
  }
  out.ratios.m_values = estimate_m(pe, markets);
  out.ratios.gamma_values = estimate_gamma(column_values(data, Field::BuybackValue),
                                           column_values(data, Field::MarketCap));
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.tax.valid[i] && out.ratios.m_values.flags[i] == "missing pe") {
      out.ratios.m_values.flags[i] = "no tax rate for period";
    }
  }
  return out;
}

json flagged_json(const FlaggedSeries &s) {
  json values = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    values.push_back(s.valid[i] ? json(s.values(static_cast<Eigen::Index>(i)))
                                : json(nullptr));
  }
  return values;
}

json row_errors_json(const std::vector<RowError> &errors) {
  json out = json::array();
  for (const auto &e : errors) {
    out.push_back({{"line", e.line}, {"message", e.message}});
  }
  return out;
}

json gaps_json(const AlignedDataset &data) {
  json out = json::array();
  for (const auto &q : data.gaps) {
    out.push_back(q.label());
  }
  return out;
}

std::string cmd_ratios(const DatasetArgs &a) {
  const auto loaded = load_dataset(a.input);
  const auto r = dataset_ratios(loaded.data, a);
  json params = {{"input", a.input}};
  if (a.interest) params["interest"] = *a.interest;
  if (a.tax) params["tax"] = *a.tax;

  json results = {{"row_errors", row_errors_json(loaded.row_errors)},
                  {"gaps", gaps_json(loaded.data)}};
  const auto valid_count = [](const FlaggedSeries &s) {
    return std::count(s.valid.begin(), s.valid.end(), true);
  };
  if (valid_count(r.ratios.m_values) > 0) {
    results["m_summary"] = summary_json(summarize(r.ratios.m_values));
  }
  if (valid_count(r.ratios.gamma_values) > 0) {
    results["gamma_summary"] = summary_json(summarize(r.ratios.gamma_values));
  }

  CsvTable table{{"period", "tax_rate", "critical_pe", "m", "gamma", "flags"}, {}};
  for (std::size_t i = 0; i < loaded.data.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    std::string flags = r.ratios.m_values.flags[i];
    if (!r.ratios.gamma_values.flags[i].empty()) {
      flags += (flags.empty() ? "" : "; ") + r.ratios.gamma_values.flags[i];
    }
    table.rows.push_back(
        {r.ratios.periods[i], r.tax.valid[i] ? num(r.tax.values(idx)) : "",
         num(r.critical[i]),
         r.ratios.m_values.valid[i] ? num(r.ratios.m_values.values(idx)) : "",
         r.ratios.gamma_values.valid[i] ? num(r.ratios.gamma_values.values(idx))
                                        : "",
         "\"" + flags + "\""});
  }
  const auto m = meta("ratios", params);
  if (parse_format(a.common.format) == Format::Csv) {
    return render_csv(m, table, results);
  }
  results["periods"] = r.ratios.periods;
  results["tax_rate"] = flagged_json(r.tax);
  results["m"] = flagged_json(r.ratios.m_values);
  results["gamma"] = flagged_json(r.ratios.gamma_values);
  return json{{"meta", m}, {"results", results}}.dump(2) + "\n";
}

struct FitArgs : DatasetArgs {
  std::optional<double> m;
  std::optional<double> gamma;
  std::optional<double> iota;
  double interval{0.25};
  std::string mode{"recursive"};
};

std::string cmd_fit(const FitArgs &a) {
  const auto loaded = load_dataset(a.input);
  const auto &data = loaded.data;
  const auto series = EarningsSeries::from_dataset(data, Field::Eps);
  series.validate();

  json params = {{"input", a.input}, {"interval", a.interval}, {"mode", a.mode}};
  json results = {{"row_errors", row_errors_json(loaded.row_errors)},
                  {"gaps", gaps_json(data)}};

  double m = 0.0;
  double gamma = 0.0;
  if (!a.m || !a.gamma) {
    const auto r = dataset_ratios(data, a);
    if (!a.m) {
      const auto s = summarize(r.ratios.m_values);
      results["m_summary"] = summary_json(s);
      m = s.median;
    }
    if (!a.gamma) {
      const auto s = summarize(r.ratios.gamma_values);
      results["gamma_summary"] = summary_json(s);
      gamma = s.mean;
    }
  }
  if (a.m) m = *a.m;
  if (a.gamma) gamma = *a.gamma;

  double iota = 0.0;
  if (a.iota) {
    iota = *a.iota;
  } else if (a.interest) {
    iota = *a.interest;
  } else {
    FlaggedSeries rates;
    rates.values = data.column(Field::InterestRate).values;
    rates.valid = data.column(Field::InterestRate).present;
    rates.flags.assign(rates.valid.size(), "");
    if (std::find(rates.valid.begin(), rates.valid.end(), true) == rates.valid.end()) {
      throw UsageError("no interest_rate column values; pass --iota");
    }
    iota = summarize(rates).mean;
  }
  params["m"] = m;
  params["gamma"] = gamma;
  params["iota"] = iota;
  if (a.interest) params["interest"] = *a.interest;
  if (a.tax) params["tax"] = *a.tax;

  const ProgramMode mode = parse_program_mode(a.mode);
  EarningsSeries s = series;
  s.period_length_years = a.interval;
  const BuybackPolicy<double> policy{gamma, m, 0.0, iota, a.interval};
  const auto fit = fit_natural_growth(s, policy, mode);

  const double years = a.interval * static_cast<double>(s.steps.back());
  const double observed = s.values(s.values.size() - 1) / s.values(0) - 1.0;
  const double natural = std::pow(1.0 + fit.xi_hat, years) - 1.0;
  results["fit"] = {{"xi_hat", fit.xi_hat},       {"e0_hat", fit.e0_hat},
                    {"sse", fit.sse},             {"iterations", fit.iterations},
                    {"converged", fit.converged}, {"observations", s.steps.size()}};
  results["growth"] = {{"years", years},
                       {"observed", observed},
                       {"natural", natural},
                       {"attribution", number_or_null(observed > 0.0
                                                          ? attribution(observed, natural)
                                                          : std::nan(""))}};

  const auto model = model_eps(s, policy, fit.xi_hat, fit.e0_hat, mode);
  CsvTable table{{"period", "n", "realised", "model_enhanced", "model_natural"}, {}};
  json rows = json::array();
  for (std::size_t j = 0; j < s.steps.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    const double nat =
        fit.e0_hat * std::pow(1.0 + fit.xi_hat, a.interval * static_cast<double>(s.steps[j]));
    table.rows.push_back({s.labels[j], std::to_string(s.steps[j]), num(s.values(idx)),
                          num(model(idx)), num(nat)});
    rows.push_back({{"period", s.labels[j]},
                    {"n", s.steps[j]},
                    {"realised", s.values(idx)},
                    {"model_enhanced", model(idx)},
                    {"model_natural", nat}});
  }
  if (!fit.converged) {
    results["warning"] = "optimizer hit the iteration cap; best-so-far reported";
  }
  const auto mt = meta("fit", params);
  if (parse_format(a.common.format) == Format::Csv) {
    return render_csv(mt, table, results);
  }
  results["series"] = rows;
  return json{{"meta", mt}, {"results", results}}.dump(2) + "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model{"lognormal"};
  double mu_i{};
  double sigma_i2{};
  double mu_x{};
  double sigma_x2{};
  double m{1.0};
  double gamma{};
  long horizon{1};
  double x_bar{};
  double iota{};
  double interval{0.25};
  double e0{1.0};
  long n{1};
  double increment_sd{0.05};
  double interest_log_sd{0.0};
  std::uint64_t paths{100000};
  std::uint64_t seed{20190101};
  unsigned threads{0};
  Common common;
};

double z_score(double closed, double estimate, double se) {
  return se > 0.0 ? (estimate - closed) / se : std::nan("");
}

std::string cmd_simulate(const SimulateArgs &a) {
  json params = {{"model", a.model}, {"m", a.m},         {"gamma", a.gamma},
                 {"paths", a.paths}, {"seed", a.seed}};
  json results;
  CsvTable table;
  if (a.model == "lognormal") {
    const StochParams p{a.mu_i, a.sigma_i2, a.mu_x, a.sigma_x2, a.m, a.gamma};
    params.update({{"mu_i", a.mu_i},
                   {"sigma_i2", a.sigma_i2},
                   {"mu_x", a.mu_x},
                   {"sigma_x2", a.sigma_x2},
                   {"horizon", a.horizon}});
    const auto report =
        simulate_enhancement(p, a.horizon, a.paths, a.seed, {a.threads});
    const double mean = stoch_mean_enhancement(p, a.horizon);
    json closed = {{"mean", mean}};
    if (a.horizon >= 1) {
      closed["sd_derived"] = stoch_sd_enhancement(p, a.horizon, SdMode::Derived);
      closed["sd_paper_literal"] =
          stoch_sd_enhancement(p, a.horizon, SdMode::PaperLiteral);
    }
    results = {{"mc", report_json(report)}, {"closed_form", closed}};
    json z = {{"mean", number_or_null(z_score(mean, report.estimate,
                                              report.standard_error))}};
    if (a.horizon >= 1) {
      z["sd_derived"] = number_or_null(z_score(closed["sd_derived"],
                                               report.sample_sd,
                                               report.sd_standard_error));
      z["sd_paper_literal"] = number_or_null(z_score(
          closed["sd_paper_literal"], report.sample_sd, report.sd_standard_error));
    }
    results["z_scores"] = z;
    table = {{"model", "horizon", "paths", "seed", "estimate", "standard_error",
              "sample_sd", "closed_mean", "closed_sd_derived",
              "closed_sd_paper_literal"},
             {{"lognormal", std::to_string(a.horizon), std::to_string(a.paths),
               std::to_string(a.seed), num(report.estimate),
               num(report.standard_error), num(report.sample_sd), num(mean),
               a.horizon >= 1 ? num(closed["sd_derived"].get<double>()) : "",
               a.horizon >= 1 ? num(closed["sd_paper_literal"].get<double>()) : ""}}};
  } else if (a.model == "arithmetic") {
    const ArithParams p{a.x_bar, a.iota, a.m, a.gamma, a.interval, a.e0};
    params.update({{"x_bar", a.x_bar},
                   {"iota", a.iota},
                   {"interval", a.interval},
                   {"e0", a.e0},
                   {"n", a.n},
                   {"increment_sd", a.increment_sd},
                   {"interest_log_sd", a.interest_log_sd}});
    ArithSimOptions options;
    options.threads = a.threads;
    options.increment_sd = a.increment_sd;
    options.interest_log_sd = a.interest_log_sd;
    const auto report = simulate_arith(p, a.n, a.paths, a.seed, options);
    const auto expected = arith_expected_eps(p, a.n);
    results = {{"mc", report_json(report)},
               {"closed_form",
                {{"mean", expected.value}, {"limit_form", expected.limit_form}}},
               {"z_scores",
                {{"mean", number_or_null(z_score(expected.value, report.estimate,
                                                 report.standard_error))}}}};
    table = {{"model", "n", "paths", "seed", "estimate", "standard_error",
              "closed_mean"},
             {{"arithmetic", std::to_string(a.n), std::to_string(a.paths),
               std::to_string(a.seed), num(report.estimate),
               num(report.standard_error), num(expected.value)}}};
  } else {
    throw UsageError("unknown model '" + a.model + "' (expected lognormal or arithmetic)");
  }
  const auto m = meta("simulate", params);
  if (parse_format(a.common.format) == Format::Csv) {
    return render_csv(m, table);
  }
  return json{{"meta", m}, {"results", results}}.dump(2) + "\n";
}

void add_common(CLI::App *cmd, Common &common) {
  cmd->add_option("--format", common.format, "Output format: json or csv")
      ->capture_default_str();
  cmd->add_option("--out", common.out_path, "Write output to this file");
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  while (!text.empty() && text.back() == ' ') {
    text.pop_back();
  }
  return text;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Earnings-per-share effects of share buybacks", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CriticalArgs critical;
  auto *c = app.add_subcommand("critical", "Critical P/E and its sensitivity grid");
  c->add_option("--interest", critical.interest, "Annual interest rate (fraction)")
      ->required();
  c->add_option("--tax", critical.tax, "Tax rate (fraction)")->required();
  c->add_option("--pe", critical.pe, "Screen this P/E ratio for accretion");
  add_common(c, critical.common);

  EnhanceArgs enhance;
  auto *e = app.add_subcommand("enhance", "Instantaneous and horizon enhancement");
  e->add_option("--m", enhance.m, "Price paid as a fraction of the critical price")
      ->required();
  e->add_option("--gamma", enhance.gamma, "Spend as a fraction of market cap")
      ->required();
  e->add_option("--horizon", enhance.horizon, "Horizon in years");
  e->add_option("--iota", enhance.iota, "Interest growth per annum");
  e->add_option("--xi", enhance.xi, "Natural EPS growth per annum");
  add_common(e, enhance.common);

  ProgramArgs program;
  auto *p = app.add_subcommand("program", "Compounded EPS under a buyback program");
  p->add_option("--m", program.m)->required();
  p->add_option("--gamma", program.gamma)->required();
  p->add_option("--xi", program.xi)->required();
  p->add_option("--iota", program.iota)->required();
  p->add_option("--interval", program.interval, "Years between buybacks")
      ->capture_default_str();
  p->add_option("--n", program.n, "Last buyback index")->required();
  p->add_option("--mode", program.mode, "recursive or paper-literal")
      ->capture_default_str();
  add_common(p, program.common);

  DatasetArgs ratios;
  auto *r = app.add_subcommand("ratios", "Per-period m, gamma and tax from a CSV");
  r->add_option("--input", ratios.input)->required();
  r->add_option("--interest", ratios.interest, "Constant interest rate override");
  r->add_option("--tax", ratios.tax, "Constant tax rate override");
  add_common(r, ratios.common);

  FitArgs fit;
  auto *f = app.add_subcommand("fit", "Fit natural growth to realised EPS");
  f->add_option("--input", fit.input)->required();
  f->add_option("--m", fit.m, "Fixed m (default: median of data)");
  f->add_option("--gamma", fit.gamma, "Fixed gamma (default: mean of data)");
  f->add_option("--iota", fit.iota, "Interest growth (default: mean interest_rate)");
  f->add_option("--interval", fit.interval)->capture_default_str();
  f->add_option("--interest", fit.interest, "Constant interest rate override");
  f->add_option("--tax", fit.tax, "Constant tax rate override");
  f->add_option("--mode", fit.mode)->capture_default_str();
  add_common(f, fit.common);

  SimulateArgs sim;
  auto *s = app.add_subcommand("simulate", "Monte-Carlo check of the stochastic models");
  s->add_option("--model", sim.model, "lognormal or arithmetic")->capture_default_str();
  s->add_option("--mu-i", sim.mu_i);
  s->add_option("--sigma-i2", sim.sigma_i2);
  s->add_option("--mu-x", sim.mu_x);
  s->add_option("--sigma-x2", sim.sigma_x2);
  s->add_option("--m", sim.m)->required();
  s->add_option("--gamma", sim.gamma)->required();
  s->add_option("--horizon", sim.horizon, "Steps t (lognormal)");
  s->add_option("--x-bar", sim.x_bar);
  s->add_option("--iota", sim.iota);
  s->add_option("--interval", sim.interval, "Step length in years (arithmetic)");
  s->add_option("--e0", sim.e0);
  s->add_option("--n", sim.n, "Buyback count k (arithmetic)");
  s->add_option("--increment-sd", sim.increment_sd);
  s->add_option("--interest-log-sd", sim.interest_log_sd);
  s->add_option("--paths", sim.paths)->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  add_common(s, sim.common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion &) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      return 0;
    }
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (c->parsed()) {
      emit(critical.common, cmd_critical(critical), out);
    } else if (e->parsed()) {
      emit(enhance.common, cmd_enhance(enhance), out);
    } else if (p->parsed()) {
      emit(program.common, cmd_program(program), out);
    } else if (r->parsed()) {
      emit(ratios.common, cmd_ratios(ratios), out);
    } else if (f->parsed()) {
      emit(fit.common, cmd_fit(fit), out);
    } else if (s->parsed()) {
      emit(sim.common, cmd_simulate(sim), out);
    }
  } catch (const std::domain_error &ex) {
    err << "error: domain: " << one_line(ex.what()) << '\n';
    return 3;
  } catch (const std::invalid_argument &ex) {
    err << "error: invalid-argument: " << one_line(ex.what()) << '\n';
    return 2;
  } catch (const std::exception &ex) {
    err << "error: data: " << one_line(ex.what()) << '\n';
    return 4;
  }
  return 0;
}

} // namespace buyback::cli
