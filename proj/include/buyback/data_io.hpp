#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace buyback {

struct Date {
  int year{};
  int month{};
  int day{};

  friend bool operator==(const Date &, const Date &) = default;
  friend auto operator<=>(const Date &, const Date &) = default;
};

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws
/// std::invalid_argument naming the offending component.
Date parse_date(std::string_view text);
std::string format_date(const Date &date);

/// Calendar quarter. `ordinal()` counts quarters from year 0 so differences
/// give the number of quarters between two labels.
struct Quarter {
  int year{};
  int q{1};

  static Quarter of(const Date &date) { return {date.year, (date.month - 1) / 3 + 1}; }
  static Quarter from_ordinal(long ordinal) {
    return {static_cast<int>(ordinal / 4), static_cast<int>(ordinal % 4) + 1};
  }
  long ordinal() const { return static_cast<long>(year) * 4 + (q - 1); }
  std::string label() const;

  friend bool operator==(const Quarter &, const Quarter &) = default;
  friend auto operator<=>(const Quarter &, const Quarter &) = default;
};

enum class Field {
  Eps,
  BuybackValue,
  MarketCap,
  Pe,
  InterestRate,
  PretaxProfit,
  PosttaxProfit,
};

inline constexpr std::size_t kFieldCount = 7;
inline constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::Eps,          Field::BuybackValue, Field::MarketCap,
    Field::Pe,           Field::InterestRate, Field::PretaxProfit,
    Field::PosttaxProfit};

const char *field_name(Field field);
Field parse_field(std::string_view name);

/// Exact header line of the quarterly CSV schema.
inline constexpr std::string_view kCsvHeader =
    "period_end,eps,buyback_value,market_cap,pe,interest_rate,pretax_profit,"
    "posttax_profit";

/// One row of the quarterly CSV. Absent cells are empty optionals.
struct QuarterRecord {
  Date period_end;
  std::array<std::optional<double>, kFieldCount> values{};
  /// 1-based line in the source file, 0 when built in memory.
  std::size_t line{};

  std::optional<double> &operator[](Field f) {
    return values[static_cast<std::size_t>(f)];
  }
  const std::optional<double> &operator[](Field f) const {
    return values[static_cast<std::size_t>(f)];
  }

  /// Throws std::invalid_argument when the record breaks a schema invariant.
  void validate() const;
};

struct RowError {
  std::size_t line{};
  std::string message;
};

struct LoadResult {
  std::vector<QuarterRecord> records;
  std::vector<RowError> errors;
};

/// Raised for whole-file problems: unreadable file, missing or wrong header.
class CsvFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses CSV text. Malformed rows land in `errors`; parsing continues.
LoadResult parse_csv(std::istream &in);
LoadResult load_csv(const std::string &path);

/// Canonical serialisation: header, LF line endings, shortest round-trip
/// decimal for every present value, empty cell for absent values.
std::string write_csv(const std::vector<QuarterRecord> &records);
void save_csv(const std::string &path, const std::vector<QuarterRecord> &records);

struct Column {
  Eigen::VectorXd values;
  std::vector<bool> present;
  /// Source line for each present cell, 0 where absent.
  std::vector<std::size_t> source_line;
};

/// Records placed on a gap-free quarterly grid. Quarters with no record are
/// listed in `gaps`; their cells are absent in every column.
struct AlignedDataset {
  std::vector<Quarter> periods;
  std::vector<Date> period_end;
  std::map<Field, Column> columns;
  std::vector<Quarter> gaps;

  std::size_t size() const { return periods.size(); }
  const Column &column(Field f) const { return columns.at(f); }
};

class AlignmentError : public std::runtime_error {
public:
  AlignmentError(const std::string &what, std::size_t first_line,
                 std::size_t second_line)
      : std::runtime_error(what), first_line_(first_line),
        second_line_(second_line) {}
  std::size_t first_line() const { return first_line_; }
  std::size_t second_line() const { return second_line_; }

private:
  std::size_t first_line_;
  std::size_t second_line_;
};

/// Aligns records by the quarter of `period_end`. Throws AlignmentError on
/// two records in the same quarter, std::invalid_argument on empty input.
AlignedDataset align(const std::vector<QuarterRecord> &records);

} // namespace buyback
