#include "buyback/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

namespace buyback {

namespace {

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return month == 2 && is_leap(year) ? 29 : days[month - 1];
}

int parse_digits(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() ||
      !std::all_of(text.begin(), text.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("invalid " + std::string(what));
  }
  return value;
}

std::optional<double> parse_number(std::string_view cell, Field field) {
  if (cell.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() ||
      !std::isfinite(value)) {
    throw std::invalid_argument("unparseable number '" + std::string(cell) +
                                "' in column " + field_name(field));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

} // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("invalid date format (expected YYYY-MM-DD)");
  }
  Date date{parse_digits(text.substr(0, 4), "year"),
            parse_digits(text.substr(5, 2), "month"),
            parse_digits(text.substr(8, 2), "day")};
  if (date.month < 1 || date.month > 12) {
    throw std::invalid_argument("invalid month");
  }
  if (date.day < 1 || date.day > days_in_month(date.year, date.month)) {
    throw std::invalid_argument("invalid day");
  }
  return date;
}

std::string format_date(const Date &date) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02d", date.year, date.month,
                date.day);
  return buffer;
}

std::string Quarter::label() const {
  return std::to_string(year) + "Q" + std::to_string(q);
}

const char *field_name(Field field) {
  switch (field) {
  case Field::Eps:
    return "eps";
  case Field::BuybackValue:
    return "buyback_value";
  case Field::MarketCap:
    return "market_cap";
  case Field::Pe:
    return "pe";
  case Field::InterestRate:
    return "interest_rate";
  case Field::PretaxProfit:
    return "pretax_profit";
  case Field::PosttaxProfit:
    return "posttax_profit";
  }
  return "?";
}

Field parse_field(std::string_view name) {
  for (Field f : kAllFields) {
    if (name == field_name(f)) {
      return f;
    }
  }
  throw std::invalid_argument("unknown column '" + std::string(name) + "'");
}

void QuarterRecord::validate() const {
  if (std::none_of(values.begin(), values.end(),
                   [](const auto &v) { return v.has_value(); })) {
    throw std::invalid_argument("row has no values");
  }
  for (Field f : {Field::BuybackValue, Field::MarketCap}) {
    if ((*this)[f] && *(*this)[f] < 0.0) {
      throw std::invalid_argument(std::string(field_name(f)) +
                                  " must be non-negative");
    }
  }
}

LoadResult parse_csv(std::istream &in) {
  LoadResult result;
  std::string line;
  std::size_t line_number = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) {
      return false;
    }
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    return true;
  };

  if (!next_line()) {
    throw CsvFormatError("missing header row");
  }
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
    line.erase(0, 3);
  }
  if (line != kCsvHeader) {
    throw CsvFormatError("header does not match schema: expected '" +
                         std::string(kCsvHeader) + "'");
  }

  while (next_line()) {
    if (line.empty()) {
      continue;
    }
    try {
      const auto cells = split(line);
      if (cells.size() != kFieldCount + 1) {
        throw std::invalid_argument("expected " + std::to_string(kFieldCount + 1) +
                                    " cells, found " +
                                    std::to_string(cells.size()));
      }
      QuarterRecord record;
      record.line = line_number;
      record.period_end = parse_date(cells[0]);
      for (std::size_t i = 0; i < kFieldCount; ++i) {
        record.values[i] = parse_number(cells[i + 1], kAllFields[i]);
      }
      record.validate();
      result.records.push_back(record);
    } catch (const std::invalid_argument &e) {
      result.errors.push_back({line_number, e.what()});
    }
  }
  return result;
}

LoadResult load_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CsvFormatError("cannot open '" + path + "'");
  }
  return parse_csv(in);
}

std::string write_csv(const std::vector<QuarterRecord> &records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto &record : records) {
    out += format_date(record.period_end);
    for (const auto &value : record.values) {
      out += ',';
      if (value) {
        out += format_number(*value);
      }
    }
    out += '\n';
  }
  return out;
}

void save_csv(const std::string &path,
              const std::vector<QuarterRecord> &records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw CsvFormatError("cannot write '" + path + "'");
  }
  out << write_csv(records);
}

AlignedDataset align(const std::vector<QuarterRecord> &records) {
  if (records.empty()) {
    throw std::invalid_argument("cannot align an empty record list");
  }
  std::vector<const QuarterRecord *> sorted;
  sorted.reserve(records.size());
  for (const auto &r : records) {
    sorted.push_back(&r);
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) {
    return Quarter::of(a->period_end) < Quarter::of(b->period_end);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto prev = Quarter::of(sorted[i - 1]->period_end);
    if (prev == Quarter::of(sorted[i]->period_end)) {
      throw AlignmentError("duplicate quarter " + prev.label() + " (lines " +
                               std::to_string(sorted[i - 1]->line) + " and " +
                               std::to_string(sorted[i]->line) + ")",
                           sorted[i - 1]->line, sorted[i]->line);
    }
  }

  const long first = Quarter::of(sorted.front()->period_end).ordinal();
  const long last = Quarter::of(sorted.back()->period_end).ordinal();
  const auto n = static_cast<std::size_t>(last - first + 1);

  AlignedDataset data;
  data.periods.reserve(n);
  for (long o = first; o <= last; ++o) {
    data.periods.push_back(Quarter::from_ordinal(o));
  }
  data.period_end.assign(n, Date{});
  for (Field f : kAllFields) {
    Column column;
    column.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                              std::nan(""));
    column.present.assign(n, false);
    column.source_line.assign(n, 0);
    data.columns.emplace(f, std::move(column));
  }

  std::vector<bool> filled(n, false);
  for (const auto *record : sorted) {
    const auto slot =
        static_cast<std::size_t>(Quarter::of(record->period_end).ordinal() - first);
    filled[slot] = true;
    data.period_end[slot] = record->period_end;
    for (Field f : kAllFields) {
      if (const auto &v = (*record)[f]) {
        auto &column = data.columns.at(f);
        column.values(static_cast<Eigen::Index>(slot)) = *v;
        column.present[slot] = true;
        column.source_line[slot] = record->line;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!filled[i]) {
      data.gaps.push_back(data.periods[i]);
    }
  }
  return data;
}

} // namespace buyback
