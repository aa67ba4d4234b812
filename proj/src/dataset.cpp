#include "ies/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ies/error.hpp"

namespace ies {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_finite(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd predictors, Eigen::VectorXd response,
                 std::vector<std::string> column_names, std::string response_name)
    : predictors_(std::move(predictors)),
      response_(std::move(response)),
      column_names_(std::move(column_names)),
      response_name_(std::move(response_name)) {
  if (predictors_.rows() < 1 || predictors_.cols() < 1)
    throw Error("dataset needs at least one row and one predictor column");
  if (response_.size() != predictors_.rows())
    throw Error("response length " + std::to_string(response_.size()) +
                " does not match predictor row count " + std::to_string(predictors_.rows()));
  if (column_names_.empty()) {
    for (Eigen::Index j = 0; j < predictors_.cols(); ++j)
      column_names_.push_back("x" + std::to_string(j + 1));
  }
  if (column_names_.size() != n_cols())
    throw Error("expected " + std::to_string(n_cols()) + " column names, got " +
                std::to_string(column_names_.size()));
  if (!predictors_.allFinite() || !response_.allFinite())
    throw Error("dataset contains non-finite values");
}

Dataset Dataset::take_rows(std::span<const std::size_t> rows) const {
  return Dataset(ies::take_rows(predictors_, rows), ies::take_rows(response_, rows),
                 column_names_, response_name_);
}

Dataset Dataset::take_columns(std::size_t count) const {
  if (count < 1 || count > n_cols()) throw Error("take_columns: bad column count");
  std::vector<std::string> names(column_names_.begin(),
                                 column_names_.begin() + static_cast<std::ptrdiff_t>(count));
  return Dataset(predictors_.leftCols(static_cast<Eigen::Index>(count)), response_, names,
                 response_name_);
}

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !record.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error("CSV ends inside a quoted field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open CSV file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto records = parse_csv_records(buffer.str());
  if (records.empty()) throw Error("CSV file '" + path.string() + "' has no header row");

  const auto& header = records.front();
  std::vector<std::string> names;
  for (const auto& h : header) names.push_back(trim(h));
  const bool has_response = !response_column.empty();
  const auto matches = std::count(names.begin(), names.end(), response_column);
  if (has_response && matches == 0)
    throw Error("response column '" + response_column + "' not found in '" + path.string() + "'");
  if (matches > 1)
    throw Error("response column '" + response_column + "' appears more than once");
  if (names.size() < (has_response ? 2u : 1u))
    throw Error("CSV needs at least one predictor column besides the response");

  const std::size_t response_idx =
      has_response ? static_cast<std::size_t>(std::find(names.begin(), names.end(), response_column) - names.begin())
                   : names.size();
  const std::size_t n = records.size() - 1;
  const std::size_t p = has_response ? names.size() - 1 : names.size();
  if (n == 0) throw Error("CSV file '" + path.string() + "' has no data rows");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != names.size())
      throw Error("row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                  " fields, header has " + std::to_string(names.size()));
    std::size_t col = 0;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      double v;
      if (!parse_finite(rec[c], v))
        throw Error("row " + std::to_string(r + 1) + ", column '" + names[c] +
                    "': value '" + rec[c] + "' is not a finite number");
      if (c == response_idx) {
        y(static_cast<Eigen::Index>(r)) = v;
      } else {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col++)) = v;
      }
    }
  }
  std::vector<std::string> predictor_names;
  for (std::size_t c = 0; c < names.size(); ++c)
    if (c != response_idx) predictor_names.push_back(names[c]);
  return Dataset(std::move(x), std::move(y), std::move(predictor_names), response_column);
}

void save_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write CSV file '" + path.string() + "'");
  for (const auto& name : d.column_names()) out << quote_if_needed(name) << ',';
  out << quote_if_needed(d.response_name()) << '\n';
  const auto& x = d.predictors();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << format_double(x(i, j)) << ',';
    out << format_double(d.response()(i)) << '\n';
  }
  if (!out) throw Error("failed writing CSV file '" + path.string() + "'");
}

ScaledView::ScaledView(const Dataset& source) : source_(&source) {
  const auto& x = source.predictors();
  col_min_ = x.colwise().minCoeff().transpose();
  col_max_ = x.colwise().maxCoeff().transpose();
  scaled_.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double range = col_max_(j) - col_min_(j);
    if (!(range > 0.0)) {
      degenerate_.push_back(static_cast<std::size_t>(j));
      scaled_.col(j).setZero();
      continue;
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      scaled_(i, j) = std::clamp((x(i, j) - col_min_(j)) / range, 0.0, 1.0);
  }
}

double ScaledView::scale(std::size_t column, double x) const {
  const auto j = static_cast<Eigen::Index>(column);
  const double range = col_max_(j) - col_min_(j);
  return range > 0.0 ? (x - col_min_(j)) / range : 0.0;
}

double ScaledView::unscale(std::size_t column, double scaled) const {
  const auto j = static_cast<Eigen::Index>(column);
  return col_min_(j) + scaled * (col_max_(j) - col_min_(j));
}

Eigen::MatrixXd ScaledView::take_rows(std::span<const std::size_t> rows) const {
  return ies::take_rows(scaled_, rows);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= static_cast<std::size_t>(m.rows())) throw Error("row index out of range");
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= static_cast<std::size_t>(v.size())) throw Error("row index out of range");
    out(static_cast<Eigen::Index>(r)) = v(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

}  // namespace ies
