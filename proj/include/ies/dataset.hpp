#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ies {

/// N x p predictor matrix plus a length-N response. Every entry is finite.
/// Immutable once constructed; safe to share across threads.
class Dataset {
 public:
  /// Validates shapes and finiteness; throws ies::Error on violation.
  Dataset(Eigen::MatrixXd predictors, Eigen::VectorXd response,
          std::vector<std::string> column_names, std::string response_name = "y");

  std::size_t n_rows() const { return static_cast<std::size_t>(predictors_.rows()); }
  std::size_t n_cols() const { return static_cast<std::size_t>(predictors_.cols()); }

  const Eigen::MatrixXd& predictors() const { return predictors_; }
  const Eigen::VectorXd& response() const { return response_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::string& response_name() const { return response_name_; }

  /// Rows in the given order (duplicates allowed).
  Dataset take_rows(std::span<const std::size_t> rows) const;
  /// The first `count` predictor columns.
  Dataset take_columns(std::size_t count) const;

 private:
  Eigen::MatrixXd predictors_;
  Eigen::VectorXd response_;
  std::vector<std::string> column_names_;
  std::string response_name_;
};

/// Reads an RFC-4180 CSV with a header row. The named response column is
/// extracted; every other column becomes a predictor, in header order.
/// An empty response name reads every column as a predictor (response zero).
Dataset load_csv(const std::filesystem::path& path, const std::string& response_column);

/// Writes predictors followed by the response column, 17 significant digits.
void save_csv(const Dataset& d, const std::filesystem::path& path);

/// Splits a CSV document into records of fields (RFC-4180 quoting rules).
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text);

/// Predictors mapped column-wise onto [0, 1] by the observed min/max.
/// Constant columns map to 0 and are listed in degenerate_columns().
class ScaledView {
 public:
  explicit ScaledView(const Dataset& source);

  const Dataset& source() const { return *source_; }
  const Eigen::MatrixXd& values() const { return scaled_; }
  std::size_t n_rows() const { return source_->n_rows(); }
  std::size_t n_cols() const { return source_->n_cols(); }
  const Eigen::VectorXd& col_min() const { return col_min_; }
  const Eigen::VectorXd& col_max() const { return col_max_; }
  const std::vector<std::size_t>& degenerate_columns() const { return degenerate_; }

  double scale(std::size_t column, double x) const;
  double unscale(std::size_t column, double scaled) const;

  /// Scaled predictors of the given rows.
  Eigen::MatrixXd take_rows(std::span<const std::size_t> rows) const;

 private:
  const Dataset* source_;
  Eigen::VectorXd col_min_;
  Eigen::VectorXd col_max_;
  Eigen::MatrixXd scaled_;
  std::vector<std::size_t> degenerate_;
};

inline ScaledView scale_to_unit(const Dataset& d) { return ScaledView(d); }

/// Row-subset helper shared by several modules.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows);
Eigen::VectorXd take_rows(const Eigen::VectorXd& v, std::span<const std::size_t> rows);

}  // namespace ies
