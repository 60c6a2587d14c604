#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddsp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Domain { Continuous, Integer, Binary };

/// Failure categories raised as ddsp::Error. Solver outcomes such as an
/// infeasible or unbounded program are reported through status fields instead.
enum class Errc {
  MalformedProgram,
  NumericalFailure,
  NoCell,
  UnsupportedPartition,
  ParseError,
  SchemaViolation,
  InconsistentDimensions,
  UnboundedBound,
  NotViolated,
  NonBinaryX,
  BadBounds,
  InfeasibleMaster,
  MissingY,
  ConvexityFlagMissing,
  MonotonicityFlagMissing,
  InfeasibleBatchLevels,
  UnboundedLinearizationBound,
  TooManyDistributions,
  InvalidParams,
};

inline std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::MalformedProgram: return "MalformedProgram";
    case Errc::NumericalFailure: return "NumericalFailure";
    case Errc::NoCell: return "NoCell";
    case Errc::UnsupportedPartition: return "UnsupportedPartition";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::InconsistentDimensions: return "InconsistentDimensions";
    case Errc::UnboundedBound: return "UnboundedBound";
    case Errc::NotViolated: return "NotViolated";
    case Errc::NonBinaryX: return "NonBinaryX";
    case Errc::BadBounds: return "BadBounds";
    case Errc::InfeasibleMaster: return "InfeasibleMaster";
    case Errc::MissingY: return "MissingY";
    case Errc::ConvexityFlagMissing: return "ConvexityFlagMissing";
    case Errc::MonotonicityFlagMissing: return "MonotonicityFlagMissing";
    case Errc::InfeasibleBatchLevels: return "InfeasibleBatchLevels";
    case Errc::UnboundedLinearizationBound: return "UnboundedLinearizationBound";
    case Errc::TooManyDistributions: return "TooManyDistributions";
    case Errc::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : init) {
      if (r.size() != cols_) throw Error(Errc::InconsistentDimensions, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// y = M x
inline std::vector<double> multiply(const Matrix& m, std::span<const double> x) {
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x);
  return y;
}

inline bool is_integral(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
  }
  return "?";
}

inline std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Continuous: return "continuous";
    case Domain::Integer: return "integer";
    case Domain::Binary: return "binary";
  }
  return "?";
}

}  // namespace ddsp
