#ifndef COMPKAT_LINALG_HPP
#define COMPKAT_LINALG_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace compkat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Thrown when an argument has the wrong length or shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_length(const Vector& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

inline void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

/// Product of an outer Jacobian (rows x k) with an inner Jacobian (k x cols).
/// Every chain-rule product in the library goes through here, so the
/// two-level and multi-level estimators perform bit-identical arithmetic.
inline Matrix chain_product(const Matrix& outer, const Matrix& inner) {
  Matrix out = outer * inner;
  return out;
}

/// Wraps a gradient vector as a 1 x n Jacobian row.
inline Matrix as_row(const Vector& g) { return g.transpose(); }

inline Vector row_to_vector(const Matrix& row) {
  if (row.rows() != 1) throw DimensionError("row_to_vector: expected a single row");
  return row.transpose();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace compkat

#endif  // COMPKAT_LINALG_HPP
