#include "gasrank/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace gasrank {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::asymmetry() const {
  if (rows_ != cols_) return INFINITY;
  double scale = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      scale = std::max(scale, std::abs((*this)(i, j)));
      diff = std::max(diff, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace gasrank
