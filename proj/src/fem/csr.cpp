#include <algorithm>
#include <map>
#include <ostream>

#include "dwave/error.hpp"
#include "dwave/fem.hpp"

namespace dwave::fem {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols, Vec values)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  require(row_ptr_.size() == n_ + 1, "CsrMatrix: row_ptr must have n+1 entries");
  require(cols_.size() == values_.size() && row_ptr_.back() == values_.size(), "CsrMatrix: inconsistent sizes");
}

void CsrMatrix::multiply(const Vec& x, Vec& y) const {
  require(x.size() == n_, "CsrMatrix::multiply: dimension mismatch");
  y.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

Vec CsrMatrix::operator*(const Vec& x) const {
  Vec y;
  multiply(x, y);
  return y;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

Vec CsrMatrix::diagonal() const {
  Vec d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::write_coordinate(std::ostream& out) const {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out << i << ' ' << cols_[k] << ' ' << values_[k] << '\n';
  out.precision(old);
}

CsrMatrix combine(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
  require(A.size() == B.size(), "combine: dimension mismatch");
  const std::size_t n = A.size();
  std::vector<std::size_t> ptr{0};
  std::vector<std::size_t> cols;
  Vec vals;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::size_t, double> row;
    for (std::size_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) row[A.cols()[k]] += a * A.values()[k];
    for (std::size_t k = B.row_ptr()[i]; k < B.row_ptr()[i + 1]; ++k) row[B.cols()[k]] += b * B.values()[k];
    for (const auto& [j, v] : row) {
      cols.push_back(j);
      vals.push_back(v);
    }
    ptr.push_back(cols.size());
  }
  return CsrMatrix(n, std::move(ptr), std::move(cols), std::move(vals));
}

}  // namespace dwave::fem
