#include "torspec/matrix.hpp"

#include <cmath>

#include "torspec/error.hpp"

namespace torspec {

double CMatrix::maxAbs() const noexcept {
  double m = 0.0;
  for (const cplx& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double CMatrix::frobeniusNorm() const noexcept {
  double s = 0.0;
  for (const cplx& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

cplx CMatrix::trace() const noexcept {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
  if (cols_ != rhs.rows_) fail(ErrorKind::InvalidArgument, "matrix product: shape mismatch");
  CMatrix r(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    cplx* out = r.data_.data() + i * r.cols_;
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx a = (*this)(i, k);
      if (a == cplx{}) continue;
      const cplx* b = rhs.data_.data() + k * rhs.cols_;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out[j] += cmul(a, b[j]);
    }
  }
  return r;
}

CMatrix CMatrix::operator-(const CMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    fail(ErrorKind::InvalidArgument, "matrix difference: shape mismatch");
  CMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= rhs.data_[i];
  return r;
}

std::vector<cplx> CMatrix::operator*(std::span<const cplx> v) const {
  if (v.size() != cols_) fail(ErrorKind::InvalidArgument, "matrix-vector product: shape mismatch");
  std::vector<cplx> r(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    cplx s = 0.0;
    const cplx* a = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) s += cmul(a[j], v[j]);
    r[i] = s;
  }
  return r;
}

const char* errorKindName(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateMinimum: return "DegenerateMinimum";
    case ErrorKind::EmptyShell: return "EmptyShell";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::RegionViolatesHypotheses: return "RegionViolatesHypotheses";
    case ErrorKind::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

}  // namespace torspec
