#include "trpca/tensor.hpp"

#include "trpca/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trpca {

namespace {

std::string dims_string(const TensorDims& d) {
  return "(" + std::to_string(d.n1) + ", " + std::to_string(d.n2) + ", " + std::to_string(d.n3) + ")";
}

void check_index(Index v, Index extent, const char* name) {
  if (v < 0 || v >= extent) {
    throw IndexError(std::string(name) + " index " + std::to_string(v) + " out of range [0, " +
                     std::to_string(extent) + ")");
  }
}

}  // namespace

TensorDims::TensorDims(Index rows, Index cols, Index depth) : n1(rows), n2(cols), n3(depth) {
  if (n1 < 1 || n2 < 1 || n3 < 1) {
    throw ShapeError("tensor extents must be positive, got " + dims_string(*this));
  }
  constexpr Index limit = std::numeric_limits<Index>::max() / static_cast<Index>(sizeof(double));
  if (n1 > limit / n2 || n1 * n2 > limit / n3) {
    throw ShapeError("tensor extents overflow: " + dims_string(*this));
  }
}

Tensor3::Tensor3(TensorDims dims) : dims_(dims), data_(static_cast<std::size_t>(dims.numel()), 0.0) {}

Tensor3 Tensor3::from_data(TensorDims dims, std::vector<double> values) {
  if (static_cast<Index>(values.size()) != dims.numel()) {
    throw ShapeError("expected " + std::to_string(dims.numel()) + " values for dims " + dims_string(dims) +
                     ", got " + std::to_string(values.size()));
  }
  Tensor3 t;
  t.dims_ = dims;
  t.data_ = std::move(values);
  if (!t.all_finite()) throw std::invalid_argument("tensor entries must be finite");
  return t;
}

Tensor3 Tensor3::from_slices(const std::vector<Eigen::MatrixXd>& slices) {
  if (slices.empty()) throw ShapeError("from_slices needs at least one slice");
  TensorDims dims(slices.front().rows(), slices.front().cols(), static_cast<Index>(slices.size()));
  Tensor3 t(dims);
  for (Index k = 0; k < dims.n3; ++k) {
    const auto& s = slices[static_cast<std::size_t>(k)];
    if (s.rows() != dims.n1 || s.cols() != dims.n2) throw ShapeError("frontal slices differ in size");
    t.slice(k) = s;
  }
  if (!t.all_finite()) throw std::invalid_argument("tensor entries must be finite");
  return t;
}

Tensor3 Tensor3::from_matrix(const Eigen::MatrixXd& m) { return from_slices({m}); }

double Tensor3::at(Index i, Index j, Index k) const {
  check_index(i, dims_.n1, "row");
  check_index(j, dims_.n2, "column");
  check_index(k, dims_.n3, "slice");
  return (*this)(i, j, k);
}

Tensor3::SliceMap Tensor3::slice(Index k) {
  check_index(k, dims_.n3, "slice");
  return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2};
}

Tensor3::ConstSliceMap Tensor3::slice(Index k) const {
  check_index(k, dims_.n3, "slice");
  return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2};
}

bool Tensor3::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_dims(*this, other, "operator+=");
  flat() += other.flat();
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_dims(*this, other, "operator-=");
  flat() -= other.flat();
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  flat() *= s;
  return *this;
}

void require_same_dims(const Tensor3& a, const Tensor3& b, const char* what) {
  if (a.dims() != b.dims()) {
    throw ShapeError(std::string(what) + ": dims " + dims_string(a.dims()) + " vs " + dims_string(b.dims()));
  }
}

Eigen::MatrixXd frontal_slice(const Tensor3& a, Index k) { return a.slice(k); }

double inner_product(const Tensor3& a, const Tensor3& b) {
  require_same_dims(a, b, "inner_product");
  return a.flat().dot(b.flat());
}

double norm_l1(const Tensor3& a) { return a.flat().lpNorm<1>(); }

double norm_inf(const Tensor3& a) { return a.flat().lpNorm<Eigen::Infinity>(); }

double norm_fro(const Tensor3& a) { return a.flat().norm(); }

Tensor3 basis_column(Index i, Index n, Index n3) {
  Tensor3 e(TensorDims(n, 1, n3));
  check_index(i, n, "basis column");
  e(i, 0, 0) = 1.0;
  return e;
}

Tensor3 basis_tube(Index k, Index n3) {
  Tensor3 e(TensorDims(1, 1, n3));
  check_index(k, n3, "basis tube");
  e(0, 0, k) = 1.0;
  return e;
}

Tensor3 basis_unit(Index i, Index j, Index k, TensorDims dims) {
  check_index(i, dims.n1, "row");
  check_index(j, dims.n2, "column");
  check_index(k, dims.n3, "slice");
  Tensor3 e(dims);
  e(i, j, k) = 1.0;
  return e;
}

}  // namespace trpca
