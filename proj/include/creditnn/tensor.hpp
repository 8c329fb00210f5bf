#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "creditnn/errors.hpp"

namespace creditnn {

using Eigen::Index;

// Row-major dense matrix; the layout every Tensor maps onto.
using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatrixRM>;
using ConstMapRM = Eigen::Map<const MatrixRM>;

inline std::string shape_str(const std::vector<Index>& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ",";
    os << s[i];
  }
  os << ")";
  return os.str();
}

inline Index shape_product(const std::vector<Index>& s) {
  Index p = 1;
  for (Index d : s) {
    if (d <= 0) throw DimensionError("non-positive dimension in shape " + shape_str(s));
    p *= d;
  }
  return p;
}

// Dense multi-dimensional array of doubles, flat row-major storage.
// product(shape) == data.size() always holds.
struct Tensor {
  std::vector<Index> shape;
  Eigen::VectorXd data;

  Tensor() = default;

  Tensor(std::vector<Index> s, Eigen::VectorXd d) : shape(std::move(s)), data(std::move(d)) {
    if (shape_product(shape) != data.size())
      throw DimensionError("shape " + shape_str(shape) + " does not match " +
                           std::to_string(data.size()) + " values");
  }

  static Tensor zeros(std::vector<Index> s) {
    const Index n = shape_product(s);
    return Tensor(std::move(s), Eigen::VectorXd::Zero(n));
  }

  static Tensor full(std::vector<Index> s, double v) {
    const Index n = shape_product(s);
    return Tensor(std::move(s), Eigen::VectorXd::Constant(n, v));
  }

  static Tensor of(std::vector<Index> s, std::initializer_list<double> vals) {
    Eigen::VectorXd d(static_cast<Index>(vals.size()));
    Index i = 0;
    for (double v : vals) d[i++] = v;
    return Tensor(std::move(s), std::move(d));
  }

  Index size() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }
  Index dim(int i) const { return shape.at(static_cast<std::size_t>(i)); }

  // Product of dims [from, rank).
  Index trailing(int from) const {
    Index p = 1;
    for (std::size_t i = static_cast<std::size_t>(from); i < shape.size(); ++i) p *= shape[i];
    return p;
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const { return data.allFinite(); }

  double& operator()(Index i) { return data[i]; }
  double operator()(Index i) const { return data[i]; }
  double& operator()(Index i, Index j) { return data[i * shape[1] + j]; }
  double operator()(Index i, Index j) const { return data[i * shape[1] + j]; }
  double& operator()(Index i, Index j, Index k) {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double operator()(Index i, Index j, Index k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double& operator()(Index i, Index j, Index k, Index l) {
    return data[((i * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }
  double operator()(Index i, Index j, Index k, Index l) const {
    return data[((i * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }

  // View as rows x cols; rows*cols must equal size().
  MapRM mat(Index rows, Index cols) {
    if (rows * cols != size())
      throw DimensionError("cannot view " + shape_str(shape) + " as " + std::to_string(rows) +
                           "x" + std::to_string(cols));
    return MapRM(data.data(), rows, cols);
  }
  ConstMapRM mat(Index rows, Index cols) const {
    if (rows * cols != size())
      throw DimensionError("cannot view " + shape_str(shape) + " as " + std::to_string(rows) +
                           "x" + std::to_string(cols));
    return ConstMapRM(data.data(), rows, cols);
  }

  // First dim x everything else.
  MapRM as2d() { return mat(shape.empty() ? 0 : shape[0], trailing(1)); }
  ConstMapRM as2d() const { return mat(shape.empty() ? 0 : shape[0], trailing(1)); }
};

}  // namespace creditnn
