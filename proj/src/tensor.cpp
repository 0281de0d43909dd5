#include "uvos/tensor.hpp"

#include <stdexcept>

namespace uvos {

namespace {

Eigen::Index checked_size(const std::vector<Eigen::Index>& dims) {
  if (dims.empty() || dims.size() > 3)
    throw std::invalid_argument("tensor: rank must be 1, 2 or 3");
  Eigen::Index n = 1;
  for (Eigen::Index d : dims) {
    if (d < 1) throw std::invalid_argument("tensor: extents must be positive");
    n *= d;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
  data_ = Eigen::ArrayXd::Zero(checked_size(dims_));
}

Tensor Tensor::from_vec(const VecXd& v) {
  Tensor t({v.size()});
  t.flat() = v.array();
  return t;
}

Tensor Tensor::from_plane(const PlaneXd& p) {
  Tensor t({p.rows(), p.cols()});
  t.plane() = p;
  return t;
}

Tensor Tensor::stack(Eigen::Index channels, Eigen::Index rows, Eigen::Index cols) {
  return Tensor({channels, rows, cols});
}

Eigen::Map<PlaneXd> Tensor::plane() {
  if (rank() != 2) throw std::invalid_argument("tensor: plane() needs rank 2");
  return {data_.data(), dims_[0], dims_[1]};
}

Eigen::Map<const PlaneXd> Tensor::plane() const {
  if (rank() != 2) throw std::invalid_argument("tensor: plane() needs rank 2");
  return {data_.data(), dims_[0], dims_[1]};
}

Eigen::Index Tensor::channels() const {
  return rank() == 3 ? dims_[0] : 1;
}

Eigen::Index Tensor::rows() const {
  if (rank() < 2) throw std::invalid_argument("tensor: rows() needs rank 2 or 3");
  return dims_[rank() - 2];
}

Eigen::Index Tensor::cols() const {
  if (rank() < 2) throw std::invalid_argument("tensor: cols() needs rank 2 or 3");
  return dims_[rank() - 1];
}

Eigen::Map<PlaneXd> Tensor::channel(Eigen::Index c) {
  if (rank() != 3) throw std::invalid_argument("tensor: channel() needs rank 3");
  if (c < 0 || c >= dims_[0]) throw std::invalid_argument("tensor: channel out of range");
  return {data_.data() + c * dims_[1] * dims_[2], dims_[1], dims_[2]};
}

Eigen::Map<const PlaneXd> Tensor::channel(Eigen::Index c) const {
  if (rank() != 3) throw std::invalid_argument("tensor: channel() needs rank 3");
  if (c < 0 || c >= dims_[0]) throw std::invalid_argument("tensor: channel out of range");
  return {data_.data() + c * dims_[1] * dims_[2], dims_[1], dims_[2]};
}

}  // namespace uvos
