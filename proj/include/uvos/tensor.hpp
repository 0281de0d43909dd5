#pragma once

#include <vector>

#include "uvos/types.hpp"

namespace uvos {

// Dense real array of rank 1, 2 or 3, stored flat in row-major order with
// the last dimension fastest. Rank-3 stacks are channel-major [C, H, W].
// Values live in double precision in memory; the on-disk container narrows
// to 32-bit floats (see io.hpp).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<Eigen::Index> dims);

  static Tensor from_vec(const VecXd& v);
  static Tensor from_plane(const PlaneXd& p);
  static Tensor stack(Eigen::Index channels, Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rank() const { return static_cast<Eigen::Index>(dims_.size()); }
  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  // Flat view over the storage, any rank.
  Eigen::Map<Eigen::ArrayXd> flat() { return {data_.data(), data_.size()}; }
  Eigen::Map<const Eigen::ArrayXd> flat() const { return {data_.data(), data_.size()}; }

  // Rank-2 view.
  Eigen::Map<PlaneXd> plane();
  Eigen::Map<const PlaneXd> plane() const;

  // Rank-3 views, one H x W plane per channel.
  Eigen::Index channels() const;
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  Eigen::Map<PlaneXd> channel(Eigen::Index c);
  Eigen::Map<const PlaneXd> channel(Eigen::Index c) const;

  bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }

 private:
  std::vector<Eigen::Index> dims_;
  Eigen::ArrayXd data_;
};

}  // namespace uvos
