#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hxd {

/// n x D observations, row-major.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}
  SampleMatrix(std::size_t rows, std::size_t dim, std::vector<double> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows_ * dim_) throw std::invalid_argument("SampleMatrix: size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

  const std::vector<double>& data() const { return data_; }

  /// True when every entry lies in [0,1].
  bool in_unit_cube() const {
    for (double v : data_)
      if (!(v >= 0.0 && v <= 1.0)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Thrown when observations fall outside [0,1]^D.
class OutOfCubeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace hxd
