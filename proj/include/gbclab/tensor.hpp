#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace gbclab {

/// Largest supported domain/codomain dimension.
inline constexpr int kMaxDim = 10;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Dense row-major n^3 array.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), a_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const noexcept { return n_; }
  double& operator()(int i, int j, int k) noexcept { return a_[(i * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const noexcept { return a_[(i * n_ + j) * n_ + k]; }
  const std::vector<double>& data() const noexcept { return a_; }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// Dense row-major n^4 array. No symmetry is exploited in storage.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), a_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  int dim() const noexcept { return n_; }
  double& operator()(int i, int j, int k, int l) noexcept { return a_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double operator()(int i, int j, int k, int l) const noexcept {
    return a_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  std::vector<double>& data() noexcept { return a_; }
  const std::vector<double>& data() const noexcept { return a_; }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// Full contraction sum_{ijkl} a(i,j,k,l) b(i,j,k,l).
double contract(const Tensor4& a, const Tensor4& b);

/// Sum of |a(i,j,k,l) b(i,j,k,l)|, the natural scale for rounding in contract().
double contract_abs(const Tensor4& a, const Tensor4& b);

/// Raises every index of a covariant tensor with the inverse metric.
Tensor4 raise_all(const Tensor4& lower, const Matrix& ginv);

}  // namespace gbclab
