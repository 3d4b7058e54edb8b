#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace slidekit {

inline constexpr int kMaxDim = 3;

// Small vectors and matrices with inline storage (n <= 3), so per-node
// integrand evaluation never touches the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slidekit
