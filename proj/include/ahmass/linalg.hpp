#pragma once

#include <Eigen/Dense>

namespace ahmass {

// Supported base dimensions are n in {2,3,4}; ambient Lorentz vectors have n+1 entries.
inline constexpr int kMaxDim = 4;
inline constexpr int kMaxLorentz = kMaxDim + 1;

// Dynamic size, stack storage.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxLorentz, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxLorentz,
                          kMaxLorentz>;

inline Mat identity(int n) { return Mat::Identity(n, n); }

}  // namespace ahmass
