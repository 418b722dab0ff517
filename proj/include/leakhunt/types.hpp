#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace leakhunt {

/** Scalar type used throughout the library. */
using scalar_t = double;

/** Index type (signed, Eigen convention). */
using index_t = Eigen::Index;

/** Dynamic column vector. */
using vector_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;

/** Dynamic dense matrix. */
using matrix_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Column-major sparse matrix. */
using sparse_t = Eigen::SparseMatrix<scalar_t>;

inline constexpr scalar_t kGravity = 9.81;              // m/s^2
inline constexpr scalar_t kSecondsPerDay = 86400.0;     // s
inline constexpr scalar_t kDensityScale = 8.64e7;       // 86400 / (1/1000), m3/s per m -> m3/day/km

}  // namespace leakhunt
