#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>
#include <vector>

namespace msflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Per-curve nodal values of a piecewise linear function on a curve network.
template <typename T>
using CurveField = std::vector<std::vector<T>>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown for malformed user input (configs, boundary data).
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// v^perp = (-v_y, v_x).
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace msflow
