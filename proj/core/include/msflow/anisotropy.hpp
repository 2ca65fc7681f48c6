#pragma once

#include "msflow/common.hpp"

#include <vector>

namespace msflow {

/// One quadratic-form term p -> sqrt(p . G p) of an anisotropy.
class AnisotropyComponent {
 public:
  explicit AnisotropyComponent(const Mat2& G);

  const Mat2& G() const { return G_; }
  /// det(G) G^{-1}, the metric that defines anisotropic tangential derivatives.
  const Mat2& G_tilde() const { return G_tilde_; }

  double eval(const Vec2& p) const;

 private:
  Mat2 G_;
  Mat2 G_tilde_;
};

/// gamma(p) = scale * sum_l sqrt(p . G_l p).
class Anisotropy {
 public:
  Anisotropy(std::vector<AnisotropyComponent> components, double scale = 1.0);

  static Anisotropy isotropic(double scale = 1.0);
  /// Smoothed-hexagon Wulff shape with G_l = (R^l)^T diag(1, delta^2) R^l, l = 1..3.
  static Anisotropy hex2d(double delta, double scale = 1.0);

  double eval(const Vec2& p) const;

  const std::vector<AnisotropyComponent>& components() const { return components_; }
  double scale() const { return scale_; }

 private:
  std::vector<AnisotropyComponent> components_;
  double scale_;
};

double eval_gamma(const Anisotropy& gamma, const Vec2& p);
Anisotropy make_hex2d(double delta);

/// det(G) G^{-1} for SPD G (d = 2).
Mat2 gtilde(const Mat2& G);

/// R(theta) = [[cos, sin], [-sin, cos]].
Mat2 rotation(double theta);

struct SegmentFactor {
  double gamma;  ///< gamma^(l)(nu_sigma)
  double s;      ///< |h|^2 / (h . G~ h)
};

/// Per-segment quantities of one anisotropy component; the element stiffness
/// of the component is G~ * gamma |sigma| s / |sigma|^2 = G~ / sqrt(h . G~ h).
SegmentFactor aniso_segment_factor(const Vec2& q1, const Vec2& q2, const AnisotropyComponent& component);

/// Kinetic mobility beta: either a positive constant or sqrt(p . B p).
class Mobility {
 public:
  static Mobility constant(double value = 1.0);
  static Mobility quadratic(const Mat2& B);

  double eval(const Vec2& p) const;
  bool is_constant() const { return constant_; }
  double value() const { return value_; }
  const Mat2& matrix() const { return B_; }

 private:
  bool constant_ = true;
  double value_ = 1.0;
  Mat2 B_ = Mat2::Identity();
};

}  // namespace msflow
