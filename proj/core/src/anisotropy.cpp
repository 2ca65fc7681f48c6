#include "msflow/anisotropy.hpp"

#include <cmath>
#include <numbers>

namespace msflow {

namespace {

bool is_spd(const Mat2& G) {
  if (!G.allFinite() || std::abs(G(0, 1) - G(1, 0)) > 1e-12 * (1.0 + G.cwiseAbs().maxCoeff())) {
    return false;
  }
  return G(0, 0) > 0.0 && G.determinant() > 0.0;
}

}  // namespace

Mat2 gtilde(const Mat2& G) {
  if (!is_spd(G)) {
    throw Error("gtilde: matrix is not symmetric positive definite");
  }
  // det(G) G^{-1} is the adjugate in 2D.
  Mat2 adj;
  adj << G(1, 1), -G(0, 1), -G(1, 0), G(0, 0);
  return adj;
}

Mat2 rotation(double theta) {
  Mat2 R;
  R << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return R;
}

AnisotropyComponent::AnisotropyComponent(const Mat2& G) : G_(0.5 * (G + G.transpose())), G_tilde_(gtilde(G)) {}

double AnisotropyComponent::eval(const Vec2& p) const { return std::sqrt(p.dot(G_ * p)); }

Anisotropy::Anisotropy(std::vector<AnisotropyComponent> components, double scale)
    : components_(std::move(components)), scale_(scale) {
  if (components_.empty()) {
    throw Error("anisotropy needs at least one component");
  }
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw Error("anisotropy scale must be positive");
  }
}

Anisotropy Anisotropy::isotropic(double scale) { return Anisotropy({AnisotropyComponent(Mat2::Identity())}, scale); }

Anisotropy Anisotropy::hex2d(double delta, double scale) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error("hex2d: delta must lie in (0, 1]");
  }
  const Mat2 D = Eigen::Vector2d(1.0, delta * delta).asDiagonal();
  const Mat2 R = rotation(std::numbers::pi / 3.0);
  std::vector<AnisotropyComponent> comps;
  Mat2 Rl = Mat2::Identity();
  for (int l = 1; l <= 3; ++l) {
    Rl = Rl * R;
    comps.emplace_back(Rl.transpose() * D * Rl);
  }
  return Anisotropy(std::move(comps), scale);
}

double Anisotropy::eval(const Vec2& p) const {
  double sum = 0.0;
  for (const auto& c : components_) sum += c.eval(p);
  return scale_ * sum;
}

double eval_gamma(const Anisotropy& gamma, const Vec2& p) {
  if (p.squaredNorm() == 0.0) {
    throw Error("eval_gamma: zero vector");
  }
  return gamma.eval(p);
}

Anisotropy make_hex2d(double delta) { return Anisotropy::hex2d(delta); }

SegmentFactor aniso_segment_factor(const Vec2& q1, const Vec2& q2, const AnisotropyComponent& component) {
  const Vec2 h = q2 - q1;
  const double len2 = h.squaredNorm();
  if (len2 == 0.0) {
    throw Error("zero-length segment");
  }
  const Vec2 nu = perp(h) / std::sqrt(len2);
  return {component.eval(nu), len2 / h.dot(component.G_tilde() * h)};
}

Mobility Mobility::constant(double value) {
  if (!(value > 0.0)) {
    throw Error("mobility constant must be positive");
  }
  Mobility m;
  m.constant_ = true;
  m.value_ = value;
  return m;
}

Mobility Mobility::quadratic(const Mat2& B) {
  if (!is_spd(B)) {
    throw Error("mobility matrix must be symmetric positive definite");
  }
  Mobility m;
  m.constant_ = false;
  m.B_ = 0.5 * (B + B.transpose());
  return m;
}

double Mobility::eval(const Vec2& p) const {
  if (constant_) return value_;
  return std::sqrt(p.dot(B_ * p));
}

}  // namespace msflow
