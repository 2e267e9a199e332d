#pragma once

#include <Eigen/Dense>

namespace rlab {

inline constexpr int kDefaultGridN = 128;

/// Cell-centred polar grid on (0, pi): theta_i = (i + 1/2) pi / N, poles excluded.
class ThetaGrid {
 public:
  explicit ThetaGrid(int node_count);

  int size() const noexcept { return node_count_; }
  double spacing() const noexcept { return spacing_; }
  double node(int i) const noexcept { return (i + 0.5) * spacing_; }
  /// Face i sits between nodes i-1 and i; faces 0 and N are the poles.
  double face(int i) const noexcept { return i * spacing_; }
  /// Unit-sphere area element 2 pi sin(theta_i) h.
  double base_weight(int i) const;

  Eigen::VectorXd nodes() const;
  Eigen::VectorXd base_weights() const;

  friend bool operator==(const ThetaGrid&, const ThetaGrid&) = default;

 private:
  int node_count_;
  double spacing_;
};

enum class GridKind { kPolar, kPeriodic };

/// Node values of a function on a grid. Carries the grid shape so mismatches are caught.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridKind kind, Eigen::VectorXd values);

  GridKind kind() const noexcept { return kind_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator[](int i) const { return values_[i]; }

 private:
  GridKind kind_ = GridKind::kPolar;
  Eigen::VectorXd values_;
};

}  // namespace rlab
