#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "sgl/groups.hpp"
#include "sgl/loss.hpp"
#include "sgl/penalty.hpp"

namespace testutil {

/// Brute-force minimum of the d = 3 squared-loss SGL objective over the
/// lattice {-2, -2 + step, ..., 2}^3. The two outer coordinates are swept
/// exhaustively; along the innermost coordinate the objective is strictly
/// convex (hence strictly unimodal on the lattice), so a ternary search over
/// lattice indices finds that slice's exact grid minimum without visiting
/// all points.
class GridOracle3 {
 public:
  GridOracle3(const sgl::Dataset& data, const sgl::GroupStructure& groups,
              const sgl::PenaltySpec& spec)
      : groups_(groups), spec_(spec), T_(data.T()) {
    Q_ = data.design.transpose() * data.design / T_;
    b_ = data.design.transpose() * data.response / T_;
    c0_ = data.response.squaredNorm() / (2.0 * T_);
  }

  double objective(const Eigen::Vector3d& th) const {
    double value = 0.5 * th.dot(Q_ * th) - b_.dot(th) + c0_;
    for (int k = 0; k < groups_.m; ++k) {
      const auto block = th.segment(groups_.offset(k), groups_.size(k));
      double l1 = 0.0;
      for (int i = 0; i < block.size(); ++i)
        l1 += spec_.alpha_weights(groups_.offset(k) + i) * std::abs(block(i));
      value += spec_.lambda / T_ * l1 + spec_.gamma / T_ * spec_.xi_weights(k) * block.norm();
    }
    return value;
  }

  double grid_minimum(double lo = -2.0, double hi = 2.0, double step = 0.001) const {
    const int n = static_cast<int>(std::llround((hi - lo) / step));
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d th;
    for (int i2 = 0; i2 <= n; ++i2) {
      th(1) = lo + i2 * step;
      for (int i3 = 0; i3 <= n; ++i3) {
        th(2) = lo + i3 * step;
        best = std::min(best, slice_min(th, lo, step, n));
      }
    }
    return best;
  }

 private:
  double slice_min(Eigen::Vector3d th, double lo, double step, int n) const {
    const auto at = [&](int i) {
      th(0) = lo + i * step;
      return objective(th);
    };
    int a = 0, b = n;
    while (b - a > 2) {
      const int m1 = a + (b - a) / 3;
      const int m2 = b - (b - a) / 3;
      if (at(m1) <= at(m2))
        b = m2;
      else
        a = m1;
    }
    double best = at(a);
    for (int i = a + 1; i <= b; ++i) best = std::min(best, at(i));
    return best;
  }

  sgl::GroupStructure groups_;
  sgl::PenaltySpec spec_;
  double T_;
  Eigen::MatrixXd Q_;
  Eigen::VectorXd b_;
  double c0_ = 0.0;
};

}  // namespace testutil
