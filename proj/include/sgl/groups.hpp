#pragma once

#include <Eigen/Core>
#include <vector>

namespace sgl {

/// Contiguous disjoint partition of the coefficient indices 0..d-1 into m
/// groups. Group k covers [offsets[k], offsets[k] + sizes[k]).
struct GroupStructure {
  std::vector<int> sizes;
  std::vector<int> offsets;
  int d = 0;
  int m = 0;

  int offset(int k) const { return offsets[static_cast<std::size_t>(k)]; }
  int size(int k) const { return sizes[static_cast<std::size_t>(k)]; }

  /// Group index owning coefficient j.
  int group_of(int j) const;

  bool operator==(const GroupStructure& other) const {
    return sizes == other.sizes;
  }
};

/// Validate group sizes and derive offsets, d and m.
GroupStructure build_groups(const std::vector<int>& group_sizes);

/// Support bookkeeping: which groups and which coordinates are non-zero.
/// per_group_active[k] holds within-group (local) indices.
struct ActiveSets {
  std::vector<int> active_groups;
  std::vector<int> active_coords;
  std::vector<std::vector<int>> per_group_active;
  int d = 0;
  int m = 0;

  bool group_active(int k) const { return !per_group_active[static_cast<std::size_t>(k)].empty(); }
  int n_active() const { return static_cast<int>(active_coords.size()); }
};

/// Coordinate j is active iff |theta_j| > zero_tol. Solver output carries
/// exact zeros, so the default tolerance is 0; a positive tolerance is only
/// needed for externally produced estimates.
ActiveSets active_sets_from(const Eigen::VectorXd& theta, const GroupStructure& groups,
                            double zero_tol = 0.0);

/// Zero/non-zero confusion counts between an estimate and the truth.
struct SupportComparison {
  int correct_zeros = 0;    // C: true zeros estimated as zero
  int incorrect_zeros = 0;  // IC: true non-zeros estimated as zero
  bool exact_recovery = false;
};

SupportComparison compare_supports(const ActiveSets& estimated, const ActiveSets& truth);

}  // namespace sgl
