#include "sgl/groups.hpp"

#include <algorithm>
#include <string>

#include "sgl/errors.hpp"

namespace sgl {

GroupStructure build_groups(const std::vector<int>& group_sizes) {
  if (group_sizes.empty()) {
    throw_error(ErrorCode::EmptyPartition, "group partition must contain at least one group");
  }
  GroupStructure g;
  g.sizes = group_sizes;
  g.m = static_cast<int>(group_sizes.size());
  g.offsets.resize(group_sizes.size());
  int offset = 0;
  for (std::size_t k = 0; k < group_sizes.size(); ++k) {
    if (group_sizes[k] < 1) {
      throw_error(ErrorCode::InvalidSize,
                  "group " + std::to_string(k) + " has size " + std::to_string(group_sizes[k]));
    }
    g.offsets[k] = offset;
    offset += group_sizes[k];
  }
  g.d = offset;
  return g;
}

int GroupStructure::group_of(int j) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), j);
  return static_cast<int>(it - offsets.begin()) - 1;
}

ActiveSets active_sets_from(const Eigen::VectorXd& theta, const GroupStructure& groups,
                            double zero_tol) {
  if (theta.size() != groups.d) {
    throw_error(ErrorCode::DimensionMismatch,
                "theta has length " + std::to_string(theta.size()) + ", groups cover " +
                    std::to_string(groups.d));
  }
  if (zero_tol < 0.0) {
    throw_error(ErrorCode::InvalidData, "zero_tol must be non-negative");
  }
  ActiveSets sets;
  sets.d = groups.d;
  sets.m = groups.m;
  sets.per_group_active.resize(static_cast<std::size_t>(groups.m));
  for (int k = 0; k < groups.m; ++k) {
    const int off = groups.offset(k);
    auto& local = sets.per_group_active[static_cast<std::size_t>(k)];
    for (int i = 0; i < groups.size(k); ++i) {
      if (std::abs(theta[off + i]) > zero_tol) {
        local.push_back(i);
        sets.active_coords.push_back(off + i);
      }
    }
    if (!local.empty()) sets.active_groups.push_back(k);
  }
  return sets;
}

SupportComparison compare_supports(const ActiveSets& estimated, const ActiveSets& truth) {
  if (estimated.d != truth.d || estimated.m != truth.m) {
    throw_error(ErrorCode::DimensionMismatch, "active sets built over different group structures");
  }
  std::vector<char> est_active(static_cast<std::size_t>(estimated.d), 0);
  for (int j : estimated.active_coords) est_active[static_cast<std::size_t>(j)] = 1;
  std::vector<char> true_active(static_cast<std::size_t>(truth.d), 0);
  for (int j : truth.active_coords) true_active[static_cast<std::size_t>(j)] = 1;

  SupportComparison cmp;
  for (int j = 0; j < estimated.d; ++j) {
    const bool e = est_active[static_cast<std::size_t>(j)];
    const bool t = true_active[static_cast<std::size_t>(j)];
    if (!e && !t) ++cmp.correct_zeros;
    if (!e && t) ++cmp.incorrect_zeros;
  }
  cmp.exact_recovery = estimated.active_coords == truth.active_coords;
  return cmp;
}

}  // namespace sgl
