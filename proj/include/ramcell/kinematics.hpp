#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramcell/geometry.hpp"

namespace ramcell::kinematics {

using geom::Pose;

using JointConfig = std::array<double, 6>;  ///< rad
using Jacobian = Eigen::Matrix<double, 6, 6>;

struct DHRow {
  double a = 0.0;      ///< mm
  double d = 0.0;      ///< mm
  double alpha = 0.0;  ///< rad
};

/// Standard (distal) Denavit-Hartenberg table for a six-joint arm with the
/// UR wrist layout: joints 2-4 parallel, wrist axes 4/5/6 intersecting pairwise.
struct DHParams {
  std::array<DHRow, 6> rows;

  /// Manufacturer-published UR5e constants.
  static DHParams ur5e();
};

struct JointLimits {
  std::array<double, 6> lower{};
  std::array<double, 6> upper{};

  /// +-2 pi on every joint.
  static JointLimits ur_default();
  bool contains(const JointConfig& q) const;
};

/// Flange pose in the base frame.
Pose fk_flange(const JointConfig& q, const DHParams& dh);
/// TCP pose in the base frame: flange composed with the tool offset.
Pose fk(const JointConfig& q, const DHParams& dh, const Pose& tcp_offset);

/// Shoulder (L/R), elbow (U/D), wrist (N/F).
struct BranchTag {
  char shoulder = 'L';
  char elbow = 'U';
  char wrist = 'N';

  std::string str() const { return {shoulder, elbow, wrist}; }
  auto operator<=>(const BranchTag&) const = default;
};

struct IKSolution {
  JointConfig q{};
  BranchTag tag;
  /// Wrist singularity: q4 and q6 are coupled and only their sum is determined.
  bool free_parameter = false;
};

struct IKSolutionSet {
  std::vector<IKSolution> solutions;

  bool empty() const { return solutions.empty(); }
  std::size_t size() const { return solutions.size(); }
};

/// All analytic branches reaching the target TCP pose, refined to machine
/// precision. Joint values come back in (-pi, pi]. Empty when unreachable.
IKSolutionSet ik(const Pose& target, const DHParams& dh, const Pose& tcp_offset);

class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint-space distance max_i |a_i - b_i|.
double max_joint_distance(const JointConfig& a, const JointConfig& b);

/// The branch nearest to prev (max-norm), each joint shifted by multiples of
/// 2 pi toward prev while staying within limits. Ties go to the
/// lexicographically smaller tag. Throws UnreachableError on an empty set.
IKSolution select_branch(const IKSolutionSet& sols, const JointConfig& prev,
                         const JointLimits& limits = JointLimits::ur_default());

/// Geometric Jacobian at the flange: rows 0-2 linear (mm/rad), rows 3-5 angular.
Jacobian jacobian(const JointConfig& q, const DHParams& dh);
/// sqrt(det(J J^T)) = |det J|. Independent of the reference point, so flange and TCP agree.
double manipulability(const JointConfig& q, const DHParams& dh);
bool is_singular(const JointConfig& q, const DHParams& dh, double eps);

/// Upper bound on the distance from base origin to flange.
double max_reach(const DHParams& dh);

}  // namespace ramcell::kinematics
