#include "boxlift/ground.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

constexpr double kDegenerateNormal = 1e-12;  // squared norm below which a sample is collinear

struct PlaneCandidate {
  Vec3 normal;
  double offset = 0.0;
  int inliers = 0;
};

int count_inliers(const PointCloud& cloud, const Vec3& n, double offset, double threshold) {
  int count = 0;
  for (const Vec3& p : cloud.points) {
    if (std::abs(dot(n, p) + offset) <= threshold) {
      ++count;
    }
  }
  return count;
}

// Least-squares plane through the inliers: centroid plus the covariance
// eigenvector of the smallest eigenvalue.
GroundPlane refit(const PointCloud& cloud, const Vec3& n, double offset, double threshold) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> inliers;
  for (const Vec3& p : cloud.points) {
    if (std::abs(dot(n, p) + offset) <= threshold) {
      inliers.emplace_back(p.x, p.y, p.z);
      centroid += inliers.back();
    }
  }
  centroid /= static_cast<double>(inliers.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Eigen::Vector3d& q : inliers) {
    const Eigen::Vector3d d = q - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Vector3d best = solver.eigenvectors().col(0);  // eigenvalues ascending
  best.normalize();
  GroundPlane out;
  out.normal = {best.x(), best.y(), best.z()};
  out.offset = -(best.x() * centroid.x() + best.y() * centroid.y() + best.z() * centroid.z());
  return out;
}

}  // namespace

GroundPlane fit_ground_plane(const PointCloud& cloud, const RansacConfig& cfg) {
  const std::size_t n = cloud.size();
  if (n < 3) {
    fail(ErrorCode::kInsufficientPoints, "fit_ground_plane: need at least 3 points");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  PlaneCandidate best;
  best.inliers = -1;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const std::size_t ia = pick(rng);
    const std::size_t ib = pick(rng);
    const std::size_t ic = pick(rng);
    if (ia == ib || ib == ic || ia == ic) {
      continue;
    }
    const Vec3& a = cloud.points[ia];
    const Vec3 normal = cross(cloud.points[ib] - a, cloud.points[ic] - a);
    const double len2 = squared_norm(normal);
    if (len2 < kDegenerateNormal) {
      continue;
    }
    const double inv = 1.0 / std::sqrt(len2);
    const Vec3 unit = inv * normal;
    const double offset = -dot(unit, a);
    const int inliers = count_inliers(cloud, unit, offset, cfg.inlier_threshold);
    if (inliers > best.inliers) {
      best = {unit, offset, inliers};
    }
  }
  if (best.inliers < 0) {
    fail(ErrorCode::kNoHorizontalPlane, "fit_ground_plane: no valid plane sample");
  }

  GroundPlane plane = refit(cloud, best.normal, best.offset, cfg.inlier_threshold);
  if (plane.normal.z < 0.0) {
    plane.normal = -1.0 * plane.normal;
    plane.offset = -plane.offset;
  }
  const double tilt =
      std::acos(std::clamp(plane.normal.z, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  if (tilt > cfg.max_tilt_deg) {
    fail(ErrorCode::kNoHorizontalPlane, "fit_ground_plane: dominant plane tilted " +
                                            std::to_string(tilt) + " deg from vertical normal");
  }
  return plane;
}

std::vector<std::int32_t> remove_ground(const PointCloud& cloud, const GroundPlane& plane,
                                        double margin) {
  std::vector<std::int32_t> kept;
  kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (signed_height(plane, cloud.points[i]) > margin) {
      kept.push_back(static_cast<std::int32_t>(i));
    }
  }
  return kept;
}

}  // namespace boxlift
