#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gbplan/errors.hpp"

namespace gbplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Pose relative to a lane centerline.  theta_rel is the heading error with
/// respect to the local tangent.
struct FrenetPose {
  double s = 0.0;
  double d = 0.0;
  double theta_rel = 0.0;
};

struct CartesianPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // normalized to (-pi, pi]
  double kappa = 0.0;
};

/// Piecewise-linear centerline resampled to near-uniform spacing, with
/// per-sample heading and curvature tables.  arc_lengths is the path
/// parameter; all Frenet queries interpolate linearly between samples.
struct LanePath {
  std::string id;
  std::vector<Vec2> points;
  std::vector<double> headings;     // unwrapped (continuous) along the path
  std::vector<double> curvatures;   // 1/m
  std::vector<double> arc_lengths;  // starts at 0, strictly increasing
  std::optional<std::string> left_neighbor;
  std::optional<std::string> right_neighbor;
  double speed_limit = 13.9;

  double length() const { return arc_lengths.empty() ? 0.0 : arc_lengths.back(); }

  /// Interpolated centerline point at parameter s (clamped queries throw).
  Vec2 point_at(double s) const;
  /// Interpolated tangent heading at s, normalized.
  double heading_at(double s) const;
  /// Interpolated signed curvature at s.
  double curvature_at(double s) const;
};

/// Builds a LanePath from raw waypoints: resamples at spacing <= resample_step,
/// derives headings by central differences and curvature as the heading rate
/// over arc length (one-sided at the ends).
///
/// Throws InvalidInput for fewer than 2 waypoints, coincident consecutive
/// waypoints, or a polyline kinked so hard that sample headings disagree with
/// chord directions by more than 0.2 rad.
LanePath build_lane_path(const std::string& id, const std::vector<Vec2>& waypoints,
                         double resample_step = 1.0);

/// Frenet -> Cartesian.  Curvature maps through kappa_c / (1 - d * kappa_c);
/// the transform is rejected as singular once d * kappa_c >= 0.95.
/// Throws OutOfDomain when s is outside [0, length] (1e-9 tolerance) or at the
/// curvature singularity.
CartesianPose frenet_to_cartesian(const LanePath& lane, const FrenetPose& pose);

/// Cartesian -> Frenet.  The foot point is seeded at the nearest sample vertex
/// and refined on the arc parameter until the tangent-orthogonality residual
/// is below 1e-8 m.  Throws OutOfDomain when the projection falls past an
/// endpoint with an outward-pointing offset, OffCorridor when
/// |d| > corridor_half_width.
FrenetPose cartesian_to_frenet(const LanePath& lane, const CartesianPose& pose,
                               double corridor_half_width = 10.0);

/// Axis-aligned-in-body-frame rectangle footprint at a pose.
struct OrientedBox {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double length = 4.5;  // extent along theta
  double width = 2.0;
};

/// Separating-axis overlap test for two oriented rectangles.  Touching
/// boundaries count as intersecting.
bool boxes_intersect(const OrientedBox& a, const OrientedBox& b);

/// Lane storage keyed by id.  Neighbor references are validated by the
/// scenario loader, not here.
struct RoadMap {
  std::map<std::string, LanePath> lanes;

  bool has(const std::string& id) const { return lanes.count(id) > 0; }
  const LanePath* find(const std::string& id) const;
  /// Throws InvalidInput when the id is unknown.
  const LanePath& at(const std::string& id) const;
};

}  // namespace gbplan
