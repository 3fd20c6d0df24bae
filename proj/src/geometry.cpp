#include "gbplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gbplan {

namespace {

constexpr double kDomainTol = 1e-9;
constexpr double kRootTol = 1e-10;

// Index of the sample interval containing s, clamped to a valid interval.
std::size_t interval_index(const std::vector<double>& arcs, double s) {
  auto it = std::upper_bound(arcs.begin(), arcs.end(), s);
  std::size_t hi = static_cast<std::size_t>(it - arcs.begin());
  if (hi == 0) return 0;
  if (hi >= arcs.size()) return arcs.size() - 2;
  return hi - 1;
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

}  // namespace

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

Vec2 LanePath::point_at(double s) const {
  std::size_t i = interval_index(arc_lengths, s);
  double seg = arc_lengths[i + 1] - arc_lengths[i];
  double t = seg > 0.0 ? (s - arc_lengths[i]) / seg : 0.0;
  return {lerp(points[i].x, points[i + 1].x, t), lerp(points[i].y, points[i + 1].y, t)};
}

double LanePath::heading_at(double s) const {
  std::size_t i = interval_index(arc_lengths, s);
  double seg = arc_lengths[i + 1] - arc_lengths[i];
  double t = seg > 0.0 ? (s - arc_lengths[i]) / seg : 0.0;
  return wrap_angle(lerp(headings[i], headings[i + 1], t));
}

double LanePath::curvature_at(double s) const {
  std::size_t i = interval_index(arc_lengths, s);
  double seg = arc_lengths[i + 1] - arc_lengths[i];
  double t = seg > 0.0 ? (s - arc_lengths[i]) / seg : 0.0;
  return lerp(curvatures[i], curvatures[i + 1], t);
}

LanePath build_lane_path(const std::string& id, const std::vector<Vec2>& waypoints,
                         double resample_step) {
  if (waypoints.size() < 2) {
    throw InvalidInput("build_lane_path: need at least 2 waypoints, got " +
                       std::to_string(waypoints.size()));
  }
  if (resample_step <= 0.0) {
    throw InvalidInput("build_lane_path: resample_step must be positive");
  }

  // Cumulative arc length of the raw polyline.
  std::vector<double> raw_arcs(waypoints.size(), 0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    double seg = (waypoints[i] - waypoints[i - 1]).norm();
    if (seg < 1e-9) {
      throw InvalidInput("build_lane_path: coincident waypoints at index " + std::to_string(i));
    }
    raw_arcs[i] = raw_arcs[i - 1] + seg;
  }
  double total = raw_arcs.back();

  std::size_t n_seg = static_cast<std::size_t>(std::ceil(total / resample_step - 1e-12));
  n_seg = std::max<std::size_t>(n_seg, 1);
  double h = total / static_cast<double>(n_seg);

  LanePath lane;
  lane.id = id;
  lane.points.reserve(n_seg + 1);
  lane.arc_lengths.reserve(n_seg + 1);

  // Walk the raw polyline once, emitting samples at multiples of h.
  std::size_t seg = 0;
  for (std::size_t i = 0; i <= n_seg; ++i) {
    double s = std::min(static_cast<double>(i) * h, total);
    while (seg + 2 < raw_arcs.size() && raw_arcs[seg + 1] < s) ++seg;
    double span = raw_arcs[seg + 1] - raw_arcs[seg];
    double t = span > 0.0 ? (s - raw_arcs[seg]) / span : 0.0;
    lane.points.push_back({lerp(waypoints[seg].x, waypoints[seg + 1].x, t),
                           lerp(waypoints[seg].y, waypoints[seg + 1].y, t)});
    lane.arc_lengths.push_back(s);
  }

  // Headings: central differences, one-sided at the ends, unwrapped so that
  // interpolation never crosses a 2*pi seam.
  std::size_t n = lane.points.size();
  lane.headings.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 d;
    if (i == 0) {
      d = lane.points[1] - lane.points[0];
    } else if (i + 1 == n) {
      d = lane.points[n - 1] - lane.points[n - 2];
    } else {
      d = lane.points[i + 1] - lane.points[i - 1];
    }
    double raw = std::atan2(d.y, d.x);
    if (i == 0) {
      lane.headings[i] = raw;
    } else {
      lane.headings[i] = lane.headings[i - 1] + wrap_angle(raw - lane.headings[i - 1]);
    }
  }

  // Sanity: sample headings must stay close to chord directions.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Vec2 chord = lane.points[i + 1] - lane.points[i];
    double chord_dir = std::atan2(chord.y, chord.x);
    if (std::abs(wrap_angle(lane.headings[i] - chord_dir)) > 0.2) {
      throw InvalidInput("build_lane_path: heading deviates from chord direction by more than "
                         "0.2 rad near s=" + std::to_string(lane.arc_lengths[i]) +
                         " (polyline too kinked for the resample step)");
    }
  }

  // Curvature: heading rate over arc length.
  lane.curvatures.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i == 0 ? 0 : i - 1;
    std::size_t hi = i + 1 == n ? i : i + 1;
    double darc = lane.arc_lengths[hi] - lane.arc_lengths[lo];
    lane.curvatures[i] = darc > 0.0 ? (lane.headings[hi] - lane.headings[lo]) / darc : 0.0;
  }

  return lane;
}

CartesianPose frenet_to_cartesian(const LanePath& lane, const FrenetPose& pose) {
  double len = lane.length();
  if (pose.s < -kDomainTol || pose.s > len + kDomainTol) {
    throw OutOfDomain("frenet_to_cartesian: s=" + std::to_string(pose.s) +
                      " outside [0, " + std::to_string(len) + "]");
  }
  double s = std::clamp(pose.s, 0.0, len);
  Vec2 c = lane.point_at(s);
  double h = lane.heading_at(s);
  double kc = lane.curvature_at(s);
  if (pose.d * kc >= 0.95) {
    throw OutOfDomain("frenet_to_cartesian: curvature singularity, d*kappa_c=" +
                      std::to_string(pose.d * kc));
  }
  Vec2 nrm{-std::sin(h), std::cos(h)};
  CartesianPose out;
  out.x = c.x + pose.d * nrm.x;
  out.y = c.y + pose.d * nrm.y;
  out.theta = wrap_angle(h + pose.theta_rel);
  out.kappa = kc / (1.0 - pose.d * kc);
  return out;
}

namespace {

// Tangent-orthogonality residual g(s) = (p - c(s)) . t(s).  Positive while the
// query point is ahead of c(s); the foot point is the root.
double foot_residual(const LanePath& lane, const Vec2& p, double s) {
  Vec2 c = lane.point_at(s);
  double h = lane.heading_at(s);
  return (p - c).dot({std::cos(h), std::sin(h)});
}

}  // namespace

FrenetPose cartesian_to_frenet(const LanePath& lane, const CartesianPose& pose,
                               double corridor_half_width) {
  const Vec2 p{pose.x, pose.y};
  double len = lane.length();

  // Seed: nearest sample vertex.
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < lane.points.size(); ++i) {
    double d2 = (p - lane.points[i]).dot(p - lane.points[i]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }

  // Bracket the root of the orthogonality residual around the seed.
  double h = len / static_cast<double>(lane.points.size() - 1);
  double lo = std::max(0.0, lane.arc_lengths[best] - 2.0 * h);
  double hi = std::min(len, lane.arc_lengths[best] + 2.0 * h);
  double g_lo = foot_residual(lane, p, lo);
  double g_hi = foot_residual(lane, p, hi);
  for (int widen = 0; widen < 3 && g_lo * g_hi > 0.0 && (lo > 0.0 || hi < len); ++widen) {
    lo = std::max(0.0, lo - 4.0 * h);
    hi = std::min(len, hi + 4.0 * h);
    g_lo = foot_residual(lane, p, lo);
    g_hi = foot_residual(lane, p, hi);
  }

  double s_star;
  if (g_lo * g_hi > 0.0) {
    // No interior root: the foot point clamps to an endpoint.
    if (g_lo > 0.0) {
      // Point lies ahead of the whole bracket.
      if (hi >= len - kDomainTol) {
        throw OutOfDomain("cartesian_to_frenet: projection falls past the lane end");
      }
      s_star = hi;
    } else {
      if (lo <= kDomainTol) {
        throw OutOfDomain("cartesian_to_frenet: projection falls before the lane start");
      }
      s_star = lo;
    }
  } else {
    // Bisection: g is continuous and changes sign on [lo, hi].
    for (int it = 0; it < 80 && hi - lo > kRootTol; ++it) {
      double mid = 0.5 * (lo + hi);
      double g_mid = foot_residual(lane, p, mid);
      if (g_lo * g_mid <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
        g_lo = g_mid;
      }
    }
    s_star = 0.5 * (lo + hi);
  }

  double tangent = lane.heading_at(s_star);
  Vec2 nrm{-std::sin(tangent), std::cos(tangent)};
  FrenetPose out;
  out.s = s_star;
  out.d = (p - lane.point_at(s_star)).dot(nrm);
  out.theta_rel = wrap_angle(pose.theta - tangent);
  if (std::abs(out.d) > corridor_half_width) {
    throw OffCorridor("cartesian_to_frenet: |d|=" + std::to_string(std::abs(out.d)) +
                      " exceeds corridor half-width " + std::to_string(corridor_half_width));
  }
  return out;
}

namespace {

// Projects both boxes onto `axis` and reports strict separation.
bool separated_on_axis(const OrientedBox& a, const OrientedBox& b, const Vec2& axis) {
  auto radius = [&axis](const OrientedBox& box) {
    Vec2 ux{std::cos(box.theta), std::sin(box.theta)};
    Vec2 uy{-ux.y, ux.x};
    return 0.5 * box.length * std::abs(ux.dot(axis)) + 0.5 * box.width * std::abs(uy.dot(axis));
  };
  double dist = std::abs((Vec2{b.x, b.y} - Vec2{a.x, a.y}).dot(axis));
  return dist > radius(a) + radius(b);
}

}  // namespace

bool boxes_intersect(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 axes[4] = {
      {std::cos(a.theta), std::sin(a.theta)},
      {-std::sin(a.theta), std::cos(a.theta)},
      {std::cos(b.theta), std::sin(b.theta)},
      {-std::sin(b.theta), std::cos(b.theta)},
  };
  for (const Vec2& axis : axes) {
    if (separated_on_axis(a, b, axis)) return false;
  }
  return true;
}

const LanePath* RoadMap::find(const std::string& id) const {
  auto it = lanes.find(id);
  return it == lanes.end() ? nullptr : &it->second;
}

const LanePath& RoadMap::at(const std::string& id) const {
  const LanePath* lane = find(id);
  if (!lane) throw InvalidInput("RoadMap: unknown lane id '" + id + "'");
  return *lane;
}

}  // namespace gbplan
