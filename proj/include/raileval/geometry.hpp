// 2-D geometric primitives over image pixel coordinates: polyline
// partitioning, distances, orientations, resampling, polygon operations
// and ignore-region clipping. All functions are pure.
#pragma once

#include <optional>
#include <span>
#include <vector>

namespace raileval::geom {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }

double distance(Point2 a, Point2 b);

/// Ordered point chain in pixel coordinates. Predictions carry a
/// confidence score in [0,1]; ground truth lines leave it unset.
struct Polyline {
  std::vector<Point2> points;
  std::optional<double> score;

  double arc_length() const;
};

/// Fixed-length sub-segment of a polyline; the atomic matching unit of
/// LineAP. `chain` is the exact sub-chain covered by this segment, so
/// distance queries account for curvature inside the segment.
struct LineSegmentUnit {
  std::vector<Point2> chain;
  Point2 center;                // arc-length midpoint of the chain
  double orientation_deg = 0.0; // chord angle start->end, in [0,180)
  double length = 0.0;          // arc length of the chain
  double score = 1.0;           // inherited from the parent line
  int parent_id = -1;           // index of the source polyline

  Point2 start() const { return chain.front(); }
  Point2 end() const { return chain.back(); }
};

/// Simple polygon, implicitly closed. Used for ignore regions and for
/// CULane-style line dilation.
struct Polygon {
  std::vector<Point2> vertices;
};

struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
};

/// Partitions a polyline into consecutive segments of arc length
/// `seg_len` (the last one may be shorter). A trailing residual shorter
/// than `merge_ratio * seg_len` is merged into the previous segment so
/// no unit ends up with an ill-defined orientation.
std::vector<LineSegmentUnit> split_polyline(const Polyline& line, double seg_len,
                                            double merge_ratio = 0.25);

/// Euclidean distance from `p` to the nearest point of the chord chain.
double point_to_chain_distance(Point2 p, std::span<const Point2> chain);

/// Minimal undirected angular difference, result in [0,90].
/// Inputs are orientations modulo 180 degrees.
double orientation_diff_deg(double a, double b);

/// `n` points at equal arc-length spacing; first and last coincide with
/// the polyline endpoints. Requires n >= 2.
std::vector<Point2> resample_uniform(const Polyline& line, int n);

/// Maximal sub-polylines of `line` lying outside all `regions`. Chords
/// crossing a region boundary are split at the intersection point; each
/// output inherits the input score. Pieces with fewer than two points or
/// zero length are dropped.
std::vector<Polyline> clip_polyline_outside(const Polyline& line,
                                            std::span<const Polygon> regions);

/// Dilates a polyline into a simple polygon of the given half width.
/// Flat caps; miter joins with a bevel fallback once the miter length
/// exceeds twice the half width.
Polygon buffer_polyline(const Polyline& line, double half_width);

/// area(a n b) / area(a u b) via polygon clipping; 0 for degenerate input.
double polygon_iou(const Polygon& a, const Polygon& b);

/// IoU of two unions of polygons (overlapping members are merged first).
double multi_polygon_iou(std::span<const Polygon> a, std::span<const Polygon> b);

/// Standard axis-aligned IoU; 0 when both boxes have zero area.
double box_iou(const Box& a, const Box& b);

/// Intersection area of `a` and `b` divided by the area of `a`.
double box_intersection_over_first(const Box& a, const Box& b);

double polygon_area(const Polygon& poly); // absolute shoelace area
bool polygon_is_simple(const Polygon& poly);

/// True if `p` is inside the polygon or on its boundary.
bool point_in_polygon(Point2 p, const Polygon& poly);
bool point_strictly_in_polygon(Point2 p, const Polygon& poly);

/// Removes consecutive duplicate points (exact coordinate equality).
std::vector<Point2> dedup_points(std::span<const Point2> pts);

} // namespace raileval::geom
