#include "raileval/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace raileval::geom {

namespace {

constexpr double kParamEps = 1e-12;   // tolerance on normalized chord parameters
constexpr double kBoundaryEps = 1e-9; // pixels

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 a) { return std::sqrt(dot(a, a)); }

Point2 lerp(Point2 a, Point2 b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

std::vector<double> cum_lengths(std::span<const Point2> pts) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
  }
  return cum;
}

/// Point at arc position `s` along the chain; `hint` is advanced so a
/// monotone caller walks the chain in linear total time.
Point2 point_at_arc(std::span<const Point2> pts, std::span<const double> cum, double s,
                    std::size_t& hint) {
  const double total = cum.back();
  if (s <= 0.0) return pts.front();
  if (s >= total) return pts.back();
  while (hint + 2 < pts.size() && cum[hint + 1] < s) ++hint;
  const double chord = cum[hint + 1] - cum[hint];
  const double t = chord > 0.0 ? (s - cum[hint]) / chord : 0.0;
  return lerp(pts[hint], pts[hint + 1], t);
}

double chord_orientation_deg(Point2 a, Point2 b) {
  double deg = std::atan2(b.y - a.y, b.x - a.x) * 180.0 / M_PI;
  deg = std::fmod(deg, 180.0);
  if (deg < 0.0) deg += 180.0;
  return deg;
}

// Works on coordinate differences only, so a common translation of all
// inputs cancels exactly.
double point_to_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const Point2 ap = p - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(ap);
  const double t = std::clamp(dot(ap, ab) / len2, 0.0, 1.0);
  const Point2 residual = ap - ab * t;
  return norm(residual);
}

bool on_segment(Point2 p, Point2 a, Point2 b, double eps = kBoundaryEps) {
  return point_to_segment(p, a, b) <= eps;
}

// Intersection parameters of chord p->q with segment a->b, expressed on
// the chord. Collinear overlaps contribute both projected endpoints.
void chord_edge_params(Point2 p, Point2 q, Point2 a, Point2 b, std::vector<double>& out) {
  const Point2 d1 = q - p;
  const Point2 d2 = b - a;
  const double denom = cross(d1, d2);
  const double scale = norm(d1) * norm(d2);
  if (std::abs(denom) > kParamEps * std::max(scale, 1.0)) {
    const double t = cross(a - p, d2) / denom;
    const double u = cross(a - p, d1) / denom;
    if (t >= -kParamEps && t <= 1.0 + kParamEps && u >= -kParamEps && u <= 1.0 + kParamEps) {
      out.push_back(std::clamp(t, 0.0, 1.0));
    }
    return;
  }
  // Parallel. Collinear overlap projects the edge endpoints onto the chord.
  const double len2 = dot(d1, d1);
  if (len2 <= 0.0) return;
  if (point_to_segment(a, p, q) > kBoundaryEps && point_to_segment(b, p, q) > kBoundaryEps &&
      point_to_segment(p, a, b) > kBoundaryEps) {
    return;
  }
  const double ta = dot(a - p, d1) / len2;
  const double tb = dot(b - p, d1) / len2;
  if (std::max(ta, tb) < -kParamEps || std::min(ta, tb) > 1.0 + kParamEps) return;
  out.push_back(std::clamp(ta, 0.0, 1.0));
  out.push_back(std::clamp(tb, 0.0, 1.0));
}

bool ray_cast_inside(Point2 p, const Polygon& poly) {
  bool inside = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double xint = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

bool on_polygon_boundary(Point2 p, const Polygon& poly) {
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (on_segment(p, v[j], v[i])) return true;
  }
  return false;
}

namespace bgm = boost::geometry;
using BPoint = bgm::model::d2::point_xy<double>;
using BPoly = bgm::model::polygon<BPoint>;
using BMulti = bgm::model::multi_polygon<BPoly>;

BPoly to_boost(const Polygon& poly) {
  BPoly out;
  for (const auto& p : poly.vertices) bgm::append(out.outer(), BPoint(p.x, p.y));
  if (!poly.vertices.empty()) {
    bgm::append(out.outer(), BPoint(poly.vertices.front().x, poly.vertices.front().y));
  }
  bgm::correct(out);
  return out;
}

BMulti merged_union(std::span<const Polygon> polys) {
  BMulti acc;
  for (const auto& poly : polys) {
    BMulti next;
    bgm::union_(acc, to_boost(poly), next);
    acc = std::move(next);
  }
  return acc;
}

double iou_from_areas(double area_a, double area_b, double inter) {
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool lex_less(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x) return a[i].x < b[i].x;
    if (a[i].y != b[i].y) return a[i].y < b[i].y;
  }
  return false;
}

} // namespace

double distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double Polyline::arc_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

std::vector<Point2> dedup_points(std::span<const Point2> pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  return out;
}

std::vector<LineSegmentUnit> split_polyline(const Polyline& line, double seg_len,
                                            double merge_ratio) {
  if (!(seg_len > 0.0)) throw std::invalid_argument("split_polyline: seg_len must be > 0");
  const std::vector<Point2> pts = dedup_points(line.points);
  if (pts.size() < 2) throw std::invalid_argument("split_polyline: polyline needs >= 2 distinct points");

  // The walk runs relative to the first vertex: coordinate differences
  // cancel a common offset exactly, so segment lengths and orientations
  // are translation-invariant to the bit.
  const Point2 origin = pts.front();
  std::vector<Point2> rel(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) rel[i] = pts[i] - origin;

  const std::vector<double> cum = cum_lengths(rel);
  const double total = cum.back();
  if (!(total > 0.0)) throw std::invalid_argument("split_polyline: zero-length polyline");

  int count = static_cast<int>(std::ceil(total / seg_len - 1e-9));
  count = std::max(count, 1);
  if (count >= 2) {
    const double last_len = total - (count - 1) * seg_len;
    if (last_len < merge_ratio * seg_len) --count; // absorb the residual
  }

  std::vector<LineSegmentUnit> segments;
  segments.reserve(static_cast<std::size_t>(count));
  const double score = line.score.value_or(1.0);
  std::size_t hint = 0;
  std::size_t vert = 1; // next original vertex candidate
  for (int k = 0; k < count; ++k) {
    const double s0 = k * seg_len;
    const double s1 = (k + 1 == count) ? total : (k + 1) * seg_len;

    std::vector<Point2> chain;
    chain.push_back(point_at_arc(rel, cum, s0, hint));
    std::size_t chint = hint; // midpoint lies ahead of s0's chord
    const Point2 center = point_at_arc(rel, cum, (s0 + s1) * 0.5, chint);
    while (vert + 1 < pts.size() && cum[vert] < s1) {
      if (cum[vert] > s0 && !(rel[vert] == chain.back())) chain.push_back(rel[vert]);
      ++vert;
    }
    const Point2 endp = point_at_arc(rel, cum, s1, hint);
    if (!(endp == chain.back())) chain.push_back(endp);
    if (chain.size() < 2) chain.push_back(chain.front());

    LineSegmentUnit seg;
    seg.length = s1 - s0;
    seg.score = score;
    if (distance(chain.front(), chain.back()) > kBoundaryEps) {
      seg.orientation_deg = chord_orientation_deg(chain.front(), chain.back());
    } else {
      seg.orientation_deg = chord_orientation_deg(chain.front(), chain[1]);
    }
    seg.center = center + origin;
    seg.chain.reserve(chain.size());
    for (const auto& p : chain) seg.chain.push_back(p + origin);
    segments.push_back(std::move(seg));
  }
  return segments;
}

double point_to_chain_distance(Point2 p, std::span<const Point2> chain) {
  if (chain.empty()) throw std::invalid_argument("point_to_chain_distance: empty chain");
  if (chain.size() == 1) return distance(p, chain.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    best = std::min(best, point_to_segment(p, chain[i - 1], chain[i]));
  }
  return best;
}

double orientation_diff_deg(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 180.0 - d);
}

std::vector<Point2> resample_uniform(const Polyline& line, int n) {
  if (n < 2) throw std::invalid_argument("resample_uniform: n must be >= 2");
  const std::vector<Point2> pts = dedup_points(line.points);
  if (pts.size() < 2) throw std::invalid_argument("resample_uniform: polyline needs >= 2 distinct points");
  const std::vector<double> cum = cum_lengths(pts);
  const double total = cum.back();

  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  std::size_t hint = 0;
  out.push_back(pts.front());
  for (int i = 1; i + 1 < n; ++i) {
    out.push_back(point_at_arc(pts, cum, total * i / (n - 1), hint));
  }
  out.push_back(pts.back());
  return out;
}

std::vector<Polyline> clip_polyline_outside(const Polyline& line,
                                            std::span<const Polygon> regions) {
  const std::vector<Point2> pts = dedup_points(line.points);
  if (pts.size() < 2) throw std::invalid_argument("clip_polyline_outside: polyline needs >= 2 distinct points");
  if (regions.empty()) return {Polyline{pts, line.score}};

  std::vector<Polyline> out;
  Polyline current;
  current.score = line.score;

  auto flush = [&] {
    if (current.points.size() >= 2 && current.arc_length() > 0.0) out.push_back(current);
    current.points.clear();
  };
  auto covered = [&](Point2 p) {
    for (const auto& region : regions) {
      if (point_in_polygon(p, region)) return true;
    }
    return false;
  };

  std::vector<double> ts;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Point2 p = pts[i - 1];
    const Point2 q = pts[i];
    ts.clear();
    ts.push_back(0.0);
    ts.push_back(1.0);
    for (const auto& region : regions) {
      const auto& v = region.vertices;
      for (std::size_t e = 0, f = v.size() - 1; e < v.size(); f = e++) {
        chord_edge_params(p, q, v[f], v[e], ts);
      }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double a, double b) { return b - a <= kParamEps; }),
             ts.end());

    for (std::size_t k = 1; k < ts.size(); ++k) {
      const double t0 = ts[k - 1];
      const double t1 = ts[k];
      if (t1 - t0 <= kParamEps) continue;
      const Point2 mid = lerp(p, q, (t0 + t1) * 0.5);
      if (covered(mid)) {
        flush();
        continue;
      }
      const Point2 a = lerp(p, q, t0);
      const Point2 b = lerp(p, q, t1);
      if (current.points.empty()) {
        current.points.push_back(a);
      } else if (!(current.points.back() == a)) {
        flush();
        current.points.push_back(a);
      }
      current.points.push_back(b);
    }
  }
  flush();
  return out;
}

Polygon buffer_polyline(const Polyline& line, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("buffer_polyline: half_width must be > 0");
  const std::vector<Point2> pts = dedup_points(line.points);
  if (pts.size() < 2) throw std::invalid_argument("buffer_polyline: polyline needs >= 2 distinct points");

  const std::size_t chords = pts.size() - 1;
  std::vector<Point2> normals(chords);
  for (std::size_t i = 0; i < chords; ++i) {
    const Point2 d = pts[i + 1] - pts[i];
    const double len = norm(d);
    normals[i] = {-d.y / len, d.x / len};
  }

  auto side = [&](double sign) {
    std::vector<Point2> out;
    out.push_back(pts.front() + normals.front() * (sign * half_width));
    for (std::size_t i = 1; i < chords; ++i) {
      const Point2 na = normals[i - 1] * sign;
      const Point2 nb = normals[i] * sign;
      const Point2 m = na + nb;
      const double mlen = norm(m);
      bool bevel = mlen <= 1e-12;
      if (!bevel) {
        const Point2 mu = m * (1.0 / mlen);
        const double cos_half = dot(mu, nb);
        // miter length half_width / cos_half; bevel past 2x half_width
        if (cos_half <= 0.5) {
          bevel = true;
        } else {
          out.push_back(pts[i] + mu * (half_width / cos_half));
        }
      }
      if (bevel) {
        out.push_back(pts[i] + na * half_width);
        out.push_back(pts[i] + nb * half_width);
      }
    }
    out.push_back(pts.back() + normals.back() * (sign * half_width));
    return out;
  };

  Polygon poly;
  poly.vertices = side(1.0);
  std::vector<Point2> right = side(-1.0);
  poly.vertices.insert(poly.vertices.end(), right.rbegin(), right.rend());
  poly.vertices = dedup_points(poly.vertices);
  return poly;
}

double polygon_area(const Polygon& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    twice += cross(v[j], v[i]);
  }
  return std::abs(twice) * 0.5;
}

bool polygon_is_simple(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) return false; // degenerate edge
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 c = v[j];
      const Point2 d = v[(j + 1) % n];
      const bool share_bc = (i + 1) % n == j;
      const bool share_ad = (j + 1) % n == i;
      if (share_bc && share_ad) continue; // n == 2 handled above
      if (share_bc) {
        // consecutive edges: a fold-back overlap is the only violation
        if (on_segment(d, a, b) || on_segment(a, c, d)) return false;
        continue;
      }
      if (share_ad) {
        if (on_segment(c, a, b) || on_segment(b, c, d)) return false;
        continue;
      }
      std::vector<double> ts;
      chord_edge_params(a, b, c, d, ts);
      if (!ts.empty()) return false;
    }
  }
  return true;
}

bool point_in_polygon(Point2 p, const Polygon& poly) {
  if (poly.vertices.size() < 3) return false;
  if (on_polygon_boundary(p, poly)) return true;
  return ray_cast_inside(p, poly);
}

bool point_strictly_in_polygon(Point2 p, const Polygon& poly) {
  if (poly.vertices.size() < 3) return false;
  if (on_polygon_boundary(p, poly)) return false;
  return ray_cast_inside(p, poly);
}

double polygon_iou(const Polygon& a, const Polygon& b) {
  if (a.vertices == b.vertices) {
    return polygon_area(a) > 0.0 ? 1.0 : 0.0;
  }
  // canonical argument order keeps the result bitwise symmetric
  if (lex_less(b.vertices, a.vertices)) return polygon_iou(b, a);
  const BPoly pa = to_boost(a);
  const BPoly pb = to_boost(b);
  const double area_a = bgm::area(pa);
  const double area_b = bgm::area(pb);
  BMulti inter;
  bgm::intersection(pa, pb, inter);
  return iou_from_areas(area_a, area_b, bgm::area(inter));
}

double multi_polygon_iou(std::span<const Polygon> a, std::span<const Polygon> b) {
  if (a.size() == 1 && b.size() == 1) return polygon_iou(a[0], b[0]);
  const BMulti ma = merged_union(a);
  const BMulti mb = merged_union(b);
  BMulti inter;
  bgm::intersection(ma, mb, inter);
  return iou_from_areas(bgm::area(ma), bgm::area(mb), bgm::area(inter));
}

double box_iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double box_intersection_over_first(const Box& a, const Box& b) {
  if (a.area() <= 0.0) return 0.0;
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  return ix * iy / a.area();
}

} // namespace raileval::geom
