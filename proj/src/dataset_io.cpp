#include "raileval/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "raileval/mask_io.hpp"
#include "raileval/version.hpp"

namespace raileval::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kClampTolerancePx = 2.0;

/// Parse location threaded through all helpers so every rejection can
/// name file, line, frame and field.
struct Ctx {
  const std::string& file;
  int line = 0;
  std::string frame_id;
  std::vector<Warning>* warnings = nullptr;

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    throw SchemaError(file, line, frame_id, field, message);
  }
  void warn(const std::string& field, const std::string& message) const {
    warnings->push_back({frame_id, field, message});
  }
};

json parse_line(const Ctx& ctx, const std::string& text) {
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) ctx.fail("", "malformed JSON");
  if (!value.is_object()) ctx.fail("", "expected a JSON object");
  return value;
}

void check_keys(const Ctx& ctx, const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) ctx.fail(prefix.empty() ? item.key() : prefix + "." + item.key(),
                         "unknown field");
  }
}

const json& require_field(const Ctx& ctx, const json& obj, const std::string& field) {
  const auto it = obj.find(field);
  if (it == obj.end()) ctx.fail(field, "missing required field");
  return *it;
}

double get_number(const Ctx& ctx, const json& value, const std::string& field) {
  if (!value.is_number()) ctx.fail(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) ctx.fail(field, "value must be finite");
  return v;
}

std::string get_string(const Ctx& ctx, const json& value, const std::string& field) {
  if (!value.is_string()) ctx.fail(field, "expected a string");
  return value.get<std::string>();
}

bool get_bool(const Ctx& ctx, const json& value, const std::string& field) {
  if (!value.is_boolean()) ctx.fail(field, "expected a boolean");
  return value.get<bool>();
}

/// Clamps `v` into [lo, hi]; small excursions are tolerated with a
/// warning, anything beyond the tolerance is a schema error.
double clamp_coord(const Ctx& ctx, double v, double lo, double hi, const std::string& field) {
  if (v >= lo && v <= hi) return v;
  const double clamped = std::clamp(v, lo, hi);
  if (std::abs(v - clamped) > kClampTolerancePx) {
    ctx.fail(field, "coordinate " + std::to_string(v) + " outside image bounds [" +
                        std::to_string(lo) + "," + std::to_string(hi) + "]");
  }
  ctx.warn(field, "coordinate " + std::to_string(v) + " clamped to image bounds");
  return clamped;
}

geom::Point2 parse_point(const Ctx& ctx, const json& value, double width, double height,
                         const std::string& field) {
  if (!value.is_array() || value.size() != 2) ctx.fail(field, "expected an [x,y] pair");
  geom::Point2 p;
  p.x = clamp_coord(ctx, get_number(ctx, value[0], field + "[0]"), 0.0, width, field + "[0]");
  p.y = clamp_coord(ctx, get_number(ctx, value[1], field + "[1]"), 0.0, height, field + "[1]");
  return p;
}

std::vector<geom::Point2> parse_points(const Ctx& ctx, const json& obj, double width,
                                       double height, const std::string& field) {
  const json& arr = require_field(ctx, obj, "points");
  if (!arr.is_array()) ctx.fail(field + ".points", "expected an array of points");
  std::vector<geom::Point2> pts;
  pts.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    pts.push_back(parse_point(ctx, arr[i], width, height,
                              field + ".points[" + std::to_string(i) + "]"));
  }
  return pts;
}

geom::Polyline parse_polyline(const Ctx& ctx, const json& obj, double width, double height,
                              bool expect_score, const std::string& field) {
  check_keys(ctx, obj, field, {"points", "score"});
  geom::Polyline line;
  line.points = geom::dedup_points(parse_points(ctx, obj, width, height, field));
  if (line.points.size() < 2) ctx.fail(field + ".points", "polyline requires >= 2 points");
  if (!(line.arc_length() > 0.0)) ctx.fail(field + ".points", "polyline has zero length");
  if (const auto it = obj.find("score"); it != obj.end()) {
    const double s = get_number(ctx, *it, field + ".score");
    if (s < 0.0 || s > 1.0) ctx.fail(field + ".score", "score must be in [0,1]");
    line.score = s;
  } else if (expect_score) {
    line.score = 1.0;
    ctx.warn(field + ".score", "missing score defaults to 1.0");
  }
  return line;
}

geom::Polygon parse_polygon(const Ctx& ctx, const json& obj, double width, double height,
                            const std::string& field) {
  check_keys(ctx, obj, field, {"points"});
  geom::Polygon poly;
  poly.vertices = geom::dedup_points(parse_points(ctx, obj, width, height, field));
  if (poly.vertices.size() > 1 && poly.vertices.front() == poly.vertices.back()) {
    poly.vertices.pop_back(); // tolerate an explicit closing vertex
  }
  if (poly.vertices.size() < 3) ctx.fail(field + ".points", "polygon requires >= 3 points");
  if (!geom::polygon_is_simple(poly)) ctx.fail(field + ".points", "polygon is self-intersecting");
  if (!(geom::polygon_area(poly) > 0.0)) ctx.fail(field + ".points", "polygon has zero area");
  return poly;
}

double parse_occlusion(const Ctx& ctx, const json& value, const std::string& field) {
  const double v = get_number(ctx, value, field);
  if (v >= 0.0 && v <= 1.0) return v;
  for (double bin : {25.0, 50.0, 75.0, 99.0, 100.0}) {
    if (std::abs(v - bin) < 1e-9) return bin / 100.0;
  }
  ctx.fail(field, "occlusion must be a fraction in [0,1] or a bin in {0,25,50,75,99,100}");
}

geom::Box parse_box_geometry(const Ctx& ctx, const json& obj, double width, double height,
                             const std::string& field) {
  geom::Box b;
  b.x = get_number(ctx, require_field(ctx, obj, "x"), field + ".x");
  b.y = get_number(ctx, require_field(ctx, obj, "y"), field + ".y");
  b.w = get_number(ctx, require_field(ctx, obj, "w"), field + ".w");
  b.h = get_number(ctx, require_field(ctx, obj, "h"), field + ".h");
  if (!(b.w > 0.0)) ctx.fail(field + ".w", "box width must be > 0");
  if (!(b.h > 0.0)) ctx.fail(field + ".h", "box height must be > 0");
  const double x0 = clamp_coord(ctx, b.x, 0.0, width, field + ".x");
  const double y0 = clamp_coord(ctx, b.y, 0.0, height, field + ".y");
  const double x1 = clamp_coord(ctx, b.x + b.w, 0.0, width, field + ".w");
  const double y1 = clamp_coord(ctx, b.y + b.h, 0.0, height, field + ".h");
  b = {x0, y0, x1 - x0, y1 - y0};
  if (!(b.w > 0.0)) ctx.fail(field + ".w", "box collapses after clamping");
  if (!(b.h > 0.0)) ctx.fail(field + ".h", "box collapses after clamping");
  return b;
}

det::ObjectClass parse_class(const Ctx& ctx, const json& obj, const std::string& field) {
  const std::string name = get_string(ctx, require_field(ctx, obj, "class"), field + ".class");
  const auto cls = det::parse_object_class(name);
  if (!cls) ctx.fail(field + ".class", "unknown class label '" + name + "'");
  return *cls;
}

seg::LabelMask load_mask(const Ctx& ctx, const std::string& doc_path, const json& value,
                         const std::string& field, bool allow_ignore) {
  const std::string rel = get_string(ctx, value, field);
  const fs::path resolved = fs::path(doc_path).parent_path() / rel;
  seg::LabelMask mask;
  try {
    mask = seg::load_mask_png(resolved.string());
  } catch (const std::exception& e) {
    ctx.fail(field, e.what());
  }
  for (std::uint8_t label : mask.labels) {
    if (label < seg::kNumLabels) continue;
    if (label == seg::kDefaultIgnoreLabel) {
      if (allow_ignore) continue;
      ctx.fail(field, "prediction mask contains the ignore label (255)");
    }
    ctx.fail(field, "mask contains invalid label id " + std::to_string(label));
  }
  return mask;
}

struct Header {
  Challenge challenge;
  std::string schema_version;
  std::string kind;
};

Header parse_header(Ctx& ctx, const std::string& text, const std::string& expected_kind) {
  const json obj = parse_line(ctx, text);
  check_keys(ctx, obj, "", {"schema_version", "challenge", "kind"});
  Header h;
  h.schema_version = get_string(ctx, require_field(ctx, obj, "schema_version"), "schema_version");
  if (h.schema_version != kInputSchemaVersion) {
    ctx.fail("schema_version", "unsupported schema_version '" + h.schema_version + "'");
  }
  const std::string challenge = get_string(ctx, require_field(ctx, obj, "challenge"), "challenge");
  const auto parsed = parse_challenge(challenge);
  if (!parsed) ctx.fail("challenge", "unknown challenge '" + challenge + "'");
  h.challenge = *parsed;
  h.kind = get_string(ctx, require_field(ctx, obj, "kind"), "kind");
  if (h.kind != expected_kind) {
    ctx.fail("kind", "expected kind '" + expected_kind + "', got '" + h.kind + "'");
  }
  return h;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, 0, "", "", "cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

json points_to_json(std::span<const geom::Point2> pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
  return arr;
}

} // namespace

const char* to_string(Challenge c) {
  switch (c) {
    case Challenge::kRail: return "rail";
    case Challenge::kObject: return "object";
    case Challenge::kVegetation: return "vegetation";
  }
  return "?";
}

std::optional<Challenge> parse_challenge(const std::string& name) {
  if (name == "rail") return Challenge::kRail;
  if (name == "object") return Challenge::kObject;
  if (name == "vegetation") return Challenge::kVegetation;
  return std::nullopt;
}

std::string Warning::format() const {
  std::string out;
  if (!frame_id.empty()) out += "frame '" + frame_id + "': ";
  if (!field.empty()) out += field + ": ";
  return out + message;
}

SchemaError::SchemaError(const std::string& file, int line, const std::string& frame_id,
                         const std::string& field, const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << file << ":" << line << ": ";
        if (!frame_id.empty()) os << "frame '" << frame_id << "': ";
        if (!field.empty()) os << field << ": ";
        os << message;
        return os.str();
      }()),
      frame_id_(frame_id),
      field_(field),
      line_(line) {}

const GtFrame* EvalSet::find(const std::string& frame_id) const {
  const auto it = std::lower_bound(
      frames.begin(), frames.end(), frame_id,
      [](const GtFrame& f, const std::string& id) { return f.frame_id < id; });
  if (it != frames.end() && it->frame_id == frame_id) return &*it;
  return nullptr;
}

const PredFrame* PredictionSet::find(const std::string& frame_id) const {
  const auto it = std::lower_bound(
      frames.begin(), frames.end(), frame_id,
      [](const PredFrame& f, const std::string& id) { return f.frame_id < id; });
  if (it != frames.end() && it->frame_id == frame_id) return &*it;
  return nullptr;
}

LoadedGroundTruth load_ground_truth(const std::string& path, Challenge challenge) {
  LoadedGroundTruth out;
  Ctx ctx{path, 0, "", &out.warnings};

  const auto lines = read_lines(path);
  bool header_seen = false;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    ctx.line = static_cast<int>(i + 1);
    ctx.frame_id.clear();
    if (!header_seen) {
      const Header h = parse_header(ctx, lines[i], "ground_truth");
      if (h.challenge != challenge) {
        ctx.fail("challenge", std::string("expected challenge '") + to_string(challenge) +
                                  "', got '" + to_string(h.challenge) + "'");
      }
      out.set.challenge = h.challenge;
      out.set.schema_version = h.schema_version;
      header_seen = true;
      continue;
    }

    const json obj = parse_line(ctx, lines[i]);
    GtFrame frame;
    frame.frame_id = get_string(ctx, require_field(ctx, obj, "frame_id"), "frame_id");
    ctx.frame_id = frame.frame_id;
    if (!seen_ids.insert(frame.frame_id).second) {
      ctx.fail("frame_id", "duplicate frame id '" + frame.frame_id + "'");
    }
    frame.image_width = get_number(ctx, require_field(ctx, obj, "image_width"), "image_width");
    frame.image_height = get_number(ctx, require_field(ctx, obj, "image_height"), "image_height");
    if (!(frame.image_width > 0.0)) ctx.fail("image_width", "must be > 0");
    if (!(frame.image_height > 0.0)) ctx.fail("image_height", "must be > 0");

    switch (challenge) {
      case Challenge::kRail: {
        check_keys(ctx, obj, "",
                   {"frame_id", "image_width", "image_height", "rails", "ignore_regions"});
        const json& rails = require_field(ctx, obj, "rails");
        if (!rails.is_array()) ctx.fail("rails", "expected an array");
        for (std::size_t r = 0; r < rails.size(); ++r) {
          frame.rails.push_back(parse_polyline(ctx, rails[r], frame.image_width,
                                               frame.image_height, false,
                                               "rails[" + std::to_string(r) + "]"));
        }
        if (const auto it = obj.find("ignore_regions"); it != obj.end()) {
          if (!it->is_array()) ctx.fail("ignore_regions", "expected an array");
          for (std::size_t r = 0; r < it->size(); ++r) {
            frame.ignore_regions.push_back(
                parse_polygon(ctx, (*it)[r], frame.image_width, frame.image_height,
                              "ignore_regions[" + std::to_string(r) + "]"));
          }
        }
        break;
      }
      case Challenge::kObject: {
        check_keys(ctx, obj, "", {"frame_id", "image_width", "image_height", "boxes"});
        const json& boxes = require_field(ctx, obj, "boxes");
        if (!boxes.is_array()) ctx.fail("boxes", "expected an array");
        for (std::size_t b = 0; b < boxes.size(); ++b) {
          const std::string field = "boxes[" + std::to_string(b) + "]";
          const json& jb = boxes[b];
          if (!jb.is_object()) ctx.fail(field, "expected an object");
          check_keys(ctx, jb, field,
                     {"class", "x", "y", "w", "h", "occlusion", "iscrowd", "ignore"});
          det::GtBox gt;
          gt.cls = parse_class(ctx, jb, field);
          gt.box = parse_box_geometry(ctx, jb, frame.image_width, frame.image_height, field);
          if (const auto it = jb.find("occlusion"); it != jb.end()) {
            gt.occlusion = parse_occlusion(ctx, *it, field + ".occlusion");
          }
          if (const auto it = jb.find("iscrowd"); it != jb.end()) {
            gt.iscrowd = get_bool(ctx, *it, field + ".iscrowd");
          }
          if (const auto it = jb.find("ignore"); it != jb.end()) {
            gt.ignore = get_bool(ctx, *it, field + ".ignore");
          }
          frame.boxes.push_back(gt);
        }
        break;
      }
      case Challenge::kVegetation: {
        check_keys(ctx, obj, "", {"frame_id", "image_width", "image_height", "mask"});
        frame.mask = load_mask(ctx, path, require_field(ctx, obj, "mask"), "mask", true);
        if (frame.mask.width != static_cast<int>(frame.image_width) ||
            frame.mask.height != static_cast<int>(frame.image_height)) {
          ctx.fail("mask", "mask dimensions " + std::to_string(frame.mask.width) + "x" +
                               std::to_string(frame.mask.height) +
                               " do not match declared image size");
        }
        break;
      }
    }
    out.set.frames.push_back(std::move(frame));
  }
  if (!header_seen) {
    throw SchemaError(path, 0, "", "", "missing header line");
  }
  std::sort(out.set.frames.begin(), out.set.frames.end(),
            [](const GtFrame& a, const GtFrame& b) { return a.frame_id < b.frame_id; });
  return out;
}

LoadedPredictions load_predictions(const std::string& path, const EvalSet& gt) {
  LoadedPredictions out;
  Ctx ctx{path, 0, "", &out.warnings};

  const auto lines = read_lines(path);
  bool header_seen = false;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    ctx.line = static_cast<int>(i + 1);
    ctx.frame_id.clear();
    if (!header_seen) {
      const Header h = parse_header(ctx, lines[i], "predictions");
      if (h.challenge != gt.challenge) {
        ctx.fail("challenge", std::string("prediction challenge '") + to_string(h.challenge) +
                                  "' does not match ground truth '" + to_string(gt.challenge) +
                                  "'");
      }
      out.set.challenge = h.challenge;
      out.set.schema_version = h.schema_version;
      header_seen = true;
      continue;
    }

    const json obj = parse_line(ctx, lines[i]);
    PredFrame frame;
    frame.frame_id = get_string(ctx, require_field(ctx, obj, "frame_id"), "frame_id");
    ctx.frame_id = frame.frame_id;
    if (!seen_ids.insert(frame.frame_id).second) {
      ctx.fail("frame_id", "duplicate frame id '" + frame.frame_id + "'");
    }
    const GtFrame* ref = gt.find(frame.frame_id);
    if (!ref) ctx.fail("frame_id", "unknown frame id '" + frame.frame_id + "'");

    switch (gt.challenge) {
      case Challenge::kRail: {
        check_keys(ctx, obj, "", {"frame_id", "rails"});
        const json& rails = require_field(ctx, obj, "rails");
        if (!rails.is_array()) ctx.fail("rails", "expected an array");
        for (std::size_t r = 0; r < rails.size(); ++r) {
          frame.rails.push_back(parse_polyline(ctx, rails[r], ref->image_width,
                                               ref->image_height, true,
                                               "rails[" + std::to_string(r) + "]"));
        }
        break;
      }
      case Challenge::kObject: {
        check_keys(ctx, obj, "", {"frame_id", "boxes"});
        const json& boxes = require_field(ctx, obj, "boxes");
        if (!boxes.is_array()) ctx.fail("boxes", "expected an array");
        for (std::size_t b = 0; b < boxes.size(); ++b) {
          const std::string field = "boxes[" + std::to_string(b) + "]";
          const json& jb = boxes[b];
          if (!jb.is_object()) ctx.fail(field, "expected an object");
          check_keys(ctx, jb, field, {"class", "x", "y", "w", "h", "score"});
          det::PredBox pb;
          pb.cls = parse_class(ctx, jb, field);
          pb.box = parse_box_geometry(ctx, jb, ref->image_width, ref->image_height, field);
          if (const auto it = jb.find("score"); it != jb.end()) {
            pb.score = get_number(ctx, *it, field + ".score");
            if (pb.score < 0.0 || pb.score > 1.0) {
              ctx.fail(field + ".score", "score must be in [0,1]");
            }
          } else {
            pb.score = 1.0;
            ctx.warn(field + ".score", "missing score defaults to 1.0");
          }
          frame.boxes.push_back(pb);
        }
        break;
      }
      case Challenge::kVegetation: {
        check_keys(ctx, obj, "", {"frame_id", "mask"});
        frame.mask = load_mask(ctx, path, require_field(ctx, obj, "mask"), "mask", false);
        frame.has_mask = true;
        if (frame.mask.width != ref->mask.width || frame.mask.height != ref->mask.height) {
          ctx.fail("mask", "mask dimensions " + std::to_string(frame.mask.width) + "x" +
                               std::to_string(frame.mask.height) +
                               " do not match the ground-truth mask");
        }
        break;
      }
    }
    out.set.frames.push_back(std::move(frame));
  }
  if (!header_seen) {
    throw SchemaError(path, 0, "", "", "missing header line");
  }
  std::sort(out.set.frames.begin(), out.set.frames.end(),
            [](const PredFrame& a, const PredFrame& b) { return a.frame_id < b.frame_id; });
  return out;
}

std::vector<Warning> validate_pairing(const EvalSet& gt, const PredictionSet& pred) {
  if (gt.challenge != pred.challenge) {
    throw SchemaError("<pairing>", 0, "", "challenge",
                      std::string("prediction challenge '") + to_string(pred.challenge) +
                          "' does not match ground truth '" + to_string(gt.challenge) + "'");
  }
  std::vector<Warning> warnings;
  std::size_t uncovered = 0;
  for (const auto& frame : gt.frames) {
    if (!pred.find(frame.frame_id)) ++uncovered;
  }
  if (uncovered > 0) {
    warnings.push_back({"", "coverage",
                        std::to_string(uncovered) + "/" + std::to_string(gt.frames.size()) +
                            " frames have no predictions"});
  }
  if (gt.challenge == Challenge::kObject) {
    std::array<bool, det::kNumClasses> in_gt{};
    std::array<bool, det::kNumClasses> in_pred{};
    for (const auto& f : gt.frames) {
      for (const auto& b : f.boxes) in_gt[static_cast<int>(b.cls)] = true;
    }
    for (const auto& f : pred.frames) {
      for (const auto& b : f.boxes) in_pred[static_cast<int>(b.cls)] = true;
    }
    for (int c = 0; c < det::kNumClasses; ++c) {
      if (in_pred[c] && !in_gt[c]) {
        warnings.push_back({"", "classes",
                            std::string("class '") + det::to_string(static_cast<det::ObjectClass>(c)) +
                                "' appears in predictions but not in ground truth"});
      }
    }
  }
  return warnings;
}

namespace {

std::string mask_dir_for(const std::string& path) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "_masks")).string();
}

} // namespace

void save_ground_truth(const EvalSet& set, const std::string& path) {
  std::ofstream outf(path, std::ios::trunc);
  if (!outf) throw std::runtime_error(path + ": cannot open for writing");
  json header{{"schema_version", set.schema_version.empty() ? kInputSchemaVersion
                                                            : set.schema_version},
              {"challenge", to_string(set.challenge)},
              {"kind", "ground_truth"}};
  outf << header.dump() << "\n";

  const std::string mask_dir = mask_dir_for(path);
  if (set.challenge == Challenge::kVegetation && !set.frames.empty()) {
    fs::create_directories(mask_dir);
  }

  for (const auto& frame : set.frames) {
    json obj{{"frame_id", frame.frame_id},
             {"image_width", frame.image_width},
             {"image_height", frame.image_height}};
    switch (set.challenge) {
      case Challenge::kRail: {
        json rails = json::array();
        for (const auto& line : frame.rails) rails.push_back({{"points", points_to_json(line.points)}});
        obj["rails"] = std::move(rails);
        json regions = json::array();
        for (const auto& poly : frame.ignore_regions) {
          regions.push_back({{"points", points_to_json(poly.vertices)}});
        }
        obj["ignore_regions"] = std::move(regions);
        break;
      }
      case Challenge::kObject: {
        json boxes = json::array();
        for (const auto& b : frame.boxes) {
          boxes.push_back({{"class", det::to_string(b.cls)},
                           {"x", b.box.x},
                           {"y", b.box.y},
                           {"w", b.box.w},
                           {"h", b.box.h},
                           {"occlusion", b.occlusion},
                           {"iscrowd", b.iscrowd},
                           {"ignore", b.ignore}});
        }
        obj["boxes"] = std::move(boxes);
        break;
      }
      case Challenge::kVegetation: {
        const std::string rel =
            fs::path(mask_dir).filename().string() + "/" + frame.frame_id + ".png";
        seg::save_mask_png(frame.mask, (fs::path(path).parent_path() / rel).string());
        obj["mask"] = rel;
        break;
      }
    }
    outf << obj.dump() << "\n";
  }
}

void save_predictions(const PredictionSet& set, const std::string& path) {
  std::ofstream outf(path, std::ios::trunc);
  if (!outf) throw std::runtime_error(path + ": cannot open for writing");
  json header{{"schema_version", set.schema_version.empty() ? kInputSchemaVersion
                                                            : set.schema_version},
              {"challenge", to_string(set.challenge)},
              {"kind", "predictions"}};
  outf << header.dump() << "\n";

  const std::string mask_dir = mask_dir_for(path);
  if (set.challenge == Challenge::kVegetation && !set.frames.empty()) {
    fs::create_directories(mask_dir);
  }

  for (const auto& frame : set.frames) {
    json obj{{"frame_id", frame.frame_id}};
    switch (set.challenge) {
      case Challenge::kRail: {
        json rails = json::array();
        for (const auto& line : frame.rails) {
          rails.push_back({{"points", points_to_json(line.points)},
                           {"score", line.score.value_or(1.0)}});
        }
        obj["rails"] = std::move(rails);
        break;
      }
      case Challenge::kObject: {
        json boxes = json::array();
        for (const auto& b : frame.boxes) {
          boxes.push_back({{"class", det::to_string(b.cls)},
                           {"x", b.box.x},
                           {"y", b.box.y},
                           {"w", b.box.w},
                           {"h", b.box.h},
                           {"score", b.score}});
        }
        obj["boxes"] = std::move(boxes);
        break;
      }
      case Challenge::kVegetation: {
        const std::string rel =
            fs::path(mask_dir).filename().string() + "/" + frame.frame_id + ".png";
        seg::save_mask_png(frame.mask, (fs::path(path).parent_path() / rel).string());
        obj["mask"] = rel;
        break;
      }
    }
    outf << obj.dump() << "\n";
  }
}

} // namespace raileval::io
