// Strict parsing, validation and normalization of ground-truth and
// prediction documents. The on-disk format is line-oriented JSON: one
// header object followed by one object per frame (see FORMATS.md).
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raileval/detection_metrics.hpp"
#include "raileval/geometry.hpp"
#include "raileval/segmentation_metrics.hpp"

namespace raileval::io {

enum class Challenge { kRail, kObject, kVegetation };

const char* to_string(Challenge c);
std::optional<Challenge> parse_challenge(const std::string& name);

/// Non-fatal ingest note (clamped coordinate, defaulted score, ...).
struct Warning {
  std::string frame_id;
  std::string field;
  std::string message;

  std::string format() const;
};

/// Fatal schema violation. Carries enough location to point at the
/// offending frame and field; loads never return partial data.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& file, int line, const std::string& frame_id,
              const std::string& field, const std::string& message);

  const std::string& frame_id() const { return frame_id_; }
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string frame_id_;
  std::string field_;
  int line_ = 0;
};

struct GtFrame {
  std::string frame_id;
  double image_width = 0.0;
  double image_height = 0.0;
  std::vector<geom::Polyline> rails;
  std::vector<geom::Polygon> ignore_regions;
  std::vector<det::GtBox> boxes;
  seg::LabelMask mask;
};

struct EvalSet {
  Challenge challenge = Challenge::kRail;
  std::string schema_version;
  std::vector<GtFrame> frames; // sorted by frame_id

  const GtFrame* find(const std::string& frame_id) const;
};

struct PredFrame {
  std::string frame_id;
  std::vector<geom::Polyline> rails; // carry scores
  std::vector<det::PredBox> boxes;
  seg::LabelMask mask;
  bool has_mask = false;
};

struct PredictionSet {
  Challenge challenge = Challenge::kRail;
  std::string schema_version;
  std::vector<PredFrame> frames; // sorted by frame_id, subset of the EvalSet

  const PredFrame* find(const std::string& frame_id) const;
};

struct LoadedGroundTruth {
  EvalSet set;
  std::vector<Warning> warnings;
};

struct LoadedPredictions {
  PredictionSet set;
  std::vector<Warning> warnings;
};

LoadedGroundTruth load_ground_truth(const std::string& path, Challenge challenge);

/// Predictions are validated against the paired ground truth: frame ids
/// must exist there, geometry is clamped against that frame's image
/// bounds, vegetation masks must match the ground-truth dimensions.
/// Frames without predictions are simply absent.
LoadedPredictions load_predictions(const std::string& path, const EvalSet& gt);

/// Cross-checks challenge tags, frame coverage and class vocabulary.
/// A challenge mismatch is fatal; everything else comes back as warnings.
std::vector<Warning> validate_pairing(const EvalSet& gt, const PredictionSet& pred);

/// Canonical serialization (used for round-trip checks and fixtures).
/// Vegetation masks are written as PNGs next to the document, under
/// `<stem>_masks/<frame_id>.png`.
void save_ground_truth(const EvalSet& set, const std::string& path);
void save_predictions(const PredictionSet& set, const std::string& path);

} // namespace raileval::io
