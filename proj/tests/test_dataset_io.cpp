#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "malformed.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"
#include "raileval/dataset_io.hpp"

using namespace raileval;
using namespace raileval::io;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

constexpr const char* kMinimalRailGt =
    R"({"schema_version":"1.0","challenge":"rail","kind":"ground_truth"}
{"frame_id":"f000","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[120,550]]}]}
)";

} // namespace

TEST_CASE("minimal valid ground truth loads") {
  synth::TempDir tmp("io_minimal");
  const auto path = tmp.file("gt.jsonl");
  write_file(path, kMinimalRailGt);
  const auto loaded = load_ground_truth(path, Challenge::kRail);
  CHECK(loaded.set.frames.size() == 1);
  CHECK(loaded.set.frames[0].frame_id == "f000");
  CHECK(loaded.set.frames[0].rails.size() == 1);
  CHECK(loaded.warnings.empty());
}

TEST_CASE("consecutive duplicate points are dropped at ingest") {
  synth::TempDir tmp("io_dedup");
  const auto path = tmp.file("gt.jsonl");
  write_file(path,
             R"({"schema_version":"1.0","challenge":"rail","kind":"ground_truth"}
{"frame_id":"f000","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[100,50],[120,550]]}]}
)");
  const auto loaded = load_ground_truth(path, Challenge::kRail);
  CHECK(loaded.set.frames[0].rails[0].points.size() == 2);
}

TEST_CASE("small out-of-bounds excursions clamp with a warning") {
  synth::TempDir tmp("io_clamp");
  const auto path = tmp.file("gt.jsonl");
  write_file(path,
             R"({"schema_version":"1.0","challenge":"rail","kind":"ground_truth"}
{"frame_id":"f000","image_width":800,"image_height":600,"rails":[{"points":[[801.5,50],[120,550]]}]}
)");
  const auto loaded = load_ground_truth(path, Challenge::kRail);
  CHECK(loaded.set.frames[0].rails[0].points[0].x == 800.0);
  REQUIRE(!loaded.warnings.empty());
  CHECK(loaded.warnings[0].frame_id == "f000");
}

TEST_CASE("prediction subsets and defaulted scores are tolerated") {
  synth::TempDir tmp("io_subset");
  const auto gt_path = tmp.file("gt.jsonl");
  write_file(gt_path,
             R"({"schema_version":"1.0","challenge":"rail","kind":"ground_truth"}
{"frame_id":"f000","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[120,550]]}]}
{"frame_id":"f001","image_width":800,"image_height":600,"rails":[{"points":[[300,50],[320,550]]}]}
)");
  const auto gt = load_ground_truth(gt_path, Challenge::kRail);

  const auto pred_path = tmp.file("pred.jsonl");
  write_file(pred_path,
             R"({"schema_version":"1.0","challenge":"rail","kind":"predictions"}
{"frame_id":"f001","rails":[{"points":[[300,60],[321,540]]}]}
)");
  const auto pred = load_predictions(pred_path, gt.set);
  CHECK(pred.set.frames.size() == 1);
  CHECK(pred.set.frames[0].rails[0].score == 1.0); // defaulted
  REQUIRE(!pred.warnings.empty());
  CHECK(pred.warnings[0].field == "rails[0].score");

  const auto pairing = validate_pairing(gt.set, pred.set);
  REQUIRE(!pairing.empty());
  CHECK(pairing[0].message == "1/2 frames have no predictions");
}

TEST_CASE("empty prediction documents are accepted") {
  synth::TempDir tmp("io_empty");
  const auto gt_path = tmp.file("gt.jsonl");
  write_file(gt_path, kMinimalRailGt);
  const auto gt = load_ground_truth(gt_path, Challenge::kRail);
  const auto pred_path = tmp.file("pred.jsonl");
  write_file(pred_path, R"({"schema_version":"1.0","challenge":"rail","kind":"predictions"}
)");
  const auto pred = load_predictions(pred_path, gt.set);
  CHECK(pred.set.frames.empty());
}

TEST_CASE("challenge mismatch is fatal") {
  synth::TempDir tmp("io_mismatch");
  const auto gt_path = tmp.file("gt.jsonl");
  write_file(gt_path, kMinimalRailGt);
  CHECK_THROWS_AS(load_ground_truth(gt_path, Challenge::kObject), SchemaError);

  const auto gt = load_ground_truth(gt_path, Challenge::kRail);
  const auto pred_path = tmp.file("pred.jsonl");
  write_file(pred_path, R"({"schema_version":"1.0","challenge":"object","kind":"predictions"}
)");
  CHECK_THROWS_AS(load_predictions(pred_path, gt.set), SchemaError);
}

TEST_CASE("the malformed corpus is rejected with frame-bearing diagnostics") {
  synth::TempDir tmp("io_malformed");
  const auto cases = synth::write_malformed_corpus(tmp.path.string());
  REQUIRE(cases.size() == 20);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    try {
      const auto gt = load_ground_truth(c.gt_path, c.challenge);
      REQUIRE(c.bad_predictions); // ground-truth violations must not load
      load_predictions(c.pred_path, gt.set);
      FAIL("prediction violation not detected in " << c.name);
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find(c.expect_frame_id) != std::string::npos);
      CHECK(e.frame_id() == c.expect_frame_id);
      CHECK(!e.field().empty());
    }
  }
}

TEST_CASE("json syntax errors carry the line number") {
  synth::TempDir tmp("io_syntax");
  const auto path = tmp.file("gt.jsonl");
  write_file(path, R"({"schema_version":"1.0","challenge":"rail","kind":"ground_truth"}
{not json
)");
  try {
    load_ground_truth(path, Challenge::kRail);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("loading is deterministic") {
  synth::TempDir tmp("io_deterministic");
  std::mt19937 rng(3);
  auto [gt, pred] = synth::perfect_rail_sets(rng, 10);
  const auto gt_path = tmp.file("gt.jsonl");
  const auto pred_path = tmp.file("pred.jsonl");
  save_ground_truth(gt, gt_path);
  save_predictions(pred, pred_path);

  const auto a = load_ground_truth(gt_path, Challenge::kRail);
  const auto b = load_ground_truth(gt_path, Challenge::kRail);
  REQUIRE(a.set.frames.size() == b.set.frames.size());
  for (std::size_t i = 0; i < a.set.frames.size(); ++i) {
    CHECK(a.set.frames[i].frame_id == b.set.frames[i].frame_id);
    REQUIRE(a.set.frames[i].rails.size() == b.set.frames[i].rails.size());
    for (std::size_t r = 0; r < a.set.frames[i].rails.size(); ++r) {
      CHECK(a.set.frames[i].rails[r].points == b.set.frames[i].rails[r].points);
    }
  }
}

TEST_CASE("serialize-load round trip is structurally identical") {
  synth::TempDir tmp("io_roundtrip");
  std::mt19937 rng(5);

  SUBCASE("rail") {
    auto [gt, pred] = synth::perfect_rail_sets(rng, 6);
    save_ground_truth(gt, tmp.file("gt.jsonl"));
    const auto once = load_ground_truth(tmp.file("gt.jsonl"), Challenge::kRail);
    save_ground_truth(once.set, tmp.file("gt2.jsonl"));
    const auto twice = load_ground_truth(tmp.file("gt2.jsonl"), Challenge::kRail);
    REQUIRE(once.set.frames.size() == twice.set.frames.size());
    for (std::size_t i = 0; i < once.set.frames.size(); ++i) {
      const auto& x = once.set.frames[i];
      const auto& y = twice.set.frames[i];
      CHECK(x.frame_id == y.frame_id);
      CHECK(x.image_width == y.image_width);
      REQUIRE(x.rails.size() == y.rails.size());
      for (std::size_t r = 0; r < x.rails.size(); ++r) {
        CHECK(x.rails[r].points == y.rails[r].points);
      }
      REQUIRE(x.ignore_regions.size() == y.ignore_regions.size());
      for (std::size_t r = 0; r < x.ignore_regions.size(); ++r) {
        CHECK(x.ignore_regions[r].vertices == y.ignore_regions[r].vertices);
      }
    }

    save_predictions(pred, tmp.file("pred.jsonl"));
    const auto ponce = load_predictions(tmp.file("pred.jsonl"), once.set);
    for (std::size_t i = 0; i < ponce.set.frames.size(); ++i) {
      CHECK(ponce.set.frames[i].rails.size() == pred.frames[i].rails.size());
    }
  }
  SUBCASE("object") {
    auto [gt, pred] = synth::perfect_object_sets(rng, 6);
    save_ground_truth(gt, tmp.file("gt.jsonl"));
    const auto once = load_ground_truth(tmp.file("gt.jsonl"), Challenge::kObject);
    save_ground_truth(once.set, tmp.file("gt2.jsonl"));
    const auto twice = load_ground_truth(tmp.file("gt2.jsonl"), Challenge::kObject);
    REQUIRE(once.set.frames.size() == twice.set.frames.size());
    for (std::size_t i = 0; i < once.set.frames.size(); ++i) {
      const auto& x = once.set.frames[i];
      const auto& y = twice.set.frames[i];
      REQUIRE(x.boxes.size() == y.boxes.size());
      for (std::size_t b = 0; b < x.boxes.size(); ++b) {
        CHECK(x.boxes[b].cls == y.boxes[b].cls);
        CHECK(x.boxes[b].box.x == y.boxes[b].box.x);
        CHECK(x.boxes[b].box.w == y.boxes[b].box.w);
        CHECK(x.boxes[b].occlusion == y.boxes[b].occlusion);
        CHECK(x.boxes[b].iscrowd == y.boxes[b].iscrowd);
        CHECK(x.boxes[b].ignore == y.boxes[b].ignore);
      }
    }
  }
  SUBCASE("vegetation") {
    auto [gt, pred] = synth::perfect_vegetation_sets(rng, 4);
    save_ground_truth(gt, tmp.file("gt.jsonl"));
    const auto once = load_ground_truth(tmp.file("gt.jsonl"), Challenge::kVegetation);
    REQUIRE(once.set.frames.size() == gt.frames.size());
    for (std::size_t i = 0; i < once.set.frames.size(); ++i) {
      CHECK(once.set.frames[i].mask.labels == gt.frames[i].mask.labels);
    }
    save_predictions(pred, tmp.file("pred.jsonl"));
    const auto ponce = load_predictions(tmp.file("pred.jsonl"), once.set);
    for (std::size_t i = 0; i < ponce.set.frames.size(); ++i) {
      CHECK(ponce.set.frames[i].mask.labels == pred.frames[i].mask.labels);
    }
  }
}

TEST_CASE("occlusion accepts fractions and bins") {
  synth::TempDir tmp("io_occlusion");
  const auto path = tmp.file("gt.jsonl");
  write_file(path,
             R"({"schema_version":"1.0","challenge":"object","kind":"ground_truth"}
{"frame_id":"f000","image_width":800,"image_height":600,"boxes":[{"class":"train","x":10,"y":10,"w":50,"h":50,"occlusion":0.4},{"class":"train","x":100,"y":10,"w":50,"h":50,"occlusion":75},{"class":"train","x":200,"y":10,"w":50,"h":50,"occlusion":1}]}
)");
  const auto loaded = load_ground_truth(path, Challenge::kObject);
  CHECK(loaded.set.frames[0].boxes[0].occlusion == 0.4);
  CHECK(loaded.set.frames[0].boxes[1].occlusion == 0.75);
  CHECK(loaded.set.frames[0].boxes[2].occlusion == 1.0); // fraction, not a bin
}

TEST_CASE("class vocabulary mismatches warn at pairing") {
  synth::TempDir tmp("io_vocab");
  const auto gt_path = tmp.file("gt.jsonl");
  write_file(gt_path,
             R"({"schema_version":"1.0","challenge":"object","kind":"ground_truth"}
{"frame_id":"f000","image_width":800,"image_height":600,"boxes":[{"class":"train","x":10,"y":10,"w":50,"h":50}]}
)");
  const auto gt = load_ground_truth(gt_path, Challenge::kObject);
  const auto pred_path = tmp.file("pred.jsonl");
  write_file(pred_path,
             R"({"schema_version":"1.0","challenge":"object","kind":"predictions"}
{"frame_id":"f000","boxes":[{"class":"bicycle","x":10,"y":10,"w":50,"h":50,"score":0.5}]}
)");
  const auto pred = load_predictions(pred_path, gt.set);
  const auto warnings = validate_pairing(gt.set, pred.set);
  bool found = false;
  for (const auto& w : warnings) {
    if (w.message.find("bicycle") != std::string::npos) found = true;
  }
  CHECK(found);
}
