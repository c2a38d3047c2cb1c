#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "synthetic.hpp"
#include "raileval/detection_metrics.hpp"

using namespace raileval;
using namespace raileval::det;
using geom::Box;

namespace {

const DifficultyGate kEasy{"easy", 2500.0, 0.25, false};
const DifficultyGate kModerate{"moderate", 625.0, 0.50, false};
const DifficultyGate kHard{"hard", 0.0, 0.99, true};

DetectionFrame frame_with(std::vector<GtBox> gts, std::vector<PredBox> preds) {
  DetectionFrame f;
  f.frame_id = "f000";
  f.gts = std::move(gts);
  f.preds = std::move(preds);
  return f;
}

std::int64_t counted_gt(const ap::APResult& res) {
  return res.curve.empty() ? 0 : res.curve.front().tp + res.curve.front().fn;
}

// Independent re-trace of the matching protocol: descending score,
// highest IoU above the gate wins, crowd overlap measured over the
// prediction area, neutral matches dropped from scoring.
struct TraceOutcome {
  std::int64_t tp = 0, fp = 0, counted = 0;
};
TraceOutcome trace_frame(const DetectionFrame& frame, ObjectClass cls, double thr,
                         const DifficultyGate& gate) {
  TraceOutcome out;
  std::vector<int> order;
  for (int p = 0; p < static_cast<int>(frame.preds.size()); ++p) {
    if (frame.preds[p].cls == cls) order.push_back(p);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frame.preds[a].score > frame.preds[b].score; });
  std::vector<bool> taken(frame.gts.size(), false);
  auto counted_box = [&](const GtBox& g) {
    return !g.ignore && !g.iscrowd && gate.admits(g);
  };
  for (const auto& g : frame.gts) {
    if (g.cls == cls && counted_box(g)) out.counted += 1;
  }
  for (int p : order) {
    int best = -1;
    double best_iou = thr;
    for (int g = 0; g < static_cast<int>(frame.gts.size()); ++g) {
      if (frame.gts[g].cls != cls || taken[g] || !counted_box(frame.gts[g])) continue;
      const double iou = geom::box_iou(frame.preds[p].box, frame.gts[g].box);
      if (iou > best_iou || (best < 0 && iou == best_iou)) {
        best_iou = iou;
        best = g;
      }
    }
    if (best >= 0) {
      taken[best] = true;
      out.tp += 1;
      continue;
    }
    bool neutralized = false;
    for (int g = 0; g < static_cast<int>(frame.gts.size()); ++g) {
      if (frame.gts[g].cls != cls || counted_box(frame.gts[g])) continue;
      if (!frame.gts[g].iscrowd && taken[g]) continue;
      const double ov = frame.gts[g].iscrowd
                            ? geom::box_intersection_over_first(frame.preds[p].box,
                                                                frame.gts[g].box)
                            : geom::box_iou(frame.preds[p].box, frame.gts[g].box);
      if (ov >= thr) {
        if (!frame.gts[g].iscrowd) taken[g] = true;
        neutralized = true;
        break;
      }
    }
    if (!neutralized) out.fp += 1;
  }
  return out;
}

} // namespace

TEST_CASE("evaluate_class worked examples") {
  const GtBox big{ObjectClass::kTrain, {100, 100, 200, 150}, 0.0, false, false};

  SUBCASE("perfect prediction") {
    const auto frame = frame_with({big}, {{ObjectClass::kTrain, big.box, 1.0}});
    CHECK(evaluate_class(std::vector{frame}, ObjectClass::kTrain, 0.5, kEasy).ap == 1.0);
  }
  SUBCASE("crowd absorption keeps AP untouched") {
    GtBox crowd{ObjectClass::kPerson, {500, 100, 300, 300}, 0.0, true, false};
    GtBox person{ObjectClass::kPerson, {100, 100, 80, 80}, 0.0, false, false};
    auto frame = frame_with({crowd, person}, {{ObjectClass::kPerson, person.box, 0.95}});
    const double base = evaluate_class(std::vector{frame}, ObjectClass::kPerson, 0.5, kHard).ap;
    CHECK(base == 1.0);
    // predictions fully inside the crowd are neither TP nor FP
    frame.preds.push_back({ObjectClass::kPerson, {520, 120, 60, 60}, 0.9});
    frame.preds.push_back({ObjectClass::kPerson, {600, 200, 50, 40}, 0.85});
    CHECK(evaluate_class(std::vector{frame}, ObjectClass::kPerson, 0.5, kHard).ap == base);
  }
  SUBCASE("one matched of two boxes plus a disjoint prediction give 51/101") {
    const GtBox other{ObjectClass::kTrain, {500, 400, 120, 120}, 0.0, false, false};
    const auto frame = frame_with({big, other}, {{ObjectClass::kTrain, big.box, 0.9},
                                                 {ObjectClass::kTrain, {900, 600, 50, 50}, 0.8}});
    const auto res = evaluate_class(std::vector{frame}, ObjectClass::kTrain, 0.5, kEasy);
    CHECK(res.ap == 51.0 / 101.0);
  }
  SUBCASE("a trailing false positive after full recall keeps AP at 1") {
    const auto frame = frame_with({big}, {{ObjectClass::kTrain, big.box, 0.9},
                                          {ObjectClass::kTrain, {900, 600, 50, 50}, 0.8}});
    const auto res = evaluate_class(std::vector{frame}, ObjectClass::kTrain, 0.5, kEasy);
    CHECK(res.ap == 1.0);
    CHECK(res.curve.back().fp == 1);
  }
}

TEST_CASE("a prediction takes the highest-IoU ground truth, not the first") {
  const GtBox a{ObjectClass::kTrain, {0, 0, 100, 100}, 0.0, false, false};
  const GtBox b{ObjectClass::kTrain, {30, 0, 100, 100}, 0.0, false, false};
  // pred1 overlaps a at 0.667 and b at 0.818; pred2 is only valid for b
  const auto frame = frame_with({a, b}, {{ObjectClass::kTrain, {20, 0, 100, 100}, 0.9},
                                         {ObjectClass::kTrain, {35, 0, 100, 100}, 0.8}});
  const auto res = evaluate_class(std::vector{frame}, ObjectClass::kTrain, 0.5, kHard);
  // pred1 must claim b, leaving pred2 unmatched
  CHECK(res.curve.back().tp == 1);
  CHECK(res.curve.back().fp == 1);
  CHECK(res.curve.back().fn == 1);
}

TEST_CASE("difficulty gates follow the area and occlusion rules") {
  GtBox box{ObjectClass::kSignal, {0, 0, 50, 50}, 0.0, false, false};
  CHECK(kEasy.admits(box));
  box.occlusion = 0.25; // strict bound
  CHECK(!kEasy.admits(box));
  CHECK(kModerate.admits(box));
  box.occlusion = 0.99; // inclusive bound at hard
  CHECK(kHard.admits(box));
  box.occlusion = 1.0;
  CHECK(!kHard.admits(box));
  box.occlusion = 0.0;
  box.box = {0, 0, 49, 49};
  CHECK(!kEasy.admits(box));
  CHECK(kModerate.admits(box));

  // nested gates: easy subset of moderate subset of hard
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    GtBox g{ObjectClass::kTrain, {0, 0, 1.0 + unit(rng) * 120.0, 1.0 + unit(rng) * 120.0},
            unit(rng), false, false};
    if (kEasy.admits(g)) CHECK(kModerate.admits(g));
    if (kModerate.admits(g)) CHECK(kHard.admits(g));
  }
}

TEST_CASE("out-of-gate ground truth is neutral, not deleted") {
  // a prediction on a hard-only object must not count as FP at easy
  GtBox occluded{ObjectClass::kTrain, {100, 100, 200, 150}, 0.7, false, false};
  GtBox clean{ObjectClass::kTrain, {600, 100, 200, 150}, 0.0, false, false};
  const auto frame = frame_with(
      {occluded, clean},
      {{ObjectClass::kTrain, occluded.box, 0.99}, {ObjectClass::kTrain, clean.box, 0.9}});
  const auto easy = evaluate_class(std::vector{frame}, ObjectClass::kTrain, 0.5, kEasy);
  CHECK(easy.ap == 1.0);
  CHECK(counted_gt(easy) == 1);
  const auto hard = evaluate_class(std::vector{frame}, ObjectClass::kTrain, 0.5, kHard);
  CHECK(hard.ap == 1.0);
  CHECK(counted_gt(hard) == 2);
}

TEST_CASE("ignore toggling only moves FN counts") {
  GtBox lone{ObjectClass::kBicycle, {100, 100, 100, 100}, 0.0, false, false};
  GtBox matched{ObjectClass::kBicycle, {400, 100, 100, 100}, 0.0, false, false};
  auto frame = frame_with({lone, matched}, {{ObjectClass::kBicycle, matched.box, 0.9}});
  const auto before = evaluate_class(std::vector{frame}, ObjectClass::kBicycle, 0.5, kHard);
  frame.gts[0].ignore = true;
  const auto after = evaluate_class(std::vector{frame}, ObjectClass::kBicycle, 0.5, kHard);
  CHECK(before.curve.back().fp == after.curve.back().fp);
  CHECK(before.curve.back().fn == after.curve.back().fn + 1);
  CHECK(after.ap >= before.ap);
}

TEST_CASE("matching equals the independent trace on random small frames") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    DetectionFrame frame;
    frame.frame_id = "f000";
    const int gts = static_cast<int>(rng() % 4);
    const int preds = static_cast<int>(rng() % 4);
    for (int g = 0; g < gts; ++g) {
      frame.gts.push_back({ObjectClass::kPerson,
                           {unit(rng) * 300.0, unit(rng) * 300.0, 20.0 + unit(rng) * 120.0,
                            20.0 + unit(rng) * 120.0},
                           unit(rng), rng() % 5 == 0, rng() % 7 == 0});
    }
    for (int p = 0; p < preds; ++p) {
      Box box;
      if (!frame.gts.empty() && unit(rng) < 0.7) {
        box = frame.gts[rng() % frame.gts.size()].box;
        box.x += (unit(rng) - 0.5) * 60.0;
        box.y += (unit(rng) - 0.5) * 60.0;
      } else {
        box = {unit(rng) * 300.0, unit(rng) * 300.0, 20.0 + unit(rng) * 100.0,
               20.0 + unit(rng) * 100.0};
      }
      frame.preds.push_back({ObjectClass::kPerson, box, unit(rng)});
    }
    const auto gate = (trial % 3 == 0) ? kEasy : (trial % 3 == 1) ? kModerate : kHard;
    const double thr = 0.5 + 0.05 * (trial % 10);
    const auto res = evaluate_class(std::vector{frame}, ObjectClass::kPerson, thr, gate);
    const auto expect = trace_frame(frame, ObjectClass::kPerson, thr, gate);
    REQUIRE(!res.curve.empty());
    CHECK(res.curve.back().tp == expect.tp);
    CHECK(res.curve.back().fp == expect.fp);
    CHECK(counted_gt(res) == expect.counted);
  }
}

TEST_CASE("map_summary structure and trivial values") {
  std::mt19937 rng(13);
  auto [gt, pred] = synth::perfect_object_sets(rng, 12);
  std::vector<DetectionFrame> frames;
  for (std::size_t i = 0; i < gt.frames.size(); ++i) {
    frames.push_back({gt.frames[i].frame_id, gt.frames[i].boxes, pred.frames[i].boxes});
  }
  const auto cfg = DetectionConfig::defaults();

  SUBCASE("perfect predictions reach 1 at every difficulty") {
    const auto summary = map_summary(frames, cfg);
    REQUIRE(summary.maps.size() == 3);
    for (const auto& row : summary.maps) CHECK(row.map == 1.0);
  }
  SUBCASE("no predictions at all floor at 0") {
    for (auto& f : frames) f.preds.clear();
    const auto summary = map_summary(frames, cfg);
    for (const auto& row : summary.maps) CHECK(row.map == 0.0);
    for (const auto& ap : summary.ap50_per_class) {
      if (ap) CHECK(*ap == 0.0);
    }
  }
  SUBCASE("rows mirror the report structure: 3 difficulties + 7 classes") {
    const auto summary = map_summary(frames, cfg);
    CHECK(summary.maps[0].name == "easy");
    CHECK(summary.maps[1].name == "moderate");
    CHECK(summary.maps[2].name == "hard");
    CHECK(summary.ap50_per_class.size() == 7);
  }
}

TEST_CASE("difficulty monotonicity on easy-perfect predictions") {
  // every counted easy box is matched perfectly; harder levels only add
  // unmatched ground truth, so mAP may only drop
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<DetectionFrame> frames;
  for (int f = 0; f < 10; ++f) {
    DetectionFrame frame;
    frame.frame_id = "f" + std::to_string(f);
    for (int b = 0; b < 6; ++b) {
      GtBox gt{static_cast<ObjectClass>((f + b) % kNumClasses),
               {40.0 + 200.0 * b, 40.0 + 150.0 * (f % 3), 60.0 + unit(rng) * 60.0,
                60.0 + unit(rng) * 60.0},
               (b % 2) ? 0.0 : 0.4 + unit(rng) * 0.5, false, false};
      frame.gts.push_back(gt);
      if (kEasy.admits(gt)) frame.preds.push_back({gt.cls, gt.box, 1.0});
    }
    frames.push_back(std::move(frame));
  }
  const auto summary = map_summary(frames, DetectionConfig::defaults());
  CHECK(summary.maps[0].map >= summary.maps[1].map);
  CHECK(summary.maps[1].map >= summary.maps[2].map);
}

TEST_CASE("rank invariance under strictly increasing score transforms") {
  std::mt19937 rng(23);
  auto [gt, pred] = synth::perfect_object_sets(rng, 8);
  std::vector<DetectionFrame> frames;
  for (std::size_t i = 0; i < gt.frames.size(); ++i) {
    frames.push_back({gt.frames[i].frame_id, gt.frames[i].boxes, pred.frames[i].boxes});
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& f : frames) {
    for (auto& p : f.preds) p.score = unit(rng);
    f.preds.push_back({ObjectClass::kTrain, {1500, 900, 60, 60}, unit(rng)}); // noise
  }
  const auto before = evaluate_class(frames, ObjectClass::kTrain, 0.5, kHard);
  auto transformed = frames;
  for (auto& f : transformed) {
    for (auto& p : f.preds) p.score = 0.05 + 0.9 * p.score * p.score;
  }
  const auto after = evaluate_class(transformed, ObjectClass::kTrain, 0.5, kHard);
  CHECK(before.ap == after.ap);
}

TEST_CASE("scaling and translation leave detection metrics bit-identical") {
  const auto frames = synth::invariance_object_frames();
  const auto cfg = DetectionConfig::defaults();
  const auto base = map_summary(frames, cfg);
  for (double s : {0.5, 2.0, 3.7}) {
    const auto summary = map_summary(synth::scaled(frames, s), cfg);
    for (std::size_t i = 0; i < base.maps.size(); ++i) {
      CHECK(summary.maps[i].map == base.maps[i].map);
    }
  }
  const auto moved = map_summary(synth::translated(frames, 137.0, 41.0), cfg);
  for (std::size_t i = 0; i < base.maps.size(); ++i) {
    CHECK(moved.maps[i].map == base.maps[i].map);
  }
}

TEST_CASE("class names round-trip") {
  for (int c = 0; c < kNumClasses; ++c) {
    const auto cls = static_cast<ObjectClass>(c);
    CHECK(parse_object_class(to_string(cls)) == cls);
  }
  CHECK(!parse_object_class("tree"));
}
