#include "malformed.hpp"

#include <filesystem>
#include <fstream>

#include "raileval/mask_io.hpp"

namespace synth {

namespace fs = std::filesystem;
using raileval::io::Challenge;

namespace {

constexpr const char* kRailGtHeader =
    R"({"schema_version":"1.0","challenge":"rail","kind":"ground_truth"})";
constexpr const char* kRailPredHeader =
    R"({"schema_version":"1.0","challenge":"rail","kind":"predictions"})";
constexpr const char* kObjGtHeader =
    R"({"schema_version":"1.0","challenge":"object","kind":"ground_truth"})";
constexpr const char* kObjPredHeader =
    R"({"schema_version":"1.0","challenge":"object","kind":"predictions"})";
constexpr const char* kVegGtHeader =
    R"({"schema_version":"1.0","challenge":"vegetation","kind":"ground_truth"})";
constexpr const char* kVegPredHeader =
    R"({"schema_version":"1.0","challenge":"vegetation","kind":"predictions"})";

constexpr const char* kValidRailFrame =
    R"({"frame_id":"f000","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[120,550]]}]})";
constexpr const char* kValidRailPredFrame =
    R"({"frame_id":"f000","rails":[{"points":[[101,50],[121,550]],"score":0.9}]})";
constexpr const char* kValidObjFrame =
    R"({"frame_id":"f000","image_width":800,"image_height":600,"boxes":[{"class":"train","x":100,"y":100,"w":200,"h":150,"occlusion":0,"iscrowd":false,"ignore":false}]})";
constexpr const char* kValidObjPredFrame =
    R"({"frame_id":"f000","boxes":[{"class":"train","x":102,"y":101,"w":200,"h":150,"score":0.8}]})";

void write(const std::string& path, std::initializer_list<std::string> lines) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& line : lines) out << line << "\n";
}

void write_label_mask(const std::string& path, int w, int h, std::uint8_t fill) {
  raileval::seg::LabelMask mask;
  mask.width = w;
  mask.height = h;
  mask.labels.assign(static_cast<std::size_t>(w) * h, fill);
  raileval::seg::save_mask_png(mask, path);
}

} // namespace

std::vector<MalformedCase> write_malformed_corpus(const std::string& dir) {
  fs::create_directories(dir);
  const auto at = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

  // valid companions
  write(at("valid_rail_gt.jsonl"), {kRailGtHeader, kValidRailFrame});
  write(at("valid_rail_pred.jsonl"), {kRailPredHeader, kValidRailPredFrame});
  write(at("valid_object_gt.jsonl"), {kObjGtHeader, kValidObjFrame});
  write(at("valid_object_pred.jsonl"), {kObjPredHeader, kValidObjPredFrame});
  write_label_mask(at("veg_f000.png"), 32, 24, 1);
  write(at("valid_veg_gt.jsonl"),
        {kVegGtHeader,
         R"({"frame_id":"f000","image_width":32,"image_height":24,"mask":"veg_f000.png"})"});
  write(at("valid_veg_pred.jsonl"),
        {kVegPredHeader, R"({"frame_id":"f000","mask":"veg_f000.png"})"});

  std::vector<MalformedCase> cases;
  auto gt_case = [&](const std::string& name, Challenge ch,
                     std::initializer_list<std::string> lines, const std::string& frame) {
    const std::string path = at(name + ".jsonl");
    write(path, lines);
    const char* pred = ch == Challenge::kRail     ? "valid_rail_pred.jsonl"
                       : ch == Challenge::kObject ? "valid_object_pred.jsonl"
                                                  : "valid_veg_pred.jsonl";
    cases.push_back({name, ch, false, path, at(pred), frame});
  };
  auto pred_case = [&](const std::string& name, Challenge ch,
                       std::initializer_list<std::string> lines, const std::string& frame) {
    const std::string path = at(name + ".jsonl");
    write(path, lines);
    const char* gt = ch == Challenge::kRail     ? "valid_rail_gt.jsonl"
                     : ch == Challenge::kObject ? "valid_object_gt.jsonl"
                                                : "valid_veg_gt.jsonl";
    cases.push_back({name, ch, true, at(gt), path, frame});
  };

  gt_case("duplicate_frame_id", Challenge::kRail,
          {kRailGtHeader, kValidRailFrame, kValidRailFrame}, "f000");
  gt_case("single_point_polyline", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f001","image_width":800,"image_height":600,"rails":[{"points":[[100,50]]}]})"},
          "f001");
  gt_case("zero_length_polyline", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f002","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[100,50]]}]})"},
          "f002");
  gt_case("coordinate_out_of_bounds", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f003","image_width":800,"image_height":600,"rails":[{"points":[[805,50],[120,550]]}]})"},
          "f003");
  gt_case("polygon_two_vertices", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f004","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[120,550]]}],"ignore_regions":[{"points":[[10,10],[20,20]]}]})"},
          "f004");
  gt_case("polygon_self_intersecting", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f005","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[120,550]]}],"ignore_regions":[{"points":[[300,10],[400,110],[400,10],[300,110]]}]})"},
          "f005");
  gt_case("polygon_zero_area", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f006","image_width":800,"image_height":600,"rails":[{"points":[[100,50],[120,550]]}],"ignore_regions":[{"points":[[10,10],[20,20],[30,30]]}]})"},
          "f006");
  gt_case("nonpositive_image_width", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f007","image_width":0,"image_height":600,"rails":[]})"},
          "f007");
  gt_case("non_numeric_coordinate", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f008","image_width":800,"image_height":600,"rails":[{"points":[[null,50],[120,550]]}]})"},
          "f008");
  gt_case("unknown_frame_field", Challenge::kRail,
          {kRailGtHeader,
           R"({"frame_id":"f009","image_width":800,"image_height":600,"rails":[],"lanes":[]})"},
          "f009");

  pred_case("pred_score_above_one", Challenge::kRail,
            {kRailPredHeader,
             R"({"frame_id":"f000","rails":[{"points":[[101,50],[121,550]],"score":1.5}]})"},
            "f000");
  pred_case("pred_unknown_frame", Challenge::kRail,
            {kRailPredHeader,
             R"({"frame_id":"f999","rails":[{"points":[[101,50],[121,550]],"score":0.9}]})"},
            "f999");

  gt_case("box_zero_width", Challenge::kObject,
          {kObjGtHeader,
           R"({"frame_id":"f010","image_width":800,"image_height":600,"boxes":[{"class":"train","x":100,"y":100,"w":0,"h":150}]})"},
          "f010");
  gt_case("unknown_class_label", Challenge::kObject,
          {kObjGtHeader,
           R"({"frame_id":"f011","image_width":800,"image_height":600,"boxes":[{"class":"tree","x":100,"y":100,"w":50,"h":50}]})"},
          "f011");
  gt_case("invalid_occlusion", Challenge::kObject,
          {kObjGtHeader,
           R"({"frame_id":"f012","image_width":800,"image_height":600,"boxes":[{"class":"train","x":100,"y":100,"w":50,"h":50,"occlusion":1.7}]})"},
          "f012");
  pred_case("pred_box_out_of_bounds", Challenge::kObject,
            {kObjPredHeader,
             R"({"frame_id":"f000","boxes":[{"class":"train","x":850,"y":100,"w":50,"h":50,"score":0.5}]})"},
            "f000");

  write_label_mask(at("veg_bad_label.png"), 32, 24, 7);
  write_label_mask(at("veg_ignore.png"), 32, 24, 255);
  write_label_mask(at("veg_small.png"), 16, 12, 1);
  gt_case("veg_missing_mask_file", Challenge::kVegetation,
          {kVegGtHeader,
           R"({"frame_id":"f013","image_width":32,"image_height":24,"mask":"no_such_mask.png"})"},
          "f013");
  gt_case("veg_invalid_label", Challenge::kVegetation,
          {kVegGtHeader,
           R"({"frame_id":"f014","image_width":32,"image_height":24,"mask":"veg_bad_label.png"})"},
          "f014");
  pred_case("veg_pred_ignore_label", Challenge::kVegetation,
            {kVegPredHeader, R"({"frame_id":"f000","mask":"veg_ignore.png"})"}, "f000");
  pred_case("veg_pred_dim_mismatch", Challenge::kVegetation,
            {kVegPredHeader, R"({"frame_id":"f000","mask":"veg_small.png"})"}, "f000");

  return cases;
}

} // namespace synth
