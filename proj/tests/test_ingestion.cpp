#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "pedfair/ingestion.hpp"

using namespace pedfair;

namespace {

// Small GT document builder so fixtures stay readable.
std::string one_ped_gt(double orientation, double box_h = 120.0) {
  return std::string(R"({"images": [{"image_id": "img_0", "width": 1920, "height": 1080,
      "pedestrians": [{"id": "ped_0", "bbox": [10, 10, 40, )") +
         std::to_string(box_h) + R"(], "orientation_deg": )" + std::to_string(orientation) +
         R"(}]}]})";
}

}  // namespace

TEST_CASE("parse_ground_truth accepts a minimal document", "[ingestion]") {
  const Dataset ds = parse_ground_truth(one_ped_gt(0.0));
  REQUIRE(ds.images.size() == 1);
  CHECK(ds.images[0].image_id == "img_0");
  CHECK(ds.images[0].width == 1920);
  CHECK(ds.images[0].height == 1080);
  REQUIRE(ds.images[0].pedestrians.size() == 1);
  const PedestrianGT& ped = ds.images[0].pedestrians[0];
  CHECK(ped.id == "ped_0");
  CHECK(ped.bbox == BBox{10, 10, 40, 120});
  CHECK(ped.orientation_deg == 0.0);
  CHECK(ped.keypoints.size() == 0);
  CHECK(ds.pedestrian_count() == 1);
}

TEST_CASE("parse_ground_truth reads keypoints with occlusion flags", "[ingestion]") {
  const Dataset ds = parse_ground_truth(R"({"images": [{"image_id": "a", "width": 100,
      "height": 100, "pedestrians": [{"id": "p", "bbox": [0, 0, 10, 20],
      "orientation_deg": 90,
      "keypoints": [{"joint": "nose", "x": 5, "y": 2, "occluded": true},
                    {"joint": "ankle_left", "x": 4, "y": 19}]}]}]})");
  const KeypointMap& kps = ds.images[0].pedestrians[0].keypoints;
  REQUIRE(kps.size() == 2);
  REQUIRE(kps.contains(Joint::Nose));
  CHECK(kps.find(Joint::Nose)->occluded);
  REQUIRE(kps.contains(Joint::AnkleLeft));
  CHECK_FALSE(kps.find(Joint::AnkleLeft)->occluded);
  CHECK(kps.find(Joint::AnkleLeft)->pos() == Vec2{4, 19});
}

TEST_CASE("parse_ground_truth rejects malformed documents", "[ingestion]") {
  CHECK_THROWS_AS(parse_ground_truth("{"), ParseError);
  CHECK_THROWS_AS(parse_ground_truth("[]"), ParseError);
  CHECK_THROWS_AS(parse_ground_truth("{}"), ParseError);
  CHECK_THROWS_AS(parse_ground_truth(R"({"images": 3})"), ParseError);
  // Missing orientation.
  CHECK_THROWS_AS(parse_ground_truth(R"({"images": [{"image_id": "a", "width": 10,
      "height": 10, "pedestrians": [{"id": "p", "bbox": [0, 0, 5, 5]}]}]})"),
                  ParseError);
  // bbox with three entries.
  CHECK_THROWS_AS(parse_ground_truth(R"({"images": [{"image_id": "a", "width": 10,
      "height": 10, "pedestrians": [{"id": "p", "bbox": [0, 0, 5],
      "orientation_deg": 0}]}]})"),
                  ParseError);
}

TEST_CASE("parse_ground_truth rejects invariant violations", "[ingestion]") {
  SECTION("orientation at 360 is out of range") {
    CHECK_THROWS_AS(parse_ground_truth(one_ped_gt(360.0)), ValidationError);
    CHECK_THROWS_AS(parse_ground_truth(one_ped_gt(-0.5)), ValidationError);
    CHECK_NOTHROW(parse_ground_truth(one_ped_gt(359.999)));
  }
  SECTION("duplicate image ids") {
    CHECK_THROWS_AS(parse_ground_truth(R"({"images": [
        {"image_id": "a", "width": 10, "height": 10},
        {"image_id": "a", "width": 10, "height": 10}]})"),
                    ValidationError);
  }
  SECTION("duplicate pedestrian ids") {
    CHECK_THROWS_AS(parse_ground_truth(R"({"images": [{"image_id": "a", "width": 100,
        "height": 100, "pedestrians": [
          {"id": "p", "bbox": [0, 0, 5, 5], "orientation_deg": 0},
          {"id": "p", "bbox": [6, 0, 5, 5], "orientation_deg": 0}]}]})"),
                    ValidationError);
  }
  SECTION("duplicate keypoint joints") {
    CHECK_THROWS_AS(parse_ground_truth(R"({"images": [{"image_id": "a", "width": 100,
        "height": 100, "pedestrians": [{"id": "p", "bbox": [0, 0, 5, 5],
        "orientation_deg": 0,
        "keypoints": [{"joint": "nose", "x": 1, "y": 1},
                      {"joint": "nose", "x": 2, "y": 2}]}]}]})"),
                    ValidationError);
  }
  SECTION("unknown joint name") {
    CHECK_THROWS_AS(parse_ground_truth(R"({"images": [{"image_id": "a", "width": 100,
        "height": 100, "pedestrians": [{"id": "p", "bbox": [0, 0, 5, 5],
        "orientation_deg": 0,
        "keypoints": [{"joint": "tail", "x": 1, "y": 1}]}]}]})"),
                    ValidationError);
  }
  SECTION("non-positive bbox extent") {
    CHECK_THROWS_AS(parse_ground_truth(R"({"images": [{"image_id": "a", "width": 100,
        "height": 100, "pedestrians": [{"id": "p", "bbox": [0, 0, 0, 5],
        "orientation_deg": 0}]}]})"),
                    ValidationError);
  }
}

TEST_CASE("ground-truth round trip is stable", "[ingestion]") {
  const Dataset ds = parse_ground_truth(R"({"images": [{"image_id": "a", "width": 640,
      "height": 480, "pedestrians": [{"id": "p1", "bbox": [1, 2, 30, 90],
      "orientation_deg": 123.5,
      "keypoints": [{"joint": "ankle_right", "x": 20, "y": 88, "occluded": true},
                    {"joint": "nose", "x": 16, "y": 4}]},
      {"id": "p2", "bbox": [100, 2, 30, 70], "orientation_deg": 0}]},
      {"image_id": "b", "width": 640, "height": 480}]})");
  const std::string first = serialize_ground_truth(ds);
  const std::string second = serialize_ground_truth(parse_ground_truth(first));
  CHECK(first == second);
}

TEST_CASE("parse_detections accepts scores on the closed unit interval", "[ingestion]") {
  const DetectionMap dets = parse_detections(R"({"detections": {
      "img_0": [{"bbox": [0, 0, 10, 20], "score": 1.0},
                {"bbox": [30, 0, 10, 20], "score": 0.0}],
      "img_1": []}})");
  REQUIRE(dets.size() == 2);
  REQUIRE(dets.at("img_0").size() == 2);
  CHECK(dets.at("img_0")[0].score == 1.0);
  CHECK(dets.at("img_1").empty());
}

TEST_CASE("parse_detections rejects bad documents", "[ingestion]") {
  CHECK_THROWS_AS(parse_detections("nope"), ParseError);
  CHECK_THROWS_AS(parse_detections(R"({"detections": []})"), ParseError);
  CHECK_THROWS_AS(parse_detections(R"({"detections": {"a": [{"bbox": [0, 0, 1, 1]}]}})"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_detections(R"({"detections": {"a": [{"bbox": [0, 0, 1, 1], "score": 1.5}]}})"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_detections(R"({"detections": {"a": [{"bbox": [0, 0, 1, 1], "score": -0.1}]}})"),
      ValidationError);
}

TEST_CASE("detection round trip is stable", "[ingestion]") {
  const DetectionMap dets = parse_detections(R"({"detections": {
      "z": [{"bbox": [5, 6, 7, 8], "score": 0.25}],
      "a": [{"bbox": [0, 0, 10, 20], "score": 0.75}]}})");
  const std::string first = serialize_detections(dets);
  const std::string second = serialize_detections(parse_detections(first));
  CHECK(first == second);
}

TEST_CASE("filter_instances keeps only boxes strictly taller than the floor", "[ingestion]") {
  Dataset ds;
  ImageRecord img;
  img.image_id = "a";
  img.width = 640;
  img.height = 480;
  for (double h : {59.0, 60.0, 61.0}) {
    PedestrianGT ped;
    ped.id = "h" + std::to_string(static_cast<int>(h));
    ped.bbox = BBox{0, 0, 20, h};
    ped.orientation_deg = 0.0;
    img.pedestrians.push_back(ped);
  }
  ds.images.push_back(img);

  const FilterConfig cfg;  // min_height_px = 60
  const FilterResult res = filter_instances(ds, cfg);
  CHECK(res.removed == 2);
  REQUIRE(res.dataset.images.size() == 1);
  REQUIRE(res.dataset.images[0].pedestrians.size() == 1);
  CHECK(res.dataset.images[0].pedestrians[0].id == "h61");

  SECTION("filtering is idempotent") {
    const FilterResult again = filter_instances(res.dataset, cfg);
    CHECK(again.removed == 0);
    CHECK(serialize_ground_truth(again.dataset) == serialize_ground_truth(res.dataset));
  }
  SECTION("emptied images are retained") {
    FilterConfig tall;
    tall.min_height_px = 100.0;
    const FilterResult none = filter_instances(ds, tall);
    CHECK(none.removed == 3);
    REQUIRE(none.dataset.images.size() == 1);
    CHECK(none.dataset.images[0].pedestrians.empty());
  }
}

TEST_CASE("size_class splits at the configured boundary", "[ingestion]") {
  const FilterConfig cfg;  // size_split_px = 110
  PedestrianGT ped;
  ped.bbox = BBox{0, 0, 20, 100};
  CHECK(size_class(ped, cfg) == SizeClass::Small);
  ped.bbox.h = 110;
  CHECK(size_class(ped, cfg) == SizeClass::Large);
  ped.bbox.h = 109.999;
  CHECK(size_class(ped, cfg) == SizeClass::Small);
}

TEST_CASE("filter config validation", "[ingestion]") {
  FilterConfig cfg;
  cfg.min_height_px = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = FilterConfig{};
  cfg.size_split_px = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
