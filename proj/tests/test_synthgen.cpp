#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pedfair/ingestion.hpp"
#include "pedfair/synthgen.hpp"

using namespace pedfair;
using namespace pedfair::synth;

namespace {

SynthSpec two_strata_spec() {
  SynthSpec spec;
  spec.seed = 7;
  Stratum a;
  a.name = "aligned_full";
  a.count = 120;
  a.legs = LegStatus::Aligned;
  a.miss_count = 30;
  Stratum b;
  b.name = "offset_small";
  b.count = 80;
  b.legs = LegStatus::NonAligned;
  b.elbows = ElbowStatus::Bent;
  b.view = ViewClass::Lateral;
  b.size = SizeClass::Small;
  b.occluded_joints = {Joint::AnkleLeft, Joint::AnkleRight};
  b.miss_count = 20;
  spec.strata = {a, b};
  return spec;
}

// Misses are observable only as absent detections; a pedestrian is detected
// iff some record carries its exact box (planted detections copy GT boxes).
std::vector<std::size_t> per_stratum_misses(const SceneOutput& scene, const SynthSpec& spec,
                                            const DetectionMap& dets) {
  std::vector<std::size_t> misses(spec.strata.size(), 0);
  std::size_t g = 0;
  for (const auto& img : scene.dataset.images) {
    const auto& records = dets.at(img.image_id);
    for (const auto& ped : img.pedestrians) {
      const bool found = std::any_of(records.begin(), records.end(),
                                     [&](const DetectionRecord& r) { return r.bbox == ped.bbox; });
      if (!found) ++misses[scene.stratum_of_instance[g]];
      ++g;
    }
  }
  return misses;
}

}  // namespace

TEST_CASE("splitmix64 stream behaves", "[synthgen]") {
  SplitMix64 a(42);
  SplitMix64 b(42);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(a.next() == b.next());
  }
  SplitMix64 c(42), d(43);
  CHECK(c.next() != d.next());

  SplitMix64 r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.next_below(10) < 10);
  }
}

TEST_CASE("skeleton templates classify to their own labels", "[synthgen]") {
  const AngleThresholds th;
  for (bool edge : {false, true}) {
    for (LegStatus legs : {LegStatus::Aligned, LegStatus::NonAligned}) {
      for (ElbowStatus elbows : {ElbowStatus::Bent, ElbowStatus::Straight}) {
        const KeypointMap kps = skeleton_template(legs, elbows, th, edge);
        INFO("edge=" << edge << " legs=" << static_cast<int>(legs)
                     << " elbows=" << static_cast<int>(elbows));
        CHECK(classify_legs(kps, th) == legs);
        CHECK(classify_elbows(kps, th) == elbows);
        CHECK(kps.size() == kJointCount);
      }
    }
  }
}

TEST_CASE("orientation_for lands in the requested bin", "[synthgen]") {
  for (bool edge : {false, true}) {
    for (ViewClass view : {ViewClass::Front, ViewClass::Lateral, ViewClass::Back}) {
      CHECK(classify_view(orientation_for(view, edge)) == view);
    }
  }
}

TEST_CASE("parse_synth_spec reads the full schema", "[synthgen]") {
  const SynthSpec spec = parse_synth_spec(R"({
    "seed": 11,
    "image": {"width": 800, "height": 600},
    "default_score": 0.9,
    "false_positives_per_image": 2,
    "false_positive_score": 0.4,
    "edge_margins": true,
    "angles": {"knee_flexion_deg": 15, "hip_ankle_sep_deg": 9, "elbow_bend_deg": 85},
    "strata": [
      {"name": "s1", "count": 10, "legs": "non_aligned", "elbows": "bent",
       "view": "back", "size": "small", "occluded_joints": ["nose", "ankle_left"],
       "miss_count": 3, "score": 0.8},
      {"name": "s2", "count": 5, "miss_prob": 0.5, "random_scores": true}
    ]})");
  CHECK(spec.seed == 11);
  CHECK(spec.image_width == 800);
  CHECK(spec.default_score == 0.9);
  CHECK(spec.fp_per_image == 2);
  CHECK(spec.fp_score == 0.4);
  CHECK(spec.edge_margins);
  CHECK(spec.angles.knee_flexion_deg == 15.0);
  REQUIRE(spec.strata.size() == 2);
  CHECK(spec.strata[0].legs == LegStatus::NonAligned);
  CHECK(spec.strata[0].view == ViewClass::Back);
  CHECK(spec.strata[0].size == SizeClass::Small);
  CHECK(spec.strata[0].occluded_joints ==
        std::vector<Joint>{Joint::Nose, Joint::AnkleLeft});
  CHECK(spec.strata[0].miss_count == 3);
  CHECK(spec.strata[0].score == 0.8);
  CHECK(spec.strata[1].miss_prob == 0.5);
  CHECK(spec.strata[1].random_scores);
  CHECK(spec.total_instances() == 15);
}

TEST_CASE("parse_synth_spec rejects bad documents", "[synthgen]") {
  CHECK_THROWS_AS(parse_synth_spec("{"), ParseError);
  CHECK_THROWS_AS(parse_synth_spec("{}"), ParseError);  // strata required
  CHECK_THROWS_AS(parse_synth_spec(R"({"strata": []})"), SpecError);
  CHECK_THROWS_AS(
      parse_synth_spec(R"({"strata": [{"name": "s", "count": 1, "legs": "crossed"}]})"),
      SpecError);
  CHECK_THROWS_AS(
      parse_synth_spec(R"({"strata": [{"name": "s", "count": 2, "miss_count": 3}]})"),
      SpecError);
  CHECK_THROWS_AS(parse_synth_spec(
                      R"({"strata": [{"name": "s", "count": 2, "miss_count": 1, "miss_prob": 0.5}]})"),
                  SpecError);
  CHECK_THROWS_AS(parse_synth_spec(R"({"strata": [{"name": "s", "count": 0}]})"), SpecError);
  CHECK_THROWS_AS(
      parse_synth_spec(R"({"strata": [{"name": "s", "count": 1, "miss_prob": 1.5}]})"),
      SpecError);
  CHECK_THROWS_AS(
      parse_synth_spec(
          R"({"strata": [{"name": "s", "count": 1, "occluded_joints": ["nose", "nose"]}]})"),
      SpecError);
}

TEST_CASE("generate_scene lays out the requested population", "[synthgen]") {
  const SynthSpec spec = two_strata_spec();
  const SceneOutput scene = generate_scene(spec);

  CHECK(scene.dataset.pedestrian_count() == 200);
  CHECK(scene.stratum_of_instance.size() == 200);
  // Strata are emitted in order.
  CHECK(scene.stratum_of_instance.front() == 0);
  CHECK(scene.stratum_of_instance.back() == 1);
  CHECK(std::is_sorted(scene.stratum_of_instance.begin(), scene.stratum_of_instance.end()));

  SECTION("instances carry their stratum's labels") {
    const FilterConfig filter;
    std::size_t g = 0;
    for (const auto& img : scene.dataset.images) {
      for (const auto& ped : img.pedestrians) {
        const Stratum& s = spec.strata[scene.stratum_of_instance[g]];
        const AttributeSet attrs = annotate(ped, spec.angles, filter);
        REQUIRE(attrs.legs == s.legs);
        REQUIRE(attrs.elbows == s.elbows);
        REQUIRE(attrs.view == s.view);
        REQUIRE(attrs.size == s.size);
        for (Joint j : kAllJoints) {
          const bool should_occlude =
              std::find(s.occluded_joints.begin(), s.occluded_joints.end(), j) !=
              s.occluded_joints.end();
          REQUIRE(attrs.joints[index_of(j)] ==
                  (should_occlude ? Visibility::Occluded : Visibility::Visible));
        }
        ++g;
      }
    }
  }
  SECTION("ids are unique and boxes stay inside the frame") {
    std::set<std::string> ped_ids;
    std::set<std::string> image_ids;
    for (const auto& img : scene.dataset.images) {
      CHECK(image_ids.insert(img.image_id).second);
      for (const auto& ped : img.pedestrians) {
        CHECK(ped_ids.insert(ped.id).second);
        CHECK(ped.bbox.x >= 0.0);
        CHECK(ped.bbox.y >= 0.0);
        CHECK(ped.bbox.x2() <= spec.image_width);
        CHECK(ped.bbox.y2() <= spec.image_height);
      }
    }
    CHECK(ped_ids.size() == 200);
  }
  SECTION("the generated ground truth survives a serialization round trip") {
    const std::string raw = serialize_ground_truth(scene.dataset);
    CHECK(parse_ground_truth(raw) == scene.dataset);
  }
  SECTION("generation is pure") {
    const SceneOutput again = generate_scene(spec);
    CHECK(again.dataset == scene.dataset);
    CHECK(again.stratum_of_instance == scene.stratum_of_instance);
  }
}

TEST_CASE("generate_scene rejects unsatisfiable strata", "[synthgen]") {
  SynthSpec spec = two_strata_spec();
  spec.angles.knee_flexion_deg = 180.0;  // nothing can flex past this
  CHECK_THROWS_AS(generate_scene(spec), SpecError);

  SynthSpec tiny = two_strata_spec();
  tiny.image_width = 10;
  tiny.image_height = 10;
  CHECK_THROWS_AS(generate_scene(tiny), SpecError);
}

TEST_CASE("plant_detections plants exact miss counts", "[synthgen]") {
  const SynthSpec spec = two_strata_spec();
  const SceneOutput scene = generate_scene(spec);
  const DetectionMap dets = plant_detections(scene, spec);

  const auto misses = per_stratum_misses(scene, spec, dets);
  CHECK(misses == std::vector<std::size_t>{30, 20});

  std::size_t n_dets = 0;
  for (const auto& [id, records] : dets) {
    (void)id;
    n_dets += records.size();
  }
  CHECK(n_dets == 200 - 50);

  SECTION("planting is deterministic in the seed") {
    CHECK(plant_detections(scene, spec) == dets);
    SynthSpec reseeded = spec;
    reseeded.seed = 8;
    const DetectionMap other = plant_detections(scene, reseeded);
    CHECK(per_stratum_misses(scene, reseeded, other) == misses);
    CHECK(other != dets);  // same counts, different victims
  }
  SECTION("surviving detections carry the configured score") {
    for (const auto& [id, records] : dets) {
      (void)id;
      for (const auto& r : records) CHECK(r.score == spec.default_score);
    }
  }
}

TEST_CASE("plant_detections honors probability and score modes", "[synthgen]") {
  SynthSpec spec;
  spec.seed = 3;
  Stratum all;
  all.name = "all";
  all.count = 50;
  all.miss_prob = 0.0;
  Stratum none;
  none.name = "none";
  none.count = 50;
  none.miss_prob = 1.0;
  Stratum scored;
  scored.name = "scored";
  scored.count = 50;
  scored.score = 0.33;
  Stratum randomized;
  randomized.name = "randomized";
  randomized.count = 50;
  randomized.random_scores = true;
  spec.strata = {all, none, scored, randomized};

  const SceneOutput scene = generate_scene(spec);
  const DetectionMap dets = plant_detections(scene, spec);
  CHECK(per_stratum_misses(scene, spec, dets) == std::vector<std::size_t>{0, 50, 0, 0});

  std::size_t fixed_scores = 0;
  std::set<double> random_scores;
  for (const auto& [id, records] : dets) {
    (void)id;
    for (const auto& r : records) {
      if (r.score == 0.33) ++fixed_scores;
      if (r.score != 0.33 && r.score != spec.default_score) random_scores.insert(r.score);
    }
  }
  CHECK(fixed_scores == 50);
  CHECK(random_scores.size() == 50);  // uniform draws collide with zero chance
}

TEST_CASE("plant_detections adds spurious boxes per image", "[synthgen]") {
  SynthSpec spec = two_strata_spec();
  spec.fp_per_image = 2;
  spec.fp_score = 0.25;
  const SceneOutput scene = generate_scene(spec);
  const DetectionMap dets = plant_detections(scene, spec);

  for (const auto& img : scene.dataset.images) {
    const auto& records = dets.at(img.image_id);
    const std::size_t spurious = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(),
                      [&](const DetectionRecord& r) { return r.score == 0.25; }));
    CHECK(spurious == 2);
    // Spurious boxes overlap no ground truth.
    for (const auto& r : records) {
      if (r.score != 0.25) continue;
      for (const auto& ped : img.pedestrians) {
        CHECK(iou(r.bbox, ped.bbox) == 0.0);
      }
    }
  }
}

TEST_CASE("manifest_json records strata and instances", "[synthgen]") {
  const SynthSpec spec = two_strata_spec();
  const SceneOutput scene = generate_scene(spec);
  const auto manifest = nlohmann::json::parse(manifest_json(spec, scene));

  CHECK(manifest["seed"] == 7);
  REQUIRE(manifest["strata"].size() == 2);
  CHECK(manifest["strata"][0]["name"] == "aligned_full");
  CHECK(manifest["strata"][1]["legs"] == "non_aligned");
  REQUIRE(manifest["instances"].size() == 200);
  CHECK(manifest["instances"][0]["stratum"] == "aligned_full");
  // No field leaks which instances were missed.
  for (const auto& inst : manifest["instances"]) {
    CHECK(inst.contains("id"));
    CHECK(inst.contains("image_id"));
    CHECK(inst.contains("stratum"));
    CHECK(inst.size() == 3);
  }
}
