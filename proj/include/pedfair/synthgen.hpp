#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pedfair/errors.hpp"
#include "pedfair/ingestion.hpp"
#include "pedfair/pose_attributes.hpp"
#include "pedfair/types.hpp"

// Synthetic scene generator: stratified ground truth with known pose labels
// plus a planted detection stream with controlled miss rates. Ground-truth
// generation is RNG-free (a spec always yields the same scene); all
// randomness (miss selection, scores) lives in detection planting, so the
// planted misses are recorded nowhere except the detection stream itself.

namespace pedfair::synth {

// splitmix64 (Steele, Lea & Flood 2014). Constants are the canonical ones:
// increment 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1): top 53 bits scaled by 2^-53.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); rejection sampling keeps it unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Scene specification.
// ---------------------------------------------------------------------------

struct Stratum {
  std::string name;
  std::size_t count = 0;
  LegStatus legs = LegStatus::Aligned;
  ElbowStatus elbows = ElbowStatus::Straight;
  ViewClass view = ViewClass::Front;
  SizeClass size = SizeClass::Large;
  std::vector<Joint> occluded_joints;
  std::optional<double> height_px;        // default derives from `size`
  std::optional<std::size_t> miss_count;  // exact misses, or:
  std::optional<double> miss_prob;        // i.i.d. miss probability
  std::optional<double> score;            // fixed detection score
  bool random_scores = false;             // uniform [0, 1) per detection
};

struct SynthSpec {
  std::uint64_t seed = 0;
  int image_width = 1920;
  int image_height = 1080;
  double default_score = 1.0;
  std::size_t fp_per_image = 0;  // planted spurious detections per image
  double fp_score = 0.5;
  // Plant poses 0.5 degrees from each classifier threshold and orientations
  // on the exact view-bin boundaries instead of the comfortable defaults.
  bool edge_margins = false;
  AngleThresholds angles;
  std::vector<Stratum> strata;

  std::size_t total_instances() const {
    std::size_t n = 0;
    for (const auto& s : strata) n += s.count;
    return n;
  }

  void validate() const;
};

// Default rendered heights per size class (the default filter splits small
// from large at 110 px and drops anything at or under 60 px).
inline constexpr double kSmallHeightPx = 80.0;
inline constexpr double kLargeHeightPx = 160.0;

namespace detail_synth {

// Skeleton template in unit coordinates: y-down, origin at mid-hip, total
// keypoint extent x in [-18, 18], y in [-82, 90].
inline constexpr double kUnitMinX = -22.0;  // bbox adds margin around joints
inline constexpr double kUnitMinY = -88.0;
inline constexpr double kUnitW = 44.0;
inline constexpr double kUnitH = 184.0;
inline constexpr double kCellPad = 16.0;  // spacing between grid cells
inline constexpr double kCellInset = 8.0;

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

inline LegStatus legs_from_label(std::string_view s) {
  if (s == "aligned") return LegStatus::Aligned;
  if (s == "non_aligned") return LegStatus::NonAligned;
  throw SpecError("synth spec: unknown legs label '" + std::string(s) + "'");
}

inline ElbowStatus elbows_from_label(std::string_view s) {
  if (s == "bent") return ElbowStatus::Bent;
  if (s == "straight") return ElbowStatus::Straight;
  throw SpecError("synth spec: unknown elbows label '" + std::string(s) + "'");
}

inline ViewClass view_from_label(std::string_view s) {
  if (s == "front") return ViewClass::Front;
  if (s == "lateral") return ViewClass::Lateral;
  if (s == "back") return ViewClass::Back;
  throw SpecError("synth spec: unknown view label '" + std::string(s) + "'");
}

inline SizeClass size_from_label(std::string_view s) {
  if (s == "small") return SizeClass::Small;
  if (s == "large") return SizeClass::Large;
  throw SpecError("synth spec: unknown size label '" + std::string(s) + "'");
}

inline std::string zpad(std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return digits;
}

}  // namespace detail_synth

// Keypoints for one template pose, in unit coordinates. Default poses sit
// at least 5 degrees clear of every threshold; edge poses sit 0.5 degrees
// from the leg/elbow thresholds (on the labeled side).
inline KeypointMap skeleton_template(LegStatus legs, ElbowStatus elbows,
                                     const AngleThresholds& th, bool edge_margins) {
  using detail_synth::kDegToRad;
  KeypointMap kps;
  auto put = [&kps](Joint j, double x, double y) {
    kps.set(Keypoint{j, x, y, false});
  };

  put(Joint::Nose, 0.0, -78.0);
  put(Joint::EyeLeft, -4.0, -82.0);
  put(Joint::EyeRight, 4.0, -82.0);
  put(Joint::EarLeft, -8.0, -79.0);
  put(Joint::EarRight, 8.0, -79.0);
  put(Joint::ShoulderLeft, -16.0, -55.0);
  put(Joint::ShoulderRight, 16.0, -55.0);
  put(Joint::HipLeft, -10.0, 0.0);
  put(Joint::HipRight, 10.0, 0.0);
  put(Joint::AnkleLeft, -10.0, 90.0);
  put(Joint::AnkleRight, 10.0, 90.0);

  // Legs: symmetric knee bend of 2*atan(d/45) degrees; ankles stay under
  // the hips so the hip-ankle separation is always zero.
  double knee_off_l = 0.0;
  double knee_off_r = 0.0;
  if (edge_margins) {
    const double target =
        legs == LegStatus::Aligned ? th.knee_flexion_deg - 0.5 : th.knee_flexion_deg + 0.5;
    const double d = 45.0 * std::tan(0.5 * target * kDegToRad);
    knee_off_l = d;
    if (legs == LegStatus::Aligned) knee_off_r = d;  // both knees stay legal
  } else if (legs == LegStatus::NonAligned) {
    knee_off_l = 10.0;  // 25.06 degrees of flexion, 13 degrees past default gamma
  }
  put(Joint::KneeLeft, -10.0 + knee_off_l, 45.0);
  put(Joint::KneeRight, 10.0 - knee_off_r, 45.0);

  // Arms: straight arms are collinear; bent forearms fold inward/upward.
  if (edge_margins) {
    // Vertical upper arm, forearm rotated to exactly threshold -/+ 0.5 deg.
    const double psi =
        (elbows == ElbowStatus::Bent ? th.elbow_bend_deg + 0.5 : th.elbow_bend_deg - 0.5) *
        kDegToRad;
    const double fx = 30.0 * std::sin(psi);
    const double fy = 30.0 * std::cos(psi);
    put(Joint::ElbowLeft, -16.0, -25.0);
    put(Joint::ElbowRight, 16.0, -25.0);
    put(Joint::WristLeft, -16.0 + fx, -25.0 + fy);
    put(Joint::WristRight, 16.0 - fx, -25.0 + fy);
  } else {
    put(Joint::ElbowLeft, -17.0, -25.0);
    put(Joint::ElbowRight, 17.0, -25.0);
    if (elbows == ElbowStatus::Bent) {
      put(Joint::WristLeft, 13.0, -30.0);    // 101.4 degrees at the elbow
      put(Joint::WristRight, -13.0, -30.0);
    } else {
      put(Joint::WristLeft, -18.0, 5.0);     // collinear with the upper arm
      put(Joint::WristRight, 18.0, 5.0);
    }
  }
  return kps;
}

// Orientation angle that lands in the requested view bin. Edge mode picks
// values on the exact bin boundaries.
inline double orientation_for(ViewClass view, bool edge_margins) {
  switch (view) {
    case ViewClass::Front: return edge_margins ? 60.0 : 0.0;
    case ViewClass::Lateral: return edge_margins ? 299.9 : 90.0;
    case ViewClass::Back: return edge_margins ? 240.0 : 180.0;
  }
  return 0.0;
}

inline void SynthSpec::validate() const {
  angles.validate();
  if (image_width <= 0 || image_height <= 0) {
    throw SpecError("synth spec: image dimensions must be positive");
  }
  if (!(default_score >= 0.0 && default_score <= 1.0)) {
    throw SpecError("synth spec: default_score must lie in [0, 1]");
  }
  if (!(fp_score >= 0.0 && fp_score <= 1.0)) {
    throw SpecError("synth spec: fp_score must lie in [0, 1]");
  }
  if (strata.empty()) throw SpecError("synth spec: at least one stratum required");
  for (const auto& s : strata) {
    const std::string where = "synth spec stratum '" + s.name + "'";
    if (s.name.empty()) throw SpecError("synth spec: stratum name must be non-empty");
    if (s.miss_count && s.miss_prob) {
      throw SpecError(where + ": miss_count and miss_prob are mutually exclusive");
    }
    if (s.miss_count && *s.miss_count > s.count) {
      throw SpecError(where + ": miss_count exceeds count");
    }
    if (s.miss_prob && !(*s.miss_prob >= 0.0 && *s.miss_prob <= 1.0)) {
      throw SpecError(where + ": miss_prob must lie in [0, 1]");
    }
    if (s.score && !(*s.score >= 0.0 && *s.score <= 1.0)) {
      throw SpecError(where + ": score must lie in [0, 1]");
    }
    if (s.height_px && !(*s.height_px > 0.0)) {
      throw SpecError(where + ": height_px must be positive");
    }
    std::vector<Joint> seen = s.occluded_joints;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw SpecError(where + ": duplicate occluded joint");
    }
  }
  if (total_instances() == 0) throw SpecError("synth spec: zero total instances");
}

inline SynthSpec parse_synth_spec(std::string_view raw) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("synth spec: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("synth spec: root must be an object");

  SynthSpec spec;
  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_integer()) throw ParseError("synth spec: 'seed' must be an integer");
    spec.seed = it->get<std::uint64_t>();
  }
  if (auto it = root.find("image"); it != root.end()) {
    spec.image_width = detail::require_int(*it, "width", "synth spec image");
    spec.image_height = detail::require_int(*it, "height", "synth spec image");
  }
  if (auto it = root.find("default_score"); it != root.end()) {
    spec.default_score = it->get<double>();
  }
  if (auto it = root.find("false_positives_per_image"); it != root.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw ParseError("synth spec: 'false_positives_per_image' must be a non-negative integer");
    }
    spec.fp_per_image = it->get<std::size_t>();
  }
  if (auto it = root.find("false_positive_score"); it != root.end()) {
    spec.fp_score = it->get<double>();
  }
  if (auto it = root.find("edge_margins"); it != root.end()) {
    if (!it->is_boolean()) throw ParseError("synth spec: 'edge_margins' must be a boolean");
    spec.edge_margins = it->get<bool>();
  }
  if (auto it = root.find("angles"); it != root.end()) {
    if (auto f = it->find("knee_flexion_deg"); f != it->end()) {
      spec.angles.knee_flexion_deg = f->get<double>();
    }
    if (auto f = it->find("hip_ankle_sep_deg"); f != it->end()) {
      spec.angles.hip_ankle_sep_deg = f->get<double>();
    }
    if (auto f = it->find("elbow_bend_deg"); f != it->end()) {
      spec.angles.elbow_bend_deg = f->get<double>();
    }
  }
  const json& jstrata = detail::require_field(root, "strata", "synth spec");
  if (!jstrata.is_array()) throw ParseError("synth spec: 'strata' must be an array");
  for (const auto& js : jstrata) {
    Stratum s;
    s.name = detail::require_string(js, "name", "synth spec stratum");
    const std::string where = "synth spec stratum '" + s.name + "'";
    const int count = detail::require_int(js, "count", where);
    if (count < 0) throw SpecError(where + ": count must be non-negative");
    s.count = static_cast<std::size_t>(count);
    if (auto it = js.find("legs"); it != js.end()) {
      s.legs = detail_synth::legs_from_label(it->get<std::string>());
    }
    if (auto it = js.find("elbows"); it != js.end()) {
      s.elbows = detail_synth::elbows_from_label(it->get<std::string>());
    }
    if (auto it = js.find("view"); it != js.end()) {
      s.view = detail_synth::view_from_label(it->get<std::string>());
    }
    if (auto it = js.find("size"); it != js.end()) {
      s.size = detail_synth::size_from_label(it->get<std::string>());
    }
    if (auto it = js.find("occluded_joints"); it != js.end()) {
      if (!it->is_array()) throw ParseError(where + ": 'occluded_joints' must be an array");
      for (const auto& jj : *it) {
        const auto joint = joint_from_string(jj.get<std::string>());
        if (!joint) throw SpecError(where + ": unknown joint '" + jj.get<std::string>() + "'");
        s.occluded_joints.push_back(*joint);
      }
    }
    if (auto it = js.find("height_px"); it != js.end()) s.height_px = it->get<double>();
    if (auto it = js.find("miss_count"); it != js.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw ParseError(where + ": 'miss_count' must be a non-negative integer");
      }
      s.miss_count = it->get<std::size_t>();
    }
    if (auto it = js.find("miss_prob"); it != js.end()) s.miss_prob = it->get<double>();
    if (auto it = js.find("score"); it != js.end()) s.score = it->get<double>();
    if (auto it = js.find("random_scores"); it != js.end()) {
      if (!it->is_boolean()) throw ParseError(where + ": 'random_scores' must be a boolean");
      s.random_scores = it->get<bool>();
    }
    spec.strata.push_back(std::move(s));
  }
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Scene generation.
// ---------------------------------------------------------------------------

struct SceneOutput {
  Dataset dataset;
  // Stratum index per pedestrian, in global generation order.
  std::vector<std::size_t> stratum_of_instance;
};

namespace detail_synth {

struct GridLayout {
  double cell_w = 0.0;
  double cell_h = 0.0;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t gt_slots = 0;  // cells per image left for ground truth
};

inline double stratum_height(const Stratum& s) {
  if (s.height_px) return *s.height_px;
  return s.size == SizeClass::Small ? kSmallHeightPx : kLargeHeightPx;
}

inline GridLayout plan_grid(const SynthSpec& spec) {
  double max_w = 0.0;
  double max_h = 0.0;
  for (const auto& s : spec.strata) {
    const double scale = stratum_height(s) / kUnitH;
    max_w = std::max(max_w, kUnitW * scale);
    max_h = std::max(max_h, kUnitH * scale);
  }
  GridLayout grid;
  grid.cell_w = max_w + kCellPad;
  grid.cell_h = max_h + kCellPad;
  grid.cols = static_cast<std::size_t>(spec.image_width / grid.cell_w);
  grid.rows = static_cast<std::size_t>(spec.image_height / grid.cell_h);
  const std::size_t capacity = grid.cols * grid.rows;
  if (capacity <= spec.fp_per_image) {
    throw SpecError("synth spec: image too small for the requested layout");
  }
  grid.gt_slots = capacity - spec.fp_per_image;
  return grid;
}

inline BBox cell_bbox(const GridLayout& grid, std::size_t cell, double w, double h) {
  const std::size_t col = cell % grid.cols;
  const std::size_t row = cell / grid.cols;
  return BBox{static_cast<double>(col) * grid.cell_w + kCellInset,
              static_cast<double>(row) * grid.cell_h + kCellInset, w, h};
}

}  // namespace detail_synth

inline SceneOutput generate_scene(const SynthSpec& spec) {
  spec.validate();
  const detail_synth::GridLayout grid = detail_synth::plan_grid(spec);
  const std::size_t total = spec.total_instances();

  SceneOutput scene;
  std::size_t global_idx = 0;
  ImageRecord* image = nullptr;
  for (std::size_t si = 0; si < spec.strata.size(); ++si) {
    const Stratum& s = spec.strata[si];
    const double scale = detail_synth::stratum_height(s) / detail_synth::kUnitH;
    const KeypointMap unit_kps =
        skeleton_template(s.legs, s.elbows, spec.angles, spec.edge_margins);
    // A template that does not classify to its own labels under these
    // thresholds cannot be satisfied by any geometry we emit (e.g. a
    // non-aligned stratum with the knee-flexion threshold at 180 degrees).
    if (classify_legs(unit_kps, spec.angles) != s.legs ||
        classify_elbows(unit_kps, spec.angles) != s.elbows ||
        classify_view(orientation_for(s.view, spec.edge_margins)) != s.view) {
      throw SpecError("synth spec stratum '" + s.name +
                      "': labels are unsatisfiable under the configured thresholds");
    }
    for (std::size_t k = 0; k < s.count; ++k, ++global_idx) {
      const std::size_t slot = global_idx % grid.gt_slots;
      if (slot == 0) {
        scene.dataset.images.emplace_back();
        image = &scene.dataset.images.back();
        image->image_id = "img_" + detail_synth::zpad(scene.dataset.images.size() - 1, 6);
        image->width = spec.image_width;
        image->height = spec.image_height;
      }
      PedestrianGT ped;
      ped.id = "ped_" + detail_synth::zpad(global_idx, 7);
      ped.bbox = detail_synth::cell_bbox(grid, slot, detail_synth::kUnitW * scale,
                                         detail_synth::kUnitH * scale);
      ped.orientation_deg = orientation_for(s.view, spec.edge_margins);
      for (Joint j : kAllJoints) {
        const Keypoint* kp = unit_kps.find(j);
        Keypoint placed = *kp;
        placed.x = ped.bbox.x + (kp->x - detail_synth::kUnitMinX) * scale;
        placed.y = ped.bbox.y + (kp->y - detail_synth::kUnitMinY) * scale;
        placed.occluded = std::find(s.occluded_joints.begin(), s.occluded_joints.end(), j) !=
                          s.occluded_joints.end();
        ped.keypoints.set(placed);
      }
      image->pedestrians.push_back(std::move(ped));
      scene.stratum_of_instance.push_back(si);
    }
  }
  (void)total;
  return scene;
}

// Detection stream for a generated scene: every non-missed pedestrian gets
// one detection with the exact ground-truth box (IoU 1); each image also
// gets the configured number of spurious boxes in its reserved grid cells.
inline DetectionMap plant_detections(const SceneOutput& scene, const SynthSpec& spec) {
  spec.validate();
  if (scene.stratum_of_instance.size() != scene.dataset.pedestrian_count()) {
    throw ConsistencyError("plant_detections: scene instance bookkeeping is inconsistent");
  }
  const detail_synth::GridLayout grid = detail_synth::plan_grid(spec);

  // One child RNG stream per stratum, derived from the master seed in
  // stratum order, so planting is independent of any interleaving.
  SplitMix64 master(spec.seed);
  std::vector<std::uint64_t> child_seed(spec.strata.size());
  for (auto& cs : child_seed) cs = master.next();

  // Per-stratum instance tallies, in global order.
  std::vector<std::vector<std::size_t>> members(spec.strata.size());
  for (std::size_t g = 0; g < scene.stratum_of_instance.size(); ++g) {
    members[scene.stratum_of_instance[g]].push_back(g);
  }

  const std::size_t total = scene.stratum_of_instance.size();
  std::vector<bool> missed(total, false);
  std::vector<double> det_score(total, spec.default_score);
  for (std::size_t si = 0; si < spec.strata.size(); ++si) {
    const Stratum& s = spec.strata[si];
    if (members[si].size() != s.count) {
      throw ConsistencyError("plant_detections: scene does not match the spec strata");
    }
    SplitMix64 rng(child_seed[si]);
    if (s.miss_count) {
      // Partial Fisher-Yates: the first miss_count positions after shuffling
      // are the missed instances. Exact planted counts, uniform choice.
      std::vector<std::size_t> position(s.count);
      std::iota(position.begin(), position.end(), std::size_t{0});
      for (std::size_t i = 0; i < *s.miss_count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(s.count - i));
        std::swap(position[i], position[j]);
        missed[members[si][position[i]]] = true;
      }
    } else if (s.miss_prob) {
      for (std::size_t local = 0; local < s.count; ++local) {
        if (rng.next_double() < *s.miss_prob) missed[members[si][local]] = true;
      }
    }
    for (std::size_t local = 0; local < s.count; ++local) {
      const std::size_t g = members[si][local];
      if (missed[g]) continue;
      det_score[g] = s.random_scores ? rng.next_double() : s.score.value_or(spec.default_score);
    }
  }

  DetectionMap out;
  std::size_t global_idx = 0;
  for (const auto& img : scene.dataset.images) {
    std::vector<DetectionRecord> records;
    for (const auto& ped : img.pedestrians) {
      if (!missed[global_idx]) {
        records.push_back(DetectionRecord{ped.bbox, det_score[global_idx]});
      }
      ++global_idx;
    }
    for (std::size_t f = 0; f < spec.fp_per_image; ++f) {
      const std::size_t cell = grid.gt_slots + f;
      records.push_back(DetectionRecord{
          detail_synth::cell_bbox(grid, cell, grid.cell_w * 0.35, grid.cell_h * 0.6),
          spec.fp_score});
    }
    out.emplace(img.image_id, std::move(records));
  }
  return out;
}

// Human-auditable record of what was generated: the strata and every
// instance's labels. Deliberately silent about which instances were missed.
inline std::string manifest_json(const SynthSpec& spec, const SceneOutput& scene) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json root;
  root["seed"] = spec.seed;
  root["image"] = {{"width", spec.image_width}, {"height", spec.image_height}};
  root["edge_margins"] = spec.edge_margins;
  root["false_positives_per_image"] = spec.fp_per_image;
  root["strata"] = ordered_json::array();
  for (const auto& s : spec.strata) {
    ordered_json js;
    js["name"] = s.name;
    js["count"] = s.count;
    js["legs"] = std::string(to_label(s.legs));
    js["elbows"] = std::string(to_label(s.elbows));
    js["view"] = std::string(to_label(s.view));
    js["size"] = std::string(to_label(s.size));
    ordered_json occ = ordered_json::array();
    for (Joint j : s.occluded_joints) occ.push_back(std::string(to_string(j)));
    js["occluded_joints"] = std::move(occ);
    root["strata"].push_back(std::move(js));
  }
  root["instances"] = ordered_json::array();
  std::size_t global_idx = 0;
  for (const auto& img : scene.dataset.images) {
    for (const auto& ped : img.pedestrians) {
      const Stratum& s = spec.strata[scene.stratum_of_instance[global_idx]];
      ordered_json ji;
      ji["id"] = ped.id;
      ji["image_id"] = img.image_id;
      ji["stratum"] = s.name;
      root["instances"].push_back(std::move(ji));
      ++global_idx;
    }
  }
  return root.dump(2) + "\n";
}

}  // namespace pedfair::synth
