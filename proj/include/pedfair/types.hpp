#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pedfair/errors.hpp"

namespace pedfair {

// ---------------------------------------------------------------------------
// Plane geometry primitives (y grows downward, as in image coordinates).
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Axis-aligned box, origin at the top-left corner.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  constexpr double x2() const { return x + w; }
  constexpr double y2() const { return y + h; }
  constexpr double area() const { return w * h; }
  friend constexpr bool operator==(const BBox&, const BBox&) = default;
};

// ---------------------------------------------------------------------------
// Skeleton vocabulary: the 17 named joints, in canonical order.
// ---------------------------------------------------------------------------

enum class Joint : std::uint8_t {
  Nose,
  EyeLeft,
  EyeRight,
  EarLeft,
  EarRight,
  ShoulderLeft,
  ShoulderRight,
  ElbowLeft,
  ElbowRight,
  WristLeft,
  WristRight,
  HipLeft,
  HipRight,
  KneeLeft,
  KneeRight,
  AnkleLeft,
  AnkleRight,
};

inline constexpr std::size_t kJointCount = 17;

inline constexpr std::array<Joint, kJointCount> kAllJoints = {
    Joint::Nose,         Joint::EyeLeft,    Joint::EyeRight,   Joint::EarLeft,
    Joint::EarRight,     Joint::ShoulderLeft, Joint::ShoulderRight,
    Joint::ElbowLeft,    Joint::ElbowRight, Joint::WristLeft,  Joint::WristRight,
    Joint::HipLeft,      Joint::HipRight,   Joint::KneeLeft,   Joint::KneeRight,
    Joint::AnkleLeft,    Joint::AnkleRight,
};

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "nose",          "eye_left",      "eye_right",  "ear_left",   "ear_right",
    "shoulder_left", "shoulder_right", "elbow_left", "elbow_right",
    "wrist_left",    "wrist_right",   "hip_left",   "hip_right",
    "knee_left",     "knee_right",    "ankle_left", "ankle_right",
};

constexpr std::size_t index_of(Joint j) { return static_cast<std::size_t>(j); }

constexpr std::string_view to_string(Joint j) { return kJointNames[index_of(j)]; }

inline std::optional<Joint> joint_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

// Left/right counterpart (self for the nose); used by mirror transforms.
constexpr Joint mirror_joint(Joint j) {
  switch (j) {
    case Joint::Nose: return Joint::Nose;
    case Joint::EyeLeft: return Joint::EyeRight;
    case Joint::EyeRight: return Joint::EyeLeft;
    case Joint::EarLeft: return Joint::EarRight;
    case Joint::EarRight: return Joint::EarLeft;
    case Joint::ShoulderLeft: return Joint::ShoulderRight;
    case Joint::ShoulderRight: return Joint::ShoulderLeft;
    case Joint::ElbowLeft: return Joint::ElbowRight;
    case Joint::ElbowRight: return Joint::ElbowLeft;
    case Joint::WristLeft: return Joint::WristRight;
    case Joint::WristRight: return Joint::WristLeft;
    case Joint::HipLeft: return Joint::HipRight;
    case Joint::HipRight: return Joint::HipLeft;
    case Joint::KneeLeft: return Joint::KneeRight;
    case Joint::KneeRight: return Joint::KneeLeft;
    case Joint::AnkleLeft: return Joint::AnkleRight;
    case Joint::AnkleRight: return Joint::AnkleLeft;
  }
  return j;  // unreachable; keeps -Wreturn-type quiet
}

struct Keypoint {
  Joint joint = Joint::Nose;
  double x = 0.0;
  double y = 0.0;
  bool occluded = false;

  constexpr Vec2 pos() const { return {x, y}; }
  friend constexpr bool operator==(const Keypoint&, const Keypoint&) = default;
};

// At most one keypoint per joint; absent joints simply have no entry.
class KeypointMap {
 public:
  void set(const Keypoint& kp) { slots_[index_of(kp.joint)] = kp; }

  const Keypoint* find(Joint j) const {
    const auto& slot = slots_[index_of(j)];
    return slot ? &*slot : nullptr;
  }

  bool contains(Joint j) const { return slots_[index_of(j)].has_value(); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& slot : slots_) n += slot.has_value();
    return n;
  }

  friend bool operator==(const KeypointMap&, const KeypointMap&) = default;

 private:
  std::array<std::optional<Keypoint>, kJointCount> slots_;
};

// ---------------------------------------------------------------------------
// Dataset records.
// ---------------------------------------------------------------------------

struct PedestrianGT {
  std::string id;              // unique within its image
  BBox bbox;                   // pixels
  double orientation_deg = 0;  // camera-relative, [0, 360)
  KeypointMap keypoints;

  friend bool operator==(const PedestrianGT&, const PedestrianGT&) = default;
};

struct DetectionRecord {
  BBox bbox;
  double score = 0.0;  // confidence in [0, 1]

  friend constexpr bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct ImageRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<PedestrianGT> pedestrians;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Dataset {
  std::vector<ImageRecord> images;

  std::size_t pedestrian_count() const {
    std::size_t n = 0;
    for (const auto& img : images) n += img.pedestrians.size();
    return n;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Detections keyed by image id. std::map keeps emission order deterministic.
using DetectionMap = std::map<std::string, std::vector<DetectionRecord>>;

// ---------------------------------------------------------------------------
// Instance filtering and size stratification.
// ---------------------------------------------------------------------------

enum class SizeClass : std::uint8_t { Small, Large };

constexpr std::string_view to_label(SizeClass s) {
  return s == SizeClass::Small ? "small" : "large";
}

struct FilterConfig {
  double min_height_px = 60.0;   // strictly taller than this is retained
  double size_split_px = 110.0;  // height >= split -> Large

  void validate() const {
    if (!(min_height_px >= 0.0) || !std::isfinite(min_height_px)) {
      throw ValidationError("filter: min_height_px must be finite and >= 0");
    }
    if (!(size_split_px > min_height_px)) {
      throw ValidationError("filter: size_split_px must exceed min_height_px");
    }
  }
};

}  // namespace pedfair
