#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include "pedfair/errors.hpp"
#include "pedfair/geometry.hpp"
#include "pedfair/ingestion.hpp"
#include "pedfair/types.hpp"

// Automatic pose-attribute labeling from the 17-joint skeleton:
//   - leg stance     (aligned / non-aligned / unknown)
//   - elbow posture  (bent / straight / unknown)
//   - view class     (front / lateral / back) from the orientation angle
//   - per-joint visibility (visible / occluded / absent)

namespace pedfair {

struct AngleThresholds {
  double knee_flexion_deg = 12.0;    // gamma: per-knee flexion bound
  double hip_ankle_sep_deg = 10.0;   // alpha: hip-ankle line separation bound
  double elbow_bend_deg = 90.0;      // bent iff max elbow angle >= this

  void validate() const {
    auto in_range = [](double v, double lo, double hi) {
      return std::isfinite(v) && v >= lo && v <= hi;
    };
    if (!in_range(knee_flexion_deg, 0.0, 180.0) ||
        !in_range(hip_ankle_sep_deg, 0.0, 180.0) ||
        !in_range(elbow_bend_deg, 0.0, 180.0)) {
      throw ValidationError("angle thresholds must lie in [0, 180] degrees");
    }
  }
};

enum class LegStatus : std::uint8_t { Aligned, NonAligned, Unknown };
enum class ElbowStatus : std::uint8_t { Bent, Straight, Unknown };
enum class ViewClass : std::uint8_t { Front, Lateral, Back };
enum class Visibility : std::uint8_t { Visible, Occluded, Absent };

constexpr std::string_view to_label(LegStatus s) {
  switch (s) {
    case LegStatus::Aligned: return "aligned";
    case LegStatus::NonAligned: return "non_aligned";
    case LegStatus::Unknown: return "unknown";
  }
  return "unknown";
}

constexpr std::string_view to_label(ElbowStatus s) {
  switch (s) {
    case ElbowStatus::Bent: return "bent";
    case ElbowStatus::Straight: return "straight";
    case ElbowStatus::Unknown: return "unknown";
  }
  return "unknown";
}

constexpr std::string_view to_label(ViewClass v) {
  switch (v) {
    case ViewClass::Front: return "front";
    case ViewClass::Lateral: return "lateral";
    case ViewClass::Back: return "back";
  }
  return "front";
}

constexpr std::string_view to_label(Visibility v) {
  switch (v) {
    case Visibility::Visible: return "visible";
    case Visibility::Occluded: return "occluded";
    case Visibility::Absent: return "absent";
  }
  return "absent";
}

// Leg stance. Unknown when any of the six leg joints is absent or any
// required direction vector degenerates (coincident points); otherwise
// non-aligned iff either knee flexes past gamma, or the hip->ankle lines
// separate past alpha AND intersect strictly above both ankles (y-down
// coordinates: intersection y < min ankle y).
inline LegStatus classify_legs(const KeypointMap& kps, const AngleThresholds& th) {
  const Keypoint* hip_l = kps.find(Joint::HipLeft);
  const Keypoint* hip_r = kps.find(Joint::HipRight);
  const Keypoint* knee_l = kps.find(Joint::KneeLeft);
  const Keypoint* knee_r = kps.find(Joint::KneeRight);
  const Keypoint* ankle_l = kps.find(Joint::AnkleLeft);
  const Keypoint* ankle_r = kps.find(Joint::AnkleRight);
  if (!hip_l || !hip_r || !knee_l || !knee_r || !ankle_l || !ankle_r) {
    return LegStatus::Unknown;
  }

  const Vec2 hl = hip_l->pos(), hr = hip_r->pos();
  const Vec2 kl = knee_l->pos(), kr = knee_r->pos();
  const Vec2 al = ankle_l->pos(), ar = ankle_r->pos();

  // All direction vectors must be well-defined before any verdict.
  const Vec2 thigh_l = kl - hl, shank_l = al - kl;
  const Vec2 thigh_r = kr - hr, shank_r = ar - kr;
  const Vec2 line_l = al - hl, line_r = ar - hr;
  for (const Vec2& v : {thigh_l, shank_l, thigh_r, shank_r, line_l, line_r}) {
    if (norm(v) == 0.0) return LegStatus::Unknown;
  }

  const double flex_l = vec_angle(thigh_l, shank_l);
  const double flex_r = vec_angle(thigh_r, shank_r);
  if (flex_l > th.knee_flexion_deg || flex_r > th.knee_flexion_deg) {
    return LegStatus::NonAligned;
  }

  const double sep = vec_angle(line_l, line_r);
  if (sep > th.hip_ankle_sep_deg) {
    const auto cross_pt = line_intersection(hl, line_l, hr, line_r);
    if (cross_pt && cross_pt->y < std::min(al.y, ar.y)) {
      return LegStatus::NonAligned;
    }
  }
  return LegStatus::Aligned;
}

// Elbow posture. A side contributes an angle only when shoulder, elbow and
// wrist are all present and both arm segments are non-degenerate. Bent iff
// the largest contributed angle reaches the threshold; Unknown when neither
// side contributes.
inline ElbowStatus classify_elbows(const KeypointMap& kps, const AngleThresholds& th) {
  std::optional<double> max_bend;
  const std::array<std::array<Joint, 3>, 2> sides = {{
      {Joint::ShoulderLeft, Joint::ElbowLeft, Joint::WristLeft},
      {Joint::ShoulderRight, Joint::ElbowRight, Joint::WristRight},
  }};
  for (const auto& [sj, ej, wj] : sides) {
    const Keypoint* s = kps.find(sj);
    const Keypoint* e = kps.find(ej);
    const Keypoint* w = kps.find(wj);
    if (!s || !e || !w) continue;
    const Vec2 upper = e->pos() - s->pos();
    const Vec2 fore = w->pos() - e->pos();
    if (norm(upper) == 0.0 || norm(fore) == 0.0) continue;
    const double bend = vec_angle(upper, fore);
    if (!max_bend || bend > *max_bend) max_bend = bend;
  }
  if (!max_bend) return ElbowStatus::Unknown;
  return *max_bend >= th.elbow_bend_deg ? ElbowStatus::Bent : ElbowStatus::Straight;
}

// View class from the camera-relative orientation angle a in [0, 360):
//   front    a in [0, 60] or [300, 360)
//   lateral  a in (60, 120) or (240, 300)
//   back     a in [120, 240]
inline ViewClass classify_view(double orientation_deg) {
  if (!(orientation_deg >= 0.0 && orientation_deg < 360.0)) {
    throw DomainError("classify_view: orientation must lie in [0, 360)");
  }
  if (orientation_deg <= 60.0 || orientation_deg >= 300.0) return ViewClass::Front;
  if (orientation_deg < 120.0 || orientation_deg > 240.0) return ViewClass::Lateral;
  return ViewClass::Back;
}

inline std::array<Visibility, kJointCount> joint_visibility(const KeypointMap& kps) {
  std::array<Visibility, kJointCount> out;
  for (Joint j : kAllJoints) {
    const Keypoint* kp = kps.find(j);
    out[index_of(j)] =
        kp == nullptr ? Visibility::Absent
                      : (kp->occluded ? Visibility::Occluded : Visibility::Visible);
  }
  return out;
}

// All auto-derived labels for one ground-truth instance.
struct AttributeSet {
  LegStatus legs = LegStatus::Unknown;
  ElbowStatus elbows = ElbowStatus::Unknown;
  ViewClass view = ViewClass::Front;
  SizeClass size = SizeClass::Small;
  std::array<Visibility, kJointCount> joints{};
};

inline AttributeSet annotate(const PedestrianGT& ped, const AngleThresholds& th,
                             const FilterConfig& filter) {
  th.validate();
  AttributeSet attrs;
  attrs.legs = classify_legs(ped.keypoints, th);
  attrs.elbows = classify_elbows(ped.keypoints, th);
  attrs.view = classify_view(ped.orientation_deg);
  attrs.size = size_class(ped, filter);
  attrs.joints = joint_visibility(ped.keypoints);
  return attrs;
}

}  // namespace pedfair
