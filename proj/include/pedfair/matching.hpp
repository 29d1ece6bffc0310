#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pedfair/errors.hpp"
#include "pedfair/geometry.hpp"
#include "pedfair/pose_attributes.hpp"
#include "pedfair/types.hpp"

// Detection-to-ground-truth matching (per image) and the per-subgroup
// TP/FN bookkeeping the fairness metrics are computed from.

namespace pedfair {

struct MatchConfig {
  double iou_threshold = 0.5;

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
      throw ValidationError("matching: iou_threshold must lie in (0, 1]");
    }
  }
};

// Confidence-score thresholding: keeps detections with score >= tau,
// preserving input order.
inline std::vector<DetectionRecord> apply_cst(const std::vector<DetectionRecord>& dets,
                                              double tau) {
  std::vector<DetectionRecord> kept;
  kept.reserve(dets.size());
  for (const auto& d : dets) {
    if (d.score >= tau) kept.push_back(d);
  }
  return kept;
}

struct MatchOutcome {
  // (detection index into the input vector, matched ground-truth id)
  std::vector<std::pair<std::size_t, std::string>> tp_pairs;
  std::vector<std::size_t> fp;      // unmatched detection indices
  std::vector<std::string> fn;      // unmatched ground-truth ids, input order
};

// Greedy matching: detections in descending score order (stable, so equal
// scores keep input order) each claim the still-unmatched ground truth with
// the highest IoU, provided it reaches cfg.iou_threshold. IoU ties resolve
// to the lowest ground-truth input index. Detections that claim nothing are
// false positives; unclaimed ground truths are false negatives.
inline MatchOutcome greedy_match(const std::vector<DetectionRecord>& dets,
                                 const std::vector<PedestrianGT>& gts,
                                 const MatchConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<bool> claimed(gts.size(), false);
  MatchOutcome out;
  for (std::size_t det_idx : order) {
    std::size_t best = kNone;
    double best_iou = 0.0;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (claimed[j]) continue;
      const double v = iou(dets[det_idx].bbox, gts[j].bbox);
      if (v > best_iou) {  // strict: ties keep the earlier ground truth
        best_iou = v;
        best = j;
      }
    }
    if (best != kNone && best_iou >= cfg.iou_threshold) {
      claimed[best] = true;
      out.tp_pairs.emplace_back(det_idx, gts[best].id);
    } else {
      out.fp.push_back(det_idx);
    }
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!claimed[j]) out.fn.push_back(gts[j].id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subgroup counting.
// ---------------------------------------------------------------------------

struct SubgroupCounts {
  std::int64_t tp = 0;
  std::int64_t fn = 0;

  constexpr std::int64_t support() const { return tp + fn; }
  friend constexpr bool operator==(SubgroupCounts, SubgroupCounts) = default;
};

// TP/FN tallies for every subgroup of every dimension, at one confidence
// threshold. Supports (tp + fn) depend only on the dataset, never on tau.
struct CountsTable {
  SubgroupCounts overall;
  std::array<SubgroupCounts, 2> legs{};    // [Aligned, NonAligned]
  std::array<SubgroupCounts, 2> elbows{};  // [Bent, Straight]
  std::array<SubgroupCounts, 3> view{};    // [Front, Lateral, Back]
  std::array<SubgroupCounts, 2> size{};    // [Small, Large]
  // joints[j][0] = visible, joints[j][1] = occluded
  std::array<std::array<SubgroupCounts, 2>, kJointCount> joints{};
  std::int64_t fp = 0;

  void add_instance(const AttributeSet& attrs, bool matched) {
    auto bump = [matched](SubgroupCounts& c) { matched ? ++c.tp : ++c.fn; };
    bump(overall);
    if (attrs.legs != LegStatus::Unknown) {
      bump(legs[attrs.legs == LegStatus::Aligned ? 0 : 1]);
    }
    if (attrs.elbows != ElbowStatus::Unknown) {
      bump(elbows[attrs.elbows == ElbowStatus::Bent ? 0 : 1]);
    }
    bump(view[static_cast<std::size_t>(attrs.view)]);
    bump(size[static_cast<std::size_t>(attrs.size)]);
    for (Joint j : kAllJoints) {
      const Visibility vis = attrs.joints[index_of(j)];
      if (vis == Visibility::Absent) continue;
      bump(joints[index_of(j)][vis == Visibility::Occluded ? 1 : 0]);
    }
  }

  CountsTable& merge(const CountsTable& other) {
    auto add = [](SubgroupCounts& a, SubgroupCounts b) {
      a.tp += b.tp;
      a.fn += b.fn;
    };
    add(overall, other.overall);
    for (std::size_t i = 0; i < 2; ++i) add(legs[i], other.legs[i]);
    for (std::size_t i = 0; i < 2; ++i) add(elbows[i], other.elbows[i]);
    for (std::size_t i = 0; i < 3; ++i) add(view[i], other.view[i]);
    for (std::size_t i = 0; i < 2; ++i) add(size[i], other.size[i]);
    for (std::size_t j = 0; j < kJointCount; ++j) {
      add(joints[j][0], other.joints[j][0]);
      add(joints[j][1], other.joints[j][1]);
    }
    fp += other.fp;
    return *this;
  }

  // Flat (dimension, subgroup) -> counts view; handy for sweeping every
  // defined cell without knowing the table layout.
  template <typename Fn>
  void for_each_cell(Fn&& fn) const {
    fn("overall", "all", overall);
    fn("legs", to_label(LegStatus::Aligned), legs[0]);
    fn("legs", to_label(LegStatus::NonAligned), legs[1]);
    fn("elbows", to_label(ElbowStatus::Bent), elbows[0]);
    fn("elbows", to_label(ElbowStatus::Straight), elbows[1]);
    fn("view", to_label(ViewClass::Front), view[0]);
    fn("view", to_label(ViewClass::Lateral), view[1]);
    fn("view", to_label(ViewClass::Back), view[2]);
    fn("size", to_label(SizeClass::Small), size[0]);
    fn("size", to_label(SizeClass::Large), size[1]);
    for (Joint j : kAllJoints) {
      fn(std::string("joint:") + std::string(to_string(j)), to_label(Visibility::Visible),
         joints[index_of(j)][0]);
      fn(std::string("joint:") + std::string(to_string(j)), to_label(Visibility::Occluded),
         joints[index_of(j)][1]);
    }
  }
};

// Folds per-image match outcomes into one counts table. attrs_per_image[i]
// maps ground-truth ids of image i to their attribute sets; an outcome
// referencing an id with no attribute record is a bookkeeping bug upstream
// and raises ConsistencyError.
inline CountsTable accumulate_subgroup_counts(
    const std::vector<MatchOutcome>& outcomes,
    const std::vector<std::map<std::string, AttributeSet>>& attrs_per_image) {
  if (outcomes.size() != attrs_per_image.size()) {
    throw ConsistencyError("accumulate: outcome and attribute image counts differ");
  }
  CountsTable table;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& attrs = attrs_per_image[i];
    auto lookup = [&](const std::string& gt_id) -> const AttributeSet& {
      auto it = attrs.find(gt_id);
      if (it == attrs.end()) {
        throw ConsistencyError("accumulate: no attributes for ground truth '" + gt_id + "'");
      }
      return it->second;
    };
    for (const auto& [det_idx, gt_id] : outcomes[i].tp_pairs) {
      (void)det_idx;
      table.add_instance(lookup(gt_id), /*matched=*/true);
    }
    for (const auto& gt_id : outcomes[i].fn) {
      table.add_instance(lookup(gt_id), /*matched=*/false);
    }
    table.fp += static_cast<std::int64_t>(outcomes[i].fp.size());
  }
  return table;
}

}  // namespace pedfair
