#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "pedfair/errors.hpp"
#include "pedfair/ingestion.hpp"
#include "pedfair/matching.hpp"
#include "pedfair/metrics.hpp"
#include "pedfair/pose_attributes.hpp"
#include "pedfair/types.hpp"

// Threshold sweep: for every confidence threshold tau, match detections to
// ground truth, fold per-subgroup counts, and evaluate the fairness metrics
// for every attribute pair and joint. Also computes the size-stratified
// robustness deltas (full dataset vs large-instances-only).

namespace pedfair {

struct SweepConfig {
  std::vector<double> thresholds{0.0, 0.25, 0.5, 0.75};
  MatchConfig match;
  AngleThresholds angles;
  FilterConfig filter;
  unsigned threads = 1;  // worker count; never affects emitted bytes

  void validate() const {
    match.validate();
    angles.validate();
    filter.validate();
    if (thresholds.empty()) throw ValidationError("sweep: at least one threshold required");
    for (double t : thresholds) {
      if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("sweep: thresholds must lie in [0, 1]");
    }
    if (std::adjacent_find(thresholds.begin(), thresholds.end(),
                           [](double a, double b) { return a >= b; }) != thresholds.end()) {
      throw ValidationError("sweep: thresholds must be strictly increasing");
    }
    if (threads == 0) throw ValidationError("sweep: threads must be at least 1");
  }
};

// The five attribute pairs evaluated at every threshold, in report order.
inline constexpr std::array<std::string_view, 5> kPairSlots = {
    "legs", "elbows", "view_fl", "view_lb", "view_fb",
};

struct AttributeCell {
  std::string slot;                  // one of kPairSlots
  std::optional<PairSpec> pair;      // unresolvable when a side is empty
  std::optional<FairnessCell> cell;  // gap when pair is unresolvable
};

struct TauRow {
  double tau = 0.0;
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::optional<double> overall_mr;
  std::array<AttributeCell, 5> attributes;
  // Per joint, occluded-minus-visible (fixed orientation); gap when a side
  // is empty.
  std::array<std::optional<FairnessCell>, kJointCount> joints;
  // Mean per-joint EOD over each body region; gap when any member is a gap.
  std::array<std::optional<double>, 3> regions;  // lower, upper, head
  CountsTable counts;                             // raw tallies behind the row
};

struct DeltaCell {
  std::optional<double> eod_full;
  std::optional<double> eod_large;
  std::optional<double> delta;       // eod_full - eod_large
  std::optional<bool> sign_stable;   // same sign (or both zero)
};

struct DeltaRow {
  double tau = 0.0;
  std::array<DeltaCell, 5> pairs;  // kPairSlots order
};

struct DetectorReport {
  std::string name;
  std::vector<TauRow> rows;
  std::vector<DeltaRow> deltas;
  // Detection-stream image ids with no ground-truth image. Their detections
  // count as false positives.
  std::size_t unknown_images = 0;
};

struct DatasetSummary {
  std::size_t images = 0;
  std::size_t instances = 0;  // retained after the height filter
  std::size_t removed = 0;    // dropped by the height filter
  std::array<std::int64_t, 3> legs{};    // aligned, non_aligned, unknown
  std::array<std::int64_t, 3> elbows{};  // bent, straight, unknown
  std::array<std::int64_t, 3> view{};    // front, lateral, back
  std::array<std::int64_t, 2> size{};    // small, large
  std::array<std::array<std::int64_t, 3>, kJointCount> joints{};  // vis, occ, absent

  std::optional<double> occlusion_rate(Joint j) const {
    const auto& row = joints[index_of(j)];
    const std::int64_t annotated = row[0] + row[1];
    if (annotated == 0) return std::nullopt;
    return static_cast<double>(row[1]) / static_cast<double>(annotated);
  }

  // Unweighted mean of the defined per-joint occlusion rates.
  std::optional<double> mean_occlusion_rate() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (Joint j : kAllJoints) {
      if (auto r = occlusion_rate(j)) {
        sum += *r;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

struct FairnessReport {
  SweepConfig config;
  DatasetSummary summary;
  std::vector<DetectorReport> detectors;
};

// ---------------------------------------------------------------------------
// Internal helpers.
// ---------------------------------------------------------------------------

namespace detail_sweep {

// Subgroup counts for one attribute-pair side, by slot and label.
inline const SubgroupCounts* find_counts(const CountsTable& t, std::string_view dimension,
                                         std::string_view label) {
  if (dimension == "legs") {
    if (label == to_label(LegStatus::Aligned)) return &t.legs[0];
    if (label == to_label(LegStatus::NonAligned)) return &t.legs[1];
  } else if (dimension == "elbows") {
    if (label == to_label(ElbowStatus::Bent)) return &t.elbows[0];
    if (label == to_label(ElbowStatus::Straight)) return &t.elbows[1];
  } else if (dimension == "view") {
    if (label == to_label(ViewClass::Front)) return &t.view[0];
    if (label == to_label(ViewClass::Lateral)) return &t.view[1];
    if (label == to_label(ViewClass::Back)) return &t.view[2];
  }
  return nullptr;
}

struct PairParts {
  std::string_view dimension;
  std::string_view label_a;
  std::string_view label_b;
};

inline PairParts pair_parts(std::size_t slot) {
  switch (slot) {
    case 0: return {"legs", to_label(LegStatus::Aligned), to_label(LegStatus::NonAligned)};
    case 1: return {"elbows", to_label(ElbowStatus::Bent), to_label(ElbowStatus::Straight)};
    case 2: return {"view", to_label(ViewClass::Front), to_label(ViewClass::Lateral)};
    case 3: return {"view", to_label(ViewClass::Lateral), to_label(ViewClass::Back)};
    case 4: return {"view", to_label(ViewClass::Front), to_label(ViewClass::Back)};
  }
  return {"legs", "", ""};
}

inline AttributeCell build_attribute_cell(std::size_t slot, const CountsTable& counts) {
  const PairParts parts = pair_parts(slot);
  AttributeCell out;
  out.slot = std::string(kPairSlots[slot]);
  const SubgroupCounts* a = find_counts(counts, parts.dimension, parts.label_a);
  const SubgroupCounts* b = find_counts(counts, parts.dimension, parts.label_b);
  if (a->support() <= 0 || b->support() <= 0) return out;  // gap
  out.pair = resolve_majority(parts.dimension, parts.label_a, *a, parts.label_b, *b);
  const SubgroupCounts& minority = out.pair->minority == parts.label_a ? *a : *b;
  const SubgroupCounts& majority = out.pair->minority == parts.label_a ? *b : *a;
  out.cell = make_fairness_cell(minority, majority, out.pair->tie);
  return out;
}

inline TauRow build_row(double tau, const CountsTable& counts) {
  TauRow row;
  row.tau = tau;
  row.counts = counts;
  row.tp = counts.overall.tp;
  row.fn = counts.overall.fn;
  row.fp = counts.fp;
  if (counts.overall.support() > 0) row.overall_mr = miss_rate(counts.overall);

  for (std::size_t slot = 0; slot < kPairSlots.size(); ++slot) {
    row.attributes[slot] = build_attribute_cell(slot, counts);
  }

  std::map<Joint, double> joint_eod;
  for (Joint j : kAllJoints) {
    const SubgroupCounts& visible = counts.joints[index_of(j)][0];
    const SubgroupCounts& occluded = counts.joints[index_of(j)][1];
    if (visible.support() > 0 && occluded.support() > 0) {
      row.joints[index_of(j)] = make_fairness_cell(occluded, visible);
      joint_eod[j] = row.joints[index_of(j)]->eod;
    }
  }
  for (BodyRegion region : {BodyRegion::Lower, BodyRegion::Upper, BodyRegion::Head}) {
    const auto joints = region_joints(region);
    const bool complete = std::all_of(joints.begin(), joints.end(),
                                      [&](Joint j) { return joint_eod.count(j) > 0; });
    if (complete) {
      row.regions[static_cast<std::size_t>(region)] = region_average(joint_eod, region);
    }
  }
  return row;
}

// Per-tau counts tables over a set of images. Images are split into
// contiguous chunks, one worker per chunk, and chunk tables are merged in
// chunk order; integer tallies make the result identical to the sequential
// path for any worker count.
inline std::vector<CountsTable> sweep_tables(
    const std::vector<const ImageRecord*>& images,
    const std::vector<const std::map<std::string, AttributeSet>*>& attrs,
    const DetectionMap& dets, const std::vector<double>& taus, const MatchConfig& match,
    unsigned threads) {
  const std::size_t n_images = images.size();
  const std::size_t n_workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n_images));

  std::vector<std::vector<CountsTable>> chunk_tables(n_workers,
                                                     std::vector<CountsTable>(taus.size()));
  auto run_chunk = [&](std::size_t worker, std::size_t begin, std::size_t end) {
    std::vector<std::vector<MatchOutcome>> outcomes(taus.size());
    std::vector<std::map<std::string, AttributeSet>> chunk_attrs;
    chunk_attrs.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      chunk_attrs.push_back(*attrs[i]);
      static const std::vector<DetectionRecord> kNoDetections;
      auto it = dets.find(images[i]->image_id);
      const std::vector<DetectionRecord>& image_dets =
          it == dets.end() ? kNoDetections : it->second;
      for (std::size_t t = 0; t < taus.size(); ++t) {
        outcomes[t].push_back(
            greedy_match(apply_cst(image_dets, taus[t]), images[i]->pedestrians, match));
      }
    }
    for (std::size_t t = 0; t < taus.size(); ++t) {
      chunk_tables[worker][t] = accumulate_subgroup_counts(outcomes[t], chunk_attrs);
    }
  };

  if (n_workers == 1) {
    run_chunk(0, 0, n_images);
  } else {
    std::vector<std::thread> workers;
    const std::size_t per = (n_images + n_workers - 1) / n_workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::size_t begin = w * per;
      if (begin >= n_images) break;  // ceil division can leave trailing workers idle
      const std::size_t end = std::min(n_images, begin + per);
      workers.emplace_back(run_chunk, w, begin, end);
    }
    for (auto& th : workers) th.join();
  }

  std::vector<CountsTable> tables(taus.size());
  for (std::size_t w = 0; w < n_workers; ++w) {
    for (std::size_t t = 0; t < taus.size(); ++t) tables[t].merge(chunk_tables[w][t]);
  }
  return tables;
}

}  // namespace detail_sweep

// ---------------------------------------------------------------------------
// Dataset summary.
// ---------------------------------------------------------------------------

inline DatasetSummary dataset_summary(const Dataset& gt, const AngleThresholds& angles,
                                      const FilterConfig& filter) {
  if (gt.images.empty()) throw EmptyInputError("dataset summary: no images");
  const FilterResult filtered = filter_instances(gt, filter);
  DatasetSummary s;
  s.images = filtered.dataset.images.size();
  s.removed = filtered.removed;
  for (const auto& img : filtered.dataset.images) {
    for (const auto& ped : img.pedestrians) {
      const AttributeSet attrs = annotate(ped, angles, filter);
      ++s.instances;
      switch (attrs.legs) {
        case LegStatus::Aligned: ++s.legs[0]; break;
        case LegStatus::NonAligned: ++s.legs[1]; break;
        case LegStatus::Unknown: ++s.legs[2]; break;
      }
      switch (attrs.elbows) {
        case ElbowStatus::Bent: ++s.elbows[0]; break;
        case ElbowStatus::Straight: ++s.elbows[1]; break;
        case ElbowStatus::Unknown: ++s.elbows[2]; break;
      }
      ++s.view[static_cast<std::size_t>(attrs.view)];
      ++s.size[static_cast<std::size_t>(attrs.size)];
      for (Joint j : kAllJoints) {
        ++s.joints[index_of(j)][static_cast<std::size_t>(attrs.joints[index_of(j)])];
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Size-stratified robustness deltas.
// ---------------------------------------------------------------------------

// EOD deltas between the full rows and large-instances-only rows at the
// same thresholds. The minority/majority orientation comes from the FULL
// rows and is applied to the large-only counts, so a delta never reflects a
// silent pair flip inside the large stratum.
inline std::vector<DeltaRow> size_stratified_delta(const std::vector<TauRow>& full,
                                                   const std::vector<TauRow>& large) {
  if (full.size() != large.size()) {
    throw ConsistencyError("size_stratified_delta: row counts differ");
  }
  std::vector<DeltaRow> out;
  out.reserve(full.size());
  for (std::size_t r = 0; r < full.size(); ++r) {
    if (full[r].tau != large[r].tau) {
      throw ConsistencyError("size_stratified_delta: threshold mismatch between row sets");
    }
    DeltaRow drow;
    drow.tau = full[r].tau;
    for (std::size_t slot = 0; slot < kPairSlots.size(); ++slot) {
      DeltaCell& cell = drow.pairs[slot];
      const AttributeCell& fcell = full[r].attributes[slot];
      if (!fcell.pair || !fcell.cell) continue;  // gap in the full rows
      cell.eod_full = fcell.cell->eod;
      const detail_sweep::PairParts parts = detail_sweep::pair_parts(slot);
      const SubgroupCounts* minority =
          detail_sweep::find_counts(large[r].counts, parts.dimension, fcell.pair->minority);
      const SubgroupCounts* majority =
          detail_sweep::find_counts(large[r].counts, parts.dimension, fcell.pair->majority);
      if (minority->support() <= 0 || majority->support() <= 0) continue;  // gap in large
      cell.eod_large = eod(*minority, *majority);
      cell.delta = *cell.eod_full - *cell.eod_large;
      auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
      cell.sign_stable = sign(*cell.eod_full) == sign(*cell.eod_large);
    }
    out.push_back(std::move(drow));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The sweep itself.
// ---------------------------------------------------------------------------

inline FairnessReport run_sweep(const Dataset& gt,
                                const std::vector<std::pair<std::string, DetectionMap>>& detectors,
                                const SweepConfig& cfg) {
  cfg.validate();
  if (gt.images.empty() || gt.pedestrian_count() == 0) {
    throw EmptyInputError("run_sweep: empty ground-truth dataset");
  }
  if (detectors.empty()) throw ValidationError("run_sweep: at least one detector required");
  {
    std::set<std::string> names;
    for (const auto& [name, _] : detectors) {
      if (!names.insert(name).second) {
        throw ValidationError("run_sweep: duplicate detector name '" + name + "'");
      }
    }
  }

  FairnessReport report;
  report.config = cfg;

  const FilterResult filtered = filter_instances(gt, cfg.filter);
  report.summary = dataset_summary(gt, cfg.angles, cfg.filter);

  // Annotate once; the large-only pass reuses the same attribute sets.
  std::vector<std::map<std::string, AttributeSet>> attrs_full(filtered.dataset.images.size());
  std::vector<ImageRecord> large_images(filtered.dataset.images.size());
  std::vector<std::map<std::string, AttributeSet>> attrs_large(filtered.dataset.images.size());
  std::set<std::string> gt_image_ids;
  for (std::size_t i = 0; i < filtered.dataset.images.size(); ++i) {
    const ImageRecord& img = filtered.dataset.images[i];
    gt_image_ids.insert(img.image_id);
    large_images[i].image_id = img.image_id;
    large_images[i].width = img.width;
    large_images[i].height = img.height;
    for (const auto& ped : img.pedestrians) {
      AttributeSet attrs = annotate(ped, cfg.angles, cfg.filter);
      if (attrs.size == SizeClass::Large) {
        large_images[i].pedestrians.push_back(ped);
        attrs_large[i].emplace(ped.id, attrs);
      }
      attrs_full[i].emplace(ped.id, std::move(attrs));
    }
  }

  std::vector<const ImageRecord*> full_ptr, large_ptr;
  std::vector<const std::map<std::string, AttributeSet>*> full_attr_ptr, large_attr_ptr;
  for (std::size_t i = 0; i < filtered.dataset.images.size(); ++i) {
    full_ptr.push_back(&filtered.dataset.images[i]);
    large_ptr.push_back(&large_images[i]);
    full_attr_ptr.push_back(&attrs_full[i]);
    large_attr_ptr.push_back(&attrs_large[i]);
  }

  for (const auto& [name, dets] : detectors) {
    DetectorReport dr;
    dr.name = name;

    auto full_tables = detail_sweep::sweep_tables(full_ptr, full_attr_ptr, dets, cfg.thresholds,
                                                  cfg.match, cfg.threads);
    auto large_tables = detail_sweep::sweep_tables(large_ptr, large_attr_ptr, dets,
                                                   cfg.thresholds, cfg.match, cfg.threads);

    // Detections on images the ground truth has never heard of are pure
    // false positives at every threshold they survive.
    for (const auto& [image_id, records] : dets) {
      if (gt_image_ids.count(image_id) > 0) continue;
      ++dr.unknown_images;
      for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
        const auto kept = apply_cst(records, cfg.thresholds[t]);
        full_tables[t].fp += static_cast<std::int64_t>(kept.size());
        large_tables[t].fp += static_cast<std::int64_t>(kept.size());
      }
    }

    std::vector<TauRow> large_rows;
    for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
      dr.rows.push_back(detail_sweep::build_row(cfg.thresholds[t], full_tables[t]));
      large_rows.push_back(detail_sweep::build_row(cfg.thresholds[t], large_tables[t]));
    }
    dr.deltas = size_stratified_delta(dr.rows, large_rows);
    report.detectors.push_back(std::move(dr));
  }
  return report;
}

inline FairnessReport run_sweep(const Dataset& gt, const DetectionMap& dets,
                                const SweepConfig& cfg, std::string detector_name = "detector") {
  std::vector<std::pair<std::string, DetectionMap>> detectors;
  detectors.emplace_back(std::move(detector_name), dets);
  return run_sweep(gt, detectors, cfg);
}

}  // namespace pedfair
