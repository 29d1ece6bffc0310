#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pedfair/errors.hpp"
#include "pedfair/metrics.hpp"
#include "pedfair/sweep.hpp"
#include "pedfair/types.hpp"

// Report emission in three formats. All numeric formatting is
// locale-independent (std::to_chars) and deterministic: the same report
// yields the same bytes on every run. Undefined cells render as "NA" in
// CSV/Markdown and null in JSON.

namespace pedfair {

enum class ReportFormat { Csv, Markdown, Json };

namespace detail_report {

inline double normalize_zero(double v) { return v == 0.0 ? 0.0 : v; }

// Shortest round-trip representation.
inline std::string fmt_double(double v) {
  v = normalize_zero(v);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

inline std::string fmt_fixed(double v, int precision) {
  v = normalize_zero(v);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  (void)ec;
  return std::string(buf, end);
}

// Explicit sign for difference-valued quantities: "+6.8", not "6.8".
inline std::string fmt_signed_fixed(double v, int precision) {
  v = normalize_zero(v);
  return (v >= 0.0 ? "+" : "") + fmt_fixed(v, precision);
}

inline std::string na_or_double(const std::optional<double>& v) {
  return v ? fmt_double(*v) : "NA";
}

inline std::string bool_str(bool b) { return b ? "true" : "false"; }

// Mean of the defined values only; NA when none are defined.
struct Mean {
  double sum = 0.0;
  std::size_t n = 0;

  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }

  std::optional<double> get() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

// Column means for an "Average" row (across thresholds, or across
// detectors at one threshold).
struct RowAverages {
  std::optional<double> mr;
  std::array<std::optional<double>, 5> attr_eod;
  std::array<std::optional<double>, 5> attr_h;
  std::array<std::optional<double>, kJointCount> joint_eod;
  std::array<std::optional<double>, kJointCount> joint_h;
  std::array<std::optional<double>, 3> regions;
};

inline RowAverages average_rows(const std::vector<const TauRow*>& rows) {
  Mean mr;
  std::array<Mean, 5> attr_eod, attr_h;
  std::array<Mean, kJointCount> joint_eod, joint_h;
  std::array<Mean, 3> regions;
  for (const TauRow* row : rows) {
    mr.add(row->overall_mr);
    for (std::size_t s = 0; s < 5; ++s) {
      if (row->attributes[s].cell) {
        attr_eod[s].add(row->attributes[s].cell->eod);
        attr_h[s].add(row->attributes[s].cell->h);
      }
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if (row->joints[j]) {
        joint_eod[j].add(row->joints[j]->eod);
        joint_h[j].add(row->joints[j]->h);
      }
    }
    for (std::size_t r = 0; r < 3; ++r) regions[r].add(row->regions[r]);
  }
  RowAverages out;
  out.mr = mr.get();
  for (std::size_t s = 0; s < 5; ++s) {
    out.attr_eod[s] = attr_eod[s].get();
    out.attr_h[s] = attr_h[s].get();
  }
  for (std::size_t j = 0; j < kJointCount; ++j) {
    out.joint_eod[j] = joint_eod[j].get();
    out.joint_h[j] = joint_h[j].get();
  }
  for (std::size_t r = 0; r < 3; ++r) out.regions[r] = regions[r].get();
  return out;
}

inline RowAverages values_of(const TauRow& row) {
  return average_rows({&row});  // a one-row mean is just the row's values
}

inline RowAverages detector_averages(const DetectorReport& dr) {
  std::vector<const TauRow*> rows;
  for (const auto& row : dr.rows) rows.push_back(&row);
  return average_rows(rows);
}

// Markdown joint column order groups by body region (lower, upper, head).
inline constexpr std::array<Joint, kJointCount> kRegionJointOrder = {
    Joint::AnkleLeft, Joint::AnkleRight, Joint::KneeLeft,   Joint::KneeRight,
    Joint::HipLeft,   Joint::HipRight,   Joint::WristLeft,  Joint::WristRight,
    Joint::ElbowLeft, Joint::ElbowRight, Joint::ShoulderLeft, Joint::ShoulderRight,
    Joint::EarLeft,   Joint::EarRight,   Joint::EyeLeft,    Joint::EyeRight,
    Joint::Nose,
};

inline constexpr std::array<std::string_view, 5> kPairDisplay = {
    "legs", "elbows", "F-L", "L-B", "F-B",
};

// ---------------------------------------------------------------------------
// CSV.
// ---------------------------------------------------------------------------

inline void csv_value_row(std::string& out, const std::string& detector,
                          const std::string& tau_label, const RowAverages& v) {
  out += detector;
  out += ',';
  out += tau_label;
  out += ',';
  out += v.mr ? fmt_double(*v.mr) : "NA";
  for (std::size_t s = 0; s < 5; ++s) {
    out += ',';
    out += na_or_double(v.attr_eod[s]);
    out += ',';
    out += na_or_double(v.attr_h[s]);
  }
  for (Joint j : kAllJoints) {
    out += ',';
    out += na_or_double(v.joint_eod[index_of(j)]);
    out += ',';
    out += na_or_double(v.joint_h[index_of(j)]);
  }
  for (std::size_t r = 0; r < 3; ++r) {
    out += ',';
    out += na_or_double(v.regions[r]);
  }
  out += '\n';
}

inline std::string emit_csv(const FairnessReport& report) {
  std::string out = "detector,tau,miss_rate";
  for (std::string_view slot : kPairSlots) {
    out += ',';
    out += slot;
    out += "_eod,";
    out += slot;
    out += "_h";
  }
  for (Joint j : kAllJoints) {
    out += ',';
    out += to_string(j);
    out += "_eod,";
    out += to_string(j);
    out += "_h";
  }
  out += ",region_lower,region_upper,region_head\n";

  for (const auto& dr : report.detectors) {
    for (const auto& row : dr.rows) {
      csv_value_row(out, dr.name, fmt_double(row.tau), values_of(row));
    }
    csv_value_row(out, dr.name, "avg", detector_averages(dr));
  }
  if (report.detectors.size() > 1) {
    for (std::size_t t = 0; t < report.config.thresholds.size(); ++t) {
      std::vector<const TauRow*> rows;
      for (const auto& dr : report.detectors) rows.push_back(&dr.rows[t]);
      csv_value_row(out, "(average)", fmt_double(report.config.thresholds[t]),
                    average_rows(rows));
    }
  }
  return out;
}

inline void significance_cell_row(std::string& out, const std::string& detector,
                                  double tau, const std::string& cell_name,
                                  const std::string& minority, const std::string& majority,
                                  const std::optional<FairnessCell>& cell) {
  out += detector;
  out += ',';
  out += fmt_double(tau);
  out += ',';
  out += cell_name;
  if (!cell) {
    out += ",NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA\n";
    return;
  }
  out += ',';
  out += minority;
  out += ',';
  out += majority;
  out += ',';
  out += fmt_double(cell->eod);
  out += ',';
  out += fmt_double(cell->abs_eod);
  out += ',';
  out += fmt_double(cell->h);
  out += ',';
  out += fmt_double(cell->abs_h);
  out += ',';
  out += fmt_double(cell->z);
  out += ',';
  out += fmt_double(cell->p);
  out += ',';
  out += std::to_string(cell->n_minority);
  out += ',';
  out += std::to_string(cell->n_majority);
  out += ',';
  out += bool_str(cell->significant);
  out += ',';
  out += bool_str(cell->degenerate);
  out += ',';
  out += bool_str(cell->tie);
  out += '\n';
}

inline std::string emit_significance_csv(const FairnessReport& report) {
  std::string out =
      "detector,tau,cell,minority,majority,eod,abs_eod,h,abs_h,z,p,"
      "n_minority,n_majority,significant,degenerate,tie\n";
  for (const auto& dr : report.detectors) {
    for (const auto& row : dr.rows) {
      for (std::size_t s = 0; s < 5; ++s) {
        const AttributeCell& ac = row.attributes[s];
        significance_cell_row(out, dr.name, row.tau, ac.slot,
                              ac.pair ? ac.pair->minority : "NA",
                              ac.pair ? ac.pair->majority : "NA", ac.cell);
      }
      for (Joint j : kAllJoints) {
        significance_cell_row(out, dr.name, row.tau,
                              "joint:" + std::string(to_string(j)),
                              std::string(to_label(Visibility::Occluded)),
                              std::string(to_label(Visibility::Visible)),
                              row.joints[index_of(j)]);
      }
    }
  }
  return out;
}

inline std::string emit_deltas_csv(const FairnessReport& report) {
  std::string out = "detector,tau,pair,eod_full,eod_large,delta,sign_stable\n";
  for (const auto& dr : report.detectors) {
    for (const auto& drow : dr.deltas) {
      for (std::size_t s = 0; s < 5; ++s) {
        const DeltaCell& cell = drow.pairs[s];
        out += dr.name;
        out += ',';
        out += fmt_double(drow.tau);
        out += ',';
        out += kPairSlots[s];
        out += ',';
        out += na_or_double(cell.eod_full);
        out += ',';
        out += na_or_double(cell.eod_large);
        out += ',';
        out += na_or_double(cell.delta);
        out += ',';
        out += cell.sign_stable ? bool_str(*cell.sign_stable) : "NA";
        out += '\n';
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markdown.
// ---------------------------------------------------------------------------

inline std::string pct(const std::optional<double>& v, bool with_sign) {
  if (!v) return "NA";
  return with_sign ? fmt_signed_fixed(*v * 100.0, 1) : fmt_fixed(*v * 100.0, 1);
}

inline std::string h_str(const std::optional<double>& v) {
  return v ? fmt_signed_fixed(*v, 2) : "NA";
}

inline void append_summary_body(std::string& out, const DatasetSummary& s) {
  out += std::to_string(s.images) + " images, " + std::to_string(s.instances) +
         " instances retained (" + std::to_string(s.removed) + " removed by the height filter).\n\n";
  out += "| Dimension | Subgroup | Count | Share (%) |\n|---|---|---:|---:|\n";
  auto share = [&](std::int64_t count) -> std::string {
    if (s.instances == 0) return "NA";
    return fmt_fixed(100.0 * static_cast<double>(count) / static_cast<double>(s.instances), 1);
  };
  auto summary_row = [&](std::string_view dim, std::string_view label, std::int64_t count) {
    out += "| ";
    out += dim;
    out += " | ";
    out += label;
    out += " | " + std::to_string(count) + " | " + share(count) + " |\n";
  };
  summary_row("legs", to_label(LegStatus::Aligned), s.legs[0]);
  summary_row("legs", to_label(LegStatus::NonAligned), s.legs[1]);
  summary_row("legs", to_label(LegStatus::Unknown), s.legs[2]);
  summary_row("elbows", to_label(ElbowStatus::Bent), s.elbows[0]);
  summary_row("elbows", to_label(ElbowStatus::Straight), s.elbows[1]);
  summary_row("elbows", to_label(ElbowStatus::Unknown), s.elbows[2]);
  summary_row("view", to_label(ViewClass::Front), s.view[0]);
  summary_row("view", to_label(ViewClass::Lateral), s.view[1]);
  summary_row("view", to_label(ViewClass::Back), s.view[2]);
  summary_row("size", to_label(SizeClass::Small), s.size[0]);
  summary_row("size", to_label(SizeClass::Large), s.size[1]);
  out += "\n| Joint | Visible | Occluded | Absent | Occlusion rate (%) |\n|---|---:|---:|---:|---:|\n";
  for (Joint j : kRegionJointOrder) {
    const auto& row = s.joints[index_of(j)];
    out += "| ";
    out += to_string(j);
    out += " | " + std::to_string(row[0]) + " | " + std::to_string(row[1]) + " | " +
           std::to_string(row[2]) + " | " + pct(s.occlusion_rate(j), false) + " |\n";
  }
  out += "\nMean joint occlusion rate: " + pct(s.mean_occlusion_rate(), false) + "%.\n\n";
}

inline std::string emit_markdown(const FairnessReport& report) {
  const SweepConfig& cfg = report.config;
  std::string out = "# Pedestrian detection fairness report\n\n";

  out += "Configuration: IoU >= " + fmt_double(cfg.match.iou_threshold) + "; thresholds {";
  for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
    if (t > 0) out += ", ";
    out += fmt_double(cfg.thresholds[t]);
  }
  out += "}; knee flexion > " + fmt_double(cfg.angles.knee_flexion_deg);
  out += " deg; hip-ankle separation > " + fmt_double(cfg.angles.hip_ankle_sep_deg);
  out += " deg; elbow bend >= " + fmt_double(cfg.angles.elbow_bend_deg);
  out += " deg; height filter > " + fmt_double(cfg.filter.min_height_px);
  out += " px; size split >= " + fmt_double(cfg.filter.size_split_px) + " px.\n\n";

  // --- Dataset summary ---
  out += "## Dataset summary\n\n";
  append_summary_body(out, report.summary);

  // --- Attribute fairness ---
  out += "## Attribute fairness\n\n";
  out += "EOD in percentage points (minority minus majority miss rate); h is Cohen's h "
         "(signed); `*` marks p < " + fmt_double(kSignificanceLevel) + ".\n\n";
  for (const auto& dr : report.detectors) {
    out += "### " + dr.name + "\n\n";
    // Pair orientation is threshold-independent; read it off the first row.
    out += "Pairs:";
    bool first = true;
    for (std::size_t slot = 0; slot < 5; ++slot) {
      const auto& pair = dr.rows.front().attributes[slot].pair;
      out += first ? " " : "; ";
      first = false;
      out += kPairDisplay[slot];
      if (pair) {
        out += " = ";
        out += pair->minority;
        out += " - ";
        out += pair->majority;
        if (pair->tie) out += " (support tie)";
      } else {
        out += " = NA";
      }
    }
    out += ".\n\n";
    out += "| tau | MR (%) |";
    for (std::string_view name : kPairDisplay) {
      out += " ";
      out += name;
      out += " EOD (pp) | ";
      out += name;
      out += " h |";
    }
    out += "\n|---:|---:|";
    for (std::size_t slot = 0; slot < 5; ++slot) out += "---:|---:|";
    out += "\n";
    for (const auto& row : dr.rows) {
      out += "| " + fmt_double(row.tau) + " | " + pct(row.overall_mr, false) + " |";
      for (std::size_t slot = 0; slot < 5; ++slot) {
        const auto& cell = row.attributes[slot].cell;
        if (cell) {
          out += " " + fmt_signed_fixed(cell->eod * 100.0, 1) + (cell->significant ? "*" : "") +
                 " | " + fmt_signed_fixed(cell->h, 2) + " |";
        } else {
          out += " NA | NA |";
        }
      }
      out += "\n";
    }
    const RowAverages avg = detector_averages(dr);
    out += "| avg | " + pct(avg.mr, false) + " |";
    for (std::size_t slot = 0; slot < 5; ++slot) {
      out += " " + pct(avg.attr_eod[slot], true) + " | " + h_str(avg.attr_h[slot]) + " |";
    }
    out += "\n\n";
  }

  // --- Joint occlusion fairness ---
  out += "## Joint occlusion fairness\n\n";
  out += "EOD in percentage points (occluded minus visible miss rate), Cohen's h signed; "
         "`*` marks p < " + fmt_double(kSignificanceLevel) + ".\n\n";
  for (const auto& dr : report.detectors) {
    out += "### " + dr.name + "\n\n";
    out += "| tau |";
    for (Joint j : kRegionJointOrder) {
      out += " ";
      out += to_string(j);
      out += " EOD (pp) | h |";
    }
    out += "\n|---:|";
    for (std::size_t j = 0; j < kJointCount; ++j) out += "---:|---:|";
    out += "\n";
    for (const auto& row : dr.rows) {
      out += "| " + fmt_double(row.tau) + " |";
      for (Joint j : kRegionJointOrder) {
        const auto& cell = row.joints[index_of(j)];
        if (cell) {
          out += " " + fmt_signed_fixed(cell->eod * 100.0, 1) + (cell->significant ? "*" : "") +
                 " | " + fmt_signed_fixed(cell->h, 2) + " |";
        } else {
          out += " NA | NA |";
        }
      }
      out += "\n";
    }
    const RowAverages avg = detector_averages(dr);
    out += "| avg |";
    for (Joint j : kRegionJointOrder) {
      out += " " + pct(avg.joint_eod[index_of(j)], true) + " | " +
             h_str(avg.joint_h[index_of(j)]) + " |";
    }
    out += "\n\n";
  }

  // --- Region averages ---
  out += "## Region averages\n\n";
  out += "Mean per-joint EOD (pp) over the lower (6 joints), upper (6) and head (5) regions.\n\n";
  out += "| Detector | tau | Lower | Upper | Head |\n|---|---:|---:|---:|---:|\n";
  for (const auto& dr : report.detectors) {
    for (const auto& row : dr.rows) {
      out += "| " + dr.name + " | " + fmt_double(row.tau) + " | " + pct(row.regions[0], true) +
             " | " + pct(row.regions[1], true) + " | " + pct(row.regions[2], true) + " |\n";
    }
    const RowAverages avg = detector_averages(dr);
    out += "| " + dr.name + " | avg | " + pct(avg.regions[0], true) + " | " +
           pct(avg.regions[1], true) + " | " + pct(avg.regions[2], true) + " |\n";
  }
  out += "\n";

  // --- Size-stratified deltas ---
  out += "## Size-stratified deltas\n\n";
  out += "Delta = EOD(full) - EOD(large instances only), in percentage points; 'stable' "
         "means the EOD sign is unchanged on the large-only subset.\n\n";
  out += "| Detector | tau |";
  for (std::string_view name : kPairDisplay) {
    out += " ";
    out += name;
    out += " delta (pp) | stable |";
  }
  out += "\n|---|---:|";
  for (std::size_t slot = 0; slot < 5; ++slot) out += "---:|---|";
  out += "\n";
  for (const auto& dr : report.detectors) {
    for (const auto& drow : dr.deltas) {
      out += "| " + dr.name + " | " + fmt_double(drow.tau) + " |";
      for (std::size_t slot = 0; slot < 5; ++slot) {
        const DeltaCell& cell = drow.pairs[slot];
        out += " " + (cell.delta ? fmt_signed_fixed(*cell.delta * 100.0, 2) : "NA") + " | " +
               (cell.sign_stable ? bool_str(*cell.sign_stable) : "NA") + " |";
      }
      out += "\n";
    }
  }
  out += "\n";

  // --- Cross-detector average ---
  if (report.detectors.size() > 1) {
    out += "## Cross-detector average\n\n";
    out += "| tau | MR (%) |";
    for (std::string_view name : kPairDisplay) {
      out += " ";
      out += name;
      out += " EOD (pp) | ";
      out += name;
      out += " h |";
    }
    out += "\n|---:|---:|";
    for (std::size_t slot = 0; slot < 5; ++slot) out += "---:|---:|";
    out += "\n";
    for (std::size_t t = 0; t < report.config.thresholds.size(); ++t) {
      std::vector<const TauRow*> rows;
      for (const auto& dr : report.detectors) rows.push_back(&dr.rows[t]);
      const RowAverages avg = average_rows(rows);
      out += "| " + fmt_double(report.config.thresholds[t]) + " | " + pct(avg.mr, false) + " |";
      for (std::size_t slot = 0; slot < 5; ++slot) {
        out += " " + pct(avg.attr_eod[slot], true) + " | " + h_str(avg.attr_h[slot]) + " |";
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON.
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json json_double(double v) { return normalize_zero(v); }

inline nlohmann::ordered_json json_opt(const std::optional<double>& v) {
  if (!v) return nullptr;
  return json_double(*v);
}

inline nlohmann::ordered_json json_cell(const std::optional<FairnessCell>& cell) {
  if (!cell) return nullptr;
  nlohmann::ordered_json j;
  j["eod"] = json_double(cell->eod);
  j["abs_eod"] = json_double(cell->abs_eod);
  j["h"] = json_double(cell->h);
  j["abs_h"] = json_double(cell->abs_h);
  j["z"] = json_double(cell->z);
  j["p"] = json_double(cell->p);
  j["n_minority"] = cell->n_minority;
  j["n_majority"] = cell->n_majority;
  j["significant"] = cell->significant;
  j["degenerate"] = cell->degenerate;
  j["tie"] = cell->tie;
  return j;
}

inline nlohmann::ordered_json json_counts(const SubgroupCounts& c) {
  return nlohmann::ordered_json{{"tp", c.tp}, {"fn", c.fn}};
}

inline std::string emit_json(const FairnessReport& report) {
  using ordered_json = nlohmann::ordered_json;
  const SweepConfig& cfg = report.config;
  ordered_json root;
  root["schema"] = "fairness-report/v1";

  ordered_json jcfg;
  jcfg["thresholds"] = cfg.thresholds;
  jcfg["iou_threshold"] = json_double(cfg.match.iou_threshold);
  jcfg["angles"] = {{"knee_flexion_deg", json_double(cfg.angles.knee_flexion_deg)},
                    {"hip_ankle_sep_deg", json_double(cfg.angles.hip_ankle_sep_deg)},
                    {"elbow_bend_deg", json_double(cfg.angles.elbow_bend_deg)}};
  jcfg["filter"] = {{"min_height_px", json_double(cfg.filter.min_height_px)},
                    {"size_split_px", json_double(cfg.filter.size_split_px)}};
  root["config"] = std::move(jcfg);

  const DatasetSummary& s = report.summary;
  ordered_json jsum;
  jsum["images"] = s.images;
  jsum["instances"] = s.instances;
  jsum["removed"] = s.removed;
  jsum["legs"] = {{std::string(to_label(LegStatus::Aligned)), s.legs[0]},
                  {std::string(to_label(LegStatus::NonAligned)), s.legs[1]},
                  {std::string(to_label(LegStatus::Unknown)), s.legs[2]}};
  jsum["elbows"] = {{std::string(to_label(ElbowStatus::Bent)), s.elbows[0]},
                    {std::string(to_label(ElbowStatus::Straight)), s.elbows[1]},
                    {std::string(to_label(ElbowStatus::Unknown)), s.elbows[2]}};
  jsum["view"] = {{std::string(to_label(ViewClass::Front)), s.view[0]},
                  {std::string(to_label(ViewClass::Lateral)), s.view[1]},
                  {std::string(to_label(ViewClass::Back)), s.view[2]}};
  jsum["size"] = {{std::string(to_label(SizeClass::Small)), s.size[0]},
                  {std::string(to_label(SizeClass::Large)), s.size[1]}};
  ordered_json jjoints;
  for (Joint j : kAllJoints) {
    const auto& row = s.joints[index_of(j)];
    ordered_json jj;
    jj["visible"] = row[0];
    jj["occluded"] = row[1];
    jj["absent"] = row[2];
    jj["occlusion_rate"] = json_opt(s.occlusion_rate(j));
    jjoints[std::string(to_string(j))] = std::move(jj);
  }
  jsum["joints"] = std::move(jjoints);
  jsum["mean_occlusion_rate"] = json_opt(s.mean_occlusion_rate());
  root["summary"] = std::move(jsum);

  root["detectors"] = ordered_json::array();
  for (const auto& dr : report.detectors) {
    ordered_json jdr;
    jdr["name"] = dr.name;
    jdr["unknown_images"] = dr.unknown_images;

    ordered_json jpairs;
    for (std::size_t slot = 0; slot < 5; ++slot) {
      const auto& pair = dr.rows.front().attributes[slot].pair;
      if (pair) {
        jpairs[std::string(kPairSlots[slot])] = {{"dimension", pair->dimension},
                                                 {"minority", pair->minority},
                                                 {"majority", pair->majority},
                                                 {"tie", pair->tie}};
      } else {
        jpairs[std::string(kPairSlots[slot])] = nullptr;
      }
    }
    jdr["pairs"] = std::move(jpairs);

    jdr["rows"] = ordered_json::array();
    for (const auto& row : dr.rows) {
      ordered_json jrow;
      jrow["tau"] = json_double(row.tau);
      jrow["tp"] = row.tp;
      jrow["fn"] = row.fn;
      jrow["fp"] = row.fp;
      jrow["miss_rate"] = json_opt(row.overall_mr);
      ordered_json jattrs;
      for (std::size_t slot = 0; slot < 5; ++slot) {
        jattrs[std::string(kPairSlots[slot])] = json_cell(row.attributes[slot].cell);
      }
      jrow["attributes"] = std::move(jattrs);
      ordered_json jrj;
      for (Joint j : kAllJoints) {
        jrj[std::string(to_string(j))] = json_cell(row.joints[index_of(j)]);
      }
      jrow["joints"] = std::move(jrj);
      jrow["regions"] = {{"lower", json_opt(row.regions[0])},
                         {"upper", json_opt(row.regions[1])},
                         {"head", json_opt(row.regions[2])}};
      ordered_json jcounts;
      jcounts["overall"] = json_counts(row.counts.overall);
      jcounts["fp"] = row.counts.fp;
      jcounts["legs"] = {
          {std::string(to_label(LegStatus::Aligned)), json_counts(row.counts.legs[0])},
          {std::string(to_label(LegStatus::NonAligned)), json_counts(row.counts.legs[1])}};
      jcounts["elbows"] = {
          {std::string(to_label(ElbowStatus::Bent)), json_counts(row.counts.elbows[0])},
          {std::string(to_label(ElbowStatus::Straight)), json_counts(row.counts.elbows[1])}};
      jcounts["view"] = {
          {std::string(to_label(ViewClass::Front)), json_counts(row.counts.view[0])},
          {std::string(to_label(ViewClass::Lateral)), json_counts(row.counts.view[1])},
          {std::string(to_label(ViewClass::Back)), json_counts(row.counts.view[2])}};
      jcounts["size"] = {
          {std::string(to_label(SizeClass::Small)), json_counts(row.counts.size[0])},
          {std::string(to_label(SizeClass::Large)), json_counts(row.counts.size[1])}};
      ordered_json jcj;
      for (Joint j : kAllJoints) {
        jcj[std::string(to_string(j))] = {
            {"visible", json_counts(row.counts.joints[index_of(j)][0])},
            {"occluded", json_counts(row.counts.joints[index_of(j)][1])}};
      }
      jcounts["joints"] = std::move(jcj);
      jrow["counts"] = std::move(jcounts);
      jdr["rows"].push_back(std::move(jrow));
    }

    const RowAverages avg = detector_averages(dr);
    ordered_json javg;
    javg["miss_rate"] = json_opt(avg.mr);
    ordered_json javg_attr;
    for (std::size_t slot = 0; slot < 5; ++slot) {
      if (avg.attr_eod[slot]) {
        javg_attr[std::string(kPairSlots[slot])] = {{"eod", json_opt(avg.attr_eod[slot])},
                                                    {"h", json_opt(avg.attr_h[slot])}};
      } else {
        javg_attr[std::string(kPairSlots[slot])] = nullptr;
      }
    }
    javg["attributes"] = std::move(javg_attr);
    ordered_json javg_joints;
    for (Joint j : kAllJoints) {
      if (avg.joint_eod[index_of(j)]) {
        javg_joints[std::string(to_string(j))] = {{"eod", json_opt(avg.joint_eod[index_of(j)])},
                                                  {"h", json_opt(avg.joint_h[index_of(j)])}};
      } else {
        javg_joints[std::string(to_string(j))] = nullptr;
      }
    }
    javg["joints"] = std::move(javg_joints);
    javg["regions"] = {{"lower", json_opt(avg.regions[0])},
                       {"upper", json_opt(avg.regions[1])},
                       {"head", json_opt(avg.regions[2])}};
    jdr["averages"] = std::move(javg);

    jdr["deltas"] = ordered_json::array();
    for (const auto& drow : dr.deltas) {
      ordered_json jd;
      jd["tau"] = json_double(drow.tau);
      ordered_json jp;
      for (std::size_t slot = 0; slot < 5; ++slot) {
        const DeltaCell& cell = drow.pairs[slot];
        if (cell.delta) {
          jp[std::string(kPairSlots[slot])] = {{"eod_full", json_opt(cell.eod_full)},
                                               {"eod_large", json_opt(cell.eod_large)},
                                               {"delta", json_opt(cell.delta)},
                                               {"sign_stable", *cell.sign_stable}};
        } else {
          jp[std::string(kPairSlots[slot])] = nullptr;
        }
      }
      jd["pairs"] = std::move(jp);
      jdr["deltas"].push_back(std::move(jd));
    }
    root["detectors"].push_back(std::move(jdr));
  }

  if (report.detectors.size() > 1) {
    root["average_across_detectors"] = ordered_json::array();
    for (std::size_t t = 0; t < report.config.thresholds.size(); ++t) {
      std::vector<const TauRow*> rows;
      for (const auto& dr : report.detectors) rows.push_back(&dr.rows[t]);
      const RowAverages avg = average_rows(rows);
      ordered_json jrow;
      jrow["tau"] = json_double(report.config.thresholds[t]);
      jrow["miss_rate"] = json_opt(avg.mr);
      ordered_json jattr;
      for (std::size_t slot = 0; slot < 5; ++slot) {
        if (avg.attr_eod[slot]) {
          jattr[std::string(kPairSlots[slot])] = {{"eod", json_opt(avg.attr_eod[slot])},
                                                  {"h", json_opt(avg.attr_h[slot])}};
        } else {
          jattr[std::string(kPairSlots[slot])] = nullptr;
        }
      }
      jrow["attributes"] = std::move(jattr);
      jrow["regions"] = {{"lower", json_opt(avg.regions[0])},
                         {"upper", json_opt(avg.regions[1])},
                         {"head", json_opt(avg.regions[2])}};
      root["average_across_detectors"].push_back(std::move(jrow));
    }
  }
  return root.dump(2) + "\n";
}

}  // namespace detail_report

inline std::string emit_report(const FairnessReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return detail_report::emit_csv(report);
    case ReportFormat::Markdown: return detail_report::emit_markdown(report);
    case ReportFormat::Json: return detail_report::emit_json(report);
  }
  throw ValidationError("emit_report: unknown format");
}

inline std::string emit_significance_csv(const FairnessReport& report) {
  return detail_report::emit_significance_csv(report);
}

inline std::string emit_deltas_csv(const FairnessReport& report) {
  return detail_report::emit_deltas_csv(report);
}

inline std::string emit_summary_markdown(const DatasetSummary& summary) {
  std::string out = "# Dataset summary\n\n";
  detail_report::append_summary_body(out, summary);
  return out;
}

}  // namespace pedfair
