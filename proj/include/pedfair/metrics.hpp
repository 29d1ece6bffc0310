#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "pedfair/errors.hpp"
#include "pedfair/matching.hpp"
#include "pedfair/types.hpp"

// Fairness metrics over subgroup counts: miss rate, equality-of-opportunity
// difference (EOD), Cohen's h effect size, and a pooled two-proportion
// z-test for the miss-rate gap.

namespace pedfair {

// Two-sided significance level for the z-test.
inline constexpr double kSignificanceLevel = 0.01;

inline double miss_rate(SubgroupCounts c) {
  if (c.support() <= 0) {
    throw UndefinedRateError("miss_rate: subgroup has no matched or missed instances");
  }
  return static_cast<double>(c.fn) / static_cast<double>(c.support());
}

// Which side of a subgroup pair is the minority. Majority = larger support
// (support = TP + FN, independent of the confidence threshold); on an exact
// support tie the lexicographically smaller subgroup label is the minority.
struct PairSpec {
  std::string dimension;
  std::string minority;
  std::string majority;
  bool tie = false;

  friend bool operator==(const PairSpec&, const PairSpec&) = default;
};

inline PairSpec resolve_majority(std::string_view dimension, std::string_view value_a,
                                 SubgroupCounts counts_a, std::string_view value_b,
                                 SubgroupCounts counts_b) {
  if (counts_a.support() <= 0 || counts_b.support() <= 0) {
    throw UndefinedRateError("resolve_majority: empty subgroup in dimension '" +
                             std::string(dimension) + "'");
  }
  PairSpec spec;
  spec.dimension = std::string(dimension);
  spec.tie = counts_a.support() == counts_b.support();
  const bool a_is_minority =
      spec.tie ? value_a < value_b : counts_a.support() < counts_b.support();
  spec.minority = std::string(a_is_minority ? value_a : value_b);
  spec.majority = std::string(a_is_minority ? value_b : value_a);
  return spec;
}

// EOD = MR_minority - MR_majority (positive: the minority is missed more).
inline double eod(SubgroupCounts minority, SubgroupCounts majority) {
  return miss_rate(minority) - miss_rate(majority);
}

// Cohen's h = 2*asin(sqrt(MR_min)) - 2*asin(sqrt(MR_maj)), in radians.
inline double cohens_h(SubgroupCounts minority, SubgroupCounts majority) {
  const double phi_min = std::asin(std::sqrt(miss_rate(minority)));
  const double phi_maj = std::asin(std::sqrt(miss_rate(majority)));
  return 2.0 * (phi_min - phi_maj);
}

// Standard normal CDF via the complementary error function:
// Phi(x) = erfc(-x / sqrt(2)) / 2.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct ZTestResult {
  double z = 0.0;
  double p = 1.0;          // two-sided
  bool degenerate = false;  // pooled rate was 0 or 1 (zero variance)

  bool significant() const { return p < kSignificanceLevel; }
};

// Pooled two-proportion z-test on the two subgroups' miss rates.
inline ZTestResult z_test(SubgroupCounts minority, SubgroupCounts majority) {
  const double n1 = static_cast<double>(minority.support());
  const double n2 = static_cast<double>(majority.support());
  const double p1 = miss_rate(minority);
  const double p2 = miss_rate(majority);
  const double pooled =
      static_cast<double>(minority.fn + majority.fn) / (n1 + n2);
  ZTestResult r;
  if (pooled == 0.0 || pooled == 1.0) {
    // Zero pooled variance. Both rates are necessarily equal here; the
    // unequal branch is kept for symmetry with the documented convention.
    r.degenerate = true;
    if (p1 == p2) {
      r.z = 0.0;
      r.p = 1.0;
    } else {
      r.z = std::copysign(std::numeric_limits<double>::infinity(), p1 - p2);
      r.p = 0.0;
    }
    return r;
  }
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  r.z = (p1 - p2) / se;
  r.p = 2.0 * normal_cdf(-std::abs(r.z));
  return r;
}

// One fully-evaluated subgroup pair: effect sizes plus test statistics.
// Magnitudes are carried alongside the signed values because occlusion
// tables are conventionally read in absolute terms.
struct FairnessCell {
  double eod = 0.0;
  double abs_eod = 0.0;
  double h = 0.0;
  double abs_h = 0.0;
  double z = 0.0;
  double p = 1.0;
  std::int64_t n_minority = 0;
  std::int64_t n_majority = 0;
  bool significant = false;
  bool degenerate = false;
  bool tie = false;
};

inline FairnessCell make_fairness_cell(SubgroupCounts minority, SubgroupCounts majority,
                                       bool tie = false) {
  FairnessCell cell;
  cell.eod = eod(minority, majority);
  cell.abs_eod = std::abs(cell.eod);
  cell.h = cohens_h(minority, majority);
  cell.abs_h = std::abs(cell.h);
  const ZTestResult zr = z_test(minority, majority);
  cell.z = zr.z;
  cell.p = zr.p;
  cell.n_minority = minority.support();
  cell.n_majority = majority.support();
  cell.significant = zr.significant();
  cell.degenerate = zr.degenerate;
  cell.tie = tie;
  return cell;
}

// ---------------------------------------------------------------------------
// Body-region averages over per-joint values.
// ---------------------------------------------------------------------------

enum class BodyRegion : std::uint8_t { Lower, Upper, Head };

constexpr std::string_view to_label(BodyRegion r) {
  switch (r) {
    case BodyRegion::Lower: return "lower";
    case BodyRegion::Upper: return "upper";
    case BodyRegion::Head: return "head";
  }
  return "lower";
}

inline std::span<const Joint> region_joints(BodyRegion region) {
  static constexpr std::array<Joint, 6> kLower = {
      Joint::AnkleLeft, Joint::AnkleRight, Joint::KneeLeft,
      Joint::KneeRight, Joint::HipLeft,    Joint::HipRight,
  };
  static constexpr std::array<Joint, 6> kUpper = {
      Joint::WristLeft, Joint::WristRight, Joint::ElbowLeft,
      Joint::ElbowRight, Joint::ShoulderLeft, Joint::ShoulderRight,
  };
  static constexpr std::array<Joint, 5> kHead = {
      Joint::EarLeft, Joint::EarRight, Joint::EyeLeft, Joint::EyeRight, Joint::Nose,
  };
  switch (region) {
    case BodyRegion::Lower: return kLower;
    case BodyRegion::Upper: return kUpper;
    case BodyRegion::Head: return kHead;
  }
  return kLower;
}

// Unweighted mean of the per-joint values across one region. Every member
// joint must have a value; otherwise the average is undefined.
inline double region_average(const std::map<Joint, double>& per_joint, BodyRegion region) {
  double sum = 0.0;
  std::size_t n = 0;
  for (Joint j : region_joints(region)) {
    auto it = per_joint.find(j);
    if (it == per_joint.end()) {
      throw IncompleteRegionError("region_average: missing value for joint '" +
                                  std::string(to_string(j)) + "'");
    }
    sum += it->second;
    ++n;
  }
  return sum / static_cast<double>(n);
}

}  // namespace pedfair
