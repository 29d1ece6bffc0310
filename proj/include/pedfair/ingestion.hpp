#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "pedfair/errors.hpp"
#include "pedfair/types.hpp"

// Parsing and serialization of the two on-disk formats:
//
// GT-JSON   {"images": [{"image_id": str, "width": int, "height": int,
//             "pedestrians": [{"id": str, "bbox": [x, y, w, h],
//               "orientation_deg": num,
//               "keypoints": [{"joint": str, "x": num, "y": num,
//                              "occluded": bool}, ...]}, ...]}, ...]}
//
// DET-JSON  {"detections": {"<image_id>": [{"bbox": [x, y, w, h],
//                                           "score": num}, ...], ...}}
//
// Malformed syntax or mistyped nodes raise ParseError; well-formed input
// that breaks a documented invariant raises ValidationError naming the
// offending image/pedestrian.

namespace pedfair {

namespace detail {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline const json& require_field(const json& node, const char* key, const std::string& where) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return *it;
}

inline std::string require_string(const json& node, const char* key, const std::string& where) {
  const json& v = require_field(node, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline double require_number(const json& node, const char* key, const std::string& where) {
  const json& v = require_field(node, key, where);
  if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline int require_int(const json& node, const char* key, const std::string& where) {
  const json& v = require_field(node, key, where);
  if (!v.is_number_integer()) throw ParseError(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

inline BBox require_bbox(const json& node, const std::string& where) {
  const json& v = require_field(node, "bbox", where);
  if (!v.is_array() || v.size() != 4) {
    throw ParseError(where + ": field 'bbox' must be an array of 4 numbers");
  }
  for (const auto& e : v) {
    if (!e.is_number()) throw ParseError(where + ": field 'bbox' must be an array of 4 numbers");
  }
  BBox box{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
  if (!(box.w > 0.0) || !(box.h > 0.0)) {
    throw ValidationError(where + ": bbox width and height must be positive");
  }
  return box;
}

}  // namespace detail

inline Dataset parse_ground_truth(std::string_view raw) {
  using detail::json;
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("GT-JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("GT-JSON: root must be an object");
  const json& images = detail::require_field(root, "images", "GT-JSON");
  if (!images.is_array()) throw ParseError("GT-JSON: 'images' must be an array");

  Dataset ds;
  std::set<std::string> seen_images;
  for (const auto& jimg : images) {
    if (!jimg.is_object()) throw ParseError("GT-JSON: image entries must be objects");
    ImageRecord img;
    img.image_id = detail::require_string(jimg, "image_id", "GT-JSON image");
    const std::string iwhere = "image '" + img.image_id + "'";
    if (!seen_images.insert(img.image_id).second) {
      throw ValidationError(iwhere + ": duplicate image_id");
    }
    img.width = detail::require_int(jimg, "width", iwhere);
    img.height = detail::require_int(jimg, "height", iwhere);
    if (img.width <= 0 || img.height <= 0) {
      throw ValidationError(iwhere + ": width and height must be positive");
    }

    const json* jpeds = nullptr;
    if (auto it = jimg.find("pedestrians"); it != jimg.end()) jpeds = &*it;
    if (jpeds != nullptr) {
      if (!jpeds->is_array()) throw ParseError(iwhere + ": 'pedestrians' must be an array");
      std::set<std::string> seen_peds;
      for (const auto& jped : *jpeds) {
        if (!jped.is_object()) throw ParseError(iwhere + ": pedestrian entries must be objects");
        PedestrianGT ped;
        ped.id = detail::require_string(jped, "id", iwhere + " pedestrian");
        const std::string pwhere = iwhere + " pedestrian '" + ped.id + "'";
        if (!seen_peds.insert(ped.id).second) {
          throw ValidationError(pwhere + ": duplicate pedestrian id");
        }
        ped.bbox = detail::require_bbox(jped, pwhere);
        // Loose sanity bound: boxes may overhang the frame but not live in
        // another postcode.
        if (ped.bbox.x < -img.width || ped.bbox.x2() > 2.0 * img.width ||
            ped.bbox.y < -img.height || ped.bbox.y2() > 2.0 * img.height) {
          throw ValidationError(pwhere + ": bbox outside the permitted frame bounds");
        }
        ped.orientation_deg = detail::require_number(jped, "orientation_deg", pwhere);
        if (!(ped.orientation_deg >= 0.0 && ped.orientation_deg < 360.0)) {
          throw ValidationError(pwhere + ": orientation_deg must lie in [0, 360)");
        }
        if (auto kit = jped.find("keypoints"); kit != jped.end()) {
          if (!kit->is_array()) throw ParseError(pwhere + ": 'keypoints' must be an array");
          for (const auto& jkp : *kit) {
            if (!jkp.is_object()) throw ParseError(pwhere + ": keypoint entries must be objects");
            const std::string jname = detail::require_string(jkp, "joint", pwhere + " keypoint");
            const auto joint = joint_from_string(jname);
            if (!joint) throw ValidationError(pwhere + ": unknown joint '" + jname + "'");
            if (ped.keypoints.contains(*joint)) {
              throw ValidationError(pwhere + ": duplicate keypoint for joint '" + jname + "'");
            }
            Keypoint kp;
            kp.joint = *joint;
            kp.x = detail::require_number(jkp, "x", pwhere + " keypoint '" + jname + "'");
            kp.y = detail::require_number(jkp, "y", pwhere + " keypoint '" + jname + "'");
            if (auto oit = jkp.find("occluded"); oit != jkp.end()) {
              if (!oit->is_boolean()) {
                throw ParseError(pwhere + ": keypoint 'occluded' must be a boolean");
              }
              kp.occluded = oit->get<bool>();
            }
            ped.keypoints.set(kp);
          }
        }
        img.pedestrians.push_back(std::move(ped));
      }
    }
    ds.images.push_back(std::move(img));
  }
  return ds;
}

inline std::string serialize_ground_truth(const Dataset& ds) {
  using detail::ordered_json;
  ordered_json root;
  root["images"] = ordered_json::array();
  for (const auto& img : ds.images) {
    ordered_json jimg;
    jimg["image_id"] = img.image_id;
    jimg["width"] = img.width;
    jimg["height"] = img.height;
    jimg["pedestrians"] = ordered_json::array();
    for (const auto& ped : img.pedestrians) {
      ordered_json jped;
      jped["id"] = ped.id;
      jped["bbox"] = {ped.bbox.x, ped.bbox.y, ped.bbox.w, ped.bbox.h};
      jped["orientation_deg"] = ped.orientation_deg;
      jped["keypoints"] = ordered_json::array();
      for (Joint j : kAllJoints) {  // canonical order keeps output stable
        const Keypoint* kp = ped.keypoints.find(j);
        if (kp == nullptr) continue;
        ordered_json jkp;
        jkp["joint"] = std::string(to_string(j));
        jkp["x"] = kp->x;
        jkp["y"] = kp->y;
        jkp["occluded"] = kp->occluded;
        jped["keypoints"].push_back(std::move(jkp));
      }
      jimg["pedestrians"].push_back(std::move(jped));
    }
    root["images"].push_back(std::move(jimg));
  }
  return root.dump(2) + "\n";
}

inline DetectionMap parse_detections(std::string_view raw) {
  using detail::json;
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("DET-JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("DET-JSON: root must be an object");
  const json& dets = detail::require_field(root, "detections", "DET-JSON");
  if (!dets.is_object()) throw ParseError("DET-JSON: 'detections' must be an object");

  DetectionMap out;
  for (const auto& [image_id, jlist] : dets.items()) {
    const std::string where = "detections['" + image_id + "']";
    if (!jlist.is_array()) throw ParseError(where + ": must be an array");
    std::vector<DetectionRecord> records;
    records.reserve(jlist.size());
    for (const auto& jdet : jlist) {
      if (!jdet.is_object()) throw ParseError(where + ": entries must be objects");
      DetectionRecord rec;
      rec.bbox = detail::require_bbox(jdet, where);
      rec.score = detail::require_number(jdet, "score", where);
      if (!(rec.score >= 0.0 && rec.score <= 1.0)) {
        throw ValidationError(where + ": score must lie in [0, 1]");
      }
      records.push_back(rec);
    }
    out.emplace(image_id, std::move(records));
  }
  return out;
}

inline std::string serialize_detections(const DetectionMap& dets) {
  using detail::ordered_json;
  ordered_json root;
  root["detections"] = ordered_json::object();
  for (const auto& [image_id, records] : dets) {
    ordered_json jlist = ordered_json::array();
    for (const auto& rec : records) {
      ordered_json jdet;
      jdet["bbox"] = {rec.bbox.x, rec.bbox.y, rec.bbox.w, rec.bbox.h};
      jdet["score"] = rec.score;
      jlist.push_back(std::move(jdet));
    }
    root["detections"][image_id] = std::move(jlist);
  }
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Instance filtering.
// ---------------------------------------------------------------------------

struct FilterResult {
  Dataset dataset;
  std::size_t removed = 0;
};

// Drops pedestrians whose box height is at or below cfg.min_height_px.
// Images are kept even when all their pedestrians are filtered out, so
// detections on those images still count as false positives.
inline FilterResult filter_instances(const Dataset& ds, const FilterConfig& cfg) {
  cfg.validate();
  FilterResult result;
  result.dataset.images.reserve(ds.images.size());
  for (const auto& img : ds.images) {
    ImageRecord kept;
    kept.image_id = img.image_id;
    kept.width = img.width;
    kept.height = img.height;
    for (const auto& ped : img.pedestrians) {
      if (ped.bbox.h > cfg.min_height_px) {
        kept.pedestrians.push_back(ped);
      } else {
        ++result.removed;
      }
    }
    result.dataset.images.push_back(std::move(kept));
  }
  return result;
}

inline SizeClass size_class(const PedestrianGT& ped, const FilterConfig& cfg) {
  return ped.bbox.h >= cfg.size_split_px ? SizeClass::Large : SizeClass::Small;
}

}  // namespace pedfair
