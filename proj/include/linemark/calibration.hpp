#pragma once

// Rig calibration files.
//
//   {
//     "version": 1,
//     "bev": {"rows": 600, "cols": 480, "scale": 0.02, "origin": [0, 0]},
//     "working_extent": 50,
//     "cameras": {
//       "front": {"width": 1280, "height": 960, "homography": [G1, G2, G4, G5, G6, G8, G9, G10]},
//       "rear":  {"correspondences": [{"ground": [X, Y], "image": [u, v]}, ... x4]},
//       "left":  {..., "ipm_table": "left_ipm.csv"},
//       ...
//     }
//   }
//
// Each camera must carry exactly one of "homography" or "correspondences".

#include <string>

#include <json.hpp>

#include "linemark/geometry.hpp"

namespace linemark {

/// Parses a rig document. Relative `ipm_table` paths resolve against `base_dir`.
CameraRig parse_rig(const nlohmann::json& doc, const std::string& base_dir = ".");
CameraRig load_rig(const std::string& path);

/// Serializes a rig in coefficient form. IPM tables are not embedded.
nlohmann::json rig_to_json(const CameraRig& rig);
void save_rig(const CameraRig& rig, const std::string& path);

nlohmann::json bev_to_json(const BevSpec& bev);
BevSpec bev_from_json(const nlohmann::json& j);

}  // namespace linemark
