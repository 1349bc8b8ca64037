#pragma once

// On-disk sequences.
//
//   <dir>/manifest.json     version, scene template/seed, noise, frame count, file list, rig hash
//   <dir>/rig.json          calibration (see calibration.hpp)
//   <dir>/scene.json        scene truth
//   <dir>/masks/NNNNN.bevm  one mask file per frame
//   <dir>/detections.csv    frame,camera,u,v,w,h,score
//   <dir>/truth.csv         frame,kind,beta,theta,phi,cx,cy,confidence
//   <dir>/poses.csv         frame,t,x,y,yaw,dx,dy,dyaw
//
// Numbers are written with 17 significant digits so that reloading is exact.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "linemark/eval.hpp"
#include "linemark/simulator.hpp"

namespace linemark {

std::string format_double(double v);

std::string landmarks_csv(std::span<const FrameLandmarks> frames);
/// `frames` < 0 sizes the result by the largest frame index present.
/// Throws DataError naming `source` and the line.
std::vector<FrameLandmarks> parse_landmarks_csv(std::string_view text, int frames, const std::string& source);

std::string detections_csv(std::span<const std::vector<DetectionBox>> frames);
std::vector<std::vector<DetectionBox>> parse_detections_csv(std::string_view text, int frames,
                                                            const std::string& source);

struct PoseRow {
    double t = 0.0;
    GroundPose pose;
    EgoDelta delta;
};
std::string poses_csv(std::span<const PoseRow> rows);
std::vector<PoseRow> parse_poses_csv(std::string_view text, int frames, const std::string& source);

nlohmann::json scene_to_json(const SceneTruth& scene);

/// Renders every frame and writes the sequence. Returns the manifest path.
/// I/O failures throw DataError with the offending path.
std::string export_sequence(const SceneTruth& scene, const CameraRig& rig, const NoiseSpec& noise,
                            std::uint64_t seed, const std::string& out_dir);

struct Dataset {
    std::string dir;
    nlohmann::json manifest;
    CameraRig rig;
    int frames = 0;
    std::vector<std::string> mask_files;  // absolute or relative to cwd
    std::vector<std::vector<DetectionBox>> detections;
    std::vector<FrameLandmarks> truth;
    std::vector<PoseRow> poses;

    /// Reads and validates one mask against the rig's BEV layout.
    [[nodiscard]] SegMask load_mask(int frame) const;
};

/// Throws DataError for missing / malformed files and ConfigError for a bad rig.
Dataset load_dataset(const std::string& dir);

}  // namespace linemark
