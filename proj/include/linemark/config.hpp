#pragma once

// Pipeline configuration and its JSON form.
//
//   {
//     "version": 1,
//     "rig": "",                         // calibration file; empty = built-in rig
//     "scene": {"template": "straight_aisle", "seed": 0, "frames": 400},
//     "noise": {"p_drop": 0.05, ...},
//     "linefit": {"scan_interval": 8, "max_run": 40, "min_samples": 5,
//                 "max_gap": 2, "min_run": 2, "trim_residual": 3},
//     "boundary": {"min_score": 0.5},
//     "filter": {"enabled": true, "lambda": [1, 1, 1], "sigma_max": 10, ...},
//     "outliers": {"rate": 0, "warmup": 5, "seed": 7},
//     "match": {"theta_cells": 5, "beta": 0.05, "boundary_m": 0.15},
//     "output_dir": "out"
//   }
//
// Every section and key is optional; unknown keys are errors.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "linemark/boundary.hpp"
#include "linemark/eval.hpp"
#include "linemark/filter.hpp"
#include "linemark/linefit.hpp"
#include "linemark/simulator.hpp"

namespace linemark {

inline constexpr int kConfigVersion = 1;

struct SceneConfig {
    std::string template_name = "straight_aisle";
    std::uint64_t seed = 0;
    int frames = 400;
};

struct OutlierConfig {
    double rate = 0.0;  // per landmark per frame
    int warmup = 5;     // frames without injection at the start
    std::uint64_t seed = 7;
};

struct PipelineConfig {
    std::string rig_path;
    SceneConfig scene;
    NoiseSpec noise = NoiseSpec::defaults();
    LinefitConfig linefit;
    KeypointOptions boundary;
    bool filter_enabled = true;
    FilterConfig filter;
    OutlierConfig outliers;
    MatchSpec match;
    std::string output_dir = "out";

    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
PipelineConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

nlohmann::json noise_to_json(const NoiseSpec& n);
NoiseSpec noise_from_json(const nlohmann::json& j);

}  // namespace linemark
