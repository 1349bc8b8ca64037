#include "linemark/config.hpp"

#include <fstream>
#include <set>

#include "linemark/errors.hpp"

namespace linemark {

using nlohmann::json;

namespace {

// Reads the known keys of an object and rejects everything else.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }
    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
        }
    }
    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(path_ + "." + key + ": " + e.what());
        }
    }
    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }
    [[nodiscard]] std::string path(const char* key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(const std::vector<std::string>& violations, const std::string& where) {
    if (violations.empty()) return;
    std::string msg = where + ":";
    for (const auto& v : violations) msg += " " + v + ";";
    throw ConfigError(msg);
}

void read_noise(Section& s, NoiseSpec& n) {
    s.get("p_drop", n.p_drop);
    s.get("dilate_radius", n.dilate_radius);
    s.get("erode_radius", n.erode_radius);
    s.get("speckle_cells", n.speckle_cells);
    s.get("occlusions", n.occlusions);
    s.get("occlusion_size", n.occlusion_size);
    s.get("box_jitter_px", n.box_jitter_px);
    s.get("miss_prob", n.miss_prob);
    s.get("false_positive_rate", n.false_positive_rate);
}

}  // namespace

json noise_to_json(const NoiseSpec& n) {
    return {{"p_drop", n.p_drop},
            {"dilate_radius", n.dilate_radius},
            {"erode_radius", n.erode_radius},
            {"speckle_cells", n.speckle_cells},
            {"occlusions", n.occlusions},
            {"occlusion_size", n.occlusion_size},
            {"box_jitter_px", n.box_jitter_px},
            {"miss_prob", n.miss_prob},
            {"false_positive_rate", n.false_positive_rate}};
}

NoiseSpec noise_from_json(const json& j) {
    NoiseSpec n = NoiseSpec::none();
    {
        Section s(j, "noise");
        read_noise(s, n);
        s.finish();
    }
    check(n.violations(), "noise");
    return n;
}

void PipelineConfig::validate() const {
    std::vector<std::string> v;
    if (scene.frames < 0) v.emplace_back("scene.frames must be >= 0");
    for (auto& x : noise.violations()) v.push_back("noise: " + x);
    if (linefit.scan_interval < 1) v.emplace_back("linefit.scan_interval must be >= 1");
    if (linefit.max_run < 0) v.emplace_back("linefit.max_run must be >= 0");
    if (linefit.min_samples < 2) v.emplace_back("linefit.min_samples must be >= 2");
    if (linefit.max_gap < 0 || linefit.min_run < 1) v.emplace_back("linefit.max_gap must be >= 0, min_run >= 1");
    if (!(linefit.trim_residual >= 0.0)) v.emplace_back("linefit.trim_residual must be >= 0");
    if (!(boundary.min_score >= 0.0 && boundary.min_score <= 1.0)) v.emplace_back("boundary.min_score must be in [0, 1]");
    for (auto& x : filter.violations()) v.push_back("filter: " + x);
    if (!(outliers.rate >= 0.0 && outliers.rate <= 1.0)) v.emplace_back("outliers.rate must be in [0, 1]");
    if (outliers.warmup < 0) v.emplace_back("outliers.warmup must be >= 0");
    for (auto& x : match.violations()) v.push_back("match: " + x);
    if (output_dir.empty()) v.emplace_back("output_dir must not be empty");
    check(v, "config");
}

PipelineConfig config_from_json(const json& doc) {
    PipelineConfig cfg;
    {
        Section root(doc, "config");
        int version = 0;
        root.get("version", version);
        if (version != kConfigVersion) {
            throw ConfigError("config.version must be " + std::to_string(kConfigVersion));
        }
        root.get("rig", cfg.rig_path);
        root.get("output_dir", cfg.output_dir);
        if (const json* j = root.sub("scene")) {
            Section s(*j, root.path("scene"));
            s.get("template", cfg.scene.template_name);
            s.get("seed", cfg.scene.seed);
            s.get("frames", cfg.scene.frames);
            s.finish();
        }
        if (const json* j = root.sub("noise")) {
            Section s(*j, root.path("noise"));
            read_noise(s, cfg.noise);
            s.finish();
        }
        if (const json* j = root.sub("linefit")) {
            Section s(*j, root.path("linefit"));
            s.get("scan_interval", cfg.linefit.scan_interval);
            s.get("max_run", cfg.linefit.max_run);
            s.get("min_samples", cfg.linefit.min_samples);
            s.get("max_gap", cfg.linefit.max_gap);
            s.get("min_run", cfg.linefit.min_run);
            s.get("trim_residual", cfg.linefit.trim_residual);
            s.finish();
        }
        if (const json* j = root.sub("boundary")) {
            Section s(*j, root.path("boundary"));
            s.get("min_score", cfg.boundary.min_score);
            s.finish();
        }
        if (const json* j = root.sub("filter")) {
            Section s(*j, root.path("filter"));
            s.get("enabled", cfg.filter_enabled);
            std::array<double, 3> lambda = {cfg.filter.lambda1, cfg.filter.lambda2, cfg.filter.lambda3};
            s.get("lambda", lambda);
            cfg.filter.lambda1 = lambda[0];
            cfg.filter.lambda2 = lambda[1];
            cfg.filter.lambda3 = lambda[2];
            s.get("sigma_max", cfg.filter.sigma_max);
            s.get("process_noise", cfg.filter.process_noise);
            s.get("measurement_noise", cfg.filter.measurement_noise);
            s.get("max_misses", cfg.filter.max_misses);
            s.get("confirm_hits", cfg.filter.confirm_hits);
            s.get("gate_only", cfg.filter.gate_only);
            s.get("slide_center", cfg.filter.slide_center);
            s.finish();
        }
        if (const json* j = root.sub("outliers")) {
            Section s(*j, root.path("outliers"));
            s.get("rate", cfg.outliers.rate);
            s.get("warmup", cfg.outliers.warmup);
            s.get("seed", cfg.outliers.seed);
            s.finish();
        }
        if (const json* j = root.sub("match")) {
            Section s(*j, root.path("match"));
            s.get("theta_cells", cfg.match.theta_cells);
            s.get("beta", cfg.match.beta);
            s.get("boundary_m", cfg.match.boundary_m);
            s.finish();
        }
        root.finish();
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
    const FilterConfig& f = cfg.filter;
    return {{"version", kConfigVersion},
            {"rig", cfg.rig_path},
            {"scene", {{"template", cfg.scene.template_name}, {"seed", cfg.scene.seed}, {"frames", cfg.scene.frames}}},
            {"noise", noise_to_json(cfg.noise)},
            {"linefit",
             {{"scan_interval", cfg.linefit.scan_interval},
              {"max_run", cfg.linefit.max_run},
              {"min_samples", cfg.linefit.min_samples},
              {"max_gap", cfg.linefit.max_gap},
              {"min_run", cfg.linefit.min_run},
              {"trim_residual", cfg.linefit.trim_residual}}},
            {"boundary", {{"min_score", cfg.boundary.min_score}}},
            {"filter",
             {{"enabled", cfg.filter_enabled},
              {"lambda", {f.lambda1, f.lambda2, f.lambda3}},
              {"sigma_max", f.sigma_max},
              {"process_noise", f.process_noise},
              {"measurement_noise", f.measurement_noise},
              {"max_misses", f.max_misses},
              {"confirm_hits", f.confirm_hits},
              {"gate_only", f.gate_only},
              {"slide_center", f.slide_center}}},
            {"outliers", {{"rate", cfg.outliers.rate}, {"warmup", cfg.outliers.warmup}, {"seed", cfg.outliers.seed}}},
            {"match",
             {{"theta_cells", cfg.match.theta_cells}, {"beta", cfg.match.beta}, {"boundary_m", cfg.match.boundary_m}}},
            {"output_dir", cfg.output_dir}};
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    try {
        return config_from_json(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace linemark
