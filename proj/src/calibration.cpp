#include "linemark/calibration.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "linemark/errors.hpp"

namespace linemark {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

Camera parse_camera(CameraId id, const json& cam, const std::string& base_dir) {
    const std::string where = "camera '" + std::string(to_string(id)) + "'";
    if (!cam.is_object()) throw ConfigError(where + " must be an object");
    reject_unknown_keys(cam, {"width", "height", "homography", "correspondences", "ipm_table"}, where);
    const bool has_h = cam.contains("homography");
    const bool has_c = cam.contains("correspondences");
    if (has_h == has_c) {
        throw ConfigError(where + " must define exactly one of 'homography' or 'correspondences'");
    }
    const int width = cam.value("width", 1280);
    const int height = cam.value("height", 960);

    std::optional<Homography> h;
    if (has_h) {
        const json& g = cam["homography"];
        if (!g.is_array() || g.size() != 8) throw ConfigError(where + ": 'homography' needs 8 coefficients");
        Homography::Coefficients c{};
        for (std::size_t i = 0; i < 8; ++i) c[i] = number(g[i], where + " homography");
        h = Homography(c);
    } else {
        const json& pairs = cam["correspondences"];
        if (!pairs.is_array() || pairs.size() != 4) throw ConfigError(where + ": 'correspondences' needs 4 pairs");
        std::array<Correspondence, 4> cs{};
        for (std::size_t i = 0; i < 4; ++i) {
            const json& p = pairs[i];
            reject_unknown_keys(p, {"ground", "image"}, where + " correspondence");
            if (!p.contains("ground") || !p.contains("image") || p["ground"].size() != 2 || p["image"].size() != 2) {
                throw ConfigError(where + ": each correspondence needs 'ground' [X, Y] and 'image' [u, v]");
            }
            cs[i] = {{number(p["ground"][0], where), number(p["ground"][1], where)},
                     {number(p["image"][0], where), number(p["image"][1], where)}};
        }
        h = solve_homography(cs);
    }
    Camera camera(id, *h, width, height);
    if (cam.contains("ipm_table")) {
        std::filesystem::path table = cam["ipm_table"].get<std::string>();
        if (table.is_relative()) table = std::filesystem::path(base_dir) / table;
        camera.set_ipm_table(IpmTable::load_csv(table.string()));
    }
    return camera;
}

}  // namespace

json bev_to_json(const BevSpec& bev) {
    return {{"rows", bev.rows}, {"cols", bev.cols}, {"scale", bev.scale}, {"origin", {bev.origin.x, bev.origin.y}}};
}

BevSpec bev_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("'bev' must be an object");
    reject_unknown_keys(j, {"rows", "cols", "scale", "origin"}, "bev");
    BevSpec bev;
    bev.rows = j.value("rows", bev.rows);
    bev.cols = j.value("cols", bev.cols);
    bev.scale = j.value("scale", bev.scale);
    if (j.contains("origin")) {
        if (!j["origin"].is_array() || j["origin"].size() != 2) throw ConfigError("bev.origin must be [x, y]");
        bev.origin = {number(j["origin"][0], "bev.origin"), number(j["origin"][1], "bev.origin")};
    }
    if (!bev.valid()) throw ConfigError("bev raster needs positive rows, cols and scale");
    return bev;
}

CameraRig parse_rig(const json& doc, const std::string& base_dir) {
    try {
        if (!doc.is_object()) throw ConfigError("rig document must be an object");
        reject_unknown_keys(doc, {"version", "bev", "working_extent", "cameras"}, "rig");
        if (doc.value("version", 0) != 1) throw ConfigError("unsupported rig version (expected 1)");
        const BevSpec bev = doc.contains("bev") ? bev_from_json(doc["bev"]) : BevSpec{};
        const double extent = doc.value("working_extent", 50.0);
        if (!(extent > 0.0)) throw ConfigError("working_extent must be positive");
        if (!doc.contains("cameras") || !doc["cameras"].is_object()) throw ConfigError("rig needs a 'cameras' object");
        const json& cams = doc["cameras"];
        reject_unknown_keys(cams, {"front", "rear", "left", "right"}, "cameras");
        auto get = [&](CameraId id) {
            const std::string name(to_string(id));
            if (!cams.contains(name)) throw ConfigError("rig is missing camera '" + name + "'");
            return parse_camera(id, cams[name], base_dir);
        };
        return CameraRig{{get(CameraId::Front), get(CameraId::Rear), get(CameraId::Left), get(CameraId::Right)}, bev,
                         extent};
    } catch (const json::exception& e) {
        throw ConfigError(std::string("rig: ") + e.what());
    } catch (const DegenerateCorrespondences& e) {
        throw ConfigError(std::string("rig: ") + e.what());
    }
}

CameraRig load_rig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open rig file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("rig file " + path + " is not valid JSON: " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_rig(doc, dir.empty() ? "." : dir.string());
}

json rig_to_json(const CameraRig& rig) {
    json cams = json::object();
    for (const Camera& cam : rig.cameras) {
        const auto& g = cam.homography().coefficients();
        cams[std::string(to_string(cam.id()))] = {
            {"width", cam.width()}, {"height", cam.height()}, {"homography", std::vector<double>(g.begin(), g.end())}};
    }
    return {{"version", 1}, {"bev", bev_to_json(rig.bev)}, {"working_extent", rig.working_extent}, {"cameras", cams}};
}

void save_rig(const CameraRig& rig, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write rig file: " + path);
    out << rig_to_json(rig).dump(2) << '\n';
    if (!out) throw DataError("failed writing rig file: " + path);
}

}  // namespace linemark
