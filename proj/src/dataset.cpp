#include "linemark/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>

#include "linemark/calibration.hpp"
#include "linemark/config.hpp"
#include "linemark/errors.hpp"
#include "linemark/report.hpp"

namespace linemark {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// Minimal reader for the fixed-column numeric CSVs used here (no quoting).
class CsvReader {
public:
    CsvReader(std::string_view text, std::string source, std::string_view header)
        : text_(text), source_(std::move(source)) {
        std::string_view first;
        if (!next_line(first) || trim_cr(first) != header) {
            throw DataError(source_ + ": expected header '" + std::string(header) + "'");
        }
        columns_ = 1 + static_cast<int>(std::count(header.begin(), header.end(), ','));
    }

    /// False at end of input. Blank lines are skipped.
    bool next(std::vector<std::string_view>& fields) {
        std::string_view line;
        do {
            if (!next_line(line)) return false;
            line = trim_cr(line);
        } while (line.empty());
        fields.clear();
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (static_cast<int>(fields.size()) != columns_) {
            fail("expected " + std::to_string(columns_) + " columns, got " + std::to_string(fields.size()));
        }
        return true;
    }

    double number(std::string_view f) const {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || p != f.data() + f.size()) fail("bad number '" + std::string(f) + "'");
        return v;
    }
    int integer(std::string_view f) const {
        int v = 0;
        const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || p != f.data() + f.size()) fail("bad integer '" + std::string(f) + "'");
        return v;
    }
    int frame(std::string_view f, int frames) const {
        const int v = integer(f);
        if (v < 0 || (frames >= 0 && v >= frames)) fail("frame " + std::to_string(v) + " out of range");
        return v;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(source_ + ":" + std::to_string(line_no_) + ": " + what);
    }

private:
    bool next_line(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        const std::size_t nl = text_.find('\n', pos_);
        line = text_.substr(pos_, nl == std::string_view::npos ? std::string_view::npos : nl - pos_);
        pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
        ++line_no_;
        return true;
    }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
    int columns_ = 0;
};

template <typename T>
void place(std::vector<std::vector<T>>& out, int frame, int frames, T value) {
    if (frames < 0 && frame >= static_cast<int>(out.size())) out.resize(static_cast<std::size_t>(frame) + 1);
    out[static_cast<std::size_t>(frame)].push_back(std::move(value));
}

constexpr std::string_view kLandmarkHeader = "frame,kind,beta,theta,phi,cx,cy,confidence";
constexpr std::string_view kDetectionHeader = "frame,camera,u,v,w,h,score";
constexpr std::string_view kPoseHeader = "frame,t,x,y,yaw,dx,dy,dyaw";

}  // namespace

std::string landmarks_csv(std::span<const FrameLandmarks> frames) {
    std::string out = std::string(kLandmarkHeader) + "\n";
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (const LineLandmark& l : frames[f]) {
            out += std::to_string(f) + "," + std::string(to_string(l.kind)) + "," + format_double(l.beta) + "," +
                   format_double(l.theta) + "," + format_double(l.phi) + "," + format_double(l.cx) + "," +
                   format_double(l.cy) + "," + format_double(l.confidence) + "\n";
        }
    }
    return out;
}

std::vector<FrameLandmarks> parse_landmarks_csv(std::string_view text, int frames, const std::string& source) {
    CsvReader csv(text, source, kLandmarkHeader);
    std::vector<FrameLandmarks> out(frames < 0 ? 0 : static_cast<std::size_t>(frames));
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        const int frame = csv.frame(f[0], frames);
        const auto kind = landmark_kind_from_string(f[1]);
        if (!kind) csv.fail("unknown landmark kind '" + std::string(f[1]) + "'");
        LineLandmark l;
        l.kind = *kind;
        l.beta = csv.number(f[2]);
        l.theta = csv.number(f[3]);
        l.phi = csv.number(f[4]);
        l.cx = csv.number(f[5]);
        l.cy = csv.number(f[6]);
        l.confidence = csv.number(f[7]);
        place(out, frame, frames, l);
    }
    return out;
}

std::string detections_csv(std::span<const std::vector<DetectionBox>> frames) {
    std::string out = std::string(kDetectionHeader) + "\n";
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (const DetectionBox& d : frames[f]) {
            out += std::to_string(f) + "," + std::string(to_string(d.camera)) + "," + format_double(d.u) + "," +
                   format_double(d.v) + "," + format_double(d.w) + "," + format_double(d.h) + "," +
                   format_double(d.score) + "\n";
        }
    }
    return out;
}

std::vector<std::vector<DetectionBox>> parse_detections_csv(std::string_view text, int frames,
                                                            const std::string& source) {
    CsvReader csv(text, source, kDetectionHeader);
    std::vector<std::vector<DetectionBox>> out(frames < 0 ? 0 : static_cast<std::size_t>(frames));
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        const int frame = csv.frame(f[0], frames);
        const auto cam = camera_from_string(f[1]);
        if (!cam) csv.fail("unknown camera '" + std::string(f[1]) + "'");
        DetectionBox d{*cam, csv.number(f[2]), csv.number(f[3]), csv.number(f[4]), csv.number(f[5]),
                       csv.number(f[6])};
        if (!(d.w > 0.0 && d.h > 0.0)) csv.fail("box extents must be positive");
        place(out, frame, frames, d);
    }
    return out;
}

std::string poses_csv(std::span<const PoseRow> rows) {
    std::string out = std::string(kPoseHeader) + "\n";
    for (std::size_t f = 0; f < rows.size(); ++f) {
        const PoseRow& r = rows[f];
        out += std::to_string(f) + "," + format_double(r.t) + "," + format_double(r.pose.x) + "," +
               format_double(r.pose.y) + "," + format_double(r.pose.yaw) + "," + format_double(r.delta.dx) + "," +
               format_double(r.delta.dy) + "," + format_double(r.delta.dyaw) + "\n";
    }
    return out;
}

std::vector<PoseRow> parse_poses_csv(std::string_view text, int frames, const std::string& source) {
    CsvReader csv(text, source, kPoseHeader);
    std::vector<PoseRow> out;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        const int frame = csv.integer(f[0]);
        if (frame != static_cast<int>(out.size())) csv.fail("pose rows must be consecutive from frame 0");
        out.push_back({csv.number(f[1]),
                       {csv.number(f[2]), csv.number(f[3]), csv.number(f[4])},
                       {csv.number(f[5]), csv.number(f[6]), csv.number(f[7])}});
    }
    if (frames >= 0 && static_cast<int>(out.size()) != frames) {
        throw DataError(source + ": expected " + std::to_string(frames) + " pose rows, found " +
                        std::to_string(out.size()));
    }
    return out;
}

json scene_to_json(const SceneTruth& scene) {
    json lines = json::array();
    for (const TrueLine& l : scene.lines) {
        lines.push_back({{"kind", std::string(to_string(l.kind))},
                         {"start", {l.start.x, l.start.y}},
                         {"end", {l.end.x, l.end.y}},
                         {"width", l.width},
                         {"dashed", l.dashed},
                         {"dash", l.dash},
                         {"gap", l.gap},
                         {"phase", l.phase}});
    }
    json vehicles = json::array();
    for (const TrueVehicle& v : scene.vehicles) {
        vehicles.push_back({{"center", {v.center.x, v.center.y}},
                            {"length", v.length},
                            {"width", v.width},
                            {"heading", v.heading}});
    }
    return {{"template", scene.template_name}, {"seed", scene.seed}, {"lines", lines}, {"vehicles", vehicles}};
}

namespace {

std::string mask_name(int frame) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "masks/%05d.bevm", frame);
    return buf;
}

void make_dirs(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw DataError("cannot create directory " + p.string() + ": " + ec.message());
}

}  // namespace

std::string export_sequence(const SceneTruth& scene, const CameraRig& rig, const NoiseSpec& noise,
                            std::uint64_t seed, const std::string& out_dir) {
    const fs::path dir(out_dir);
    make_dirs(dir / "masks");

    const int n = scene.frame_count();
    std::vector<std::vector<DetectionBox>> dets(static_cast<std::size_t>(n));
    std::vector<FrameLandmarks> truth(static_cast<std::size_t>(n));
    std::vector<PoseRow> poses(static_cast<std::size_t>(n));
    json masks = json::array();
    for (int f = 0; f < n; ++f) {
        FrameObservation obs = render_frame(scene, f, rig, noise, seed);
        const std::string name = mask_name(f);
        write_mask_file(obs.mask.labels, (dir / name).string());
        masks.push_back(name);
        dets[static_cast<std::size_t>(f)] = std::move(obs.detections);
        truth[static_cast<std::size_t>(f)] = truth_landmarks(scene, f, rig);
        const auto& sample = scene.trajectory[static_cast<std::size_t>(f)];
        poses[static_cast<std::size_t>(f)] = {sample.t, sample.pose, obs.ego_delta};
    }

    const std::string rig_text = rig_to_json(rig).dump(2) + "\n";
    write_text_file((dir / "rig.json").string(), rig_text);
    write_text_file((dir / "scene.json").string(), scene_to_json(scene).dump(2) + "\n");
    write_text_file((dir / "detections.csv").string(), detections_csv(dets));
    write_text_file((dir / "truth.csv").string(), landmarks_csv(truth));
    write_text_file((dir / "poses.csv").string(), poses_csv(poses));

    const json manifest = {{"version", 1},
                           {"template", scene.template_name},
                           {"scene_seed", scene.seed},
                           {"render_seed", seed},
                           {"frames", n},
                           {"noise", noise_to_json(noise)},
                           {"rig", "rig.json"},
                           {"rig_sha256", sha256_hex(rig_text)},
                           {"scene", "scene.json"},
                           {"detections", "detections.csv"},
                           {"truth", "truth.csv"},
                           {"poses", "poses.csv"},
                           {"masks", masks}};
    const std::string manifest_path = (dir / "manifest.json").string();
    write_text_file(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

SegMask Dataset::load_mask(int frame) const {
    if (frame < 0 || frame >= frames) throw FrameOutOfRange("frame " + std::to_string(frame));
    SegMask m(rig.bev);
    m.labels = read_mask_file(mask_files[static_cast<std::size_t>(frame)]);
    if (m.labels.rows() != rig.bev.rows || m.labels.cols() != rig.bev.cols) {
        throw DataError(mask_files[static_cast<std::size_t>(frame)] + ": mask is " +
                        std::to_string(m.labels.rows()) + "x" + std::to_string(m.labels.cols()) + ", rig expects " +
                        std::to_string(rig.bev.rows) + "x" + std::to_string(rig.bev.cols));
    }
    return m;
}

Dataset load_dataset(const std::string& dir_str) {
    const fs::path dir(dir_str);
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::is_regular_file(manifest_path)) throw DataError("missing manifest: " + manifest_path.string());
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path.string()));
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }

    auto field = [&](const char* key) -> const json& {
        if (!manifest.contains(key)) throw DataError(manifest_path.string() + ": missing '" + key + "'");
        return manifest.at(key);
    };
    int frames = 0;
    std::vector<std::string> masks;
    std::string rig_file, det_file, truth_file, pose_file, rig_hash;
    try {
        if (field("version").get<int>() != 1) throw DataError(manifest_path.string() + ": unsupported version");
        frames = field("frames").get<int>();
        rig_file = field("rig").get<std::string>();
        rig_hash = field("rig_sha256").get<std::string>();
        det_file = field("detections").get<std::string>();
        truth_file = field("truth").get<std::string>();
        pose_file = field("poses").get<std::string>();
        for (const auto& m : field("masks")) masks.push_back((dir / m.get<std::string>()).string());
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    if (frames < 0 || static_cast<int>(masks.size()) != frames) {
        throw DataError(manifest_path.string() + ": mask list does not match frame count");
    }

    const std::string rig_path = (dir / rig_file).string();
    if (sha256_file(rig_path) != rig_hash) throw DataError(rig_path + ": content hash does not match the manifest");

    Dataset ds{dir_str, manifest, load_rig(rig_path), frames, std::move(masks), {}, {}, {}};
    const std::string dp = (dir / det_file).string();
    const std::string tp = (dir / truth_file).string();
    const std::string pp = (dir / pose_file).string();
    ds.detections = parse_detections_csv(read_text_file(dp), frames, dp);
    ds.truth = parse_landmarks_csv(read_text_file(tp), frames, tp);
    ds.poses = parse_poses_csv(read_text_file(pp), frames, pp);
    return ds;
}

}  // namespace linemark
