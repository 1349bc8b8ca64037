#include "linemark/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "linemark/errors.hpp"

namespace linemark {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json score_json(const KindScore& k) {
    return {{"predictions", k.predictions}, {"truths", k.truths},   {"matched", k.matched},
            {"fd", k.fd()},                 {"md", k.md()},         {"accuracy", k.accuracy()},
            {"mean_dtheta", k.matched ? k.sum_dtheta / double(k.matched) : 0.0},
            {"mean_dbeta", k.matched ? k.sum_dbeta / double(k.matched) : 0.0}};
}

std::string score_row(std::string_view name, const KindScore& k) {
    return std::string(name) + "," + std::to_string(k.predictions) + "," + std::to_string(k.truths) + "," +
           std::to_string(k.matched) + "," + fmt(k.fd()) + "," + fmt(k.md()) + "," + fmt(k.accuracy()) + "\n";
}

}  // namespace

nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json kinds = nlohmann::json::object();
    for (LandmarkKind k : kLandmarkKinds) kinds[std::string(to_string(k))] = score_json(m.of(k));
    const SeriesStats c0 = dc0_stats(m.frames);
    const SeriesStats c1 = dc1_stats(m.frames);
    return {{"kinds", kinds},
            {"all", score_json(m.total())},
            {"frames", m.frames.size()},
            {"dc0", {{"max", c0.max}, {"mean", c0.mean}, {"variance", c0.variance}}},
            {"dc1", {{"max", c1.max}, {"mean", c1.mean}, {"variance", c1.variance}}}};
}

std::string metrics_csv(const Metrics& m) {
    std::string out = "kind,predictions,truths,matched,fd,md,accuracy\n";
    for (LandmarkKind k : kLandmarkKinds) out += score_row(to_string(k), m.of(k));
    out += score_row("all", m.total());
    return out;
}

std::string error_curves_csv(std::span<const CurveSeries> series) {
    std::string out = "frame";
    for (const auto& s : series) out += "," + s.name + "_dc0," + s.name + "_dc1";
    out += "\n";
    const std::size_t n = series.empty() ? 0 : series.front().curve.size();
    for (std::size_t f = 0; f < n; ++f) {
        out += std::to_string(series.front().curve[f].frame);
        for (const auto& s : series) out += "," + fmt(s.curve[f].dc0) + "," + fmt(s.curve[f].dc1);
        out += "\n";
    }
    return out;
}

std::string error_curves_svg(std::span<const CurveSeries> series) {
    static constexpr const char* kColors[] = {"#c0392b", "#2471a3", "#27ae60", "#7d3c98"};
    const double W = 800, panel_h = 220, left = 60, right = 20, top = 30, gap = 50;
    const std::size_t n = series.empty() ? 0 : series.front().curve.size();
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << top + 2 * panel_h + gap + 40 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int panel = 0; panel < 2; ++panel) {
        const double y0 = top + panel * (panel_h + gap);
        double ymax = 0.0;
        for (const auto& s : series) {
            for (const auto& e : s.curve) ymax = std::max(ymax, panel == 0 ? e.dc0 : e.dc1);
        }
        if (ymax <= 0.0) ymax = 1.0;
        const double pw = W - left - right;
        svg << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << panel_h
            << "\" fill=\"none\" stroke=\"#888\"/>\n";
        svg << "<text x=\"" << left << "\" y=\"" << y0 - 8 << "\">"
            << (panel == 0 ? "intercept error dC0 (cells)" : "slope error dC1") << ", max " << fmt(ymax)
            << "</text>\n";
        for (std::size_t si = 0; si < series.size(); ++si) {
            svg << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << kColors[si % 4] << "\" points=\"";
            for (std::size_t f = 0; f < n; ++f) {
                const auto& e = series[si].curve[f];
                const double x = left + (n > 1 ? pw * double(f) / double(n - 1) : 0.0);
                const double y = y0 + panel_h - panel_h * (panel == 0 ? e.dc0 : e.dc1) / ymax;
                svg << x << "," << y << " ";
            }
            svg << "\"/>\n";
        }
    }
    const double ly = top + 2 * panel_h + gap + 25;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double lx = left + 150.0 * double(si);
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly - 4
            << "\" stroke=\"" << kColors[si % 4] << "\" stroke-width=\"2\"/>";
        svg << "<text x=\"" << lx + 26 << "\" y=\"" << ly << "\">" << series[si].name << "</text>\n";
    }
    svg << "<text x=\"" << W / 2 << "\" y=\"" << ly << "\">frame</text>\n</svg>\n";
    return svg.str();
}

nlohmann::json timing_to_json(const TimingReport& r) {
    nlohmann::json stages = nlohmann::json::object();
    for (std::size_t k = 0; k < kStageCount; ++k) {
        stages[kStageNames[k]] = {{"mean_ms", r.stage[k].mean}, {"p95_ms", r.stage[k].p95}};
    }
    return {{"frames", r.frames},
            {"stages", stages},
            {"total", {{"mean_ms", r.total.mean}, {"p95_ms", r.total.p95}}},
            {"stage_sum", {{"mean_ms", r.stage_sum.mean}, {"p95_ms", r.stage_sum.p95}}},
            {"max_accounting_error_ms", r.max_accounting_error}};
}

std::string timing_csv(std::span<const StageTimes> frames) {
    std::string out = "frame";
    for (const char* name : kStageNames) out += std::string(",") + name + "_ms";
    out += ",total_ms\n";
    for (std::size_t f = 0; f < frames.size(); ++f) {
        out += std::to_string(f);
        for (double v : frames[f].stage) out += "," + fmt(v);
        out += "," + fmt(frames[f].total) + "\n";
    }
    return out;
}

}  // namespace linemark
