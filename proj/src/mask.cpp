#include "linemark/mask.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "linemark/errors.hpp"

namespace linemark {

namespace {

constexpr std::array<char, 8> kMaskMagic = {'L', 'M', 'K', 'B', 'E', 'V', 'M', '\0'};

void put_u32(char* out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
}

std::uint32_t get_u32(const char* in) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i])) << (8 * i);
    return v;
}

}  // namespace

std::size_t LabelGrid::count(MaskClass c) const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), static_cast<std::uint8_t>(c)));
}

std::size_t LabelGrid::foreground_count() const { return cells_.size() - count(MaskClass::Background); }

void write_mask_file(const LabelGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write mask file: " + path);
    char header[16];
    std::memcpy(header, kMaskMagic.data(), 8);
    put_u32(header + 8, static_cast<std::uint32_t>(grid.rows()));
    put_u32(header + 12, static_cast<std::uint32_t>(grid.cols()));
    out.write(header, sizeof header);
    out.write(reinterpret_cast<const char*>(grid.data().data()), static_cast<std::streamsize>(grid.data().size()));
    if (!out) throw DataError("failed writing mask file: " + path);
}

LabelGrid read_mask_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open mask file: " + path);
    char header[16];
    if (!in.read(header, sizeof header)) throw DataError("truncated mask header: " + path);
    if (std::memcmp(header, kMaskMagic.data(), 8) != 0) throw DataError("bad mask magic: " + path);
    const std::uint32_t rows = get_u32(header + 8);
    const std::uint32_t cols = get_u32(header + 12);
    if (rows == 0 || cols == 0 || rows > 1u << 15 || cols > 1u << 15) throw DataError("bad mask dimensions: " + path);
    LabelGrid grid(static_cast<int>(rows), static_cast<int>(cols));
    if (!in.read(reinterpret_cast<char*>(grid.data().data()), static_cast<std::streamsize>(grid.data().size()))) {
        throw DataError("truncated mask body: " + path);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in mask file: " + path);
    for (std::uint8_t v : grid.data()) {
        if (v >= kMaskClassCount) throw DataError("invalid class label in mask file: " + path);
    }
    return grid;
}

BevWarp::BevWarp(const CameraRig& rig) : bev_(rig.bev) {
    const BevSpec& bev = rig.bev;
    sources_.assign(static_cast<std::size_t>(bev.rows) * bev.cols, Source{});
    for (int r = 0; r < bev.rows; ++r) {
        for (int c = 0; c < bev.cols; ++c) {
            const GroundPoint p = bev.cell_to_ground(c, r);
            for (CameraId id : kCameraPriority) {
                const Camera& cam = rig.camera(id);
                if (!cam.in_front(p)) continue;
                const ImagePoint q = project(cam.homography(), p);
                const double u = std::floor(q.u + 0.5);
                const double v = std::floor(q.v + 0.5);
                if (cam.in_frame({u, v})) {
                    sources_[static_cast<std::size_t>(r) * bev.cols + c] = {static_cast<int>(id),
                                                                            static_cast<int>(v), static_cast<int>(u)};
                    break;
                }
            }
        }
    }
}

std::vector<int> BevWarp::owners() const {
    std::vector<int> out(sources_.size());
    for (std::size_t i = 0; i < sources_.size(); ++i) out[i] = sources_[i].camera;
    return out;
}

SegMask BevWarp::apply(std::span<const LabelGrid, 4> images) const {
    SegMask out(bev_);
    std::vector<std::uint8_t>& cells = out.labels.data();
    for (std::size_t i = 0; i < sources_.size(); ++i) {
        const Source& s = sources_[i];
        if (s.camera < 0) continue;
        const LabelGrid& img = images[static_cast<std::size_t>(s.camera)];
        if (img.contains(s.row, s.col)) cells[i] = img.at(s.row, s.col);
    }
    return out;
}

std::vector<int> bev_camera_owner(const CameraRig& rig) { return BevWarp(rig).owners(); }

SegMask warp_to_bev(const CameraRig& rig, std::span<const LabelGrid, 4> images) { return BevWarp(rig).apply(images); }

}  // namespace linemark
