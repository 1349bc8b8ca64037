#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linemark/geometry.hpp"

namespace linemark {

/// Class labels as stored in masks and mask files.
enum class MaskClass : std::uint8_t { Background = 0, Lane = 1, Parking = 2, Median = 3 };
inline constexpr int kMaskClassCount = 4;

/// Row-major grid of class labels.
class LabelGrid {
public:
    LabelGrid() = default;
    LabelGrid(int rows, int cols) : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, 0) {}

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < rows_ && col < cols_; }

    [[nodiscard]] std::uint8_t at(int row, int col) const { return cells_[index(row, col)]; }
    std::uint8_t& at(int row, int col) { return cells_[index(row, col)]; }
    [[nodiscard]] MaskClass label(int row, int col) const { return static_cast<MaskClass>(at(row, col)); }
    void set(int row, int col, MaskClass c) { at(row, col) = static_cast<std::uint8_t>(c); }

    [[nodiscard]] std::span<const std::uint8_t> row_span(int row) const {
        return {cells_.data() + static_cast<std::size_t>(row) * cols_, static_cast<std::size_t>(cols_)};
    }
    [[nodiscard]] const std::vector<std::uint8_t>& data() const { return cells_; }
    std::vector<std::uint8_t>& data() { return cells_; }

    [[nodiscard]] std::size_t count(MaskClass c) const;
    [[nodiscard]] std::size_t foreground_count() const;

    bool operator==(const LabelGrid&) const = default;

private:
    [[nodiscard]] std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * cols_ + col; }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// BEV segmentation mask: a label grid tied to its raster layout.
struct SegMask {
    BevSpec bev;
    LabelGrid labels;

    SegMask() = default;
    explicit SegMask(const BevSpec& spec) : bev(spec), labels(spec.rows, spec.cols) {}

    bool operator==(const SegMask&) const = default;
};

/// Writes the 16-byte header ("LMKBEVM\0", uint32 rows, uint32 cols, little
/// endian) followed by one byte per cell, row-major.
void write_mask_file(const LabelGrid& grid, const std::string& path);
LabelGrid read_mask_file(const std::string& path);

/// Fills every BEV cell by inverse mapping its ground center into the first
/// camera (front > rear > left > right) that sees it, nearest-neighbour.
/// `images` is indexed by CameraId.
SegMask warp_to_bev(const CameraRig& rig, std::span<const LabelGrid, 4> images);

/// Precomputed nearest-neighbour source pixel of every BEV cell, for
/// warping many frames through the same rig.
class BevWarp {
public:
    explicit BevWarp(const CameraRig& rig);
    [[nodiscard]] SegMask apply(std::span<const LabelGrid, 4> images) const;
    /// Owning camera index per cell, -1 where no camera sees it.
    [[nodiscard]] std::vector<int> owners() const;

private:
    struct Source {
        int camera = -1;
        int row = 0;
        int col = 0;
    };
    BevSpec bev_;
    std::vector<Source> sources_;
};

/// Owning camera index per BEV cell (-1 when no camera sees the cell).
std::vector<int> bev_camera_owner(const CameraRig& rig);

}  // namespace linemark
