#pragma once

// Ground-plane homographies, forward projection and inverse perspective
// mapping (IPM) for a four-camera surround rig.
//
// Conventions: the ego frame has x lateral (positive right), y longitudinal
// (positive along the heading) and z up; its origin is the front camera
// center projected onto the ground. All ground points live on z = 0.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace linemark {

struct GroundPoint {
    double x = 0.0;  // m, lateral
    double y = 0.0;  // m, longitudinal

    bool operator==(const GroundPoint&) const = default;
};

struct ImagePoint {
    double u = 0.0;  // px, column
    double v = 0.0;  // px, row

    bool operator==(const ImagePoint&) const = default;
};

/// Ego pose in the world frame; yaw is counter-clockwise from +y.
struct GroundPose {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
};

/// Motion between consecutive frames expressed in the previous ego frame.
struct EgoDelta {
    double dx = 0.0;
    double dy = 0.0;
    double dyaw = 0.0;
};

EgoDelta relative_motion(const GroundPose& previous, const GroundPose& current);

/// World point -> ego frame at `pose`.
GroundPoint world_to_ego(const GroundPose& pose, GroundPoint world);
GroundPoint ego_to_world(const GroundPose& pose, GroundPoint ego);

struct Correspondence {
    GroundPoint ground;
    ImagePoint image;
};

/// The 8-parameter ground-to-image map
///
///     u = (G1 X + G2 Y + G4) / (G9 X + G10 Y + 1)
///     v = (G5 X + G6 Y + G8) / (G9 X + G10 Y + 1)
///
/// i.e. the general planar projective map with the Z terms dropped and the
/// constant denominator term fixed to one. Coefficients are stored in the
/// order {G1, G2, G4, G5, G6, G8, G9, G10}.
class Homography {
public:
    using Coefficients = std::array<double, 8>;

    Homography();  // identity
    explicit Homography(const Coefficients& g);

    static Homography identity() { return Homography(); }
    static Homography translation(double du, double dv);
    /// Builds from a 3x3 matrix, rescaling so that m(2,2) == 1.
    static Homography from_matrix(const Eigen::Matrix3d& m);

    [[nodiscard]] const Coefficients& coefficients() const { return g_; }
    [[nodiscard]] Eigen::Matrix3d matrix() const;
    [[nodiscard]] const Eigen::Matrix3d& inverse_matrix() const { return inverse_; }
    [[nodiscard]] double denominator(GroundPoint p) const { return g_[6] * p.x + g_[7] * p.y + 1.0; }

private:
    Coefficients g_;
    Eigen::Matrix3d inverse_;
};

struct SolveOptions {
    double max_condition = 1e10;
};

/// Solves the 8x8 linear system of the four correspondences. Throws
/// DegenerateCorrespondences when the (normalized) system is singular or its
/// condition number exceeds `max_condition`.
Homography solve_homography(std::span<const Correspondence, 4> pairs, const SolveOptions& opts = {});

/// Condition number of the point-normalized 8x8 correspondence system.
double correspondence_condition(std::span<const Correspondence, 4> pairs);

inline constexpr double kHorizonEps = 1e-9;

/// Throws HorizonSingularity if |denominator| < eps.
ImagePoint project(const Homography& h, GroundPoint p, double eps = kHorizonEps);

struct IpmOptions {
    double eps = kHorizonEps;
    /// |x| and |y| limit for the result; OutOfWorkingArea beyond it.
    std::optional<double> working_extent;
};

GroundPoint ipm_to_ground(const Homography& h, ImagePoint q, const IpmOptions& opts = {});

/// Dense image->ground lookup table sampled on a regular pixel grid, used in
/// place of the analytic inverse when a calibrated rig provides one.
class IpmTable {
public:
    IpmTable(double u0, double v0, double step, int nu, int nv, std::vector<GroundPoint> samples);

    /// Reads a CSV with header `u,v,x,y` whose (u,v) rows form a full regular grid.
    static IpmTable load_csv(const std::string& path);

    [[nodiscard]] bool covers(ImagePoint q) const;
    /// Bilinear interpolation; std::nullopt outside the sampled grid.
    [[nodiscard]] std::optional<GroundPoint> lookup(ImagePoint q) const;

private:
    double u0_, v0_, step_;
    int nu_, nv_;
    std::vector<GroundPoint> samples_;  // row-major over v then u
};

enum class CameraId : std::uint8_t { Front = 0, Rear = 1, Left = 2, Right = 3 };
inline constexpr std::array<CameraId, 4> kCameraPriority = {CameraId::Front, CameraId::Rear, CameraId::Left,
                                                            CameraId::Right};

std::string_view to_string(CameraId id);
std::optional<CameraId> camera_from_string(std::string_view name);

/// BEV raster layout. Row 0 is the farthest-forward row; cell (row, col) has
/// its center at integer raster coordinates and `origin` is the ground
/// position of the raster center.
struct BevSpec {
    int rows = 600;
    int cols = 480;
    double scale = 0.02;  // meters per cell
    GroundPoint origin{};

    [[nodiscard]] double center_col() const { return 0.5 * (cols - 1); }
    [[nodiscard]] double center_row() const { return 0.5 * (rows - 1); }
    /// Column / row raster coordinate of the ego origin.
    [[nodiscard]] double ego_col() const { return center_col() - origin.x / scale; }
    [[nodiscard]] double ego_row() const { return center_row() + origin.y / scale; }

    [[nodiscard]] GroundPoint cell_to_ground(double col, double row) const {
        return {origin.x + (col - center_col()) * scale, origin.y + (center_row() - row) * scale};
    }
    /// Returns (col, row) raster coordinates.
    [[nodiscard]] Eigen::Vector2d ground_to_cell(GroundPoint p) const {
        return {center_col() + (p.x - origin.x) / scale, center_row() - (p.y - origin.y) / scale};
    }
    [[nodiscard]] bool valid() const { return rows > 0 && cols > 0 && scale > 0.0; }
    bool operator==(const BevSpec&) const = default;
};

/// Homography mapping BEV cell centers onto the pixel grid of the raster
/// itself: used by identity rigs and by tests.
Homography bev_raster_homography(const BevSpec& bev);

class Camera {
public:
    Camera(CameraId id, Homography h, int width = 1280, int height = 960);

    [[nodiscard]] CameraId id() const { return id_; }
    [[nodiscard]] const Homography& homography() const { return h_; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }

    [[nodiscard]] bool in_frame(ImagePoint q) const {
        return q.u >= 0.0 && q.v >= 0.0 && q.u < width_ && q.v < height_;
    }
    /// True when `p` lies on the visible side of the camera's horizon.
    [[nodiscard]] bool in_front(GroundPoint p) const;
    /// Projection of a visible ground point inside the image, else nullopt.
    [[nodiscard]] std::optional<ImagePoint> image_of(GroundPoint p) const;
    /// IPM through the lookup table when present, the analytic inverse otherwise.
    [[nodiscard]] GroundPoint to_ground(ImagePoint q, const IpmOptions& opts = {}) const;

    void set_ipm_table(IpmTable table) { table_ = std::move(table); }
    [[nodiscard]] const std::optional<IpmTable>& ipm_table() const { return table_; }

private:
    CameraId id_;
    Homography h_;
    int width_;
    int height_;
    double facing_sign_ = 1.0;
    std::optional<IpmTable> table_;
};

struct CameraRig {
    std::array<Camera, 4> cameras;  // indexed by CameraId
    BevSpec bev;
    double working_extent = 50.0;

    [[nodiscard]] const Camera& camera(CameraId id) const { return cameras[static_cast<std::size_t>(id)]; }
    [[nodiscard]] bool valid() const { return bev.valid() && working_extent > 0.0; }
};

/// Rig whose four cameras all see the BEV raster itself (image == BEV grid).
CameraRig identity_rig(const BevSpec& bev = {});

/// Ground homography of an ideal pinhole camera at `position` (z = height)
/// facing the ground direction `facing` and pitched down by `pitch` radians.
Homography pinhole_ground_homography(double focal, double cu, double cv, const Eigen::Vector3d& position,
                                     GroundPoint facing, double pitch);

}  // namespace linemark
