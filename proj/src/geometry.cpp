#include "linemark/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "linemark/errors.hpp"

namespace linemark {

EgoDelta relative_motion(const GroundPose& previous, const GroundPose& current) {
    const GroundPoint t = world_to_ego(previous, {current.x, current.y});
    double dyaw = current.yaw - previous.yaw;
    dyaw = std::atan2(std::sin(dyaw), std::cos(dyaw));
    return {t.x, t.y, dyaw};
}

GroundPoint world_to_ego(const GroundPose& pose, GroundPoint world) {
    const double c = std::cos(pose.yaw);
    const double s = std::sin(pose.yaw);
    const double dx = world.x - pose.x;
    const double dy = world.y - pose.y;
    return {c * dx + s * dy, -s * dx + c * dy};
}

GroundPoint ego_to_world(const GroundPose& pose, GroundPoint ego) {
    const double c = std::cos(pose.yaw);
    const double s = std::sin(pose.yaw);
    return {pose.x + c * ego.x - s * ego.y, pose.y + s * ego.x + c * ego.y};
}

// ---------------------------------------------------------------------------
// Homography

namespace {

Eigen::Matrix3d to_matrix(const Homography::Coefficients& g) {
    Eigen::Matrix3d m;
    m << g[0], g[1], g[2], g[3], g[4], g[5], g[6], g[7], 1.0;
    return m;
}

Eigen::Matrix3d checked_inverse(const Eigen::Matrix3d& m) {
    const double det = m.determinant();
    const double norm = m.cwiseAbs().maxCoeff();
    if (!std::isfinite(det) || std::abs(det) <= 1e-14 * norm * norm * norm) {
        throw DegenerateCorrespondences("homography is not invertible");
    }
    return m.inverse();
}

}  // namespace

Homography::Homography() : Homography(Coefficients{1, 0, 0, 0, 1, 0, 0, 0}) {}

Homography::Homography(const Coefficients& g) : g_(g), inverse_(checked_inverse(to_matrix(g))) {
    for (double v : g_) {
        if (!std::isfinite(v)) throw DegenerateCorrespondences("non-finite homography coefficient");
    }
}

Homography Homography::translation(double du, double dv) { return Homography({1, 0, du, 0, 1, dv, 0, 0}); }

Homography Homography::from_matrix(const Eigen::Matrix3d& m) {
    if (std::abs(m(2, 2)) < 1e-12 * m.cwiseAbs().maxCoeff()) {
        throw DegenerateCorrespondences("ground origin lies on the image horizon; constant term cannot be 1");
    }
    const Eigen::Matrix3d n = m / m(2, 2);
    return Homography({n(0, 0), n(0, 1), n(0, 2), n(1, 0), n(1, 1), n(1, 2), n(2, 0), n(2, 1)});
}

Eigen::Matrix3d Homography::matrix() const { return to_matrix(g_); }

namespace {

// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
Eigen::Matrix3d normalizer(const std::array<Eigen::Vector2d, 4>& pts) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= 4.0;
    double dist = 0.0;
    for (const auto& p : pts) dist += (p - mean).norm();
    dist /= 4.0;
    const double s = dist > 0.0 ? std::sqrt(2.0) / dist : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
    return t;
}

// Rows of the 8x8 system in the unknowns {G1, G2, G4, G5, G6, G8, G9, G10}.
void assemble(const std::array<Eigen::Vector2d, 4>& ground, const std::array<Eigen::Vector2d, 4>& image,
              Eigen::Matrix<double, 8, 8>& a, Eigen::Matrix<double, 8, 1>& b) {
    for (int i = 0; i < 4; ++i) {
        const double x = ground[i].x(), y = ground[i].y();
        const double u = image[i].x(), v = image[i].y();
        a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        b(2 * i) = u;
        b(2 * i + 1) = v;
    }
}

struct NormalizedSystem {
    Eigen::Matrix3d tg, ti;
    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> b;
};

NormalizedSystem normalized_system(std::span<const Correspondence, 4> pairs) {
    std::array<Eigen::Vector2d, 4> g, im;
    for (int i = 0; i < 4; ++i) {
        g[i] = {pairs[i].ground.x, pairs[i].ground.y};
        im[i] = {pairs[i].image.u, pairs[i].image.v};
        if (!g[i].allFinite() || !im[i].allFinite()) {
            throw DegenerateCorrespondences("non-finite correspondence");
        }
    }
    NormalizedSystem sys;
    sys.tg = normalizer(g);
    sys.ti = normalizer(im);
    for (int i = 0; i < 4; ++i) {
        g[i] = (sys.tg * g[i].homogeneous()).hnormalized();
        im[i] = (sys.ti * im[i].homogeneous()).hnormalized();
    }
    assemble(g, im, sys.a, sys.b);
    return sys;
}

}  // namespace

double correspondence_condition(std::span<const Correspondence, 4> pairs) {
    const auto sys = normalized_system(pairs);
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(sys.a);
    const auto& sv = svd.singularValues();
    if (sv(7) <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / sv(7);
}

Homography solve_homography(std::span<const Correspondence, 4> pairs, const SolveOptions& opts) {
    const auto sys = normalized_system(pairs);
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(sys.a);
    const auto& sv = svd.singularValues();
    const double cond = sv(7) > 0.0 ? sv(0) / sv(7) : std::numeric_limits<double>::infinity();
    if (!(cond <= opts.max_condition)) {
        throw DegenerateCorrespondences("correspondence system is near-singular (condition " + std::to_string(cond) +
                                        ")");
    }
    const Eigen::Matrix<double, 8, 1> x = sys.a.fullPivLu().solve(sys.b);
    Eigen::Matrix3d hn;
    hn << x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), 1.0;
    const Eigen::Matrix3d h = sys.ti.inverse() * hn * sys.tg;
    Homography out = Homography::from_matrix(h);

    // One step of iterative refinement on the original (unnormalized)
    // equations pulls the reprojection residual down to rounding level.
    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> b;
    std::array<Eigen::Vector2d, 4> g, im;
    for (int i = 0; i < 4; ++i) {
        g[i] = {pairs[i].ground.x, pairs[i].ground.y};
        im[i] = {pairs[i].image.u, pairs[i].image.v};
    }
    assemble(g, im, a, b);
    Eigen::Matrix<double, 8, 1> coef = Eigen::Map<const Eigen::Matrix<double, 8, 1>>(out.coefficients().data());
    const Eigen::Matrix<double, 8, 1> residual = b - a * coef;
    coef += a.fullPivLu().solve(residual);
    Homography::Coefficients refined;
    for (int i = 0; i < 8; ++i) refined[i] = coef(i);
    return Homography(refined);
}

ImagePoint project(const Homography& h, GroundPoint p, double eps) {
    const auto& g = h.coefficients();
    const double w = h.denominator(p);
    if (!(std::abs(w) >= eps)) throw HorizonSingularity("ground point maps to the image horizon");
    return {(g[0] * p.x + g[1] * p.y + g[2]) / w, (g[3] * p.x + g[4] * p.y + g[5]) / w};
}

GroundPoint ipm_to_ground(const Homography& h, ImagePoint q, const IpmOptions& opts) {
    const Eigen::Vector3d r = h.inverse_matrix() * Eigen::Vector3d(q.u, q.v, 1.0);
    // Scale-invariant horizon test: compare against the magnitude of the
    // inverse row so the threshold does not depend on pixel units.
    const double scale = h.inverse_matrix().row(2).cwiseAbs().dot(Eigen::Vector3d(std::abs(q.u), std::abs(q.v), 1.0));
    if (!(std::abs(r.z()) >= opts.eps * std::max(scale, 1e-300))) {
        throw HorizonSingularity("image point lies on the ground horizon");
    }
    GroundPoint p{r.x() / r.z(), r.y() / r.z()};
    if (opts.working_extent && (std::abs(p.x) > *opts.working_extent || std::abs(p.y) > *opts.working_extent)) {
        throw OutOfWorkingArea("ground point outside the working area");
    }
    return p;
}

// ---------------------------------------------------------------------------
// IpmTable

IpmTable::IpmTable(double u0, double v0, double step, int nu, int nv, std::vector<GroundPoint> samples)
    : u0_(u0), v0_(v0), step_(step), nu_(nu), nv_(nv), samples_(std::move(samples)) {
    if (step <= 0.0 || nu < 2 || nv < 2 || samples_.size() != static_cast<std::size_t>(nu) * nv) {
        throw ConfigError("IPM table must be a regular grid of at least 2x2 samples");
    }
}

IpmTable IpmTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open IPM table: " + path);
    std::string line;
    std::getline(in, line);
    std::map<std::pair<double, double>, GroundPoint> cells;  // keyed by (v, u)
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double u, v, x, y;
        if (!(ss >> u >> v >> x >> y)) throw DataError("malformed IPM table row in " + path + ": " + line);
        cells[{v, u}] = {x, y};
    }
    std::vector<double> us, vs;
    for (const auto& [key, _] : cells) {
        vs.push_back(key.first);
        us.push_back(key.second);
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    if (us.size() < 2 || vs.size() < 2 || cells.size() != us.size() * vs.size()) {
        throw DataError("IPM table is not a full grid: " + path);
    }
    const double step = us[1] - us[0];
    for (std::size_t i = 1; i < us.size(); ++i) {
        if (std::abs(us[i] - us[i - 1] - step) > 1e-9) throw DataError("IPM table u spacing is irregular: " + path);
    }
    for (std::size_t i = 1; i < vs.size(); ++i) {
        if (std::abs(vs[i] - vs[i - 1] - step) > 1e-9) throw DataError("IPM table v spacing must match u: " + path);
    }
    std::vector<GroundPoint> samples;
    samples.reserve(cells.size());
    for (const auto& [_, p] : cells) samples.push_back(p);  // map order is v-major then u
    return IpmTable(us.front(), vs.front(), step, static_cast<int>(us.size()), static_cast<int>(vs.size()),
                    std::move(samples));
}

bool IpmTable::covers(ImagePoint q) const {
    return q.u >= u0_ && q.v >= v0_ && q.u <= u0_ + step_ * (nu_ - 1) && q.v <= v0_ + step_ * (nv_ - 1);
}

std::optional<GroundPoint> IpmTable::lookup(ImagePoint q) const {
    if (!covers(q)) return std::nullopt;
    const double fu = (q.u - u0_) / step_;
    const double fv = (q.v - v0_) / step_;
    const int iu = std::min(static_cast<int>(fu), nu_ - 2);
    const int iv = std::min(static_cast<int>(fv), nv_ - 2);
    const double a = fu - iu;
    const double b = fv - iv;
    auto at = [&](int u, int v) { return samples_[static_cast<std::size_t>(v) * nu_ + u]; };
    const GroundPoint p00 = at(iu, iv), p10 = at(iu + 1, iv), p01 = at(iu, iv + 1), p11 = at(iu + 1, iv + 1);
    return GroundPoint{(1 - a) * (1 - b) * p00.x + a * (1 - b) * p10.x + (1 - a) * b * p01.x + a * b * p11.x,
                       (1 - a) * (1 - b) * p00.y + a * (1 - b) * p10.y + (1 - a) * b * p01.y + a * b * p11.y};
}

// ---------------------------------------------------------------------------
// Cameras and rigs

std::string_view to_string(CameraId id) {
    switch (id) {
        case CameraId::Front: return "front";
        case CameraId::Rear: return "rear";
        case CameraId::Left: return "left";
        case CameraId::Right: return "right";
    }
    return "?";
}

std::optional<CameraId> camera_from_string(std::string_view name) {
    for (CameraId id : kCameraPriority) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

Homography bev_raster_homography(const BevSpec& bev) {
    // col = cc + (x - ox)/s, row = cr - (y - oy)/s
    const double inv = 1.0 / bev.scale;
    return Homography({inv, 0.0, bev.center_col() - bev.origin.x * inv, 0.0, -inv,
                       bev.center_row() + bev.origin.y * inv, 0.0, 0.0});
}

Camera::Camera(CameraId id, Homography h, int width, int height)
    : id_(id), h_(std::move(h)), width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw ConfigError("camera image size must be positive");
    // The bottom-center pixel of a ground-looking camera is below the horizon,
    // so the sign of the denominator at its back-projection marks the
    // visible half-plane.
    const Eigen::Vector3d r = h_.inverse_matrix() * Eigen::Vector3d(0.5 * width_, height_ - 1.0, 1.0);
    if (std::abs(r.z()) > 0.0) {
        const GroundPoint p{r.x() / r.z(), r.y() / r.z()};
        facing_sign_ = h_.denominator(p) >= 0.0 ? 1.0 : -1.0;
    }
}

bool Camera::in_front(GroundPoint p) const { return facing_sign_ * h_.denominator(p) > kHorizonEps; }

std::optional<ImagePoint> Camera::image_of(GroundPoint p) const {
    if (!in_front(p)) return std::nullopt;
    const ImagePoint q = project(h_, p);
    if (!in_frame(q)) return std::nullopt;
    return q;
}

GroundPoint Camera::to_ground(ImagePoint q, const IpmOptions& opts) const {
    if (table_) {
        if (auto p = table_->lookup(q)) {
            if (opts.working_extent && (std::abs(p->x) > *opts.working_extent || std::abs(p->y) > *opts.working_extent)) {
                throw OutOfWorkingArea("ground point outside the working area");
            }
            return *p;
        }
    }
    return ipm_to_ground(h_, q, opts);
}

CameraRig identity_rig(const BevSpec& bev) {
    const Homography h = bev_raster_homography(bev);
    return CameraRig{{Camera(CameraId::Front, h, bev.cols, bev.rows), Camera(CameraId::Rear, h, bev.cols, bev.rows),
                      Camera(CameraId::Left, h, bev.cols, bev.rows), Camera(CameraId::Right, h, bev.cols, bev.rows)},
                     bev,
                     50.0};
}

Homography pinhole_ground_homography(double focal, double cu, double cv, const Eigen::Vector3d& position,
                                     GroundPoint facing, double pitch) {
    Eigen::Vector2d f(facing.x, facing.y);
    f.normalize();
    const Eigen::Vector3d axis(std::cos(pitch) * f.x(), std::cos(pitch) * f.y(), -std::sin(pitch));
    const Eigen::Vector3d right(f.y(), -f.x(), 0.0);
    const Eigen::Vector3d down = axis.cross(right);
    Eigen::Matrix3d r;
    r.row(0) = right;
    r.row(1) = down;
    r.row(2) = axis;
    Eigen::Matrix3d k;
    k << focal, 0, cu, 0, focal, cv, 0, 0, 1;
    Eigen::Matrix3d m;
    m.col(0) = r.col(0);
    m.col(1) = r.col(1);
    m.col(2) = -r * position;
    return Homography::from_matrix(k * m);
}

}  // namespace linemark
