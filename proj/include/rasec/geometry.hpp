#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rasec/complex_matrix.hpp"

namespace rasec {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

struct RotationAngles {
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

/// Candidate antenna sites on the array plane, initially in the x-o-z plane.
struct ArrayPlaneGrid {
    std::vector<Vec3> sites;  // y components all zero
    double pitch = 0.0;       // meters
};

/// Rotates a plane site (x, 0, z) by the composed tilt/azimuth rotation.
inline Vec3 rotate_point(const RotationAngles& r, const Vec3& t) {
    const double ca = std::cos(r.alpha), sa = std::sin(r.alpha);
    const double cb = std::cos(r.beta), sb = std::sin(r.beta);
    const double cg = std::cos(r.gamma), sg = std::sin(r.gamma);
    return {
        cb * cg * t.x - sb * t.z,
        (sb * sa * cg - ca * sg) * t.x + cb * sa * t.z,
        (ca * sb * cg + sa * sg) * t.x + ca * cb * t.z,
    };
}

/// Columns of the full 3D rotation: images of the x, y, z axes. The y image
/// (the plane normal, the element boresight) follows from properness:
/// R(z x x) = Rz x Rx.
struct RotationFrame {
    Vec3 ex, ey, ez;

    static RotationFrame from(const RotationAngles& r) {
        RotationFrame f;
        f.ex = rotate_point(r, {1.0, 0.0, 0.0});
        f.ez = rotate_point(r, {0.0, 0.0, 1.0});
        f.ey = f.ez.cross(f.ex);
        return f;
    }

    /// Expresses a global direction in this rotated frame.
    Vec3 to_local(const Vec3& v) const { return {ex.dot(v), ey.dot(v), ez.dot(v)}; }
};

struct Pose {
    std::size_t n = 0;  // rotation index
    std::size_t m = 0;  // translation index
    RotationAngles angles;
    Vec3 origin;
    std::vector<Vec3> site_coords;  // origin + rotated grid sites
};

struct AntennaLayout {
    std::vector<std::uint8_t> mask;  // one flag per grid site
    std::size_t count = 0;           // number of set flags

    static AntennaLayout first_sites(std::size_t q_hat, std::size_t a) {
        AntennaLayout l;
        l.mask.assign(q_hat, 0);
        for (std::size_t q = 0; q < a && q < q_hat; ++q) l.mask[q] = 1;
        l.count = std::min(a, q_hat);
        return l;
    }
    std::vector<std::size_t> selected() const {
        std::vector<std::size_t> s;
        for (std::size_t q = 0; q < mask.size(); ++q)
            if (mask[q]) s.push_back(q);
        return s;
    }
};

inline Pose pose_coordinates(const ArrayPlaneGrid& grid, const RotationAngles& angles,
                             const Vec3& origin, std::size_t n = 0, std::size_t m = 0) {
    if (grid.sites.empty()) throw std::invalid_argument("pose_coordinates: empty grid");
    Pose p;
    p.n = n;
    p.m = m;
    p.angles = angles;
    p.origin = origin;
    p.site_coords.reserve(grid.sites.size());
    for (const Vec3& t : grid.sites) p.site_coords.push_back(origin + rotate_point(angles, t));
    return p;
}

struct PoseGridSpec {
    std::vector<RotationAngles> rotations;  // N entries
    std::vector<Vec3> origins;              // M entries
};

/// All N*M poses, row-major with the rotation index outer.
inline std::vector<Pose> enumerate_pose_grid(const ArrayPlaneGrid& grid,
                                             const PoseGridSpec& spec) {
    if (spec.rotations.empty()) throw std::invalid_argument("enumerate_pose_grid: no rotations");
    if (spec.origins.empty()) throw std::invalid_argument("enumerate_pose_grid: no origins");
    std::vector<Pose> poses;
    poses.reserve(spec.rotations.size() * spec.origins.size());
    for (std::size_t n = 0; n < spec.rotations.size(); ++n)
        for (std::size_t m = 0; m < spec.origins.size(); ++m)
            poses.push_back(pose_coordinates(grid, spec.rotations[n], spec.origins[m], n, m));
    return poses;
}

/// True when every pair of selected sites is at least d apart.
inline bool min_spacing_ok(const Pose& pose, const AntennaLayout& layout, double d) {
    const std::vector<std::size_t> sel = layout.selected();
    for (std::size_t i = 0; i < sel.size(); ++i)
        for (std::size_t j = i + 1; j < sel.size(); ++j)
            if (distance(pose.site_coords[sel[i]], pose.site_coords[sel[j]]) < d) return false;
    return true;
}

/// p_F = sum_q f_q 2^q. Exact only while the mask fits an integer.
inline std::uint64_t layout_encode(const AntennaLayout& layout) {
    if (layout.mask.size() > 62)
        throw std::invalid_argument(
            "layout_encode: mask wider than 62 exceeds exact integer range; "
            "use layout_encode_normalized");
    std::uint64_t p = 0;
    for (std::size_t q = 0; q < layout.mask.size(); ++q)
        if (layout.mask[q]) p |= (std::uint64_t{1} << q);
    return p;
}

inline AntennaLayout layout_decode(std::uint64_t p, std::size_t q_hat) {
    AntennaLayout l;
    l.mask.assign(q_hat, 0);
    for (std::size_t q = 0; q < q_hat; ++q)
        if (p & (std::uint64_t{1} << q)) {
            l.mask[q] = 1;
            ++l.count;
        }
    return l;
}

/// sum_q f_q 2^q / 2^Q in double precision; collision-tolerant state feature
/// for wide masks.
inline double layout_encode_normalized(const AntennaLayout& layout) {
    double p = 0.0;
    double w = 1.0;
    const double total = std::ldexp(1.0, static_cast<int>(layout.mask.size()));
    for (std::size_t q = 0; q < layout.mask.size(); ++q, w *= 2.0)
        if (layout.mask[q]) p += w;
    return p / total;
}

/// Near-square factorization used for the element lattices.
inline std::pair<std::size_t, std::size_t> plane_factorization(std::size_t count) {
    std::size_t rows = static_cast<std::size_t>(std::floor(std::sqrt(double(count))));
    while (rows > 1 && count % rows != 0) --rows;
    return {rows, count / rows};
}

/// Index of the element nearest the lattice center.
inline std::size_t plane_center_index(std::size_t count) {
    const auto [rows, cols] = plane_factorization(count);
    return (rows / 2) * cols + cols / 2;
}

/// Near-square rows x cols element lattice in the x-o-z plane, centered on
/// the origin, row-major indexing.
inline ArrayPlaneGrid make_plane_grid(std::size_t count, double pitch) {
    const auto [rows, cols] = plane_factorization(count);
    ArrayPlaneGrid g;
    g.pitch = pitch;
    g.sites.reserve(count);
    const double x0 = -0.5 * double(cols - 1) * pitch;
    const double z0 = -0.5 * double(rows - 1) * pitch;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            g.sites.push_back({x0 + double(c) * pitch, 0.0, z0 + double(r) * pitch});
    return g;
}

}  // namespace rasec
