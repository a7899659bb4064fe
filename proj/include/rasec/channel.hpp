#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rasec/complex_matrix.hpp"
#include "rasec/config.hpp"
#include "rasec/geometry.hpp"
#include "rasec/rng.hpp"

namespace rasec {

/// Directional element response. The printed pattern shapes the gain with
/// the local azimuth; the conventional elevation-shaped variant stays
/// available behind the flag.
struct RadiationPattern {
    int p = 0;
    bool gain_on_azimuth = true;

    double peak_gain() const { return 2.0 * (2.0 * p + 1.0); }
};

/// Linear gain toward a direction given in the element's local frame.
/// Forward hemisphere only: zero at and beyond local elevation pi/2.
inline double element_gain(const RadiationPattern& pat, double theta_local, double phi_local) {
    if (!(theta_local >= 0.0 && theta_local < std::numbers::pi / 2.0)) return 0.0;
    const double shaped = pat.gain_on_azimuth ? phi_local : theta_local;
    const double c = std::cos(shaped);
    return pat.peak_gain() * std::pow(c * c, pat.p);
}

/// Direction unit vector for global elevation theta (from +z) and azimuth phi.
inline Vec3 direction_vector(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

inline void angles_of_direction(const Vec3& v, double& theta, double& phi) {
    const double n = v.norm();
    theta = std::acos(std::clamp(v.z / n, -1.0, 1.0));
    phi = std::atan2(v.y, v.x);
}

/// Effective element gain of the rotated array toward a global direction.
/// Boresight is the rotated plane normal; the pattern is evaluated on the
/// direction expressed in the rotated local frame.
inline double rotated_gain(const RadiationPattern& pat, const RotationAngles& angles,
                           double theta, double phi) {
    const RotationFrame frame = RotationFrame::from(angles);
    const Vec3 u = frame.to_local(direction_vector(theta, phi));
    const double theta_local = std::acos(std::clamp(u.y, -1.0, 1.0));
    // azimuth is undefined on the boresight axis; take the pattern peak there
    const double planar = std::hypot(u.x, u.z);
    const double phi_local = planar < 1e-9 ? 0.0 : std::atan2(u.z, u.x);
    return element_gain(pat, theta_local, phi_local);
}

/// Per-site plane-wave phase profile at the pose's global coordinates.
inline CVec steering_vector(const Pose& pose, double theta, double phi, double lambda) {
    const Vec3 v = direction_vector(theta, phi);
    const double k = 2.0 * std::numbers::pi / lambda;
    CVec a(pose.site_coords.size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        const double phase = k * v.dot(pose.site_coords[q]);
        a[q] = cxd(std::cos(phase), std::sin(phase));
    }
    return a;
}

/// One multipath link: global departure angles per path plus per-path
/// complex gains (already carrying the large-scale law where they are used).
struct PathSet {
    std::vector<double> theta;  // elevation, radians
    std::vector<double> phi;    // azimuth, radians
    std::vector<cxd> gain;

    std::size_t size() const { return theta.size(); }
};

/// Effective channel seen from the rotatable array: sum over paths of
/// sqrt(gain toward path) * conj(steering) times the path coefficient row.
/// Output is Q_hat x cols(coeffs).
inline CMatrix assemble_bs_channel(const Pose& pose, const PathSet& paths,
                                   const CMatrix& coeffs, const RadiationPattern& pat,
                                   double lambda) {
    if (paths.size() == 0) throw std::invalid_argument("assemble_bs_channel: zero paths");
    if (coeffs.rows() != paths.size())
        throw std::invalid_argument("assemble_bs_channel: coefficient rows != path count");
    const std::size_t q_hat = pose.site_coords.size();
    CMatrix g(q_hat, coeffs.cols());
    for (std::size_t l = 0; l < paths.size(); ++l) {
        const double varsigma = rotated_gain(pat, pose.angles, paths.theta[l], paths.phi[l]);
        if (varsigma <= 0.0) continue;
        const double root = std::sqrt(varsigma);
        const CVec a = steering_vector(pose, paths.theta[l], paths.phi[l], lambda);
        for (std::size_t q = 0; q < q_hat; ++q) {
            const cxd w = root * std::conj(a[q]);
            for (std::size_t c = 0; c < coeffs.cols(); ++c) g(q, c) += w * coeffs(l, c);
        }
    }
    return g;
}

/// Single-path array response with its complex gain folded in (the per-path
/// channel used by the sensing geometry).
inline CVec bs_path_vector(const Pose& pose, const PathSet& paths, std::size_t l,
                           const RadiationPattern& pat, double lambda) {
    const double varsigma = rotated_gain(pat, pose.angles, paths.theta[l], paths.phi[l]);
    CVec g(pose.site_coords.size(), cxd(0.0, 0.0));
    if (varsigma <= 0.0) return g;
    const CVec a = steering_vector(pose, paths.theta[l], paths.phi[l], lambda);
    const cxd w = paths.gain[l] * std::sqrt(varsigma);
    for (std::size_t q = 0; q < g.size(); ++q) g[q] = w * a[q];
    return g;
}

/// Per-layer settings of the multi-layer transmitting RIS. Passive layers
/// are phase-only; the last layer carries amplitudes in [0, beta_max].
struct RisConfiguration {
    std::vector<std::vector<double>> phases;  // one vector of N_R per layer
    std::vector<double> amplitudes;           // last layer
    double eta = 0.8;
    double p_ris = 1e-4;
    double beta_max = 10.0;

    std::size_t layer_count() const { return phases.size(); }

    static RisConfiguration neutral(std::size_t layers, std::size_t n_r, double eta,
                                    double p_ris, double beta_max) {
        RisConfiguration r;
        r.phases.assign(layers, std::vector<double>(n_r, 0.0));
        r.amplitudes.assign(n_r, 1.0);
        r.eta = eta;
        r.p_ris = p_ris;
        r.beta_max = beta_max;
        return r;
    }

    CVec theta_vec(std::size_t b) const {
        const bool active = (b + 1 == phases.size());
        CVec t(phases[b].size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double amp = active ? amplitudes[i] : 1.0;
            t[i] = amp * cxd(std::cos(phases[b][i]), std::sin(phases[b][i]));
        }
        return t;
    }
};

/// B = prod_b eta * Theta_b * B_b, applied left to right in layer order.
inline CMatrix ris_cascade(const RisConfiguration& cfg, const std::vector<CMatrix>& layers) {
    if (layers.empty()) throw std::invalid_argument("ris_cascade: no layers");
    if (cfg.layer_count() != layers.size())
        throw std::invalid_argument("ris_cascade: configuration covers " +
                                    std::to_string(cfg.layer_count()) + " layers, got " +
                                    std::to_string(layers.size()));
    CMatrix b;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const CVec t = cfg.theta_vec(i);
        if (t.size() != layers[i].rows())
            throw std::invalid_argument("ris_cascade: dimension mismatch at layer " +
                                        std::to_string(i));
        CMatrix stage = CMatrix::diag(t) * layers[i];
        stage *= cxd(cfg.eta, 0.0);
        if (i == 0)
            b = std::move(stage);
        else if (b.cols() != stage.rows())
            throw std::invalid_argument("ris_cascade: dimension mismatch at layer " +
                                        std::to_string(i));
        else
            b = b * stage;
    }
    return b;
}

/// Cascade of the passive layers only (everything before the active one).
/// Identity when there is a single layer.
inline CMatrix passive_cascade(const RisConfiguration& cfg, const std::vector<CMatrix>& layers) {
    const std::size_t n_r = layers.front().rows();
    CMatrix b = CMatrix::identity(n_r);
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        CMatrix stage = CMatrix::diag(cfg.theta_vec(i)) * layers[i];
        stage *= cxd(cfg.eta, 0.0);
        b = (i == 0) ? std::move(stage) : b * stage;
    }
    return b;
}

struct SitePositions {
    Vec3 bs, rx, eve, ris0, bob;
};

inline SitePositions compute_site_positions(const ScenarioConfig& cfg) {
    SitePositions s;
    s.bs = {0.0, 0.0, 0.0};
    s.ris0 = {0.0, cfg.dist_bs_ris, 0.0};
    // receiver placed in the x-y plane consistent with the three distances
    const double y = (cfg.dist_bs_rx * cfg.dist_bs_rx + cfg.dist_bs_ris * cfg.dist_bs_ris -
                      cfg.dist_rx_ris * cfg.dist_rx_ris) /
                     (2.0 * cfg.dist_bs_ris);
    const double x2 = cfg.dist_bs_rx * cfg.dist_bs_rx - y * y;
    if (x2 < 0.0)
        throw std::invalid_argument("scenario geometry: BS/Rx/RIS distances form no triangle");
    s.rx = {std::sqrt(x2), y, 0.0};
    s.eve = cfg.eve_pos;
    const double bob_y =
        cfg.dist_bs_ris + double(cfg.B_layers - 1) * cfg.layer_gap + cfg.dist_ris_bob;
    s.bob = {0.0, bob_y, 0.0};
    return s;
}

/// Every random or geometric channel object of one scenario draw. Pose
/// dependent quantities (steering, element gains) are assembled on demand;
/// this struct holds only pose-independent data.
struct ChannelRealization {
    PathSet paths_bs_ris;  // angles only; coefficients live in H_R
    CMatrix H_R;           // L_b x N_R
    PathSet paths_bs_eve;  // angles only; coefficients live in H_E
    CMatrix H_E;           // L_e x A_e
    PathSet paths_bs_tgt;  // L_r paths with complex gains; path 0 is the target

    std::vector<CVec> g_r;  // Eve -> Rx per path, A_r each
    std::vector<CVec> g_t;  // Rx -> Eve per path, A_t each
    std::vector<cxd> rho;   // reflection coefficients, rho[0] real positive

    CMatrix H_I;  // A_r x A_t loop interference
    double g_I = 0.0;

    CMatrix G_b;  // A_t x N_R, Rx -> entry layer toward Bob
    CMatrix G_e;  // A_t x A_e, Rx -> Eve

    std::vector<CMatrix> layers;  // B-1 inter-layer blocks plus the hop to Bob

    double lambda = 0.0;
    SitePositions sites;
};

namespace detail {

inline PathSet draw_paths(SubStream& rs, std::size_t count, double theta0, double phi0,
                          double sector_rad, cxd gain0, double gain_scale) {
    PathSet p;
    p.theta.push_back(theta0);
    p.phi.push_back(phi0);
    p.gain.push_back(gain0);
    for (std::size_t l = 1; l < count; ++l) {
        const double th = std::clamp(theta0 + rs.uniform(-sector_rad, sector_rad), 1e-3,
                                     std::numbers::pi - 1e-3);
        p.theta.push_back(th);
        p.phi.push_back(phi0 + rs.uniform(-sector_rad, sector_rad));
        p.gain.push_back(rs.cgauss() * gain_scale);
    }
    return p;
}

inline std::vector<Vec3> layer_elements(std::size_t n_r, double spacing, double y) {
    ArrayPlaneGrid g = make_plane_grid(n_r, spacing);
    std::vector<Vec3> pts;
    pts.reserve(n_r);
    for (const Vec3& s : g.sites) pts.push_back({s.x, y, s.z});
    return pts;
}

inline cxd spherical_coupling(const Vec3& a, const Vec3& b, double lambda) {
    const double r = distance(a, b);
    const double amp = lambda / (4.0 * std::numbers::pi * r);
    const double phase = -2.0 * std::numbers::pi * r / lambda;
    return amp * cxd(std::cos(phase), std::sin(phase));
}

}  // namespace detail

/// Draws one scenario realization. Every channel object has its own named
/// substream keyed on the seed, so values never depend on generation order
/// and the same seed reproduces the realization bit for bit.
inline ChannelRealization synthesize_realization(const ScenarioConfig& cfg, std::uint64_t seed) {
    ChannelRealization ch;
    ch.lambda = cfg.lambda();
    ch.sites = compute_site_positions(cfg);
    ch.g_I = cfg.g_I;

    const double sector = cfg.path_sector_deg * std::numbers::pi / 180.0;

    double th_ris, ph_ris, th_eve, ph_eve;
    angles_of_direction(ch.sites.ris0 - ch.sites.bs, th_ris, ph_ris);
    angles_of_direction(ch.sites.eve - ch.sites.bs, th_eve, ph_eve);
    const double d_bs_eve = distance(ch.sites.bs, ch.sites.eve);
    const double d_rx_eve = distance(ch.sites.rx, ch.sites.eve);

    {
        SubStream rs(seed, "bs_ris_angles");
        ch.paths_bs_ris = detail::draw_paths(rs, cfg.L_b, th_ris, ph_ris, sector, 1.0, 1.0);
    }
    {
        SubStream rs(seed, "H_R");
        ch.H_R = rs.cgauss_mat(cfg.L_b, cfg.N_R);
        ch.H_R *= cxd(std::sqrt(cfg.path_gain(cfg.dist_bs_ris)), 0.0);
    }
    {
        SubStream rs(seed, "bs_eve_angles");
        ch.paths_bs_eve = detail::draw_paths(rs, cfg.L_e, th_eve, ph_eve, sector, 1.0, 1.0);
    }
    {
        SubStream rs(seed, "H_E");
        ch.H_E = rs.cgauss_mat(cfg.L_e, cfg.A_e);
        ch.H_E *= cxd(std::sqrt(cfg.path_gain(d_bs_eve)), 0.0);
    }
    {
        SubStream rs(seed, "bs_target_paths");
        const double scale = std::sqrt(cfg.path_gain(d_bs_eve));
        // the direct target path keeps a deterministic unit-phase gain
        ch.paths_bs_tgt =
            detail::draw_paths(rs, cfg.L_r, th_eve, ph_eve, sector, cxd(scale, 0.0), scale);
    }
    {
        SubStream rs(seed, "echo_vectors");
        const double scale = std::sqrt(cfg.path_gain(d_rx_eve));
        for (std::size_t l = 0; l < cfg.L_r; ++l) {
            ch.g_r.push_back(scaled(rs.cgauss_vec(cfg.A_r), cxd(scale, 0.0)));
            ch.g_t.push_back(scaled(rs.cgauss_vec(cfg.A_t), cxd(scale, 0.0)));
        }
    }
    {
        SubStream rs(seed, "reflection");
        ch.rho.push_back(cxd(cfg.target_reflection, 0.0));
        const double clutter_scale =
            cfg.target_reflection * std::sqrt(db_to_linear(-cfg.clutter_db_below));
        for (std::size_t l = 1; l < cfg.L_r; ++l) ch.rho.push_back(rs.cgauss() * clutter_scale);
    }
    {
        SubStream rs(seed, "self_interference");
        ch.H_I = rs.cgauss_mat(cfg.A_r, cfg.A_t);
    }
    {
        SubStream rs(seed, "G_b");
        ch.G_b = rs.cgauss_mat(cfg.A_t, cfg.N_R);
        ch.G_b *= cxd(std::sqrt(cfg.path_gain(cfg.dist_rx_ris)), 0.0);
    }
    {
        SubStream rs(seed, "G_e");
        ch.G_e = rs.cgauss_mat(cfg.A_t, cfg.A_e);
        ch.G_e *= cxd(std::sqrt(cfg.path_gain(d_rx_eve)), 0.0);
    }

    // deterministic near-field coupling between the stacked layer lattices,
    // spherical-wave entries, last layer mapping to Bob's antennas
    const double spacing = 0.5 * ch.lambda;
    for (std::size_t b = 0; b < cfg.B_layers; ++b) {
        const double y_src = cfg.dist_bs_ris + double(b) * cfg.layer_gap;
        const std::vector<Vec3> src = detail::layer_elements(cfg.N_R, spacing, y_src);
        if (b + 1 < cfg.B_layers) {
            const std::vector<Vec3> dst =
                detail::layer_elements(cfg.N_R, spacing, y_src + cfg.layer_gap);
            CMatrix m(cfg.N_R, cfg.N_R);
            for (std::size_t i = 0; i < cfg.N_R; ++i)
                for (std::size_t j = 0; j < cfg.N_R; ++j)
                    m(i, j) = detail::spherical_coupling(src[i], dst[j], ch.lambda);
            ch.layers.push_back(std::move(m));
        } else {
            const std::vector<Vec3> bob =
                detail::layer_elements(cfg.A_b, spacing, ch.sites.bob.y);
            CMatrix m(cfg.N_R, cfg.A_b);
            for (std::size_t i = 0; i < cfg.N_R; ++i)
                for (std::size_t j = 0; j < cfg.A_b; ++j)
                    m(i, j) = detail::spherical_coupling(src[i], bob[j], ch.lambda);
            ch.layers.push_back(std::move(m));
        }
    }
    return ch;
}

/// One complete simulation instance: configuration, channel draw, and the
/// discrete pose catalogue (poses are materialized lazily; the full grid can
/// run to six figures).
struct Scenario {
    ScenarioConfig cfg;
    ChannelRealization ch;
    ArrayPlaneGrid grid;
    PoseGridSpec pose_spec;
    RadiationPattern pattern;
    std::uint64_t seed = 0;

    std::size_t pose_count() const { return pose_spec.rotations.size() * pose_spec.origins.size(); }

    Pose pose_at(std::size_t flat) const {
        const std::size_t m_count = pose_spec.origins.size();
        const std::size_t n = flat / m_count;
        const std::size_t m = flat % m_count;
        return pose_coordinates(grid, pose_spec.rotations[n], pose_spec.origins[m], n, m);
    }
};

inline Scenario synthesize_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    Scenario s;
    s.cfg = cfg;
    s.ch = synthesize_realization(cfg, seed);
    s.grid = make_plane_grid(cfg.Q_hat, cfg.pitch());
    s.pose_spec = build_pose_grid_spec(cfg);
    s.pattern = RadiationPattern{cfg.directivity_p, cfg.pattern_gain_on_azimuth};
    s.seed = seed;
    return s;
}

}  // namespace rasec
