#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rasec/channel.hpp"
#include "rasec/complex_matrix.hpp"
#include "rasec/geometry.hpp"

namespace rasec {

/// Transmit precoders and receive combiners of one solution.
/// Wc, Wr act on the array sites (Q_hat rows); Wa on the sensing
/// receiver's transmit antennas (A_t rows).
struct BeamformerSet {
    CMatrix Wc, Wr, Wa;
    CVec ub, ue;
};

struct PowerSplit {
    double alpha = 1.0;  // BS share of the total budget
    double rho0 = 0.0;   // sensing share at the BS
    double p_t = 1.0;    // watts
};

struct NoiseConfig {
    double sigma_b2 = 0.0, sigma_e2 = 0.0, sigma_I2 = 0.0, sigma_r2 = 0.0;

    static NoiseConfig from(const ScenarioConfig& cfg) {
        return {cfg.sigma_b2, cfg.sigma_e2, cfg.sigma_I2, cfg.sigma_r2};
    }
};

struct SensingSpec {
    double theta_3db = 0.1;
    double phi_3db = 0.1;
    double gamma_r = 1e-3;  // linear radar SINR requirement
};

inline CVec apply_mask(const AntennaLayout& layout, CVec v) {
    for (std::size_t q = 0; q < v.size(); ++q)
        if (!layout.mask[q]) v[q] = 0.0;
    return v;
}

inline CMatrix apply_mask(const AntennaLayout& layout, CMatrix m) {
    for (std::size_t q = 0; q < m.rows(); ++q)
        if (!layout.mask[q])
            for (std::size_t c = 0; c < m.cols(); ++c) m(q, c) = 0.0;
    return m;
}

/// tr(W^H F W) with F the 0/1 site-selection diagonal.
inline double masked_power(const AntennaLayout& layout, const CMatrix& w) {
    double s = 0.0;
    for (std::size_t q = 0; q < w.rows(); ++q)
        if (layout.mask[q])
            for (std::size_t c = 0; c < w.cols(); ++c) s += std::norm(w(q, c));
    return s;
}

/// Pose-dependent effective channels, assembled once per evaluation point.
struct PoseLink {
    CMatrix G;                // Q_hat x N_R toward the entry layer
    CMatrix E;                // Q_hat x A_e toward Eve
    std::vector<CVec> g_bs;   // per sensing path, Q_hat each
};

inline PoseLink build_pose_link(const Scenario& sc, const Pose& pose) {
    PoseLink link;
    link.G = assemble_bs_channel(pose, sc.ch.paths_bs_ris, sc.ch.H_R, sc.pattern, sc.ch.lambda);
    link.E = assemble_bs_channel(pose, sc.ch.paths_bs_eve, sc.ch.H_E, sc.pattern, sc.ch.lambda);
    for (std::size_t l = 0; l < sc.cfg.L_r; ++l)
        link.g_bs.push_back(bs_path_vector(pose, sc.ch.paths_bs_tgt, l, sc.pattern, sc.ch.lambda));
    return link;
}

namespace detail {

inline double row_power(const CVec& col, const CMatrix& w) {
    // || col^H W ||^2 over the columns of W
    double s = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) {
        cxd z = 0.0;
        for (std::size_t i = 0; i < w.rows(); ++i) z += std::conj(col[i]) * w(i, j);
        s += std::norm(z);
    }
    return s;
}

}  // namespace detail

/// SINR at Bob in symbol expectation (covariance form of the received model).
inline double sinr_bob(const Scenario& sc, const PoseLink& link, const AntennaLayout& layout,
                       const CMatrix& cascade, const BeamformerSet& beams,
                       const PowerSplit& split, const NoiseConfig& noise) {
    const CVec col_b = apply_mask(layout, link.G * (cascade * beams.ub));
    const double num = split.alpha * split.p_t * detail::row_power(col_b, beams.Wc);
    const double leak = split.alpha * split.p_t * detail::row_power(col_b, beams.Wr);
    const CVec an_row = sc.ch.G_b * (cascade * beams.ub);
    const double j1 =
        (1.0 - split.alpha) * split.p_t * detail::row_power(an_row, beams.Wa);
    const double j2 =
        noise.sigma_I2 * norm2sq(sc.ch.layers.back() * beams.ub) + noise.sigma_b2;
    return num / (leak + j1 + j2);
}

/// SINR at Eve; her link bypasses the transmitting surface.
inline double sinr_eve(const Scenario& sc, const PoseLink& link, const AntennaLayout& layout,
                       const BeamformerSet& beams, const PowerSplit& split,
                       const NoiseConfig& noise) {
    const CVec col_e = apply_mask(layout, link.E * beams.ue);
    const double num = split.alpha * split.p_t * detail::row_power(col_e, beams.Wc);
    const double leak = split.alpha * split.p_t * detail::row_power(col_e, beams.Wr);
    const CVec an_row = sc.ch.G_e * beams.ue;
    const double j3 =
        (1.0 - split.alpha) * split.p_t * detail::row_power(an_row, beams.Wa);
    return num / (leak + j3 + noise.sigma_e2);
}

inline double secrecy_rate(double sinr_u, double sinr_e) {
    if (sinr_u < 0.0 || sinr_e < 0.0)
        throw std::invalid_argument("secrecy_rate: SINRs must be nonnegative");
    const double r = std::log2(1.0 + sinr_u) - std::log2(1.0 + sinr_e);
    return r > 0.0 ? r : 0.0;
}

/// Radar SINR at the sensing receiver: target echo over clutter, leakage,
/// residual self interference, and thermal noise.
inline double sinr_radar(const Scenario& sc, const PoseLink& link, const AntennaLayout& layout,
                         const BeamformerSet& beams, const PowerSplit& split,
                         const NoiseConfig& noise) {
    const std::size_t l_r = sc.cfg.L_r;
    const double a_pt = split.alpha * split.p_t;
    const double r_pt = (1.0 - split.alpha) * split.p_t;

    std::vector<CVec> s_r(l_r), s_c(l_r), t_a(l_r);
    for (std::size_t l = 0; l < l_r; ++l) {
        const CVec row = apply_mask(layout, link.g_bs[l]);
        s_r[l] = left_apply(row, beams.Wr);
        s_c[l] = left_apply(row, beams.Wc);
        t_a[l] = left_apply(sc.ch.g_t[l], beams.Wa);
    }

    const double rho0_sq = std::norm(sc.ch.rho[0]);
    const double g_r0_sq = norm2sq(sc.ch.g_r[0]);
    const double j4 = rho0_sq * g_r0_sq * (a_pt * norm2sq(s_r[0]) + r_pt * norm2sq(t_a[0]));

    // Everything driven by one symbol block combines coherently before the
    // expectation. The AN bounce off the clutter and the residual loop both
    // carry the same AN symbols, so their cross term belongs in the
    // denominator; an additive clutter + self-interference split would
    // overcount or undercount depending on its sign.
    CMatrix m_r(sc.cfg.A_r, beams.Wr.cols());
    CMatrix m_c(sc.cfg.A_r, beams.Wc.cols());
    CMatrix m_an = (sc.ch.H_I * beams.Wa) * cxd(std::sqrt(sc.ch.g_I), 0.0);
    for (std::size_t l = 0; l < l_r; ++l) {
        if (l >= 1) {
            m_r += sc.ch.rho[l] * outer_nc(sc.ch.g_r[l], s_r[l]);
            m_an += (sc.ch.rho[l] * std::sqrt(r_pt)) * outer_nc(sc.ch.g_r[l], t_a[l]);
        }
        const cxd rho_c = sc.cfg.j6_clutter_uses_rho0 ? sc.ch.rho[0] : sc.ch.rho[l];
        m_c += rho_c * outer_nc(sc.ch.g_r[l], s_c[l]);
    }
    const double fr = m_r.frob(), fa = m_an.frob(), fc = m_c.frob();
    const double den = a_pt * fr * fr + fa * fa + a_pt * fc * fc +
                       double(sc.cfg.A_r) * noise.sigma_r2;
    return j4 / den;
}

struct DoaAccuracy {
    double eps_theta = 0.0;
    double eps_phi = 0.0;
};

inline DoaAccuracy doa_rmmse(const SensingSpec& spec, double sinr_r) {
    if (!(sinr_r > 0.0)) throw std::invalid_argument("doa_rmmse: SINR must be positive");
    const double root = 1.6 * std::sqrt(2.0 * sinr_r);
    return {spec.theta_3db / root, spec.phi_3db / root};
}

/// Radar SINR floor implied by the angle-accuracy requirements.
inline double sensing_threshold(double theta_3db, double phi_3db, double gamma_theta,
                                double gamma_phi) {
    if (!(theta_3db > 0.0 && phi_3db > 0.0 && gamma_theta > 0.0 && gamma_phi > 0.0))
        throw std::invalid_argument("sensing_threshold: beamwidths and accuracies must be positive");
    const double gt = theta_3db * theta_3db / (1.6 * 1.6 * gamma_theta * gamma_theta);
    const double gp = phi_3db * phi_3db / (1.6 * 1.6 * gamma_phi * gamma_phi);
    return std::max(gt, gp);
}

/// Power drawn at the active layer: amplified signal (symbol expectation over
/// the full transmit covariance) plus the amplitude-dependent noise term.
inline double ris_drive_power(const Scenario& sc, const PoseLink& link,
                              const AntennaLayout& layout, const RisConfiguration& ris,
                              const BeamformerSet& beams, const PowerSplit& split,
                              const NoiseConfig& noise) {
    const CMatrix bhat = passive_cascade(ris, sc.ch.layers);
    const CVec theta_last = ris.theta_vec(ris.layer_count() - 1);

    double signal = 0.0;
    auto add_stream = [&](const CVec& w) {
        const CVec v = apply_mask(layout, w);
        // y = Theta^H Bhat^H G^H v, evaluated right to left
        CVec u1 = left_apply(v, link.G);  // (v^H G)_j
        for (cxd& z : u1) z = std::conj(z);
        CVec u2 = left_apply(u1, bhat);
        for (cxd& z : u2) z = std::conj(z);
        double s = 0.0;
        for (std::size_t n = 0; n < u2.size(); ++n) s += std::norm(std::conj(theta_last[n]) * u2[n]);
        signal += s;
    };
    for (std::size_t j = 0; j < beams.Wc.cols(); ++j) add_stream(beams.Wc.column(j));
    for (std::size_t j = 0; j < beams.Wr.cols(); ++j) add_stream(beams.Wr.column(j));

    double amp2 = 0.0;
    for (const cxd& t : theta_last) amp2 += std::norm(t);
    return split.alpha * split.p_t * signal + noise.sigma_r2 * amp2;
}

struct Metrics {
    double sinr_u = 0.0, sinr_e = 0.0, sinr_r = 0.0;
    double r_b = 0.0, r_e = 0.0, secrecy = 0.0;
    double eps_theta = 0.0, eps_phi = 0.0;
};

inline Metrics evaluate_metrics(const Scenario& sc, const Pose& pose,
                                const AntennaLayout& layout, const RisConfiguration& ris,
                                const BeamformerSet& beams, const PowerSplit& split,
                                const NoiseConfig& noise) {
    const PoseLink link = build_pose_link(sc, pose);
    const CMatrix cascade = ris_cascade(ris, sc.ch.layers);
    Metrics m;
    m.sinr_u = sinr_bob(sc, link, layout, cascade, beams, split, noise);
    m.sinr_e = sinr_eve(sc, link, layout, beams, split, noise);
    m.sinr_r = sinr_radar(sc, link, layout, beams, split, noise);
    m.r_b = std::log2(1.0 + m.sinr_u);
    m.r_e = std::log2(1.0 + m.sinr_e);
    m.secrecy = secrecy_rate(m.sinr_u, m.sinr_e);
    if (m.sinr_r > 0.0) {
        const DoaAccuracy doa =
            doa_rmmse({sc.cfg.theta_3db, sc.cfg.phi_3db, sc.cfg.gamma_r}, m.sinr_r);
        m.eps_theta = doa.eps_theta;
        m.eps_phi = doa.eps_phi;
    }
    return m;
}

struct ConstraintEntry {
    std::string name;
    double residual = 0.0;  // signed; positive margin for inequalities
    bool pass = false;
    bool applicable = true;
};

struct ConstraintReport {
    std::vector<ConstraintEntry> entries;

    bool all_pass() const {
        for (const auto& e : entries)
            if (e.applicable && !e.pass) return false;
        return true;
    }
    const ConstraintEntry& get(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return e;
        throw std::out_of_range("no constraint entry " + name);
    }
};

/// Signed residuals and pass flags for the problem constraints. Equalities
/// audited at 1e-6 relative (eigen-solver error accumulates), the null-space
/// equality at 1e-9, inequalities at their stated direction.
inline ConstraintReport audit_constraints(const Scenario& sc, const Pose& pose,
                                          const AntennaLayout& layout,
                                          const RisConfiguration& ris,
                                          const BeamformerSet& beams, const PowerSplit& split,
                                          const NoiseConfig& noise) {
    ConstraintReport rep;
    const PoseLink link = build_pose_link(sc, pose);
    const CMatrix cascade = ris_cascade(ris, sc.ch.layers);
    const bool an_active = split.alpha < 1.0;

    {
        const double total = masked_power(layout, beams.Wc) + masked_power(layout, beams.Wr);
        const double res = total - 1.0;
        rep.entries.push_back({"C1", res, std::abs(res) <= 1e-6, true});
    }
    {
        const double total = beams.Wa.frob() * beams.Wa.frob();
        const double res = total - 1.0;
        rep.entries.push_back({"C2", res, std::abs(res) <= 1e-6, an_active});
    }
    {
        const double res = norm2(beams.ub) - 1.0;
        rep.entries.push_back({"C3", res, std::abs(res) <= 1e-6, true});
    }
    {
        const double res = norm2(beams.ue) - 1.0;
        rep.entries.push_back({"C4", res, std::abs(res) <= 1e-6, true});
    }
    {
        const double sr = sinr_radar(sc, link, layout, beams, split, noise);
        const double res = sr - sc.cfg.gamma_r;
        rep.entries.push_back({"C5", res, res >= -1e-6 * sc.cfg.gamma_r, true});
    }
    {
        const CVec an_row = sc.ch.G_b * (cascade * beams.ub);
        const double res = std::sqrt(detail::row_power(an_row, beams.Wa));
        rep.entries.push_back({"C6", res, res <= 1e-9, an_active});
    }
    {
        const double res = double(layout.count) - double(sc.cfg.A);
        const bool pose_ok = pose.n < sc.pose_spec.rotations.size() &&
                             pose.m < sc.pose_spec.origins.size();
        rep.entries.push_back({"C7", res, res == 0.0 && pose_ok, true});
    }
    {
        // hair of slack: the default spacing equals the grid pitch, and the
        // rotated coordinates reproduce it only to roundoff
        const bool ok = min_spacing_ok(pose, layout, sc.cfg.min_spacing() * (1.0 - 1e-12));
        rep.entries.push_back({"C8", ok ? 0.0 : -1.0, ok, true});
    }
    {
        const double drive = ris_drive_power(sc, link, layout, ris, beams, split, noise);
        const double res = sc.cfg.p_ris - drive;
        rep.entries.push_back({"C9", res, res >= -1e-9 * sc.cfg.p_ris, true});
    }
    return rep;
}

}  // namespace rasec
