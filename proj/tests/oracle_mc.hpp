#pragma once

// Symbol-level Monte-Carlo estimators for the three SINRs. These draw the
// modulated symbols and noise explicitly and average received powers, as an
// independent cross-check of the covariance-form evaluators.

#include "rasec/rng.hpp"
#include "rasec/signal_metrics.hpp"

namespace oracles {

struct McSinr {
    double bob = 0.0;
    double eve = 0.0;
    double radar = 0.0;
};

inline McSinr mc_sinr(const rasec::Scenario& sc, const rasec::Pose& pose,
                      const rasec::AntennaLayout& layout, const rasec::RisConfiguration& ris,
                      const rasec::BeamformerSet& beams, const rasec::PowerSplit& split,
                      const rasec::NoiseConfig& noise, int draws, std::uint64_t seed) {
    using namespace rasec;
    const PoseLink link = build_pose_link(sc, pose);
    const CMatrix cascade = ris_cascade(ris, sc.ch.layers);

    const double a_amp = std::sqrt(split.alpha * split.p_t);
    const double r_amp = std::sqrt((1.0 - split.alpha) * split.p_t);

    // Bob rows
    const CVec col_b = apply_mask(layout, link.G * (cascade * beams.ub));
    const CVec rb_c = left_apply(col_b, beams.Wc);
    const CVec rb_r = left_apply(col_b, beams.Wr);
    const CVec rb_a = left_apply(sc.ch.G_b * (cascade * beams.ub), beams.Wa);
    const CVec w_i = sc.ch.layers.back() * beams.ub;  // active-layer noise coupling

    // Eve rows
    const CVec col_e = apply_mask(layout, link.E * beams.ue);
    const CVec re_c = left_apply(col_e, beams.Wc);
    const CVec re_r = left_apply(col_e, beams.Wr);
    const CVec re_a = left_apply(sc.ch.G_e * beams.ue, beams.Wa);

    // radar per-path rows
    const std::size_t l_r = sc.cfg.L_r;
    std::vector<CVec> s_r(l_r), s_c(l_r), t_a(l_r);
    for (std::size_t l = 0; l < l_r; ++l) {
        const CVec row = apply_mask(layout, link.g_bs[l]);
        s_r[l] = left_apply(row, beams.Wr);
        s_c[l] = left_apply(row, beams.Wc);
        t_a[l] = left_apply(sc.ch.g_t[l], beams.Wa);
    }
    const double si_amp = std::sqrt(sc.ch.g_I);

    SubStream rs(seed, "mc_sinr");
    auto dot_sym = [](const CVec& row, const CVec& sym) {
        cxd s = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * sym[i];
        return s;
    };
    // Exact CN(0,1) draw with the squared radius jitter-stratified across the
    // draw count: radius^2 is Exp(1) by inverse CDF on a stratified uniform,
    // phase uniform. Keeps the estimator unbiased while the per-symbol power
    // averages converge at the stratum rate instead of 1/sqrt(draws).
    auto cn_strat = [&rs](int k, int n) {
        const double u = (double(k) + rs.uniform()) / double(n);
        const double r = std::sqrt(-std::log1p(-u));
        const double ph = 2.0 * std::numbers::pi * rs.uniform();
        return std::polar(r, ph);
    };
    auto strat_vec = [&](std::size_t dims, int k, int n) {
        CVec v(dims);
        for (auto& z : v) z = cn_strat(k, n);
        return v;
    };

    double bob_num = 0, bob_den = 0, eve_num = 0, eve_den = 0, rad_num = 0, rad_den = 0;
    const std::size_t a_r = sc.cfg.A_r;
    for (int d = 0; d < draws; ++d) {
        const CVec sym_c = strat_vec(beams.Wc.cols(), d, draws);
        const CVec sym_r = strat_vec(beams.Wr.cols(), d, draws);
        const CVec sym_a = strat_vec(beams.Wa.cols(), d, draws);

        // Bob
        const cxd des_b = a_amp * dot_sym(rb_c, sym_c);
        cxd int_b = a_amp * dot_sym(rb_r, sym_r) + r_amp * dot_sym(rb_a, sym_a);
        for (std::size_t n = 0; n < w_i.size(); ++n)
            int_b += std::conj(w_i[n]) * (std::sqrt(noise.sigma_I2) * rs.cgauss());
        int_b += std::sqrt(noise.sigma_b2) * rs.cgauss();
        bob_num += std::norm(des_b);
        bob_den += std::norm(int_b);

        // Eve
        const cxd des_e = a_amp * dot_sym(re_c, sym_c);
        const cxd int_e = a_amp * dot_sym(re_r, sym_r) + r_amp * dot_sym(re_a, sym_a) +
                          std::sqrt(noise.sigma_e2) * rs.cgauss();
        eve_num += std::norm(des_e);
        eve_den += std::norm(int_e);

        // radar, vector-valued at the receive array
        CVec des(a_r, cxd(0, 0)), intf(a_r, cxd(0, 0));
        const cxd tgt = sc.ch.rho[0] * (a_amp * dot_sym(s_r[0], sym_r) +
                                        r_amp * dot_sym(t_a[0], sym_a));
        for (std::size_t i = 0; i < a_r; ++i) des[i] = sc.ch.g_r[0][i] * tgt;
        for (std::size_t l = 1; l < l_r; ++l) {
            const cxd cl = sc.ch.rho[l] * (a_amp * dot_sym(s_r[l], sym_r) +
                                           r_amp * dot_sym(t_a[l], sym_a));
            for (std::size_t i = 0; i < a_r; ++i) intf[i] += sc.ch.g_r[l][i] * cl;
        }
        for (std::size_t l = 0; l < l_r; ++l) {
            const cxd rho_c = sc.cfg.j6_clutter_uses_rho0 ? sc.ch.rho[0] : sc.ch.rho[l];
            const cxd lk = rho_c * a_amp * dot_sym(s_c[l], sym_c);
            for (std::size_t i = 0; i < a_r; ++i) intf[i] += sc.ch.g_r[l][i] * lk;
        }
        CVec xa(beams.Wa.rows(), cxd(0, 0));
        for (std::size_t i = 0; i < beams.Wa.rows(); ++i) {
            cxd s = 0.0;
            for (std::size_t j = 0; j < beams.Wa.cols(); ++j) s += beams.Wa(i, j) * sym_a[j];
            xa[i] = s;
        }
        const CVec si = sc.ch.H_I * xa;
        for (std::size_t i = 0; i < a_r; ++i)
            intf[i] += si_amp * si[i] + std::sqrt(noise.sigma_r2) * rs.cgauss();
        rad_num += rasec::norm2sq(des);
        rad_den += rasec::norm2sq(intf);
    }
    return {bob_num / bob_den, eve_num / eve_den, rad_num / rad_den};
}

}  // namespace oracles
