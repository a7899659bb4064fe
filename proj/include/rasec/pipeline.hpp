#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "rasec/two_stage.hpp"

namespace rasec {

struct TwoStageSolution {
    std::size_t pose_flat = 0;
    Pose pose;
    AntennaLayout layout;
    BeamformerSet beams;
    RisConfiguration ris;
    PowerSplit split;
    Metrics metrics;
    ConstraintReport audit;
    double c10_residual = 0.0;
    double pose_objective = 0.0;
};

namespace detail {

/// Everything the closed-form stages produce before the power split is
/// known: unit-power beam directions plus the allocation coefficients.
struct StagePrep {
    Pose pose;
    std::size_t pose_flat = 0;
    AntennaLayout layout;
    PoseLink link;
    CMatrix cascade_init;  // scattering-cluster initialization
    CVec ub0, ue0;
    CMatrix w_c_unit;   // tr(Wc^H F Wc) = 1
    CMatrix w_r_unit;   // tr(Wr^H F Wr) = 1
    CMatrix w_a;        // ||Wa||_F = 1, null-space projected
    PowerCoeffs coeffs;
};

inline CVec uniform_unit(std::size_t n) {
    return CVec(n, cxd(1.0 / std::sqrt(double(n)), 0.0));
}

inline StagePrep prepare_stage(const Scenario& sc, std::size_t pose_flat,
                               const AntennaLayout& layout) {
    const ScenarioConfig& cfg = sc.cfg;
    StagePrep prep;
    prep.pose_flat = pose_flat;
    prep.pose = sc.pose_at(pose_flat);
    prep.layout = layout;
    prep.link = build_pose_link(sc, prep.pose);
    prep.cascade_init = CMatrix::ones(cfg.N_R, cfg.A_b) * cxd(cfg.eta, 0.0);
    prep.ub0 = uniform_unit(cfg.A_b);
    prep.ue0 = uniform_unit(cfg.A_e);

    // communication beams: re-normalized maximum ratio transmission
    const CVec w_c = renormalize_precoder(layout, prep.link.G, prep.cascade_init, prep.ub0,
                                          cfg.upsilon_c);
    prep.w_c_unit = CMatrix(cfg.Q_hat, cfg.upsilon_c);
    for (std::size_t j = 0; j < cfg.upsilon_c; ++j) prep.w_c_unit.set_column(j, w_c);

    // quadratic forms of the sensing subproblem, split factors stripped
    const double p_t = cfg.p_t;
    const CVec col_e = apply_mask(layout, prep.link.E * prep.ue0);
    const CVec col_b = apply_mask(layout, prep.link.G * (prep.cascade_init * prep.ub0));
    const CVec f_g0 = apply_mask(layout, prep.link.g_bs[0]);
    const double rho0_sq = std::norm(sc.ch.rho[0]);
    const double g_r0_sq = norm2sq(sc.ch.g_r[0]);

    const CMatrix a1_m = outer(col_e, col_e) * cxd(p_t, 0.0);
    const CMatrix a3_m = outer(col_b, col_b) * cxd(p_t, 0.0);
    const CMatrix a4_m = outer(f_g0, f_g0) * cxd(p_t * rho0_sq * g_r0_sq, 0.0);
    CMatrix clutter_rows(cfg.A_r, cfg.Q_hat);
    for (std::size_t l = 1; l < cfg.L_r; ++l) {
        CVec row = apply_mask(layout, prep.link.g_bs[l]);
        for (cxd& z : row) z = std::conj(z);  // row of g^H F
        clutter_rows += sc.ch.rho[l] * outer_nc(sc.ch.g_r[l], row);
    }
    const CMatrix a6_m = (clutter_rows.adjoint() * clutter_rows) * cxd(p_t, 0.0);

    const double gamma_design = cfg.gamma_r * cfg.sensing_design_margin;
    prep.w_r_unit = sensing_precoder(a1_m, a3_m, a4_m, a6_m, gamma_design, cfg.upsilon_r, 1.0,
                                     layout);

    // artificial noise: projector and pencil at a balanced reference split,
    // since the loop-interference block carries no split factor of its own
    const double alpha_ref = 0.5;
    const CMatrix p_a = null_space_projector(sc.ch.G_b * prep.cascade_init);
    const CVec ge_ue = sc.ch.G_e * prep.ue0;
    const CVec pa_ge = p_a * ge_ue;
    const CMatrix a2_m = outer(pa_ge, pa_ge) * cxd((1.0 - alpha_ref) * p_t, 0.0);
    const CVec pa_gt0 = p_a * sc.ch.g_t[0];
    const CMatrix a5_m =
        outer(pa_gt0, pa_gt0) * cxd((1.0 - alpha_ref) * p_t * rho0_sq * g_r0_sq, 0.0);
    CMatrix an_clutter(cfg.A_r, cfg.A_t);
    for (std::size_t l = 1; l < cfg.L_r; ++l) {
        CVec row = sc.ch.g_t[l];
        for (cxd& z : row) z = std::conj(z);
        an_clutter += sc.ch.rho[l] * outer_nc(sc.ch.g_r[l], row);
    }
    const CMatrix an_clutter_pa = an_clutter * p_a;
    const CMatrix a7_m =
        (an_clutter_pa.adjoint() * an_clutter_pa) * cxd((1.0 - alpha_ref) * p_t, 0.0);
    const CMatrix hi_pa = sc.ch.H_I * p_a;
    const CMatrix a8_m = (hi_pa.adjoint() * hi_pa) * cxd(sc.ch.g_I, 0.0);

    prep.w_a = an_precoder(a2_m, a5_m, a7_m, a8_m, gamma_design, p_a, cfg.upsilon_a);

    // allocation coefficients
    PowerCoeffs& c = prep.coeffs;
    c.a1_hat = p_t * row_power(col_b, prep.w_c_unit);
    c.a3_hat = p_t * row_power(col_e, prep.w_c_unit);
    c.d[1] = p_t * row_power(col_e, prep.w_r_unit);
    c.d[2] = p_t * row_power(ge_ue, prep.w_a);
    c.d[3] = p_t * row_power(col_b, prep.w_r_unit);
    c.d[4] = p_t * rho0_sq * g_r0_sq * row_power(f_g0, prep.w_r_unit);
    c.d[5] = p_t * rho0_sq * g_r0_sq * row_power(sc.ch.g_t[0], prep.w_a);
    {
        const CMatrix m = clutter_rows * prep.w_r_unit;
        c.d[6] = p_t * p_t * m.frob() * m.frob();  // the printed form squares the power
        const CMatrix ma = an_clutter * prep.w_a;
        c.d[7] = ma.frob() * ma.frob();
        const CMatrix mi = sc.ch.H_I * prep.w_a;
        c.d[8] = sc.ch.g_I * mi.frob() * mi.frob();
    }
    c.j2 = cfg.sigma_I2 * norm2sq(sc.ch.layers.back() * prep.ub0) + cfg.sigma_b2;
    {
        CMatrix leak(cfg.A_r, cfg.upsilon_c);
        for (std::size_t l = 0; l < cfg.L_r; ++l) {
            const CVec row = apply_mask(layout, prep.link.g_bs[l]);
            const CVec s_c = left_apply(row, prep.w_c_unit);
            const cxd rho_c = cfg.j6_clutter_uses_rho0 ? sc.ch.rho[0] : sc.ch.rho[l];
            leak += rho_c * outer_nc(sc.ch.g_r[l], s_c);
        }
        c.j6 = p_t * leak.frob() * leak.frob() + double(cfg.A_r) * cfg.sigma_r2;
    }
    c.sigma_e2 = cfg.sigma_e2;
    return prep;
}

/// Applies a power split to the prepared stage, designs the surface, fixes
/// the combiners, and evaluates. Shared by the two-stage driver and the
/// learning environment.
inline TwoStageSolution finalize_solution(const Scenario& sc, const StagePrep& prep,
                                          double alpha, double rho0,
                                          const OptimizerOptions& opt) {
    const ScenarioConfig& cfg = sc.cfg;
    TwoStageSolution sol;
    sol.pose_flat = prep.pose_flat;
    sol.pose = prep.pose;
    sol.layout = prep.layout;
    sol.split = {alpha, rho0, cfg.p_t};

    // the two transmit blocks share the unit budget at the chosen sensing
    // ratio, matching the parameterization the allocation model optimizes
    sol.beams.Wc = prep.w_c_unit * cxd(std::sqrt(1.0 - rho0), 0.0);
    sol.beams.Wr = prep.w_r_unit * cxd(std::sqrt(rho0), 0.0);
    sol.beams.Wa = prep.w_a;
    sol.beams.ub = prep.ub0;
    sol.beams.ue = prep.ue0;

    sol.ris = RisConfiguration::neutral(cfg.B_layers, cfg.N_R, cfg.eta, cfg.p_ris, cfg.beta_max);
    const NoiseConfig noise = NoiseConfig::from(cfg);
    if (opt.optimize_tris) {
        tpris_phase_stack(sc, sol.ris, prep.link.G, prep.layout, sol.beams.Wc);
        taris_phase_leakage(sc, sol.ris, prep.link.G, prep.layout, sol.beams, alpha, cfg.p_t);
    } else {
        // unoptimized surface still has to respect the drive budget; scale
        // the uniform amplitudes onto it
        const double drive =
            ris_drive_power(sc, prep.link, prep.layout, sol.ris, sol.beams, sol.split, noise);
        if (drive > cfg.p_ris) {
            const double s = std::sqrt(cfg.p_ris / drive);
            for (double& a : sol.ris.amplitudes) a *= s;
        }
    }

    const CMatrix cascade = ris_cascade(sol.ris, sc.ch.layers);

    // the null space moved with the surface design; re-project and re-scale
    // so the artificial noise stays invisible to Bob under the final cascade
    if (alpha < 1.0) {
        const CMatrix p_a_final = null_space_projector(sc.ch.G_b * cascade);
        CMatrix w_a = p_a_final * sol.beams.Wa;
        const double n = w_a.frob();
        if (n > 1e-12) {
            w_a *= cxd(1.0 / n, 0.0);
            sol.beams.Wa = w_a;
        }
    }

    sol.beams.ub = mmse_receiver(ReceiverSide::bob, sc, prep.link, prep.layout, cascade,
                                 sol.beams, sol.split, noise);
    sol.beams.ue = mmse_receiver(ReceiverSide::eve, sc, prep.link, prep.layout, cascade,
                                 sol.beams, sol.split, noise);

    sol.metrics = evaluate_metrics(sc, sol.pose, sol.layout, sol.ris, sol.beams, sol.split, noise);
    sol.audit = audit_constraints(sc, sol.pose, sol.layout, sol.ris, sol.beams, sol.split, noise);
    return sol;
}

}  // namespace detail

/// Inner closed-form solve at an externally chosen pose, site layout, and
/// power split. The learning agents drive this as their environment.
inline TwoStageSolution solve_with_fixed_split(const Scenario& sc, std::size_t pose_flat,
                                               const AntennaLayout& layout, double alpha,
                                               double rho0,
                                               const OptimizerOptions& opt = {}) {
    const detail::StagePrep prep = detail::prepare_stage(sc, pose_flat, layout);
    TwoStageSolution sol = detail::finalize_solution(sc, prep, alpha, rho0, opt);
    sol.c10_residual = std::abs(
        c10_lhs(prep.coeffs, alpha, rho0) / (sc.cfg.gamma_r * sc.cfg.sensing_design_margin) -
        1.0);
    return sol;
}

/// The full two-stage closed-form pipeline: pose search, site selection,
/// sensing and artificial-noise beams, power allocation at the sensing
/// equality, surface design, and the whitened combiners.
inline TwoStageSolution run_two_stage(const Scenario& sc, const OptimizerOptions& opt = {}) {
    const ScenarioConfig& cfg = sc.cfg;
    const CMatrix cascade_init = CMatrix::ones(cfg.N_R, cfg.A_b) * cxd(cfg.eta, 0.0);
    const CVec ub0 = detail::uniform_unit(cfg.A_b);
    const std::vector<std::size_t> candidates = detail::candidate_poses(sc, opt.pose_filter);

    const PoseSearchResult found =
        pose_search(sc, cascade_init, ub0, opt.strategy, candidates, opt.workers);

    AntennaLayout layout;
    if (opt.fixed_layout) {
        layout = AntennaLayout::first_sites(cfg.Q_hat, cfg.A);
    } else {
        const CMatrix g_star = assemble_bs_channel(found.pose, sc.ch.paths_bs_ris, sc.ch.H_R,
                                                   sc.pattern, sc.ch.lambda);
        layout = select_antennas(g_star, cascade_init, ub0, cfg.A);
    }

    detail::StagePrep prep = detail::prepare_stage(sc, found.flat, layout);
    PowerSolution power = allocate_power(prep.coeffs, cfg.gamma_r * cfg.sensing_design_margin);
    TwoStageSolution sol = detail::finalize_solution(sc, prep, power.alpha, power.rho0, opt);
    sol.c10_residual = power.c10_residual;
    sol.pose_objective = found.objective;

    // optional alternating refinement: rerun the pose stage against the
    // designed surface and combiner until the secrecy rate settles
    for (int it = 0; it < opt.alternating_iters; ++it) {
        const double prev = sol.metrics.secrecy;
        const CMatrix cascade = ris_cascade(sol.ris, sc.ch.layers);
        const PoseSearchResult again =
            pose_search(sc, cascade, sol.beams.ub, opt.strategy, candidates, opt.workers);
        detail::StagePrep prep2 = detail::prepare_stage(sc, again.flat, layout);
        PowerSolution power2 =
            allocate_power(prep2.coeffs, cfg.gamma_r * cfg.sensing_design_margin);
        TwoStageSolution next = detail::finalize_solution(sc, prep2, power2.alpha, power2.rho0,
                                                          opt);
        next.c10_residual = power2.c10_residual;
        next.pose_objective = again.objective;
        if (next.metrics.secrecy > sol.metrics.secrecy) sol = next;
        if (std::abs(sol.metrics.secrecy - prev) < 1e-4) break;
    }
    return sol;
}

}  // namespace rasec
