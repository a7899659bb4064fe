#include <cmath>

#include "doctest.h"
#include "oracle_mc.hpp"
#include "rasec/signal_metrics.hpp"

using namespace rasec;

namespace {

// Minimal hand-built scenario: scalar chain with unit effective gains.
Scenario scalar_scenario() {
    Scenario sc;
    sc.cfg = ScenarioConfig::desk();
    sc.cfg.Q_hat = 1;
    sc.cfg.A = 1;
    sc.cfg.N_R = 1;
    sc.cfg.A_t = sc.cfg.A_r = 1;
    sc.cfg.L_r = 1;
    sc.grid.sites = {{0, 0, 0}};
    sc.grid.pitch = 1.0;
    sc.pose_spec.rotations = {{0, 0, 0}};
    sc.pose_spec.origins = {{0, 0, 0}};
    sc.ch.G_b = CMatrix::ones(1, 1);
    sc.ch.G_e = CMatrix::ones(1, 1);
    sc.ch.H_I = CMatrix::ones(1, 1);
    sc.ch.g_I = 0.0;
    sc.ch.layers = {CMatrix::ones(1, 1)};
    sc.ch.g_r = {CVec{cxd(1, 0)}};
    sc.ch.g_t = {CVec{cxd(1, 0)}};
    sc.ch.rho = {cxd(1, 0)};
    sc.ch.lambda = 0.125;
    return sc;
}

PoseLink unit_link() {
    PoseLink link;
    link.G = CMatrix::ones(1, 1);
    link.E = CMatrix::ones(1, 1);
    link.g_bs = {CVec{cxd(1, 0)}};
    return link;
}

AntennaLayout full_mask(std::size_t q) {
    AntennaLayout l;
    l.mask.assign(q, 1);
    l.count = q;
    return l;
}

BeamformerSet random_beams(SubStream& rs, const ScenarioConfig& cfg) {
    BeamformerSet b;
    b.Wc = rs.cgauss_mat(cfg.Q_hat, cfg.upsilon_c);
    b.Wc *= cxd(1.0 / b.Wc.frob(), 0.0);
    b.Wr = rs.cgauss_mat(cfg.Q_hat, cfg.upsilon_r);
    b.Wr *= cxd(0.5 / b.Wr.frob(), 0.0);
    b.Wa = rs.cgauss_mat(cfg.A_t, cfg.upsilon_a);
    b.Wa *= cxd(1.0 / b.Wa.frob(), 0.0);
    b.ub = normalized(rs.cgauss_vec(cfg.A_b));
    b.ue = normalized(rs.cgauss_vec(cfg.A_e));
    return b;
}

}  // namespace

TEST_CASE("sinr_bob scalar chain and degenerate splits") {
    const Scenario sc = scalar_scenario();
    const PoseLink link = unit_link();
    const AntennaLayout mask = full_mask(1);
    const CMatrix cascade = CMatrix::ones(1, 1);
    BeamformerSet b;
    b.Wc = CMatrix::ones(1, 1);
    b.Wr = CMatrix(1, 1);
    b.Wa = CMatrix(1, 1);
    b.ub = {cxd(1, 0)};
    b.ue = {cxd(1, 0)};
    const NoiseConfig noise{1.0, 1.0, 0.0, 1.0};

    CHECK(sinr_bob(sc, link, mask, cascade, b, {1.0, 0.0, 1.0}, noise) == doctest::Approx(1.0));
    CHECK(sinr_bob(sc, link, mask, cascade, b, {0.0, 0.0, 1.0}, noise) == doctest::Approx(0.0));
}

TEST_CASE("sinr_eve zero cases") {
    const Scenario sc = scalar_scenario();
    const PoseLink link = unit_link();
    const AntennaLayout mask = full_mask(1);
    BeamformerSet b;
    b.Wc = CMatrix(1, 1);
    b.Wr = CMatrix::ones(1, 1);
    b.Wa = CMatrix::ones(1, 1);
    b.ub = {cxd(1, 0)};
    b.ue = {cxd(1, 0)};
    const NoiseConfig noise{1.0, 1.0, 0.0, 1.0};
    CHECK(sinr_eve(sc, link, mask, b, {0.5, 0.0, 1.0}, noise) == doctest::Approx(0.0));
}

TEST_CASE("secrecy_rate") {
    CHECK(secrecy_rate(3.0, 1.0) == doctest::Approx(1.0));
    CHECK(secrecy_rate(2.5, 2.5) == doctest::Approx(0.0));
    CHECK(secrecy_rate(0.5, 2.0) == doctest::Approx(0.0));  // clamped at zero
}

TEST_CASE("sinr_radar degenerate cases") {
    const Scenario sc = scalar_scenario();
    const PoseLink link = unit_link();
    const AntennaLayout mask = full_mask(1);
    BeamformerSet b;
    b.Wc = CMatrix(1, 1);
    b.Wr = CMatrix(1, 1);
    b.Wa = CMatrix(1, 1);
    b.ub = {cxd(1, 0)};
    b.ue = {cxd(1, 0)};
    const NoiseConfig noise{1.0, 1.0, 0.0, 1.0};
    CHECK(sinr_radar(sc, link, mask, b, {0.7, 0.5, 1.0}, noise) == doctest::Approx(0.0));

    // interference-free radar equation: single path, no SI, no comm power
    b.Wr = CMatrix::ones(1, 1);
    const double p_t = 4.0, alpha = 0.5;
    const double expected = alpha * p_t / (1.0 * noise.sigma_r2);
    CHECK(sinr_radar(sc, link, mask, b, {alpha, 1.0, p_t}, noise) ==
          doctest::Approx(expected));
}

TEST_CASE("doa formulas exactly as printed") {
    const SensingSpec spec{0.1, 0.1, 0.0};
    const DoaAccuracy d = doa_rmmse(spec, 50.0);
    CHECK(d.eps_theta == doctest::Approx(0.00625).epsilon(1e-12));
    CHECK(d.eps_phi == doctest::Approx(0.00625).epsilon(1e-12));
    CHECK(sensing_threshold(0.1, 0.1, 0.01, 0.01) == doctest::Approx(39.0625).epsilon(1e-12));
    // linear in the beamwidth
    const SensingSpec wide{0.2, 0.1, 0.0};
    CHECK(doa_rmmse(wide, 50.0).eps_theta == doctest::Approx(2.0 * d.eps_theta));
    CHECK_THROWS_AS(doa_rmmse(spec, 0.0), std::invalid_argument);
}

TEST_CASE("ris_drive_power scaling") {
    ScenarioConfig cfg = ScenarioConfig::desk();
    const Scenario sc = synthesize_scenario(cfg, 5);
    const Pose pose = sc.pose_at(3);
    const PoseLink link = build_pose_link(sc, pose);
    const AntennaLayout mask = full_mask(cfg.Q_hat);
    SubStream rs(7, "drive");
    const BeamformerSet beams = random_beams(rs, cfg);
    const NoiseConfig noise = NoiseConfig::from(cfg);
    const PowerSplit split{0.6, 0.3, cfg.p_t};

    RisConfiguration off = RisConfiguration::neutral(cfg.B_layers, cfg.N_R, cfg.eta,
                                                     cfg.p_ris, cfg.beta_max);
    for (auto& a : off.amplitudes) a = 0.0;
    CHECK(ris_drive_power(sc, link, mask, off, beams, split, noise) == doctest::Approx(0.0));

    // amplitudes one, no signal: only the noise term survives
    RisConfiguration idle = RisConfiguration::neutral(cfg.B_layers, cfg.N_R, cfg.eta,
                                                      cfg.p_ris, cfg.beta_max);
    BeamformerSet silent = beams;
    silent.Wc = CMatrix(cfg.Q_hat, 1);
    silent.Wr = CMatrix(cfg.Q_hat, 1);
    CHECK(ris_drive_power(sc, link, mask, idle, silent, split, noise) ==
          doctest::Approx(noise.sigma_r2 * double(cfg.N_R)));

    // quadratic in the amplitudes
    RisConfiguration one = idle, two = idle;
    for (auto& a : two.amplitudes) a = 2.0;
    const double p1 = ris_drive_power(sc, link, mask, one, beams, split, noise);
    const double p2 = ris_drive_power(sc, link, mask, two, beams, split, noise);
    CHECK(p2 == doctest::Approx(4.0 * p1).epsilon(1e-9));
}

TEST_CASE("SINR evaluators match symbol-level Monte-Carlo") {
    ScenarioConfig cfg = ScenarioConfig::desk();
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        const Scenario sc = synthesize_scenario(cfg, seed);
        const Pose pose = sc.pose_at(seed % sc.pose_count());
        const PoseLink link = build_pose_link(sc, pose);
        SubStream rs(seed, "beams");
        const BeamformerSet beams = random_beams(rs, cfg);
        AntennaLayout mask;
        mask.mask.assign(cfg.Q_hat, 0);
        for (std::size_t q = 0; q < cfg.A; ++q) mask.mask[2 * q] = 1;
        mask.count = cfg.A;
        const RisConfiguration ris = RisConfiguration::neutral(cfg.B_layers, cfg.N_R, cfg.eta,
                                                               cfg.p_ris, cfg.beta_max);
        const CMatrix cascade = ris_cascade(ris, sc.ch.layers);
        const NoiseConfig noise = NoiseConfig::from(cfg);
        const PowerSplit split{0.55, 0.4, cfg.p_t};

        const double su = sinr_bob(sc, link, mask, cascade, beams, split, noise);
        const double se = sinr_eve(sc, link, mask, beams, split, noise);
        const double sr = sinr_radar(sc, link, mask, beams, split, noise);
        const auto mc = oracles::mc_sinr(sc, pose, mask, ris, beams, split, noise, 100000, seed);
        CHECK(std::abs(su - mc.bob) / mc.bob < 0.01);
        CHECK(std::abs(se - mc.eve) / mc.eve < 0.01);
        CHECK(std::abs(sr - mc.radar) / mc.radar < 0.01);
    }
}

TEST_CASE("SINRs monotone in own noise") {
    ScenarioConfig cfg = ScenarioConfig::desk();
    const Scenario sc = synthesize_scenario(cfg, 21);
    const Pose pose = sc.pose_at(7);
    const PoseLink link = build_pose_link(sc, pose);
    SubStream rs(22, "mono");
    const BeamformerSet beams = random_beams(rs, cfg);
    const AntennaLayout mask = full_mask(cfg.Q_hat);
    const RisConfiguration ris = RisConfiguration::neutral(cfg.B_layers, cfg.N_R, cfg.eta,
                                                           cfg.p_ris, cfg.beta_max);
    const CMatrix cascade = ris_cascade(ris, sc.ch.layers);
    const PowerSplit split{0.5, 0.5, cfg.p_t};

    double prev_b = 1e300, prev_e = 1e300;
    for (double scale : {1.0, 10.0, 100.0}) {
        NoiseConfig noise = NoiseConfig::from(cfg);
        noise.sigma_b2 *= scale;
        noise.sigma_e2 *= scale;
        const double sb = sinr_bob(sc, link, mask, cascade, beams, split, noise);
        const double se = sinr_eve(sc, link, mask, beams, split, noise);
        CHECK(sb <= prev_b);
        CHECK(se <= prev_e);
        prev_b = sb;
        prev_e = se;
    }
}

TEST_CASE("audit flags violations and skips inapplicable entries") {
    ScenarioConfig cfg = ScenarioConfig::desk();
    const Scenario sc = synthesize_scenario(cfg, 33);
    const Pose pose = sc.pose_at(0);
    SubStream rs(34, "audit");
    BeamformerSet beams = random_beams(rs, cfg);
    AntennaLayout mask;
    mask.mask.assign(cfg.Q_hat, 0);
    for (std::size_t q = 0; q < cfg.A; ++q) mask.mask[q] = 1;
    mask.count = cfg.A;
    RisConfiguration ris = RisConfiguration::neutral(cfg.B_layers, cfg.N_R, cfg.eta,
                                                     cfg.p_ris, cfg.beta_max);
    const NoiseConfig noise = NoiseConfig::from(cfg);

    // deliberately unnormalized communication precoder
    beams.Wc *= cxd(3.0, 0.0);
    ConstraintReport rep =
        audit_constraints(sc, pose, mask, ris, beams, {0.5, 0.2, cfg.p_t}, noise);
    CHECK_FALSE(rep.get("C1").pass);
    CHECK(rep.get("C1").residual > 0.0);
    CHECK(rep.get("C7").pass);
    CHECK(rep.get("C8").pass);

    // alpha = 1: no receiver power, C2 flagged not applicable
    rep = audit_constraints(sc, pose, mask, ris, beams, {1.0, 0.2, cfg.p_t}, noise);
    CHECK_FALSE(rep.get("C2").applicable);
    CHECK_FALSE(rep.get("C6").applicable);
}
