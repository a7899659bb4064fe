#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rasec/channel.hpp"
#include "rasec/eig.hpp"
#include "rasec/signal_metrics.hpp"

namespace rasec {

/// A stage of the pipeline found the problem unsolvable as posed (sensing
/// requirement out of reach, empty power-allocation feasible set, no
/// artificial-noise subspace). Carries the stage label for reporting.
struct Infeasible : std::runtime_error {
    std::string stage;
    Infeasible(std::string stage_, const std::string& msg)
        : std::runtime_error(stage_ + ": " + msg), stage(std::move(stage_)) {}
};

enum class PoseStrategy { exhaustive, merged };
enum class PoseFilter { all, freeze_rotation, freeze_position, freeze_both };

struct OptimizerOptions {
    PoseStrategy strategy = PoseStrategy::exhaustive;
    PoseFilter pose_filter = PoseFilter::all;
    bool optimize_tris = true;
    bool fixed_layout = false;  // keep the first A sites instead of selecting
    int alternating_iters = 0;  // optional outer refinement passes
    std::size_t workers = 1;
};

namespace detail {

inline CVec bob_effective_column(const CMatrix& g, const CMatrix& cascade, const CVec& ub) {
    return g * (cascade * ub);
}

/// Pencil solve with both sides rescaled so tr(D) = n. The quotient and the
/// vectors are invariant, and the positive-definiteness floor inside the
/// solver stays meaningful for the tiny power scales of long links.
inline GeneralizedEigResult pencil_topk(const CMatrix& c, const CMatrix& d, std::size_t k) {
    const double tr = d.trace().real();
    if (!(tr > 0.0)) throw std::invalid_argument("pencil_topk: D has nonpositive trace");
    const cxd s(double(d.rows()) / tr, 0.0);
    return generalized_eig_topk((c * s).hermitized(), (d * s).hermitized(), k);
}

inline std::vector<std::size_t> candidate_poses(const Scenario& sc, PoseFilter filter) {
    const std::size_t n_count = sc.pose_spec.rotations.size();
    const std::size_t m_count = sc.pose_spec.origins.size();
    std::vector<std::size_t> flat;
    switch (filter) {
        case PoseFilter::all:
            for (std::size_t i = 0; i < n_count * m_count; ++i) flat.push_back(i);
            break;
        case PoseFilter::freeze_rotation:
            for (std::size_t m = 0; m < m_count; ++m) flat.push_back(m);
            break;
        case PoseFilter::freeze_position:
            for (std::size_t n = 0; n < n_count; ++n) flat.push_back(n * m_count);
            break;
        case PoseFilter::freeze_both:
            flat.push_back(0);
            break;
    }
    return flat;
}

}  // namespace detail

struct PoseSearchResult {
    std::size_t flat = 0;
    Pose pose;
    double objective = 0.0;       // sum of the per-stream quotients at the winner
    std::vector<CVec> precoders;  // per stream, scaled to power 1/upsilon_c
};

/// Rate-maximizing pose. The exhaustive strategy solves one generalized
/// Rayleigh-quotient problem per candidate pose and takes the best value; the
/// merged strategy solves a single aggregated problem and rescores its vector
/// at every pose. Ties break toward the smaller rotation then translation
/// index. Per-pose evaluations are pure, so candidates fan out across workers
/// and reduce by (value, index).
inline PoseSearchResult pose_search(const Scenario& sc, const CMatrix& cascade, const CVec& ub,
                                    PoseStrategy strategy,
                                    const std::vector<std::size_t>& candidates,
                                    std::size_t workers = 1) {
    if (candidates.empty()) throw std::invalid_argument("pose_search: empty pose set");
    const std::size_t k = sc.cfg.upsilon_c;
    const CVec bu = cascade * ub;

    auto bob_col = [&](std::size_t flat) {
        const Pose pose = sc.pose_at(flat);
        const CMatrix g =
            assemble_bs_channel(pose, sc.ch.paths_bs_ris, sc.ch.H_R, sc.pattern, sc.ch.lambda);
        return g * bu;
    };

    struct Scored {
        double value = -1.0;
        std::size_t flat = 0;
    };
    auto reduce = [](const Scored& a, const Scored& b) {
        if (a.value != b.value) return a.value > b.value ? a : b;
        return a.flat <= b.flat ? a : b;
    };

    auto top_quotients = [&](const CMatrix& psi) {
        // U_b is rank one, so the single-stream problem has the closed pair
        // (||c||^2, c/||c||); larger stream counts fall back to the pencil.
        return detail::pencil_topk(psi, CMatrix::identity(psi.rows()), k);
    };

    PoseSearchResult out;
    if (strategy == PoseStrategy::exhaustive) {
        auto score_pose = [&](std::size_t flat) -> Scored {
            const CVec c = bob_col(flat);
            if (k == 1) return {norm2sq(c), flat};
            const GeneralizedEigResult r = top_quotients(outer(c, c));
            double total = 0.0;
            for (double q : r.quotients) total += q;
            return {total, flat};
        };

        Scored best;
        if (workers <= 1) {
            for (std::size_t flat : candidates) best = reduce(best, score_pose(flat));
        } else {
            const std::size_t nw = std::min<std::size_t>(workers, candidates.size());
            std::vector<Scored> partial(nw);
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < nw; ++w)
                pool.emplace_back([&, w] {
                    Scored local;
                    for (std::size_t i = w; i < candidates.size(); i += nw)
                        local = reduce(local, score_pose(candidates[i]));
                    partial[w] = local;
                });
            for (auto& t : pool) t.join();
            for (const Scored& s : partial) best = reduce(best, s);
        }

        out.flat = best.flat;
        out.objective = best.value;
        out.pose = sc.pose_at(best.flat);
        const CVec c = bob_col(best.flat);
        if (k == 1) {
            out.precoders.push_back(scaled(normalized(c), cxd(1.0 / std::sqrt(double(k)), 0.0)));
        } else {
            const GeneralizedEigResult r = top_quotients(outer(c, c));
            for (const CVec& v : r.vectors)
                out.precoders.push_back(scaled(v, cxd(1.0 / std::sqrt(double(k)), 0.0)));
        }
        return out;
    }

    // merged: aggregate the per-pose quadratic forms, solve once, rescore
    std::vector<CVec> cols;
    cols.reserve(candidates.size());
    CMatrix psi_sum(sc.cfg.Q_hat, sc.cfg.Q_hat);
    for (std::size_t flat : candidates) {
        cols.push_back(bob_col(flat));
        psi_sum += outer(cols.back(), cols.back());
    }
    const GeneralizedEigResult r = top_quotients(psi_sum.hermitized());

    Scored best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double score = 0.0;
        for (const CVec& v : r.vectors) score += std::norm(vdot(v, cols[i]));
        best = reduce(best, {score, candidates[i]});
    }
    out.flat = best.flat;
    out.objective = best.value;
    out.pose = sc.pose_at(best.flat);
    for (const CVec& v : r.vectors)
        out.precoders.push_back(scaled(v, cxd(1.0 / std::sqrt(double(k)), 0.0)));
    return out;
}

/// Maximum ratio transmission toward the cascaded Bob channel, per-stream
/// power 1/upsilon_c.
inline CVec mrt_precoder(const CMatrix& g, const CMatrix& cascade, const CVec& ub,
                         std::size_t upsilon_c) {
    const CVec c = detail::bob_effective_column(g, cascade, ub);
    const double n = norm2(c);
    if (n <= 0.0) throw std::invalid_argument("mrt_precoder: zero effective channel");
    return scaled(c, cxd(1.0 / (std::sqrt(double(upsilon_c)) * n), 0.0));
}

/// Top-A site selection by per-site channel power. The effective per-site
/// gains under maximum ratio transmission are |g_q|^2, nonnegative, so the
/// greedy pick attains the exhaustive-subset maximum.
inline AntennaLayout select_antennas(const CMatrix& g, const CMatrix& cascade, const CVec& ub,
                                     std::size_t a) {
    const CVec c = detail::bob_effective_column(g, cascade, ub);
    std::vector<std::size_t> order(c.size());
    for (std::size_t q = 0; q < c.size(); ++q) order[q] = q;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double hx = std::norm(c[x]), hy = std::norm(c[y]);
        if (hx != hy) return hx > hy;
        return x < y;
    });
    AntennaLayout layout;
    layout.mask.assign(c.size(), 0);
    for (std::size_t i = 0; i < a && i < order.size(); ++i) layout.mask[order[i]] = 1;
    layout.count = std::min(a, order.size());
    return layout;
}

/// Re-normalized maximum ratio transmission on the selected sites.
inline CVec renormalize_precoder(const AntennaLayout& layout, const CMatrix& g,
                                 const CMatrix& cascade, const CVec& ub,
                                 std::size_t upsilon_c) {
    const CVec c = apply_mask(layout, detail::bob_effective_column(g, cascade, ub));
    const double n = norm2(c);
    if (n <= 0.0)
        throw std::invalid_argument("renormalize_precoder: selected sites carry no channel");
    return scaled(c, cxd(1.0 / (std::sqrt(double(upsilon_c)) * n), 0.0));
}

/// Phase design of the passive layers: each layer's elements are co-phased so
/// their cascaded contributions arrive in phase at the center element of the
/// next layer. Elements with no incident signal keep phase zero.
inline void tpris_phase_stack(const Scenario& sc, RisConfiguration& ris,
                              const CMatrix& g_star, const AntennaLayout& layout,
                              const CMatrix& w_c) {
    const std::size_t layers = ris.layer_count();
    if (layers < 2) return;  // no passive layer exists

    // incident field at the entry layer for the designed communication signal
    CVec x_c(w_c.rows(), cxd(0, 0));
    for (std::size_t q = 0; q < w_c.rows(); ++q)
        for (std::size_t j = 0; j < w_c.cols(); ++j) x_c[q] += w_c(q, j);
    x_c = apply_mask(layout, x_c);
    CVec incident = left_apply(x_c, g_star);  // (x^H G)_j
    for (cxd& z : incident) z = std::conj(z);  // G^H F x

    for (std::size_t b = 0; b + 1 < layers; ++b) {
        const CMatrix& hop = sc.ch.layers[b];
        const std::size_t zeta = plane_center_index(hop.cols());
        for (std::size_t n = 0; n < incident.size(); ++n) {
            const cxd coupling = hop(n, zeta);
            if (std::abs(incident[n]) <= 0.0 || std::abs(coupling) <= 0.0) {
                ris.phases[b][n] = 0.0;
                continue;
            }
            // the cascade applies this layer as Theta^H, so the summand
            // phase at the target element is -angle(hop) - theta + angle(in)
            ris.phases[b][n] = std::arg(incident[n]) - std::arg(coupling);
        }
        // propagate to the next layer with the phases just set
        const CMatrix stage = CMatrix::diag(ris.theta_vec(b)) * hop * cxd(ris.eta, 0.0);
        CVec next = left_apply(incident, stage);
        for (cxd& z : next) z = std::conj(z);  // (eta Theta B)^H incident
        incident = std::move(next);
    }
}

/// Leakage-quotient design of the active layer: maximize delivered Bob power
/// over drive power, then scale the amplitudes onto the drive budget (or the
/// per-element amplitude cap, whichever binds first).
inline CVec taris_phase_leakage(const Scenario& sc, RisConfiguration& ris,
                                const CMatrix& g_star, const AntennaLayout& layout,
                                const BeamformerSet& beams, double alpha, double p_t) {
    const std::size_t n_r = sc.cfg.N_R;
    const CMatrix bhat = passive_cascade(ris, sc.ch.layers);
    const CMatrix& b_last = sc.ch.layers.back();

    auto through_stack = [&](const CVec& w) {
        CVec u = left_apply(apply_mask(layout, w), g_star);
        for (cxd& z : u) z = std::conj(z);
        CVec v = left_apply(u, bhat);
        for (cxd& z : v) z = std::conj(z);
        return v;  // Bhat^H G^H F w
    };

    // numerator: coherent Bob delivery of the lead communication stream
    const CVec inc_c = through_stack(beams.Wc.column(0));
    const CVec blu = b_last * beams.ub;
    CVec h(n_r);
    for (std::size_t n = 0; n < n_r; ++n) h[n] = std::conj(inc_c[n]) * blu[n];
    CVec h_conj(n_r);
    for (std::size_t n = 0; n < n_r; ++n) h_conj[n] = std::conj(h[n]);
    const CMatrix c = outer(h_conj, h_conj);

    // denominator: per-element drive of the full transmit covariance
    const double eps = (alpha > 0.0) ? sc.cfg.sigma_r2 / (alpha * p_t) : 1.0;
    CVec diag(n_r, cxd(eps, 0.0));
    auto add_drive = [&](const CMatrix& w) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const CVec v = through_stack(w.column(j));
            for (std::size_t n = 0; n < n_r; ++n) diag[n] += std::norm(v[n]);
        }
    };
    add_drive(beams.Wc);
    add_drive(beams.Wr);
    const CMatrix d = CMatrix::diag(diag);

    const GeneralizedEigResult sol = detail::pencil_topk(c, d, 1);
    const CVec& dir = sol.vectors[0];

    // amplitude scale: exact drive budget unless the element cap binds
    double drive_unit = 0.0;
    for (std::size_t n = 0; n < n_r; ++n) drive_unit += diag[n].real() * std::norm(dir[n]);
    drive_unit *= std::max(alpha, 1e-300) * p_t;
    double peak = 0.0;
    for (const cxd& z : dir) peak = std::max(peak, std::abs(z));
    const double budget_scale = std::sqrt(ris.p_ris / drive_unit);
    const double cap_scale = peak > 0.0 ? ris.beta_max / peak : budget_scale;
    const double scale = std::min(budget_scale, cap_scale);

    CVec active(n_r);
    for (std::size_t n = 0; n < n_r; ++n) {
        active[n] = scale * dir[n];
        ris.amplitudes[n] = std::abs(active[n]);
        ris.phases[ris.layer_count() - 1][n] = std::arg(active[n] == cxd(0, 0) ? cxd(1, 0)
                                                                               : active[n]);
    }
    return active;
}

enum class ReceiverSide { bob, eve };

/// Interference-plus-noise-whitened matched filter on the lead stream,
/// normalized to a unit combiner.
inline CVec mmse_receiver(ReceiverSide side, const Scenario& sc, const PoseLink& link,
                          const AntennaLayout& layout, const CMatrix& cascade,
                          const BeamformerSet& beams, const PowerSplit& split,
                          const NoiseConfig& noise) {
    const double a_pt = split.alpha * split.p_t;
    const double r_pt = (1.0 - split.alpha) * split.p_t;

    if (side == ReceiverSide::bob) {
        const std::size_t a_b = cascade.cols();
        CMatrix r(a_b, a_b);
        auto add_streams = [&](const CMatrix& w) {
            for (std::size_t j = 0; j < w.cols(); ++j) {
                const CVec fw = apply_mask(layout, w.column(j));
                CVec u = left_apply(fw, link.G);
                for (cxd& z : u) z = std::conj(z);
                CVec hcol = left_apply(u, cascade);
                for (cxd& z : hcol) z = std::conj(z);
                r += outer(hcol, hcol) * cxd(a_pt, 0.0);
            }
        };
        add_streams(beams.Wc);
        add_streams(beams.Wr);
        for (std::size_t j = 0; j < beams.Wa.cols(); ++j) {
            const CVec wa = beams.Wa.column(j);
            CVec u = left_apply(wa, sc.ch.G_b);  // (wa^H G_b)_n
            for (cxd& z : u) z = std::conj(z);   // G_b^H wa
            CVec hcol = left_apply(u, cascade);
            for (cxd& z : hcol) z = std::conj(z);
            r += outer(hcol, hcol) * cxd(r_pt, 0.0);
        }
        const CMatrix& b_last = sc.ch.layers.back();
        r += (b_last.adjoint() * b_last) * cxd(noise.sigma_I2, 0.0);
        for (std::size_t i = 0; i < a_b; ++i) r(i, i) += noise.sigma_b2;

        const CVec fw0 = apply_mask(layout, beams.Wc.column(0));
        CVec u = left_apply(fw0, link.G);
        for (cxd& z : u) z = std::conj(z);
        CVec h0 = left_apply(u, cascade);
        for (cxd& z : h0) z = std::conj(z);
        return normalized(hpd_solve(r.hermitized(), h0));
    }

    const std::size_t a_e = link.E.cols();
    CMatrix r(a_e, a_e);
    auto add_streams = [&](const CMatrix& w) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const CVec fw = apply_mask(layout, w.column(j));
            CVec h = left_apply(fw, link.E);
            for (cxd& z : h) z = std::conj(z);
            r += outer(h, h) * cxd(a_pt, 0.0);
        }
    };
    add_streams(beams.Wc);
    add_streams(beams.Wr);
    for (std::size_t j = 0; j < beams.Wa.cols(); ++j) {
        CVec h = left_apply(beams.Wa.column(j), sc.ch.G_e);
        for (cxd& z : h) z = std::conj(z);
        r += outer(h, h) * cxd(r_pt, 0.0);
    }
    for (std::size_t i = 0; i < a_e; ++i) r(i, i) += noise.sigma_e2;

    const CVec fw0 = apply_mask(layout, beams.Wc.column(0));
    CVec h0 = left_apply(fw0, link.E);
    for (cxd& z : h0) z = std::conj(z);
    return normalized(hpd_solve(r.hermitized(), h0));
}

/// Sensing beams: top generalized eigenvectors of the target-echo versus
/// Bob-leakage pencil, scaled to the requested masked power. Throws when the
/// scaled beams carry no echo off the target at all: no power level can then
/// satisfy the sensing floor through this stage, which the power allocation
/// downstream would otherwise discover as an empty feasible set.
inline CMatrix sensing_precoder(const CMatrix& a1, const CMatrix& a3, const CMatrix& a4,
                                const CMatrix& a6, double gamma_r, std::size_t upsilon_r,
                                double target_trace, const AntennaLayout& layout) {
    const std::size_t n = a3.rows();
    CMatrix numer = a1 + a4 - a6 * cxd(gamma_r, 0.0);
    CMatrix denom = a3;
    const double eps = 1e-9 * std::max(denom.trace().real(), 0.0) / double(n) + 1e-300;
    for (std::size_t i = 0; i < n; ++i) denom(i, i) += eps;

    const GeneralizedEigResult sol = detail::pencil_topk(numer.hermitized(), denom, upsilon_r);
    CMatrix w(n, upsilon_r);
    for (std::size_t j = 0; j < upsilon_r; ++j) w.set_column(j, sol.vectors[j]);

    const double have = masked_power(layout, w);
    if (have <= 0.0)
        throw Infeasible("sensing-precoder", "sensing directions vanish on the selected sites");
    w *= cxd(std::sqrt(target_trace / have), 0.0);

    double echo = 0.0;
    for (std::size_t j = 0; j < upsilon_r; ++j) echo += quad_form(w.column(j), a4);
    if (!(echo > 0.0))
        throw Infeasible("sensing-precoder", "sensing beams carry no target echo");
    return w;
}

/// Artificial-noise beams: null-space projected generalized eigenvectors of
/// the Eve-interference versus sensing-degradation pencil, unit total power.
///
/// The printed pencil assumes its denominator stays definite, which holds
/// only while sensing is over-satisfied: the subtracted term is the noise
/// beams' own echo off the target, and once the radar floor binds that echo
/// rivals the self-interference it is weighed against. When the matrix turns
/// indefinite the trade-off it encodes has vanished, so the design falls
/// back to weighing Eve interference against the unambiguous costs alone
/// (clutter and loop leakage); the echo benefit still enters the power
/// allocation through its own coefficient.
inline CMatrix an_precoder(const CMatrix& a2, const CMatrix& a5, const CMatrix& a7,
                           const CMatrix& a8, double gamma_r, const CMatrix& p_a,
                           std::size_t upsilon_a) {
    if (p_a.frob() < 1e-12)
        throw Infeasible("an-precoder", "Bob channel spans the whole space, no null space left");
    const std::size_t n = a2.rows();
    auto regularized = [n](CMatrix m) {
        const double eps = 1e-9 * std::abs(m.trace().real()) / double(n) + 1e-300;
        for (std::size_t i = 0; i < n; ++i) m(i, i) += eps;
        return m.hermitized();
    };
    CMatrix denom = regularized((a7 + a8) * cxd(gamma_r, 0.0) - a5);
    if (hermitian_eig(denom).values.back() <= 0.0)
        denom = regularized((a7 + a8) * cxd(gamma_r, 0.0));
    if (hermitian_eig(denom).values.back() <= 0.0)
        throw Infeasible("an-precoder", "sensing-degradation matrix stays indefinite after "
                                        "regularization");

    const GeneralizedEigResult sol = detail::pencil_topk(a2.hermitized(), denom, upsilon_a);
    CMatrix w_hat(n, upsilon_a);
    for (std::size_t j = 0; j < upsilon_a; ++j) w_hat.set_column(j, sol.vectors[j]);
    CMatrix w = p_a * w_hat;
    const double norm = w.frob();
    if (norm <= 0.0) throw Infeasible("an-precoder", "projected beams vanish");
    w *= cxd(1.0 / norm, 0.0);
    return w;
}

/// Scalar coefficients of the power-allocation subproblem, all stripped of
/// the split factors they get multiplied by on evaluation.
struct PowerCoeffs {
    double a1_hat = 0.0;  // Bob communication power per unit alpha
    double a3_hat = 0.0;  // Eve communication power per unit alpha
    double d[9] = {};     // 1-indexed, d[1]..d[8]
    double j2 = 0.0;
    double j6 = 0.0;
    double sigma_e2 = 0.0;
};

inline double c10_lhs(const PowerCoeffs& c, double alpha, double rho0) {
    const double num = alpha * rho0 * c.d[4] + (1.0 - alpha) * c.d[5];
    const double den = alpha * rho0 * c.d[6] + (1.0 - alpha) * c.d[7] + c.d[8] +
                       alpha * (1.0 - rho0) * c.j6;
    return num / den;
}

inline double power_objective(const PowerCoeffs& c, double alpha, double rho0) {
    const double num =
        1.0 + alpha * (1.0 - rho0) * c.a1_hat *
                  (alpha * rho0 * c.d[1] + (1.0 - alpha) * c.d[2] + c.sigma_e2);
    const double den =
        1.0 + alpha * (1.0 - rho0) * c.a3_hat * (alpha * rho0 * c.d[3] + c.j2);
    return num / den;
}

/// alpha that holds the sensing constraint at equality for a given rho0.
/// Solves the printed constraint's equality directly; no solution when the
/// returned value leaves [0, 1] or the divisor vanishes.
inline std::optional<double> alpha_at_c10_equality(const PowerCoeffs& c, double gamma_r,
                                                   double rho0) {
    const double num = gamma_r * (c.d[7] + c.d[8]) - c.d[5];
    const double den = rho0 * (c.d[4] - gamma_r * c.d[6] + gamma_r * c.j6) + gamma_r * c.d[7] -
                       gamma_r * c.j6 - c.d[5];
    if (std::abs(den) < 1e-300) return std::nullopt;
    const double alpha = num / den;
    if (!(alpha >= 0.0 && alpha <= 1.0)) return std::nullopt;
    return alpha;
}

struct PowerSolution {
    double alpha = 1.0;
    double rho0 = 0.0;
    double objective = 0.0;
    double c10_residual = 0.0;  // relative deviation of the constraint from equality
};

/// Sweeps the sensing share on a fine grid, pins alpha to the constraint
/// equality at each point, and keeps the best printed objective; a
/// golden-section pass then refines around the winning cell.
inline PowerSolution allocate_power(const PowerCoeffs& c, double gamma_r) {
    const double step = 1e-3;
    double best_obj = -1e300;
    double best_rho = -1.0, best_alpha = -1.0;
    int feasible = 0;
    double alpha_lo = 1e300, alpha_hi = -1e300;
    for (int i = 0; i <= 1000; ++i) {
        const double rho = double(i) * step;
        const std::optional<double> alpha = alpha_at_c10_equality(c, gamma_r, rho);
        if (!alpha) continue;
        ++feasible;
        alpha_lo = std::min(alpha_lo, *alpha);
        alpha_hi = std::max(alpha_hi, *alpha);
        const double obj = power_objective(c, *alpha, rho);
        if (obj > best_obj) {
            best_obj = obj;
            best_rho = rho;
            best_alpha = *alpha;
        }
    }
    if (feasible == 0)
        throw Infeasible("power-allocation",
                         "no share in [0,1] holds the sensing constraint with alpha in [0,1]");

    // golden-section refinement inside the winning cell
    double lo = std::max(0.0, best_rho - step), hi = std::min(1.0, best_rho + step);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto value_at = [&](double rho) {
        const std::optional<double> alpha = alpha_at_c10_equality(c, gamma_r, rho);
        return alpha ? power_objective(c, *alpha, rho) : -1e300;
    };
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = value_at(x1), f2 = value_at(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = value_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = value_at(x1);
        }
    }
    const double rho_ref = (f1 > f2) ? x1 : x2;
    const double obj_ref = std::max(f1, f2);
    if (obj_ref > best_obj) {
        best_rho = rho_ref;
        best_obj = obj_ref;
        best_alpha = *alpha_at_c10_equality(c, gamma_r, rho_ref);
    }

    PowerSolution out;
    out.alpha = best_alpha;
    out.rho0 = best_rho;
    out.objective = best_obj;
    out.c10_residual = std::abs(c10_lhs(c, best_alpha, best_rho) / gamma_r - 1.0);
    return out;
}

}  // namespace rasec
