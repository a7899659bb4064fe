#pragma once

// Test-only oracles, kept independent of the library's eigensolver path.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rasec/complex_matrix.hpp"

namespace oracles {

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form. Only |subdiagonal| matters for the spectrum (diagonal phase
// similarity), so we return d and e = |subdiag|.
inline void tridiagonalize(rasec::CMatrix a, std::vector<double>& d, std::vector<double>& e) {
    using rasec::cxd;
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm < 1e-300) continue;
        const cxd x0 = a(k + 1, k);
        const cxd phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cxd(1.0, 0.0);
        const cxd alpha = -phase * xnorm;

        std::vector<cxd> v(n, cxd(0.0, 0.0));
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vnorm2 = 0.0;
        for (const cxd& z : v) vnorm2 += std::norm(z);
        if (vnorm2 < 1e-300) continue;

        // A <- (I - 2vv^H/v^Hv) A (I - 2vv^H/v^Hv)
        std::vector<cxd> w(n, cxd(0.0, 0.0));  // w = A v
        for (std::size_t i = 0; i < n; ++i) {
            cxd s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
            w[i] = s;
        }
        const double beta = 2.0 / vnorm2;
        cxd vw = 0.0;
        for (std::size_t i = 0; i < n; ++i) vw += std::conj(v[i]) * w[i];
        // rank-2 update: A -= beta (v w^H + w v^H) - beta^2 (v^H w) v v^H
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= beta * (v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]));
                a(i, j) += beta * beta * vw * v[i] * std::conj(v[j]);
            }
    }
    d.resize(n);
    e.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::abs(a(i + 1, i));
}

// Sturm count: number of eigenvalues of the tridiagonal (d, e) below x.
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double e2 = (i == 0) ? 0.0 : e[i - 1] * e[i - 1];
        q = (d[i] - x) - e2 / q;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

// All eigenvalues of a Hermitian matrix by tridiagonal Sturm bisection,
// ascending order.
inline std::vector<double> eigenvalues_bisect(const rasec::CMatrix& h, double tol = 1e-12) {
    std::vector<double> d, e;
    tridiagonalize(h, d, e);
    const std::size_t n = d.size();
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? e[i - 1] : 0.0) + (i + 1 < n ? e[i] : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    lo -= 1.0;
    hi += 1.0;
    std::vector<double> vals(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        double a = lo, b = hi;
        // smallest x with count(x) >= idx+1
        for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b));
             ++it) {
            const double mid = 0.5 * (a + b);
            if (sturm_count(d, e, mid) >= static_cast<int>(idx) + 1)
                b = mid;
            else
                a = mid;
        }
        vals[idx] = 0.5 * (a + b);
    }
    return vals;
}

// Generalized Rayleigh quotient maximum by random sampling plus random
// local hill climbing. The quotient has no spurious local maxima on the
// sphere, so this converges without touching the library eigensolver.
template <typename Rng>
double grq_oracle_max(const rasec::CMatrix& c, const rasec::CMatrix& d, Rng& rs,
                      int samples = 100000, int refine_iters = 4000) {
    using rasec::CVec;
    auto quot = [&](const CVec& x) {
        return rasec::quad_form(x, c) / rasec::quad_form(x, d);
    };
    CVec best;
    double best_q = -1e300;
    const std::size_t n = c.rows();
    for (int i = 0; i < samples; ++i) {
        const CVec x = rasec::normalized(rs.cgauss_vec(n));
        const double q = quot(x);
        if (q > best_q) {
            best_q = q;
            best = x;
        }
    }
    double radius = 0.5;
    int since_improve = 0;
    for (int i = 0; i < refine_iters; ++i) {
        CVec cand = best;
        const CVec dir = rs.cgauss_vec(n);
        for (std::size_t k = 0; k < n; ++k) cand[k] += radius * dir[k];
        cand = rasec::normalized(cand);
        const double q = quot(cand);
        if (q > best_q) {
            best_q = q;
            best = cand;
            since_improve = 0;
        } else if (++since_improve > 20) {
            radius *= 0.7;
            since_improve = 0;
            if (radius < 1e-9) break;
        }
    }
    return best_q;
}

// Cofactor determinants for small Hermitian matrices.
inline double det2(const rasec::CMatrix& a) {
    return (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real();
}
inline double det3(const rasec::CMatrix& a) {
    const rasec::cxd det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    return det.real();
}

}  // namespace oracles
