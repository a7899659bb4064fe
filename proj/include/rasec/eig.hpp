#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rasec/complex_matrix.hpp"

namespace rasec {

struct EigenResult {
    std::vector<double> values;  // descending
    CMatrix vectors;             // unit-norm columns, same order
};

namespace detail {

inline double offdiag_frob(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Column phase fixed so the largest-magnitude entry is real positive
// (first such entry on magnitude ties). Makes eigenvectors reproducible.
inline void fix_column_phase(CMatrix& v, std::size_t j) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const double m = std::abs(v(i, j));
        if (m > best_mag + 1e-15) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag <= 0.0) return;
    const cxd z = v(best, j);
    const cxd phase = std::conj(z) / std::abs(z);
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) *= phase;
}

// Lexicographic comparison of columns by (re, im) entry pairs.
inline bool column_less(const CMatrix& v, std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const cxd x = v(i, a), y = v(i, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

}  // namespace detail

/// Full spectrum of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Off-diagonal Frobenius tolerance 1e-12 relative, at most 100 sweeps,
/// fixed row-major pivot order, so identical input gives identical output.
/// Eigenvalues sorted descending; exact ties ordered by column lexicographic
/// comparison (any orthonormal basis of a degenerate eigenspace is valid).
inline EigenResult hermitian_eig(const CMatrix& h) {
    if (h.rows() != h.cols())
        throw std::invalid_argument("hermitian_eig: matrix not square (" + h.shape_str() + ")");
    const double scale = std::max(1.0, h.max_abs());
    if (!h.is_hermitian(1e-10 * scale))
        throw std::invalid_argument("hermitian_eig: matrix not Hermitian within 1e-10");

    const std::size_t n = h.rows();
    CMatrix a = h.hermitized();
    CMatrix v = CMatrix::identity(n);

    const double off_tol = 1e-12 * std::max(a.frob(), 1e-300);
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_frob(a) <= off_tol) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(a(p, q));
                if (r <= 1e-300) continue;
                const cxd phase = a(p, q) / r;  // a_pq = r e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Rotation angle from tan(2t) = 2r/(aqq - app).
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cxd s_ph = s * phase;          // J(p,q) = s e^{i phi}
                const cxd s_ph_c = std::conj(s_ph);  // J(q,p) = -s e^{-i phi}

                // A <- J^H A J, touched rows/cols p and q only.
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const cxd akp = a(k, p);
                    const cxd akq = a(k, q);
                    a(k, p) = c * akp - s_ph_c * akq;
                    a(k, q) = s_ph * akp + c * akq;
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                a(p, p) = app - t * r;
                a(q, q) = aqq + t * r;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t k = 0; k < n; ++k) {
                    const cxd vkp = v(k, p);
                    const cxd vkq = v(k, q);
                    v(k, p) = c * vkp - s_ph_c * vkq;
                    v(k, q) = s_ph * vkp + c * vkq;
                }
            }
        }
    }

    EigenResult res;
    res.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.values[i] = a(i, i).real();
    for (std::size_t j = 0; j < n; ++j) detail::fix_column_phase(v, j);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (res.values[x] != res.values[y]) return res.values[x] > res.values[y];
        return detail::column_less(v, x, y);
    });

    EigenResult out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = res.values[order[j]];
        out.vectors.set_column(j, v.column(order[j]));
    }
    return out;
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
inline CMatrix cholesky(const CMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky: matrix not square");
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (d <= 0.0)
            throw std::invalid_argument("cholesky: matrix not positive definite at pivot " +
                                        std::to_string(j));
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            cxd s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / l(j, j).real();
        }
    }
    return l;
}

/// Solves L x = b with L lower triangular.
inline CVec forward_solve(const CMatrix& l, const CVec& b) {
    const std::size_t n = l.rows();
    CVec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        cxd s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

/// Solves L^H x = b with L lower triangular.
inline CVec backward_solve_adj(const CMatrix& l, const CVec& b) {
    const std::size_t n = l.rows();
    CVec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cxd s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x[k];
        x[ii] = s / std::conj(l(ii, ii));
    }
    return x;
}

/// Solves A x = b for Hermitian positive definite A.
inline CVec hpd_solve(const CMatrix& a, const CVec& b) {
    const CMatrix l = cholesky(a);
    return backward_solve_adj(l, forward_solve(l, b));
}

struct GeneralizedEigResult {
    std::vector<double> quotients;  // x^H C x / x^H D x, descending
    std::vector<CVec> vectors;      // unit Euclidean norm
};

/// Top-k maximizers of the generalized Rayleigh quotient x^H C x / x^H D x
/// for Hermitian C and Hermitian positive definite D.
///
/// Solved by Cholesky whitening: with D = L L^H, eigenvectors y of
/// L^{-1} C L^{-H} map back through x = L^{-H} y. Keeps the reduced problem
/// Hermitian, unlike forming D^{-1} C directly.
inline GeneralizedEigResult generalized_eig_topk(const CMatrix& c, const CMatrix& d,
                                                 std::size_t k) {
    if (c.rows() != c.cols() || d.rows() != d.cols() || c.rows() != d.rows())
        throw std::invalid_argument("generalized_eig_topk: C, D must be square and same size");
    if (k == 0 || k > c.rows())
        throw std::invalid_argument("generalized_eig_topk: bad k");

    const EigenResult d_eig = hermitian_eig(d);
    const double d_min = d_eig.values.back();
    if (d_min <= 1e-12)
        throw std::invalid_argument(
            "generalized_eig_topk: D not positive definite, smallest eigenvalue " +
            std::to_string(d_min));

    const CMatrix l = cholesky(d);
    const std::size_t n = c.rows();

    // M = L^{-1} C L^{-H}, built column by column.
    CMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        CVec ej(n, cxd(0.0, 0.0));
        ej[j] = 1.0;
        const CVec linv_h_ej = backward_solve_adj(l, ej);
        const CVec col = forward_solve(l, c * linv_h_ej);
        m.set_column(j, col);
    }
    const EigenResult me = hermitian_eig(m.hermitized());

    GeneralizedEigResult out;
    for (std::size_t j = 0; j < k; ++j) {
        CVec x = normalized(backward_solve_adj(l, me.vectors.column(j)));
        out.quotients.push_back(quad_form(x, c) / quad_form(x, d));
        out.vectors.push_back(std::move(x));
    }
    return out;
}

/// Orthogonal projector onto the complement of range(H):
/// P = I - H (H^H H)^{-1} H^H. Requires full column rank.
inline CMatrix null_space_projector(const CMatrix& h) {
    if (h.rows() == 0 || h.cols() == 0)
        throw std::invalid_argument("null_space_projector: empty matrix");
    const CMatrix gram = (h.adjoint() * h).hermitized();
    const EigenResult ge = hermitian_eig(gram);
    const double lmax = ge.values.front();
    const double lmin = ge.values.back();
    if (lmin <= 0.0 || lmax / lmin >= 1e12)
        throw std::invalid_argument("null_space_projector: H rank-deficient (Gram condition " +
                                    std::to_string(lmin > 0.0 ? lmax / lmin : INFINITY) + ")");
    const CMatrix l = cholesky(gram);
    const std::size_t n = h.rows();
    CMatrix p = CMatrix::identity(n);
    // P = I - H G^{-1} H^H, one column of H^H at a time.
    const CMatrix hadj = h.adjoint();
    for (std::size_t j = 0; j < n; ++j) {
        const CVec rhs = hadj.column(j);
        const CVec y = backward_solve_adj(l, forward_solve(l, rhs));
        const CVec hy = h * y;
        for (std::size_t i = 0; i < n; ++i) p(i, j) -= hy[i];
    }
    return p.hermitized();
}

}  // namespace rasec
