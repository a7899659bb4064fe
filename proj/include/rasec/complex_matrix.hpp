#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rasec {

using cxd = std::complex<double>;
using CVec = std::vector<cxd>;

/// Dense complex matrix, row-major. Sized for the dense problems in this
/// toolkit (n up to a few hundred); no sparse or blocked paths.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols, cxd fill = cxd(0.0, 0.0))
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix ones(std::size_t rows, std::size_t cols) {
        return CMatrix(rows, cols, cxd(1.0, 0.0));
    }
    static CMatrix diag(const CVec& d) {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    static CMatrix from_column(const CVec& v) {
        CMatrix m(v.size(), 1);
        for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    cxd& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cxd& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CVec column(std::size_t j) const {
        CVec v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    void set_column(std::size_t j, const CVec& v) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    CMatrix adjoint() const {
        CMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }
    CMatrix transpose() const {
        CMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
    CMatrix conjugate() const {
        CMatrix m(rows_, cols_);
        for (std::size_t i = 0; i < rows_ * cols_; ++i) m.a_[i] = std::conj(a_[i]);
        return m;
    }

    cxd trace() const {
        cxd t = 0.0;
        for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
        return t;
    }
    double frob() const {
        double s = 0.0;
        for (const cxd& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0.0;
        for (const cxd& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    CMatrix& operator*=(cxd s) {
        for (cxd& z : a_) z *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { a += b; return a; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { a -= b; return a; }
    friend CMatrix operator*(CMatrix a, cxd s) { a *= s; return a; }
    friend CMatrix operator*(cxd s, CMatrix a) { a *= s; return a; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("CMatrix: product shape mismatch " +
                                        a.shape_str() + " x " + b.shape_str());
        CMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cxd aik = a(i, k);
                if (aik == cxd(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }
    friend CVec operator*(const CMatrix& a, const CVec& x) {
        if (a.cols_ != x.size())
            throw std::invalid_argument("CMatrix: mat*vec shape mismatch");
        CVec y(a.rows_, cxd(0.0, 0.0));
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cxd s = 0.0;
            for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    /// (A + A^H)/2; cleans parasitic asymmetry after float accumulation.
    CMatrix hermitized() const {
        CMatrix m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return m;
    }

    bool is_hermitian(double tol) const {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
        return true;
    }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    void require_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("CMatrix: shape mismatch in ") + op);
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cxd> a_;
};

// Vector helpers. Convention: vdot(a, b) = a^H b.
inline cxd vdot(const CVec& a, const CVec& b) {
    cxd s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}
inline double norm2sq(const CVec& a) {
    double s = 0.0;
    for (const cxd& z : a) s += std::norm(z);
    return s;
}
inline double norm2(const CVec& a) { return std::sqrt(norm2sq(a)); }

inline CVec scaled(CVec v, cxd s) {
    for (cxd& z : v) z *= s;
    return v;
}
inline CVec normalized(const CVec& v) {
    const double n = norm2(v);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return scaled(v, cxd(1.0 / n, 0.0));
}
inline CVec vadd(const CVec& a, const CVec& b) {
    CVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

/// a b^T (no conjugation)
inline CMatrix outer_nc(const CVec& a, const CVec& b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

/// a b^H
inline CMatrix outer(const CVec& a, const CVec& b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

/// row^H applied from the left: returns y with y_j = sum_i conj(row_i) A_ij.
inline CVec left_apply(const CVec& row, const CMatrix& a) {
    if (row.size() != a.rows())
        throw std::invalid_argument("left_apply: shape mismatch");
    CVec y(a.cols(), cxd(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const cxd ri = std::conj(row[i]);
        if (ri == cxd(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += ri * a(i, j);
    }
    return y;
}

/// x^H A x for Hermitian A; returns the real part.
inline double quad_form(const CVec& x, const CMatrix& a) {
    cxd s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cxd row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += a(i, j) * x[j];
        s += std::conj(x[i]) * row;
    }
    return s.real();
}

}  // namespace rasec
