#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qpm/errors.hpp"

namespace qpm {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Workhorse type for intermediate
// computations; Hermitian-by-construction values live in HermitianMatrix.
struct Mat {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<cplx> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool square() const { return rows == cols; }

    Mat adjoint() const {
        Mat m(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows && i < cols; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius() const {
        double s = 0.0;
        for (const cplx& z : a) s += std::norm(z);
        return std::sqrt(s);
    }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] -= o.a[k];
        return *this;
    }
    Mat& operator*=(cplx s) {
        for (cplx& z : a) z *= s;
        return *this;
    }

    friend Mat operator+(Mat l, const Mat& r) { return l += r; }
    friend Mat operator-(Mat l, const Mat& r) { return l -= r; }
    friend Mat operator*(cplx s, Mat m) { return m *= s; }
    friend Mat operator*(Mat m, cplx s) { return m *= s; }

    friend Mat operator*(const Mat& l, const Mat& r) {
        if (l.cols != r.rows) throw dimension_error("matrix product: inner dimensions differ");
        Mat m(l.rows, r.cols);
        for (std::size_t i = 0; i < l.rows; ++i)
            for (std::size_t k = 0; k < l.cols; ++k) {
                const cplx lik = l(i, k);
                if (lik == cplx{}) continue;
                for (std::size_t j = 0; j < r.cols; ++j) m(i, j) += lik * r(k, j);
            }
        return m;
    }

  private:
    void check_same_shape(const Mat& o) const {
        if (rows != o.rows || cols != o.cols)
            throw dimension_error("matrix sum: shapes differ");
    }
};

inline double frobenius_distance(const Mat& a, const Mat& b) { return (a - b).frobenius(); }

}  // namespace qpm
