#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "qpm/matrix.hpp"

namespace qpm {

// Tolerance bundle threaded through every numerical decision.
//   rank_rel      relative eigenvalue cutoff for rank / support decisions
//   residual      theorem-verification residual bound
//   gm_eps_ladder regularisation ladder for singular geometric means
struct Tolerances {
    double rank_rel = 1e-10;
    double residual = 1e-8;
    std::vector<double> gm_eps_ladder{1e-4, 1e-6, 1e-8, 1e-10, 1e-12};
};

// d x d complex matrix with exact conjugate symmetry, enforced on
// construction: entry (i,j) is stored as the conjugate of entry (j,i) and
// the diagonal is real.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(std::size_t d) : m_(d, d) {
        if (d == 0) throw dimension_error("HermitianMatrix: dim must be >= 1");
    }

    // (M + M^dag)/2, with finiteness and squareness checks.
    static HermitianMatrix from(const Mat& m);

    static HermitianMatrix identity(std::size_t d) {
        HermitianMatrix h(d);
        h.m_ = Mat::identity(d);
        return h;
    }

    static HermitianMatrix diagonal(const std::vector<double>& entries) {
        HermitianMatrix h(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) h.m_(i, i) = entries[i];
        return h;
    }

    std::size_t dim() const { return m_.rows; }
    const Mat& mat() const { return m_; }
    cplx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    double trace() const { return m_.trace().real(); }
    double frobenius() const { return m_.frobenius(); }

    HermitianMatrix& operator+=(const HermitianMatrix& o) {
        m_ += o.m_;
        return *this;
    }
    HermitianMatrix& operator-=(const HermitianMatrix& o) {
        m_ -= o.m_;
        return *this;
    }
    HermitianMatrix& operator*=(double s) {
        m_ *= cplx(s);
        return *this;
    }

    friend HermitianMatrix operator+(HermitianMatrix l, const HermitianMatrix& r) { return l += r; }
    friend HermitianMatrix operator-(HermitianMatrix l, const HermitianMatrix& r) { return l -= r; }
    friend HermitianMatrix operator*(double s, HermitianMatrix m) { return m *= s; }

    // Plain matrix product; not Hermitian in general.
    friend Mat operator*(const HermitianMatrix& l, const HermitianMatrix& r) {
        return l.mat() * r.mat();
    }

  private:
    Mat m_;
};

inline double frobenius_distance(const HermitianMatrix& a, const HermitianMatrix& b) {
    return (a.mat() - b.mat()).frobenius();
}

// Eigenvalues sorted descending; columns of `eigenvectors` are the matching
// unit eigenvectors.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Mat eigenvectors;
    std::size_t source_dim{0};
};

HermitianMatrix hermitize(const Mat& m);

// Cyclic Jacobi for complex Hermitian matrices. Iteration cap 100 sweeps,
// off-diagonal Frobenius threshold 1e-14 * ||A||_F.
SpectralDecomposition spectral_decompose(const HermitianMatrix& a);

// U f(diag) U^dag; every eigenvalue must lie in [lo, hi] within rank_rel
// slack (values are clamped to the interval before applying f).
HermitianMatrix apply_spectral_function(const HermitianMatrix& a,
                                        const std::function<double(double)>& f, double lo,
                                        double hi, const Tolerances& tol = {});

HermitianMatrix psd_sqrt(const HermitianMatrix& a, const Tolerances& tol = {});

// Spectral inverse on the support, zero on the kernel (eigenvalues at or
// below rank_rel * lambda_max are dropped).
HermitianMatrix generalized_inverse(const HermitianMatrix& a, const Tolerances& tol = {});

// 1/sqrt on the support, zero on the kernel.
HermitianMatrix generalized_inv_sqrt(const HermitianMatrix& a, const Tolerances& tol = {});

HermitianMatrix support_projection(const HermitianMatrix& a, const Tolerances& tol = {});

// a # b. Invertible pairs use the closed form
// a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}; otherwise the eps-ladder.
HermitianMatrix geometric_mean(const HermitianMatrix& a, const HermitianMatrix& b,
                               const Tolerances& tol = {});

// (a + eps)#(b + eps) down tol.gm_eps_ladder; the last two iterates must
// agree within 10 * tol.residual or a convergence_error is thrown.
HermitianMatrix geometric_mean_ladder(const HermitianMatrix& a, const HermitianMatrix& b,
                                      const Tolerances& tol = {});

// Loewner order: true iff min eigenvalue of (b - a) >= -slack.
bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double slack);

double min_eigenvalue(const HermitianMatrix& a);
double max_abs_eigenvalue(const HermitianMatrix& a);

// Throws not_psd_error if some eigenvalue is below -rank_rel * max|lambda|.
void require_psd(const HermitianMatrix& a, const Tolerances& tol, const char* what);

// Clamps eigenvalues in [-rank_rel * max|lambda|, 0) to zero.
HermitianMatrix clamp_psd(const HermitianMatrix& a, const Tolerances& tol = {});

}  // namespace qpm
