#include "qpm/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qpm {

HermitianMatrix HermitianMatrix::from(const Mat& m) {
    if (!m.square()) {
        std::ostringstream os;
        os << "hermitize: input is " << m.rows << "x" << m.cols << ", expected square";
        throw dimension_error(os.str());
    }
    if (m.rows == 0) throw dimension_error("hermitize: dim must be >= 1");
    for (const cplx& z : m.a)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw domain_error("hermitize: non-finite entry");
    HermitianMatrix h(m.rows);
    const std::size_t d = m.rows;
    for (std::size_t i = 0; i < d; ++i) {
        h.m_(i, i) = 0.5 * (m(i, i).real() + m(i, i).real());
        for (std::size_t j = i + 1; j < d; ++j) {
            const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            h.m_(i, j) = v;
            h.m_(j, i) = std::conj(v);
        }
    }
    return h;
}

HermitianMatrix hermitize(const Mat& m) { return HermitianMatrix::from(m); }

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagRel = 1e-14;

double offdiag_frobenius(const Mat& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

}  // namespace

SpectralDecomposition spectral_decompose(const HermitianMatrix& a) {
    const std::size_t d = a.dim();
    Mat w = a.mat();
    Mat u = Mat::identity(d);

    const double scale = w.frobenius();
    const double target = kOffDiagRel * (scale > 0.0 ? scale : 1.0);

    int sweep = 0;
    while (offdiag_frobenius(w) > target) {
        if (++sweep > kMaxSweeps) {
            std::ostringstream os;
            os << "spectral_decompose: Jacobi did not converge after " << kMaxSweeps
               << " sweeps (dim " << d << ", off-diagonal norm " << offdiag_frobenius(w) << ")";
            throw convergence_error(os.str());
        }
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const cplx apq = w(p, q);
                const double r = std::abs(apq);
                if (r <= target / d) continue;

                // Phase removal followed by a real Jacobi rotation; the local
                // unitary has columns (c, -s e^{-i alpha}) and (s, c e^{-i alpha}).
                const cplx phase = apq / r;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const cplx vp_q = -s * std::conj(phase);  // V(q,p)
                const cplx vq_q = c * std::conj(phase);   // V(q,q)

                // Columns: w <- w V, u <- u V.
                for (std::size_t k = 0; k < d; ++k) {
                    const cplx wp = w(k, p), wq = w(k, q);
                    w(k, p) = c * wp + vp_q * wq;
                    w(k, q) = s * wp + vq_q * wq;
                    const cplx up = u(k, p), uq = u(k, q);
                    u(k, p) = c * up + vp_q * uq;
                    u(k, q) = s * up + vq_q * uq;
                }
                // Rows: w <- V^dag w.
                for (std::size_t k = 0; k < d; ++k) {
                    const cplx wp = w(p, k), wq = w(q, k);
                    w(p, k) = c * wp + std::conj(vp_q) * wq;
                    w(q, k) = s * wp + std::conj(vq_q) * wq;
                }
                w(p, q) = 0.0;
                w(q, p) = 0.0;
                w(p, p) = w(p, p).real();
                w(q, q) = w(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return w(i, i).real() > w(j, j).real(); });

    SpectralDecomposition sd;
    sd.source_dim = d;
    sd.eigenvalues.resize(d);
    sd.eigenvectors = Mat(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        sd.eigenvalues[j] = w(order[j], order[j]).real();
        for (std::size_t i = 0; i < d; ++i) sd.eigenvectors(i, j) = u(i, order[j]);
    }
    return sd;
}

namespace {

HermitianMatrix rebuild(const SpectralDecomposition& sd, const std::vector<double>& vals) {
    const std::size_t d = sd.source_dim;
    Mat m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                s += sd.eigenvectors(i, k) * vals[k] * std::conj(sd.eigenvectors(j, k));
            m(i, j) = s;
        }
    return hermitize(m);
}

double spectral_scale(const SpectralDecomposition& sd) {
    double m = 0.0;
    for (double l : sd.eigenvalues) m = std::max(m, std::abs(l));
    return m;
}

}  // namespace

HermitianMatrix apply_spectral_function(const HermitianMatrix& a,
                                        const std::function<double(double)>& f, double lo,
                                        double hi, const Tolerances& tol) {
    SpectralDecomposition sd = spectral_decompose(a);
    const double slack = tol.rank_rel * (1.0 + spectral_scale(sd));
    std::vector<double> vals(sd.eigenvalues.size());
    for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
        double l = sd.eigenvalues[k];
        if (l < lo - slack || l > hi + slack) {
            std::ostringstream os;
            os << "apply_spectral_function: eigenvalue " << l << " outside domain [" << lo << ", "
               << hi << "]";
            throw domain_error(os.str());
        }
        vals[k] = f(std::clamp(l, lo, hi));
    }
    return rebuild(sd, vals);
}

void require_psd(const HermitianMatrix& a, const Tolerances& tol, const char* what) {
    SpectralDecomposition sd = spectral_decompose(a);
    const double cut = tol.rank_rel * spectral_scale(sd);
    const double lmin = sd.eigenvalues.empty() ? 0.0 : sd.eigenvalues.back();
    if (lmin < -cut) {
        std::ostringstream os;
        os << what << ": not positive semidefinite (min eigenvalue " << lmin << ")";
        throw not_psd_error(os.str());
    }
}

HermitianMatrix clamp_psd(const HermitianMatrix& a, const Tolerances& tol) {
    SpectralDecomposition sd = spectral_decompose(a);
    const double cut = tol.rank_rel * spectral_scale(sd);
    std::vector<double> vals = sd.eigenvalues;
    for (double& l : vals) {
        if (l < -cut) {
            std::ostringstream os;
            os << "clamp_psd: not positive semidefinite (min eigenvalue " << l << ")";
            throw not_psd_error(os.str());
        }
        if (l < 0.0) l = 0.0;
    }
    return rebuild(sd, vals);
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a, const Tolerances& tol) {
    SpectralDecomposition sd = spectral_decompose(a);
    const double cut = tol.rank_rel * spectral_scale(sd);
    std::vector<double> vals = sd.eigenvalues;
    for (double& l : vals) {
        if (l < -cut) {
            std::ostringstream os;
            os << "psd_sqrt: not positive semidefinite (min eigenvalue " << l << ")";
            throw not_psd_error(os.str());
        }
        l = l > 0.0 ? std::sqrt(l) : 0.0;
    }
    return rebuild(sd, vals);
}

namespace {

// Shared kernel for the support-restricted spectral maps. `g` maps a
// positive retained eigenvalue; dropped eigenvalues become 0.
HermitianMatrix support_map(const HermitianMatrix& a, const Tolerances& tol, const char* what,
                            const std::function<double(double)>& g) {
    SpectralDecomposition sd = spectral_decompose(a);
    const double scale = spectral_scale(sd);
    const double cut = tol.rank_rel * scale;
    std::vector<double> vals = sd.eigenvalues;
    for (double& l : vals) {
        if (l < -cut) {
            std::ostringstream os;
            os << what << ": not positive semidefinite (min eigenvalue " << l << ")";
            throw not_psd_error(os.str());
        }
        l = (l > cut) ? g(l) : 0.0;
    }
    return rebuild(sd, vals);
}

}  // namespace

HermitianMatrix generalized_inverse(const HermitianMatrix& a, const Tolerances& tol) {
    return support_map(a, tol, "generalized_inverse", [](double l) { return 1.0 / l; });
}

HermitianMatrix generalized_inv_sqrt(const HermitianMatrix& a, const Tolerances& tol) {
    return support_map(a, tol, "generalized_inv_sqrt",
                       [](double l) { return 1.0 / std::sqrt(l); });
}

HermitianMatrix support_projection(const HermitianMatrix& a, const Tolerances& tol) {
    return support_map(a, tol, "support_projection", [](double) { return 1.0; });
}

namespace {

// Closed form for invertible a.
HermitianMatrix geometric_mean_invertible(const HermitianMatrix& a, const HermitianMatrix& b,
                                          const Tolerances& tol) {
    const HermitianMatrix as = psd_sqrt(a, tol);
    const HermitianMatrix ais = generalized_inv_sqrt(a, tol);
    const HermitianMatrix inner = hermitize(ais.mat() * b.mat() * ais.mat());
    const HermitianMatrix inner_sqrt = psd_sqrt(clamp_psd(inner, tol), tol);
    return hermitize(as.mat() * inner_sqrt.mat() * as.mat());
}

HermitianMatrix shift(const HermitianMatrix& a, double eps) {
    return a + eps * HermitianMatrix::identity(a.dim());
}

}  // namespace

HermitianMatrix geometric_mean_ladder(const HermitianMatrix& a, const HermitianMatrix& b,
                                      const Tolerances& tol) {
    if (tol.gm_eps_ladder.empty())
        throw domain_error("geometric_mean_ladder: empty eps ladder");
    HermitianMatrix prev = HermitianMatrix::identity(a.dim());
    HermitianMatrix cur = prev;
    double gap = std::numeric_limits<double>::infinity();
    bool first = true;
    for (double eps : tol.gm_eps_ladder) {
        cur = geometric_mean_invertible(shift(a, eps), shift(b, eps), tol);
        if (!first) gap = frobenius_distance(prev, cur);
        prev = cur;
        first = false;
    }
    if (tol.gm_eps_ladder.size() >= 2 && gap > 10.0 * tol.residual) {
        std::ostringstream os;
        os << "geometric_mean_ladder: failed to stabilize, last gap " << gap << " > "
           << 10.0 * tol.residual;
        throw convergence_error(os.str());
    }
    return clamp_psd(cur, tol);
}

HermitianMatrix geometric_mean(const HermitianMatrix& a, const HermitianMatrix& b,
                               const Tolerances& tol) {
    if (a.dim() != b.dim()) throw dimension_error("geometric_mean: dims differ");
    require_psd(a, tol, "geometric_mean (left)");
    require_psd(b, tol, "geometric_mean (right)");
    const double scale = std::max({max_abs_eigenvalue(a), max_abs_eigenvalue(b), 1e-300});
    const double cut = tol.rank_rel * scale;
    if (min_eigenvalue(a) > cut && min_eigenvalue(b) > cut)
        return clamp_psd(geometric_mean_invertible(a, b, tol), tol);
    return geometric_mean_ladder(a, b, tol);
}

bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double slack) {
    if (a.dim() != b.dim()) throw dimension_error("loewner_leq: dims differ");
    return min_eigenvalue(b - a) >= -slack;
}

double min_eigenvalue(const HermitianMatrix& a) {
    return spectral_decompose(a).eigenvalues.back();
}

double max_abs_eigenvalue(const HermitianMatrix& a) {
    const SpectralDecomposition sd = spectral_decompose(a);
    return std::max(std::abs(sd.eigenvalues.front()), std::abs(sd.eigenvalues.back()));
}

}  // namespace qpm
