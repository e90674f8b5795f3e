#pragma once

#include "qpm/calculus.hpp"

namespace qpm {

// Conditional expectation relative to a partition sub-sigma-algebra.
//   phi           block-constant conditional expectation on the original space
//   nu_restricted nu restricted to the partition (quotient-space measure)
//   nu_tilde      B -> integral of psi over B against nu (quotient space)
struct ConditionalResult {
    QuantumRandomVariable phi;
    Partition partition;
    QuantumMeasure nu_restricted;
    QuantumMeasure nu_tilde;
    std::vector<HermitianMatrix> block_values;
    std::vector<bool> zero_mass_blocks;
};

// phi(x) = nu(B)^{-1/2} [sum_{y in B} h_y^{1/2} psi(y) h_y^{1/2}] nu(B)^{-1/2}
// for x in B, with generalized inverses. Requires PSD-valued psi, probability
// nu, and E_nu[psi] != 0. Zero-mass blocks get phi = 0 and are flagged.
ConditionalResult cond_expectation(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                                   const Partition& f, const Tolerances& tol = {});

enum class DefiningPropertyMode { restricted, full };

struct DefiningPropertyReport {
    std::vector<double> block_residuals;
    double max_residual{0.0};
};

// restricted: integrate phi against nu' = nu|_F blockwise
// full:       integrate phi against the unrestricted nu blockwise
DefiningPropertyReport verify_defining_property(const ConditionalResult& result,
                                                const QuantumRandomVariable& psi,
                                                const QuantumMeasure& nu,
                                                DefiningPropertyMode mode,
                                                const Tolerances& tol = {});

// ||E_nu[psi] - sum_B nu(B)^{1/2} phi_B nu(B)^{1/2}||_F.
double tower_residual(const ConditionalResult& result, const QuantumRandomVariable& psi,
                      const QuantumMeasure& nu, const Tolerances& tol = {});

// Max-over-points residual of conditional linearity with coefficient
// matrices c1, c2 (assumed to commute with the range of dnu/dmu).
double linearity_residual(const QuantumRandomVariable& psi1, const QuantumRandomVariable& psi2,
                          const HermitianMatrix& c1, const HermitianMatrix& c2,
                          const QuantumMeasure& nu, const Partition& f,
                          const Tolerances& tol = {});

// Max block residual of the quantum Bayes identity
//   QCE_{nu2}[psi|F] boxtimes E_{nu1}[dnu2/dnu1|F] = d(nu1~)/d(nu1'),
// with both sides computed through independent code paths.
double bayes_residual(const QuantumRandomVariable& psi, const QuantumMeasure& nu1,
                      const QuantumMeasure& nu2, const Partition& f, const Tolerances& tol = {});

// Per-block gaps QCE[vt o psi|F](B) - vt(QCE[psi|F](B)); PSD in exact
// arithmetic by the conditional Jensen inequality.
std::vector<HermitianMatrix> cond_jensen_gap(const QuantumRandomVariable& psi,
                                             const QuantumMeasure& nu, const Partition& f,
                                             const ConvexFunction& vt, double lo, double hi,
                                             const Tolerances& tol = {});

}  // namespace qpm
