#pragma once

#include "qpm/qrv.hpp"

namespace qpm {

// Context measure for the boxtimes product: fixes which nu_1 supplies the
// dnu_1/dmu_1 factor.
struct RNContext {
    QuantumMeasure base_measure;
    QuantumRandomVariable dnu1_dmu1;
    Tolerances tol;

    static RNContext make(const QuantumMeasure& nu1, const Tolerances& tol = {});
};

// dnu_2/dnu_1, atomwise: h1^{-1/2} h2 h1^{-1/2} with generalized inverses.
// Requires strong absolute continuity.
QuantumRandomVariable rn_derivative(const QuantumMeasure& nu2, const QuantumMeasure& nu1,
                                    const Tolerances& tol = {});

// Same closed form evaluated without the continuity precondition, for
// diagnostic reports.
QuantumRandomVariable rn_derivative_unchecked(const QuantumMeasure& nu2,
                                              const QuantumMeasure& nu1,
                                              const Tolerances& tol = {});

struct RnReport {
    bool weak_continuous{false};
    bool strong_continuous{false};
    std::vector<double> atom_residuals;  // ||h1^{1/2} phi h1^{1/2} - h2||_F per atom
    double max_residual{0.0};
    bool flagged{false};  // weak-but-not-strong pair: residual reported, not asserted
};

RnReport verify_rn(const QuantumMeasure& nu2, const QuantumMeasure& nu1,
                   const Tolerances& tol = {});

// Pointwise boxtimes product of psi with a Radon-Nikodym derivative phi,
// taken relative to ctx.base_measure.
QuantumRandomVariable boxtimes(const QuantumRandomVariable& psi, const QuantumRandomVariable& phi,
                               const RNContext& ctx);

// ||E_nu2[psi] - E_nu1[psi boxtimes dnu2/dnu1]||_F.
double change_of_measure_residual(const QuantumRandomVariable& psi, const QuantumMeasure& nu2,
                                  const QuantumMeasure& nu1, const Tolerances& tol = {});

// max_x ||(dnu1/dnu2 boxtimes dnu2/dnu3)(x) - (dnu1/dnu3)(x)||_F.
double chain_rule_residual(const QuantumMeasure& nu1, const QuantumMeasure& nu2,
                           const QuantumMeasure& nu3, const Tolerances& tol = {});

// max over x and both orders of ||(dnu1/dnu2 boxtimes dnu2/dnu1)(x) - 1||_F.
double inverse_residual(const QuantumMeasure& nu1, const QuantumMeasure& nu2,
                        const Tolerances& tol = {});

struct ChangeOfVariablesReport {
    bool injective{false};
    double residual{0.0};
};

ChangeOfVariablesReport change_of_variables_residual(const QuantumRandomVariable& psi,
                                                     const QuantumMeasure& nu,
                                                     double grouping_tol = 1e-9,
                                                     const Tolerances& tol = {});

}  // namespace qpm
