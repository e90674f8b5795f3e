#include "qpm/conditional.hpp"

#include <algorithm>
#include <cmath>

namespace qpm {

ConditionalResult cond_expectation(const QuantumRandomVariable& psi, const QuantumMeasure& nu,
                                   const Partition& f, const Tolerances& tol) {
    if (!(psi.space == nu.space) || psi.dim != nu.dim)
        throw dimension_error("cond_expectation: qrv/measure mismatch");
    f.validate(nu.space.size());
    if (!psi.psd_valued(tol))
        throw precondition_error("cond_expectation: psi must be PSD-valued");
    if (!nu.is_probability)
        throw precondition_error("cond_expectation: nu must be a probability measure");
    if (expectation(psi, nu).frobenius() <= tol.residual)
        throw precondition_error("cond_expectation: E_nu[psi] = 0");

    ConditionalResult res;
    res.partition = f;
    res.nu_restricted = restrict(nu, f);
    res.nu_tilde.space = res.nu_restricted.space;
    res.nu_tilde.dim = nu.dim;
    res.nu_tilde.is_probability = false;

    double mass_scale = 0.0;
    for (const auto& a : res.nu_restricted.atoms)
        mass_scale = std::max(mass_scale, a.frobenius());

    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
        const HermitianMatrix& mass = res.nu_restricted.atoms[b];
        const HermitianMatrix numer = integral_over(psi, nu, f.blocks[b]);
        res.nu_tilde.atoms.push_back(numer);
        const bool zero_mass = mass.frobenius() <= tol.rank_rel * (mass_scale > 0 ? mass_scale : 1.0);
        res.zero_mass_blocks.push_back(zero_mass);
        if (zero_mass) {
            res.block_values.push_back(HermitianMatrix(nu.dim));
            continue;
        }
        const HermitianMatrix r = generalized_inv_sqrt(mass, tol);
        res.block_values.push_back(hermitize(r.mat() * numer.mat() * r.mat()));
    }

    res.phi.space = nu.space;
    res.phi.dim = nu.dim;
    res.phi.values.assign(nu.space.size(), HermitianMatrix(nu.dim));
    for (std::size_t b = 0; b < f.blocks.size(); ++b)
        for (std::size_t i : f.blocks[b]) res.phi.values[i] = res.block_values[b];
    return res;
}

DefiningPropertyReport verify_defining_property(const ConditionalResult& result,
                                                const QuantumRandomVariable& psi,
                                                const QuantumMeasure& nu,
                                                DefiningPropertyMode mode,
                                                const Tolerances& tol) {
    DefiningPropertyReport rep;
    for (std::size_t b = 0; b < result.partition.blocks.size(); ++b) {
        const HermitianMatrix target = integral_over(psi, nu, result.partition.blocks[b]);
        HermitianMatrix integrated(nu.dim);
        if (mode == DefiningPropertyMode::restricted) {
            const HermitianMatrix r = psd_sqrt(result.nu_restricted.atoms[b], tol);
            integrated = hermitize(r.mat() * result.block_values[b].mat() * r.mat());
        } else {
            QuantumRandomVariable block_const = result.phi;
            integrated = integral_over(block_const, nu, result.partition.blocks[b]);
        }
        rep.block_residuals.push_back(frobenius_distance(integrated, target));
    }
    rep.max_residual = rep.block_residuals.empty()
                           ? 0.0
                           : *std::max_element(rep.block_residuals.begin(),
                                               rep.block_residuals.end());
    return rep;
}

double tower_residual(const ConditionalResult& result, const QuantumRandomVariable& psi,
                      const QuantumMeasure& nu, const Tolerances& tol) {
    Mat acc(nu.dim, nu.dim);
    for (std::size_t b = 0; b < result.block_values.size(); ++b) {
        const HermitianMatrix r = psd_sqrt(result.nu_restricted.atoms[b], tol);
        acc += r.mat() * result.block_values[b].mat() * r.mat();
    }
    return frobenius_distance(hermitize(acc), expectation(psi, nu));
}

double linearity_residual(const QuantumRandomVariable& psi1, const QuantumRandomVariable& psi2,
                          const HermitianMatrix& c1, const HermitianMatrix& c2,
                          const QuantumMeasure& nu, const Partition& f, const Tolerances& tol) {
    QuantumRandomVariable combo;
    combo.space = psi1.space;
    combo.dim = psi1.dim;
    for (std::size_t j = 0; j < psi1.values.size(); ++j)
        combo.values.push_back(
            hermitize(c1.mat() * psi1.values[j].mat() + c2.mat() * psi2.values[j].mat()));

    const ConditionalResult lhs = cond_expectation(combo, nu, f, tol);
    const ConditionalResult r1 = cond_expectation(psi1, nu, f, tol);
    const ConditionalResult r2 = cond_expectation(psi2, nu, f, tol);

    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.phi.values.size(); ++i) {
        const HermitianMatrix rhs = hermitize(c1.mat() * r1.phi.values[i].mat() +
                                              c2.mat() * r2.phi.values[i].mat());
        worst = std::max(worst, frobenius_distance(lhs.phi.values[i], rhs));
    }
    return worst;
}

double bayes_residual(const QuantumRandomVariable& psi, const QuantumMeasure& nu1,
                      const QuantumMeasure& nu2, const Partition& f, const Tolerances& tol) {
    if (!is_abs_continuous(nu2, nu1, AbsContinuityMode::strong, tol) ||
        !is_abs_continuous(nu1, nu2, AbsContinuityMode::strong, tol))
        throw precondition_error("bayes_residual: mutual strong continuity fails");

    // Left side: QCE_{nu2}[psi|F] boxtimes dnu2'/dnu1', in the context of the
    // restricted measure nu1' on the block space.
    const ConditionalResult qce2 = cond_expectation(psi, nu2, f, tol);
    const QuantumMeasure nu1p = restrict(nu1, f);
    const QuantumMeasure nu2p = restrict(nu2, f);

    QuantumRandomVariable qce_on_blocks;
    qce_on_blocks.space = nu1p.space;
    qce_on_blocks.dim = nu1.dim;
    qce_on_blocks.values = qce2.block_values;

    const QuantumRandomVariable cond_deriv = rn_derivative(nu2p, nu1p, tol);
    const QuantumRandomVariable lhs =
        boxtimes(qce_on_blocks, cond_deriv, RNContext::make(nu1p, tol));

    // Right side: d(nu1~)/d(nu1') where nu1~(B) = int_B psi boxtimes dnu2/dnu1 dnu1.
    const QuantumRandomVariable phi = rn_derivative(nu2, nu1, tol);
    const QuantumRandomVariable xi = boxtimes(psi, phi, RNContext::make(nu1, tol));

    double worst = 0.0;
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
        const HermitianMatrix numer = integral_over(xi, nu1, f.blocks[b]);
        const HermitianMatrix r = generalized_inv_sqrt(nu1p.atoms[b], tol);
        const HermitianMatrix rhs = hermitize(r.mat() * numer.mat() * r.mat());
        worst = std::max(worst, frobenius_distance(lhs.values[b], rhs));
    }
    return worst;
}

std::vector<HermitianMatrix> cond_jensen_gap(const QuantumRandomVariable& psi,
                                             const QuantumMeasure& nu, const Partition& f,
                                             const ConvexFunction& vt, double lo, double hi,
                                             const Tolerances& tol) {
    const QuantumRandomVariable composed = compose_spectral(psi, vt, lo, hi, tol);
    const ConditionalResult outer = cond_expectation(composed, nu, f, tol);
    const ConditionalResult inner = cond_expectation(psi, nu, f, tol);

    std::vector<HermitianMatrix> gaps;
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
        const HermitianMatrix mapped =
            apply_spectral_function(inner.block_values[b], vt.f, lo, hi, tol);
        gaps.push_back(outer.block_values[b] - mapped);
    }
    return gaps;
}

}  // namespace qpm
