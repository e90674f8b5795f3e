#include "qpm/calculus.hpp"

#include <algorithm>
#include <sstream>

namespace qpm {

RNContext RNContext::make(const QuantumMeasure& nu1, const Tolerances& tol) {
    return RNContext{nu1, dnu_dmu(nu1, tol), tol};
}

namespace {

void check_pair(const QuantumMeasure& nu2, const QuantumMeasure& nu1, const char* what) {
    if (!(nu1.space == nu2.space) || nu1.dim != nu2.dim) {
        std::ostringstream os;
        os << what << ": measures live on different spaces or dims";
        throw dimension_error(os.str());
    }
}

}  // namespace

QuantumRandomVariable rn_derivative_unchecked(const QuantumMeasure& nu2,
                                              const QuantumMeasure& nu1,
                                              const Tolerances& tol) {
    check_pair(nu2, nu1, "rn_derivative");
    QuantumRandomVariable phi;
    phi.space = nu1.space;
    phi.dim = nu1.dim;
    double scale = 0.0;
    for (const auto& a : nu1.atoms) scale = std::max(scale, a.frobenius());
    for (std::size_t j = 0; j < nu1.atoms.size(); ++j) {
        if (nu1.atoms[j].frobenius() <= tol.rank_rel * (scale > 0.0 ? scale : 1.0)) {
            phi.values.push_back(HermitianMatrix(nu1.dim));
            continue;
        }
        const HermitianMatrix r = generalized_inv_sqrt(nu1.atoms[j], tol);
        phi.values.push_back(hermitize(r.mat() * nu2.atoms[j].mat() * r.mat()));
    }
    return phi;
}

QuantumRandomVariable rn_derivative(const QuantumMeasure& nu2, const QuantumMeasure& nu1,
                                    const Tolerances& tol) {
    check_pair(nu2, nu1, "rn_derivative");
    if (!is_abs_continuous(nu2, nu1, AbsContinuityMode::strong, tol)) {
        std::ostringstream os;
        os << "rn_derivative: strong absolute continuity fails; offending atoms:";
        for (std::size_t j = 0; j < nu1.atoms.size(); ++j) {
            const HermitianMatrix q1 = support_projection(nu1.atoms[j], tol);
            const HermitianMatrix q2 = support_projection(nu2.atoms[j], tol);
            if (frobenius_distance(hermitize(q1.mat() * q2.mat() * q1.mat()), q2) > tol.residual)
                os << " " << nu1.space.labels[j];
        }
        throw precondition_error(os.str());
    }
    return rn_derivative_unchecked(nu2, nu1, tol);
}

RnReport verify_rn(const QuantumMeasure& nu2, const QuantumMeasure& nu1, const Tolerances& tol) {
    check_pair(nu2, nu1, "verify_rn");
    RnReport rep;
    rep.weak_continuous = is_abs_continuous(nu2, nu1, AbsContinuityMode::weak, tol);
    rep.strong_continuous = is_abs_continuous(nu2, nu1, AbsContinuityMode::strong, tol);
    rep.flagged = rep.weak_continuous && !rep.strong_continuous;

    const QuantumRandomVariable phi = rn_derivative_unchecked(nu2, nu1, tol);
    for (std::size_t j = 0; j < nu1.atoms.size(); ++j) {
        const HermitianMatrix r = psd_sqrt(nu1.atoms[j], tol);
        const HermitianMatrix rec = hermitize(r.mat() * phi.values[j].mat() * r.mat());
        rep.atom_residuals.push_back(frobenius_distance(rec, nu2.atoms[j]));
    }
    rep.max_residual =
        rep.atom_residuals.empty()
            ? 0.0
            : *std::max_element(rep.atom_residuals.begin(), rep.atom_residuals.end());
    return rep;
}

QuantumRandomVariable boxtimes(const QuantumRandomVariable& psi, const QuantumRandomVariable& phi,
                               const RNContext& ctx) {
    if (!(psi.space == phi.space) || psi.dim != phi.dim)
        throw dimension_error("boxtimes: operands on different spaces or dims");
    if (!(psi.space == ctx.base_measure.space) || psi.dim != ctx.base_measure.dim)
        throw dimension_error("boxtimes: context measure mismatch");
    const Tolerances& tol = ctx.tol;
    QuantumRandomVariable out;
    out.space = psi.space;
    out.dim = psi.dim;
    for (std::size_t j = 0; j < psi.values.size(); ++j) {
        const HermitianMatrix& d = ctx.dnu1_dmu1.values[j];
        const HermitianMatrix g =
            geometric_mean(generalized_inverse(d, tol), phi.values[j], tol);
        const HermitianMatrix r = psd_sqrt(d, tol);
        const Mat core = g.mat() * r.mat() * psi.values[j].mat() * r.mat() * g.mat();
        out.values.push_back(hermitize(core));
    }
    return out;
}

double change_of_measure_residual(const QuantumRandomVariable& psi, const QuantumMeasure& nu2,
                                  const QuantumMeasure& nu1, const Tolerances& tol) {
    const QuantumRandomVariable phi = rn_derivative(nu2, nu1, tol);
    const RNContext ctx = RNContext::make(nu1, tol);
    const HermitianMatrix lhs = expectation(psi, nu2);
    const HermitianMatrix rhs = expectation(boxtimes(psi, phi, ctx), nu1);
    return frobenius_distance(lhs, rhs);
}

double chain_rule_residual(const QuantumMeasure& nu1, const QuantumMeasure& nu2,
                           const QuantumMeasure& nu3, const Tolerances& tol) {
    const QuantumRandomVariable d12 = rn_derivative(nu1, nu2, tol);
    const QuantumRandomVariable d23 = rn_derivative(nu2, nu3, tol);
    const QuantumRandomVariable d13 = rn_derivative(nu1, nu3, tol);
    const QuantumRandomVariable prod = boxtimes(d12, d23, RNContext::make(nu3, tol));
    double worst = 0.0;
    for (std::size_t j = 0; j < prod.values.size(); ++j)
        worst = std::max(worst, frobenius_distance(prod.values[j], d13.values[j]));
    return worst;
}

double inverse_residual(const QuantumMeasure& nu1, const QuantumMeasure& nu2,
                        const Tolerances& tol) {
    const HermitianMatrix one = HermitianMatrix::identity(nu1.dim);
    double worst = 0.0;
    {
        const QuantumRandomVariable prod =
            boxtimes(rn_derivative(nu1, nu2, tol), rn_derivative(nu2, nu1, tol),
                     RNContext::make(nu1, tol));
        for (const auto& v : prod.values)
            worst = std::max(worst, frobenius_distance(v, one));
    }
    {
        const QuantumRandomVariable prod =
            boxtimes(rn_derivative(nu2, nu1, tol), rn_derivative(nu1, nu2, tol),
                     RNContext::make(nu2, tol));
        for (const auto& v : prod.values)
            worst = std::max(worst, frobenius_distance(v, one));
    }
    return worst;
}

ChangeOfVariablesReport change_of_variables_residual(const QuantumRandomVariable& psi,
                                                     const QuantumMeasure& nu,
                                                     double grouping_tol, const Tolerances& tol) {
    const Law l = law(psi, nu, grouping_tol);
    ChangeOfVariablesReport rep;
    rep.injective = l.injective();
    rep.residual = frobenius_distance(expectation(psi, nu), expectation_via_law(l, tol));
    return rep;
}

}  // namespace qpm
