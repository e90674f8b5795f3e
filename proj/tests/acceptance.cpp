// Acceptance gate: one criterion per function, one PASS/FAIL line each.
// Run with no arguments for the full gate, or with criterion numbers.

#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "test_util.hpp"

using namespace qpm;
using namespace qpm::test;

namespace {

struct Outcome {
    bool pass{true};
    double worst{0.0};
    std::string note;

    void track(double residual, double bound) {
        worst = std::max(worst, residual);
        if (residual > bound) pass = false;
    }
};

// ---- 1: definition consistency --------------------------------------------

Outcome definition_consistency() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(1001, trial);
        const std::size_t d = 1 + trial % 5;
        const std::size_t n = 2 + trial % 5;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(s, 1));
        Rng rng(Rng::derive_seed(s, 2));
        const QuantumRandomVariable psi = random_qrv_in(space, d, rng, -2.0, 2.0);
        const HermitianMatrix e = expectation(psi, nu);
        for (int k = 0; k < 100; ++k) {
            const DensityMatrix rho(random_density(d, rng));
            const double traced = hermitize(rho.matrix * e).trace();
            out.track(std::abs(traced - pairing_oracle(psi, nu, rho)), 1e-8);
        }
    }
    return out;
}

// ---- 2: classical d=1 reduction --------------------------------------------

Outcome classical_reduction() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(2002, trial);
        const std::size_t n = 3 + trial % 4;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu1 = random_povm(space, 1, Rng::derive_seed(s, 1));
        const QuantumMeasure nu2 = random_povm(space, 1, Rng::derive_seed(s, 2));
        Rng rng(Rng::derive_seed(s, 3));
        const QuantumRandomVariable f = random_qrv_in(space, 1, rng, 0.5, 2.0);
        const QuantumRandomVariable g = random_qrv_in(space, 1, rng, 0.5, 2.0);
        std::vector<double> p1(n), p2(n), fv(n), gv(n);
        for (std::size_t x = 0; x < n; ++x) {
            p1[x] = nu1.atoms[x](0, 0).real();
            p2[x] = nu2.atoms[x](0, 0).real();
            fv[x] = f.values[x](0, 0).real();
            gv[x] = g.values[x](0, 0).real();
        }

        double mean = 0.0;
        for (std::size_t x = 0; x < n; ++x) mean += p1[x] * fv[x];
        out.track(std::abs(expectation(f, nu1)(0, 0).real() - mean), 1e-12);

        const QuantumRandomVariable deriv = rn_derivative(nu2, nu1);
        for (std::size_t x = 0; x < n; ++x)
            out.track(std::abs(deriv.values[x](0, 0).real() - p2[x] / p1[x]), 1e-12);

        const QuantumRandomVariable prod = boxtimes(f, g, RNContext::make(nu1));
        for (std::size_t x = 0; x < n; ++x)
            out.track(std::abs(prod.values[x](0, 0).real() - fv[x] * gv[x]), 1e-12);

        const Partition part = random_partition(space, Rng::derive_seed(s, 4), 2);
        const ConditionalResult cr = cond_expectation(f, nu1, part);
        for (std::size_t b = 0; b < part.blocks.size(); ++b) {
            double num = 0.0, den = 0.0;
            for (std::size_t x : part.blocks[b]) {
                num += p1[x] * fv[x];
                den += p1[x];
            }
            out.track(std::abs(cr.block_values[b](0, 0).real() - num / den), 1e-12);
        }

        out.track(bayes_residual(f, nu1, nu2, part, {}), 1e-12);
    }
    return out;
}

// ---- 3: change of quantum measure ------------------------------------------

Outcome change_of_measure() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(3003, trial);
        const std::size_t d = 2 + trial % 5;
        const std::size_t n = 2 + trial % 7;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu1 = random_povm(space, d, Rng::derive_seed(s, 1));
        const QuantumMeasure nu2 = random_povm(space, d, Rng::derive_seed(s, 2));
        Rng rng(Rng::derive_seed(s, 3));
        const QuantumRandomVariable psi = random_qrv_in(space, d, rng, -1.0, 1.0);
        out.track(change_of_measure_residual(psi, nu2, nu1), 1e-8);
    }
    return out;
}

// ---- 4: chain rule and inverse corollary -----------------------------------

Outcome chain_and_inverse() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(4004, trial);
        const std::size_t d = 2 + trial % 5;
        const std::size_t n = 2 + trial % 7;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu1 = random_povm(space, d, Rng::derive_seed(s, 1));
        const QuantumMeasure nu2 = random_povm(space, d, Rng::derive_seed(s, 2));
        const QuantumMeasure nu3 = random_povm(space, d, Rng::derive_seed(s, 3));
        out.track(chain_rule_residual(nu1, nu2, nu3), 1e-8);
        out.track(inverse_residual(nu1, nu2), 1e-8);
    }
    return out;
}

// ---- 5: quantum Bayes' rule ------------------------------------------------

Outcome bayes() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(5005, trial);
        const std::size_t d = 2 + trial % 3;
        const std::size_t n = 3 + trial % 4;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu1 = random_povm(space, d, Rng::derive_seed(s, 1));
        const QuantumMeasure nu2 = random_povm(space, d, Rng::derive_seed(s, 2));
        Rng rng(Rng::derive_seed(s, 3));
        const QuantumRandomVariable psi = random_psd_qrv(space, d, rng);
        const std::size_t blocks = 2 + Rng(Rng::derive_seed(s, 4)).below(n - 2);
        const Partition f = random_partition(space, Rng::derive_seed(s, 5), blocks);
        out.track(bayes_residual(psi, nu1, nu2, f, {}), 1e-8);
    }
    return out;
}

// ---- 6: Jensen and conditional Jensen --------------------------------------

std::pair<double, double> interval_for(const ConvexFunction& vt) {
    if (vt.name == "xlogx") return {1.1, 2.5};
    if (vt.name == "neg_log") return {0.1, 0.9};
    return {0.1, 2.0};
}

Outcome jensen() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(6006, trial);
        const std::size_t d = 2 + trial % 4;
        const std::size_t n = 3 + trial % 4;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(s, 1));
        const std::size_t blocks = 2 + Rng(Rng::derive_seed(s, 2)).below(n - 2);
        const Partition f = random_partition(space, Rng::derive_seed(s, 3), blocks);
        Rng rng(Rng::derive_seed(s, 4));
        for (const auto& vt : convex_catalog()) {
            const auto [lo, hi] = interval_for(vt);
            const QuantumRandomVariable psi = random_qrv_in(space, d, rng, lo, hi);
            out.track(-min_eigenvalue(jensen_gap(psi, nu, vt, lo, hi)), 1e-8);
            for (const auto& gap : cond_jensen_gap(psi, nu, f, vt, lo, hi))
                out.track(-min_eigenvalue(gap), 1e-8);
        }
    }
    return out;
}

// ---- 7: channel structure ---------------------------------------------------

Outcome channel() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const std::uint64_t s = Rng::derive_seed(7007, trial);
        const std::size_t d = 2 + trial % 4;
        const std::size_t n = 2 + trial % 5;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(s, 1));

        out.track(-min_eigenvalue(choi_matrix(nu)), 1e-8);

        Rng rng(Rng::derive_seed(s, 2));
        for (int k = 0; k < 100; ++k) {
            const HermitianMatrix z = random_hermitian_in(d, rng, -1.0, 1.0);
            out.track(std::abs(channel_apply(nu, z).trace() - z.trace()), 1e-10);
        }

        const LinearSuperMap proj = cesaro_projection(nu);
        out.track(frobenius_distance(proj.compose(proj), proj), 1e-7);
        const auto basis = fixed_points(nu);
        for (const auto& b : basis) out.track(frobenius_distance(proj.apply(b), b), 1e-7);
        for (int k = 0; k < 5; ++k) {
            const HermitianMatrix w = proj.apply(random_hermitian_in(d, rng, -1.0, 1.0));
            HermitianMatrix in_span(d);
            for (const auto& b : basis) in_span += hermitize(b * w).trace() * b;
            out.track(frobenius_distance(w, in_span), 1e-7);
        }
    }
    return out;
}

// ---- 8: first-point-vs-rest worked example ---------------------------------

// Three-factor assembly of the derivative between the blockwise integral
// measure and the restricted measure, as an independent route to phi.
QuantumRandomVariable assembled_derivative(const QuantumMeasure& num, const QuantumMeasure& den) {
    const ClassicalMeasure mu_den = induced_mu(den);
    const ClassicalMeasure mu_num = induced_mu(num);
    const QuantumRandomVariable d_den = dnu_dmu(den);
    const QuantumRandomVariable d_num = dnu_dmu(num);
    QuantumRandomVariable out;
    out.space = den.space;
    out.dim = den.dim;
    for (std::size_t x = 0; x < den.atoms.size(); ++x) {
        const double ratio = mu_num.weights[x] / mu_den.weights[x];
        const Mat inv_sqrt = generalized_inv_sqrt(d_den.values[x]).mat();
        out.values.push_back(hermitize(ratio * (inv_sqrt * d_num.values[x].mat() * inv_sqrt)));
    }
    return out;
}

Outcome worked_example() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 500; ++trial) {
        const std::uint64_t s = Rng::derive_seed(8008, trial);
        const std::size_t d = 2 + trial % 4;
        const std::size_t n = 3 + trial % 4;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(s, 1));
        Rng rng(Rng::derive_seed(s, 2));
        const QuantumRandomVariable psi = random_psd_qrv(space, d, rng);

        Partition f;
        f.blocks.push_back({0});
        f.blocks.emplace_back();
        for (std::size_t i = 1; i < n; ++i) f.blocks[1].push_back(i);

        const ConditionalResult r = cond_expectation(psi, nu, f);

        // Closed-form block formula, built here from scratch.
        out.track(frobenius_distance(r.phi.values[0], psi.values[0]), 1e-10);
        HermitianMatrix mass(d), weighted(d);
        for (std::size_t x = 1; x < n; ++x) {
            mass += nu.atoms[x];
            const Mat sq = psd_sqrt(nu.atoms[x]).mat();
            weighted += hermitize(sq * psi.values[x].mat() * sq);
        }
        const Mat minv = generalized_inv_sqrt(mass).mat();
        const HermitianMatrix rest = hermitize(minv * weighted.mat() * minv);
        for (std::size_t x = 1; x < n; ++x)
            out.track(frobenius_distance(r.phi.values[x], rest), 1e-10);

        // Independent assembled derivative of the blockwise-integral measure
        // with respect to the restricted measure.
        const QuantumRandomVariable assembled = assembled_derivative(r.nu_tilde, r.nu_restricted);
        for (std::size_t b = 0; b < 2; ++b)
            out.track(frobenius_distance(assembled.values[b], r.block_values[b]), 1e-8);
    }
    return out;
}

// ---- 9: Radon-Nikodym reproduction -----------------------------------------

Outcome rn_reproduction() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(9009, trial);
        const std::size_t d = 2 + trial % 5;
        const std::size_t n = 2 + trial % 6;
        const SampleSpace space = SampleSpace::numbered(n);
        const QuantumMeasure nu1 = random_povm(space, d, Rng::derive_seed(s, 1));
        const QuantumMeasure nu2 = random_povm(space, d, Rng::derive_seed(s, 2));
        const RnReport rep = verify_rn(nu2, nu1);
        if (!rep.strong_continuous || rep.flagged) out.pass = false;
        out.track(rep.max_residual, 1e-8);
    }

    // Documented weak-but-not-strong counterexample: large residual, flagged.
    const SampleSpace two = SampleSpace::numbered(2);
    QuantumMeasure n1{two, 2,
                      {HermitianMatrix::diagonal({1.0, 0.0}), HermitianMatrix::diagonal({0.0, 1.0})},
                      true};
    QuantumMeasure n2{two, 2,
                      {HermitianMatrix::diagonal({0.5, 0.5}), HermitianMatrix::diagonal({0.5, 0.5})},
                      true};
    const RnReport weak = verify_rn(n2, n1);
    if (!(weak.flagged && weak.weak_continuous && !weak.strong_continuous &&
          weak.max_residual >= 0.4)) {
        out.pass = false;
        out.note = "counterexample not flagged as expected";
    }
    return out;
}

// ---- 10: geometric-mean kernel ---------------------------------------------

Outcome geometric_mean_kernel() {
    Outcome out;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::uint64_t s = Rng::derive_seed(10010, trial);
        const std::size_t d = 2 + trial % 5;
        Rng rng(s);
        const HermitianMatrix a = random_psd(d, rng, 0.05);
        const HermitianMatrix b = random_psd(d, rng, 0.05);

        out.track(frobenius_distance(geometric_mean(a, a), a), 1e-7);
        out.track(
            frobenius_distance(geometric_mean(HermitianMatrix::identity(d), b), psd_sqrt(b)),
            1e-7);

        // Commuting reduction: entrywise geometric mean of eigenvalues.
        std::vector<double> da(d), db(d), dg(d);
        for (std::size_t i = 0; i < d; ++i) {
            da[i] = 0.1 + rng.uniform();
            db[i] = 0.1 + rng.uniform();
            dg[i] = std::sqrt(da[i] * db[i]);
        }
        out.track(frobenius_distance(geometric_mean(HermitianMatrix::diagonal(da),
                                                    HermitianMatrix::diagonal(db)),
                                     HermitianMatrix::diagonal(dg)),
                  1e-7);

        // (a^{1/2} b a^{1/2})^{1/2} = a^{1/2} (a^{-1}#b) a^{1/2}.
        const Mat sq = psd_sqrt(a).mat();
        const HermitianMatrix lhs = psd_sqrt(hermitize(sq * b.mat() * sq));
        const HermitianMatrix mid = geometric_mean(generalized_inverse(a), b);
        const HermitianMatrix rhs = hermitize(sq * mid.mat() * sq);
        out.track(frobenius_distance(lhs, rhs), 1e-7);

        out.track(frobenius_distance(geometric_mean(a, b), geometric_mean_ladder(a, b)), 1e-7);
    }
    return out;
}

struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {"definition-consistency", definition_consistency},
        {"classical-reduction", classical_reduction},
        {"change-of-measure", change_of_measure},
        {"chain-rule-and-inverse", chain_and_inverse},
        {"bayes-rule", bayes},
        {"jensen-inequalities", jensen},
        {"channel-structure", channel},
        {"worked-example", worked_example},
        {"rn-reproduction", rn_reproduction},
        {"geometric-mean-kernel", geometric_mean_kernel},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const long idx = std::strtol(argv[i], nullptr, 10);
        if (idx < 1 || idx > static_cast<long>(criteria().size())) {
            std::fprintf(stderr, "usage: %s [criterion 1..%zu]...\n", argv[0], criteria().size());
            return 2;
        }
        selected.push_back(static_cast<std::size_t>(idx - 1));
    }
    if (selected.empty())
        for (std::size_t i = 0; i < criteria().size(); ++i) selected.push_back(i);

    bool all_pass = true;
    for (std::size_t i : selected) {
        const Criterion& c = criteria()[i];
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.note = e.what();
        }
        all_pass = all_pass && out.pass;
        std::printf("%s criterion %zu %s (worst residual %.3e%s%s)\n", out.pass ? "PASS" : "FAIL",
                    i + 1, c.name, out.worst, out.note.empty() ? "" : "; ",
                    out.note.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
