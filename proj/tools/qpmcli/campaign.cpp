#include "qpmcli/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qpmcli/instance.hpp"

namespace qpmcli {

using namespace qpm;

namespace {

std::pair<QuantumMeasure, QuantumMeasure> trial_pair(const SampleSpace& space, std::size_t d,
                                                     std::uint64_t trial_seed) {
    return {random_povm(space, d, Rng::derive_seed(trial_seed, 1)),
            random_povm(space, d, Rng::derive_seed(trial_seed, 2))};
}

QuantumRandomVariable trial_qrv(const SampleSpace& space, std::size_t d, std::uint64_t trial_seed,
                                double lo, double hi) {
    Rng rng(Rng::derive_seed(trial_seed, 3));
    QuantumRandomVariable psi;
    psi.space = space;
    psi.dim = d;
    for (std::size_t i = 0; i < space.size(); ++i)
        psi.values.push_back(random_hermitian_in(d, rng, lo, hi));
    return psi;
}

QuantumRandomVariable trial_psd_qrv(const SampleSpace& space, std::size_t d,
                                    std::uint64_t trial_seed) {
    Rng rng(Rng::derive_seed(trial_seed, 3));
    QuantumRandomVariable psi;
    psi.space = space;
    psi.dim = d;
    for (std::size_t i = 0; i < space.size(); ++i) psi.values.push_back(random_psd(d, rng, 0.1));
    return psi;
}

Partition trial_partition(const SampleSpace& space, std::uint64_t trial_seed) {
    const std::size_t n = space.size();
    // Proper partitions (more than one block, fewer than n) when possible.
    std::size_t blocks = n;
    if (n >= 3) blocks = 2 + Rng(Rng::derive_seed(trial_seed, 4)).below(n - 2);
    return random_partition(space, Rng::derive_seed(trial_seed, 5), blocks);
}

// Interval on which vt(psi) stays PSD-valued, so conditional expectations of
// the composition are defined.
std::pair<double, double> interval_for(const ConvexFunction& vt) {
    if (vt.name == "xlogx") return {1.1, 2.5};
    if (vt.name == "neg_log") return {0.1, 0.9};
    return {0.1, 2.0};
}

double jensen_trial(const SampleSpace& space, std::size_t d, std::uint64_t trial_seed,
                    std::uint64_t trial) {
    const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(trial_seed, 1));
    const auto& catalog = convex_catalog();
    const ConvexFunction& vt = catalog[trial % catalog.size()];
    const auto [lo, hi] = interval_for(vt);
    const QuantumRandomVariable psi = trial_qrv(space, d, trial_seed, lo, hi);
    return std::max(0.0, -min_eigenvalue(jensen_gap(psi, nu, vt, lo, hi)));
}

double cond_jensen_trial(const SampleSpace& space, std::size_t d, std::uint64_t trial_seed,
                         std::uint64_t trial) {
    const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(trial_seed, 1));
    const Partition f = trial_partition(space, trial_seed);
    const auto& catalog = convex_catalog();
    const ConvexFunction& vt = catalog[trial % catalog.size()];
    const auto [lo, hi] = interval_for(vt);
    const QuantumRandomVariable psi = trial_qrv(space, d, trial_seed, lo, hi);
    double worst = 0.0;
    for (const auto& gap : cond_jensen_gap(psi, nu, f, vt, lo, hi))
        worst = std::max(worst, -min_eigenvalue(gap));
    return worst;
}

double channel_trial(const SampleSpace& space, std::size_t d, std::uint64_t trial_seed) {
    const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(trial_seed, 1));
    double worst = std::max(0.0, -min_eigenvalue(choi_matrix(nu)));
    Rng rng(Rng::derive_seed(trial_seed, 2));
    for (int k = 0; k < 100; ++k) {
        const HermitianMatrix z = random_hermitian_in(d, rng, -1.0, 1.0);
        worst = std::max(worst, std::abs(channel_apply(nu, z).trace() - z.trace()));
    }
    return worst;
}

double cesaro_trial(const SampleSpace& space, std::size_t d, std::uint64_t trial_seed) {
    const QuantumMeasure nu = random_povm(space, d, Rng::derive_seed(trial_seed, 1));
    const LinearSuperMap proj = cesaro_projection(nu);
    double worst = frobenius_distance(proj.compose(proj), proj);
    const auto basis = fixed_points(nu);
    for (const auto& b : basis) worst = std::max(worst, frobenius_distance(proj.apply(b), b));
    // The range must lie inside the fixed-point span: project outputs onto
    // the basis and measure what is left over.
    Rng rng(Rng::derive_seed(trial_seed, 2));
    for (int k = 0; k < 5; ++k) {
        const HermitianMatrix w = proj.apply(random_hermitian_in(d, rng, -1.0, 1.0));
        HermitianMatrix in_span(d);
        for (const auto& b : basis) {
            const double coeff = hermitize(b * w).trace();
            in_span += coeff * b;
        }
        worst = std::max(worst, frobenius_distance(w, in_span));
    }
    return worst;
}

double run_trial(const CampaignOptions& o, std::uint64_t trial) {
    const std::uint64_t s = Rng::derive_seed(o.seed, trial);
    const SampleSpace space = SampleSpace::numbered(o.points);
    const std::string& t = o.theorem;
    if (t == "change-of-measure") {
        const auto [nu1, nu2] = trial_pair(space, o.dim, s);
        return change_of_measure_residual(trial_qrv(space, o.dim, s, -1.0, 1.0), nu2, nu1);
    }
    if (t == "chain-rule") {
        const auto [nu1, nu2] = trial_pair(space, o.dim, s);
        const QuantumMeasure nu3 = random_povm(space, o.dim, Rng::derive_seed(s, 6));
        return chain_rule_residual(nu1, nu2, nu3);
    }
    if (t == "inverse") {
        const auto [nu1, nu2] = trial_pair(space, o.dim, s);
        return inverse_residual(nu1, nu2);
    }
    if (t == "change-of-variables") {
        const QuantumMeasure nu = random_povm(space, o.dim, Rng::derive_seed(s, 1));
        const QuantumRandomVariable psi = trial_qrv(space, o.dim, s, -1.0, 1.0);
        const ChangeOfVariablesReport rep = change_of_variables_residual(psi, nu);
        // Random values are injective; the equality is a theorem only there.
        return rep.injective ? rep.residual : 0.0;
    }
    if (t == "bayes") {
        const auto [nu1, nu2] = trial_pair(space, o.dim, s);
        return bayes_residual(trial_psd_qrv(space, o.dim, s), nu1, nu2,
                              trial_partition(space, s), {});
    }
    if (t == "jensen") return jensen_trial(space, o.dim, s, trial);
    if (t == "cond-jensen") return cond_jensen_trial(space, o.dim, s, trial);
    if (t == "channel") return channel_trial(space, o.dim, s);
    if (t == "cesaro") return cesaro_trial(space, o.dim, s);
    if (t == "rn") {
        const auto [nu1, nu2] = trial_pair(space, o.dim, s);
        return verify_rn(nu2, nu1).max_residual;
    }
    throw domain_error("unknown campaign: " + t);
}

}  // namespace

const std::vector<std::string>& campaign_names() {
    static const std::vector<std::string> names = {
        "change-of-measure", "chain-rule", "inverse", "change-of-variables", "bayes",
        "jensen",            "cond-jensen", "channel", "rn",                 "cesaro"};
    return names;
}

CampaignReport run_campaign(const CampaignOptions& options) {
    if (std::find(campaign_names().begin(), campaign_names().end(), options.theorem) ==
        campaign_names().end())
        throw domain_error("unknown campaign: " + options.theorem);
    if (options.dim < 1 || options.dim > 8) throw domain_error("campaign: dim must be in [1, 8]");
    if (options.points < 1 || options.points > 10)
        throw domain_error("campaign: points must be in [1, 10]");

    const auto start = std::chrono::steady_clock::now();
    CampaignReport report;
    report.options = options;
    for (std::uint64_t trial = 0; trial < options.trials; ++trial) {
        try {
            report.residuals.push_back(run_trial(options, trial));
        } catch (const error& e) {
            report.errors.push_back({trial, e.what()});
        }
    }
    for (double r : report.residuals) {
        report.max_residual = std::max(report.max_residual, r);
        report.mean_residual += r;
    }
    if (!report.residuals.empty()) report.mean_residual /= static_cast<double>(report.residuals.size());
    report.pass = report.errors.empty() && report.max_residual <= options.tolerance;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::ordered_json report_to_json(const CampaignReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["campaign"] = report.options.theorem;
    j["seed"] = report.options.seed;
    j["trials"] = report.options.trials;
    j["dim"] = report.options.dim;
    j["points"] = report.options.points;
    j["tolerance"] = report.options.tolerance;
    j["residuals"] = report.residuals;
    j["max_residual"] = report.max_residual;
    j["mean_residual"] = report.mean_residual;
    nlohmann::ordered_json errs = nlohmann::ordered_json::array();
    for (const auto& e : report.errors)
        errs.push_back({{"trial", e.trial}, {"message", e.message}});
    j["errors"] = std::move(errs);
    j["pass"] = report.pass;
    j["tool_version"] = kToolVersion;
    j["wall_time_seconds"] = report.wall_time_seconds;
    return j;
}

}  // namespace qpmcli
