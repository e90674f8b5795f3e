#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qpmcli/campaign.hpp"
#include "qpmcli/instance.hpp"

namespace {

using nlohmann::ordered_json;

struct missing_name : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag wins over the QPROB_DEFAULT_TOL environment variable, which wins over
// the built-in default.
double resolve_tolerance(const std::optional<double>& flag, double fallback) {
    if (flag) return *flag;
    if (const char* env = std::getenv("QPROB_DEFAULT_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v > 0.0) return v;
        std::cerr << "warning: ignoring unparseable QPROB_DEFAULT_TOL=\"" << env << "\"\n";
    }
    return fallback;
}

template <typename Map>
const typename Map::mapped_type& named(const Map& map, const std::string& name,
                                       const char* kind) {
    const auto it = map.find(name);
    if (it == map.end())
        throw missing_name(std::string(kind) + " \"" + name + "\" not found in instance");
    return it->second;
}

ordered_json per_point(const qpm::QuantumRandomVariable& qrv) {
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < qrv.space.size(); ++i)
        out[qrv.space.labels[i]] = qpmcli::matrix_to_json(qrv.values[i].mat());
    return out;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calculus of operator-valued probability measures"};
    app.set_version_flag("--version", qpmcli::kToolVersion);
    app.require_subcommand(1);

    std::string instance_path, measure_name = "nu1", qrv_name = "psi";
    std::string num_name = "nu2", den_name = "nu1", deriv_name, base_name = "nu1";
    std::string partition_name = "f", theorem, out_path;
    std::optional<double> tol_flag;
    double grouping_tol = 1e-9;
    qpmcli::CampaignOptions campaign;
    std::size_t gen_dim = 2, gen_points = 3;
    std::uint64_t gen_seed = 0;

    auto add_instance = [&](CLI::App* cmd) {
        cmd->add_option("-i,--instance", instance_path, "Instance JSON file")->required();
        cmd->add_option("--tol", tol_flag, "Residual tolerance");
    };

    CLI::App* expect = app.add_subcommand("expect", "Quantum expectation of a QRV");
    add_instance(expect);
    expect->add_option("--measure", measure_name, "Measure name");
    expect->add_option("--qrv", qrv_name, "QRV name");

    CLI::App* rnderiv = app.add_subcommand("rnderiv", "Radon-Nikodym derivative d(num)/d(den)");
    add_instance(rnderiv);
    rnderiv->add_option("--num", num_name, "Numerator measure");
    rnderiv->add_option("--den", den_name, "Denominator measure");

    CLI::App* boxtimes = app.add_subcommand("boxtimes", "Boxtimes product of a QRV with a derivative");
    add_instance(boxtimes);
    boxtimes->add_option("--qrv", qrv_name, "QRV name");
    boxtimes->add_option("--deriv", deriv_name, "Derivative QRV name")->required();
    boxtimes->add_option("--base", base_name, "Context measure name");

    CLI::App* condexp = app.add_subcommand("condexp", "Conditional expectation given a partition");
    add_instance(condexp);
    condexp->add_option("--measure", measure_name, "Measure name");
    condexp->add_option("--qrv", qrv_name, "QRV name");
    condexp->add_option("--partition", partition_name, "Partition name");

    CLI::App* law_cmd = app.add_subcommand("law", "Law (pushforward measure) of a QRV");
    add_instance(law_cmd);
    law_cmd->add_option("--measure", measure_name, "Measure name");
    law_cmd->add_option("--qrv", qrv_name, "QRV name");
    law_cmd->add_option("--grouping-tol", grouping_tol, "Value-grouping tolerance");

    CLI::App* verify = app.add_subcommand("verify", "Run a seeded verification campaign");
    verify->add_option("theorem", theorem, "One of: " + [] {
                  std::string s;
                  for (const auto& n : qpmcli::campaign_names()) s += n + " ";
                  return s;
              }())
        ->required();
    verify->add_option("--trials", campaign.trials, "Number of trials");
    verify->add_option("--seed", campaign.seed, "Campaign seed");
    verify->add_option("--dim", campaign.dim, "Matrix dimension");
    verify->add_option("--points", campaign.points, "Sample-space size");
    verify->add_option("--tol", tol_flag, "Pass/fail tolerance");
    verify->add_option("--out", out_path, "Write the JSON report here as well");

    CLI::App* gen = app.add_subcommand("gen", "Generate a random instance file");
    gen->add_option("--dim", gen_dim, "Matrix dimension");
    gen->add_option("--points", gen_points, "Sample-space size");
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--out", out_path, "Output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        qpm::Tolerances tol;
        tol.residual = resolve_tolerance(tol_flag, tol.residual);

        if (expect->parsed()) {
            const qpmcli::InstanceFile f = qpmcli::parse_instance_file(instance_path, &std::cerr);
            const auto& nu = named(f.measures, measure_name, "measure");
            const auto& psi = named(f.qrvs, qrv_name, "qrv");
            emit({{"result", qpmcli::matrix_to_json(qpm::expectation(psi, nu).mat())}});
        } else if (rnderiv->parsed()) {
            const qpmcli::InstanceFile f = qpmcli::parse_instance_file(instance_path, &std::cerr);
            const auto& nu2 = named(f.measures, num_name, "measure");
            const auto& nu1 = named(f.measures, den_name, "measure");
            emit({{"result", per_point(qpm::rn_derivative(nu2, nu1, tol))}});
        } else if (boxtimes->parsed()) {
            const qpmcli::InstanceFile f = qpmcli::parse_instance_file(instance_path, &std::cerr);
            const auto& psi = named(f.qrvs, qrv_name, "qrv");
            const auto& phi = named(f.qrvs, deriv_name, "qrv");
            const auto& base = named(f.measures, base_name, "measure");
            emit({{"result", per_point(qpm::boxtimes(psi, phi, qpm::RNContext::make(base, tol)))}});
        } else if (condexp->parsed()) {
            const qpmcli::InstanceFile f = qpmcli::parse_instance_file(instance_path, &std::cerr);
            const auto& nu = named(f.measures, measure_name, "measure");
            const auto& psi = named(f.qrvs, qrv_name, "qrv");
            const auto& part = named(f.partitions, partition_name, "partition");
            const qpm::ConditionalResult r = qpm::cond_expectation(psi, nu, part, tol);
            ordered_json blocks = ordered_json::array();
            for (const auto& b : r.block_values) blocks.push_back(qpmcli::matrix_to_json(b.mat()));
            emit({{"result", per_point(r.phi)}, {"blocks", std::move(blocks)}});
        } else if (law_cmd->parsed()) {
            const qpmcli::InstanceFile f = qpmcli::parse_instance_file(instance_path, &std::cerr);
            const auto& nu = named(f.measures, measure_name, "measure");
            const auto& psi = named(f.qrvs, qrv_name, "qrv");
            const qpm::Law l = qpm::law(psi, nu, grouping_tol);
            ordered_json support = ordered_json::array(), masses = ordered_json::array(),
                         members = ordered_json::array();
            for (std::size_t g = 0; g < l.support.size(); ++g) {
                support.push_back(qpmcli::matrix_to_json(l.support[g].mat()));
                masses.push_back(qpmcli::matrix_to_json(l.masses[g].mat()));
                ordered_json labels = ordered_json::array();
                for (std::size_t i : l.members[g]) labels.push_back(f.space.labels[i]);
                members.push_back(std::move(labels));
            }
            emit({{"support", std::move(support)},
                  {"masses", std::move(masses)},
                  {"members", std::move(members)},
                  {"injective", l.injective()}});
        } else if (verify->parsed()) {
            campaign.theorem = theorem;
            campaign.tolerance = resolve_tolerance(tol_flag, 1e-8);
            const qpmcli::CampaignReport report = qpmcli::run_campaign(campaign);
            const ordered_json j = qpmcli::report_to_json(report);
            emit(j);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                if (!out) throw qpmcli::parse_error("cannot open report file: " + out_path);
                out << j.dump(2) << "\n";
            }
            return report.pass ? 0 : 1;
        } else if (gen->parsed()) {
            qpmcli::write_instance_file(qpmcli::generate_instance(gen_dim, gen_points, gen_seed),
                                        out_path);
        }
        return 0;
    } catch (const missing_name& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qpmcli::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const qpm::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
