#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qpmcli/campaign.hpp"
#include "qpmcli/instance.hpp"

using namespace qpm;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(const std::string& args) {
    const int status = std::system((std::string(QPM_CLI_BIN) + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("instance round trip") {
    const qpmcli::InstanceFile f = qpmcli::generate_instance(3, 4, 11);
    const nlohmann::ordered_json serialized = qpmcli::serialize_instance(f);
    const qpmcli::InstanceFile back = qpmcli::parse_instance(json(serialized));
    CHECK(back.dim == 3);
    CHECK(back.space == f.space);
    CHECK(back.measures.at("nu1").is_probability);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(frobenius_distance(back.measures.at("nu1").atoms[i], f.measures.at("nu1").atoms[i]) <
              1e-15);
        CHECK(frobenius_distance(back.qrvs.at("psi").values[i], f.qrvs.at("psi").values[i]) <
              1e-15);
    }
    CHECK(back.partitions.at("f").blocks == f.partitions.at("f").blocks);
    // Serializing again is byte-identical.
    CHECK(qpmcli::serialize_instance(back).dump() == serialized.dump());
}

TEST_CASE("generated instances") {
    const qpmcli::InstanceFile a = qpmcli::generate_instance(2, 3, 7);
    const qpmcli::InstanceFile b = qpmcli::generate_instance(2, 3, 7);
    CHECK(qpmcli::serialize_instance(a).dump() == qpmcli::serialize_instance(b).dump());

    CHECK(validate(a.measures.at("nu1")).valid_probability);
    CHECK(validate(a.measures.at("nu2")).valid_probability);
    CHECK(is_abs_continuous(a.measures.at("nu1"), a.measures.at("nu2"), AbsContinuityMode::strong));
    CHECK(is_abs_continuous(a.measures.at("nu2"), a.measures.at("nu1"), AbsContinuityMode::strong));
    CHECK(a.qrvs.at("psi").psd_valued());

    // 1x1 instances parse back to scalars.
    const qpmcli::InstanceFile one = qpmcli::generate_instance(1, 2, 3);
    const qpmcli::InstanceFile round = qpmcli::parse_instance(qpmcli::serialize_instance(one));
    CHECK(round.dim == 1);
}

TEST_CASE("parse errors") {
    json j = qpmcli::serialize_instance(qpmcli::generate_instance(2, 2, 1));

    json missing = j;
    missing.erase("dim");
    CHECK_THROWS_AS(qpmcli::parse_instance(missing), qpmcli::parse_error);

    json bad_entry = j;
    bad_entry["measures"]["nu1"]["x1"][0][1] = json::array({1.0});
    CHECK_THROWS_AS(qpmcli::parse_instance(bad_entry), qpmcli::parse_error);

    json wrong_dim = j;
    wrong_dim["dim"] = 3;
    CHECK_THROWS_AS(qpmcli::parse_instance(wrong_dim), qpmcli::parse_error);

    // Far-from-Hermitian matrix is rejected with the entry named.
    json skew = j;
    skew["qrvs"]["psi"]["x1"][0][1] = json::array({5.0, 0.0});
    skew["qrvs"]["psi"]["x1"][1][0] = json::array({-5.0, 0.0});
    try {
        qpmcli::parse_instance(skew);
        FAIL("expected parse_error");
    } catch (const qpmcli::parse_error& e) {
        CHECK(std::string(e.what()).find("psi.x1") != std::string::npos);
    }

    // Mild asymmetry is symmetrized with a warning.
    json mild = j;
    const double v = mild["qrvs"]["psi"]["x1"][0][1][0].get<double>();
    mild["qrvs"]["psi"]["x1"][0][1][0] = v + 1e-8;
    std::ostringstream warnings;
    CHECK_NOTHROW(qpmcli::parse_instance(mild, &warnings));
    CHECK(warnings.str().find("symmetrized") != std::string::npos);

    json overlap = j;
    overlap["partitions"]["f"] = json::array({json::array({"x1", "x2"}), json::array({"x2"})});
    CHECK_THROWS_AS(qpmcli::parse_instance(overlap), qpmcli::parse_error);
}

TEST_CASE("campaign determinism and reports") {
    qpmcli::CampaignOptions o;
    o.theorem = "inverse";
    o.trials = 10;
    o.seed = 42;
    o.dim = 2;
    o.points = 3;
    const qpmcli::CampaignReport a = qpmcli::run_campaign(o);
    const qpmcli::CampaignReport b = qpmcli::run_campaign(o);
    CHECK(a.residuals == b.residuals);
    CHECK(a.pass);
    CHECK(a.max_residual <= 1e-8);

    const json j = qpmcli::report_to_json(a);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("seed") == 42);
    CHECK(j.at("residuals").size() == 10);
    CHECK(j.at("pass") == true);

    CHECK_THROWS_AS(qpmcli::run_campaign({"no-such-theorem", 1, 0, 2, 2, 1e-8}), domain_error);
    CHECK_THROWS_AS(qpmcli::run_campaign({"inverse", 1, 0, 9, 2, 1e-8}), domain_error);
}

TEST_CASE("executable exit codes and outputs") {
    const std::string dir = "cli_scratch";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

    CHECK(run("gen --dim 2 --points 3 --seed 5 --out " + dir + "/inst.json > /dev/null") == 0);
    CHECK(run("gen --dim 2 --points 3 --seed 5 --out " + dir + "/inst2.json > /dev/null") == 0);
    CHECK(slurp(dir + "/inst.json") == slurp(dir + "/inst2.json"));

    CHECK(run("expect -i " + dir + "/inst.json --measure nu1 --qrv psi > " + dir +
              "/expect.json 2>/dev/null") == 0);
    const json result = json::parse(slurp(dir + "/expect.json"));
    const Mat m = qpmcli::matrix_from_json(result.at("result"), "result");
    const qpmcli::InstanceFile f = qpmcli::generate_instance(2, 3, 5);
    const HermitianMatrix expected = expectation(f.qrvs.at("psi"), f.measures.at("nu1"));
    CHECK((m - expected.mat()).frobenius() < 1e-12);

    CHECK(run("rnderiv -i " + dir + "/inst.json --num nu2 --den nu1 > /dev/null 2>&1") == 0);
    CHECK(run("condexp -i " + dir + "/inst.json --measure nu1 --qrv psi --partition f "
              "> /dev/null 2>&1") == 0);
    CHECK(run("law -i " + dir + "/inst.json --measure nu1 --qrv psi > /dev/null 2>&1") == 0);

    // Exit 2: usage errors and missing names.
    CHECK(run("expect -i " + dir + "/inst.json --measure nope --qrv psi > /dev/null 2>&1") == 2);
    CHECK(run("nonsense > /dev/null 2>&1") == 2);
    CHECK(run("expect > /dev/null 2>&1") == 2);

    // Exit 4: missing or malformed files.
    CHECK(run("expect -i " + dir + "/absent.json --qrv psi > /dev/null 2>&1") == 4);
    std::ofstream(dir + "/broken.json") << "{ not json";
    CHECK(run("expect -i " + dir + "/broken.json --qrv psi > /dev/null 2>&1") == 4);

    // Exit 3: precondition failure (RN derivative against a singular measure).
    std::ofstream(dir + "/singular.json") << R"({
      "dim": 2, "points": ["a", "b"],
      "measures": {
        "nu1": {"a": [[[1,0],[0,0]],[[0,0],[0,0]]], "b": [[[0,0],[0,0]],[[0,0],[1,0]]]},
        "nu2": {"a": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]], "b": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}
      }
    })";
    CHECK(run("rnderiv -i " + dir + "/singular.json --num nu2 --den nu1 > /dev/null 2>&1") == 3);

    // Campaign pass/fail exit codes; env tolerance applies when no flag.
    CHECK(run("verify inverse --trials 5 --seed 1 --dim 2 --points 3 > /dev/null") == 0);
    CHECK(run("verify inverse --trials 5 --seed 1 --dim 2 --points 3 --tol 1e-18 "
              "> /dev/null") == 1);
    CHECK(std::system(("QPROB_DEFAULT_TOL=1e-18 " + std::string(QPM_CLI_BIN) +
                       " verify inverse --trials 5 --seed 1 --dim 2 --points 3 > /dev/null")
                          .c_str()) != 0);
    CHECK(std::system(("QPROB_DEFAULT_TOL=1e-18 " + std::string(QPM_CLI_BIN) +
                       " verify inverse --trials 5 --seed 1 --dim 2 --points 3 --tol 1e-6 "
                       "> /dev/null")
                          .c_str()) == 0);

    // Report file matches stdout report.
    CHECK(run("verify rn --trials 5 --seed 9 --dim 2 --points 3 --out " + dir +
              "/report.json > " + dir + "/stdout.json") == 0);
    CHECK(json::parse(slurp(dir + "/report.json")) == json::parse(slurp(dir + "/stdout.json")));

    std::system(("rm -rf " + dir).c_str());
}
