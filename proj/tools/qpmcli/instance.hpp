#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "qpm/conditional.hpp"

namespace qpmcli {

// File-level problems (missing file, malformed JSON, schema violations).
// Kept separate from qpm::error so the driver can map them to a distinct
// exit code.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstanceFile {
    std::size_t dim{0};
    qpm::SampleSpace space;
    std::map<std::string, qpm::QuantumMeasure> measures;
    std::map<std::string, qpm::QuantumRandomVariable> qrvs;
    std::map<std::string, qpm::Partition> partitions;
};

// Matrices are row-major nested arrays of [re, im] pairs.
nlohmann::ordered_json matrix_to_json(const qpm::Mat& m);
qpm::Mat matrix_from_json(const nlohmann::json& j, const std::string& where);

// Parses and validates an instance. Matrices are symmetrized; asymmetry
// above warn_threshold prints a warning to `warnings`, above error_threshold
// it is a parse_error naming the entry.
InstanceFile parse_instance(const nlohmann::json& j, std::ostream* warnings = nullptr,
                            double warn_threshold = 1e-9, double error_threshold = 1e-6);
InstanceFile parse_instance_file(const std::string& path, std::ostream* warnings = nullptr);

nlohmann::ordered_json serialize_instance(const InstanceFile& f);
void write_instance_file(const InstanceFile& f, const std::string& path);

// Deterministic demo instance: two mutually strongly continuous probability
// measures (nu1, nu2) with invertible atoms, one PSD-valued QRV (psi), one
// partition (f).
InstanceFile generate_instance(std::size_t dim, std::size_t points, std::uint64_t seed);

}  // namespace qpmcli
