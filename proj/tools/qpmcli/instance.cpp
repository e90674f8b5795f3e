#include "qpmcli/instance.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qpmcli {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json matrix_to_json(const qpm::Mat& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols; ++j)
            row.push_back(ordered_json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

qpm::Mat matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw parse_error(where + ": matrix must be a nonempty array of rows");
    const std::size_t rows = j.size();
    qpm::Mat m(rows, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array()) throw parse_error(where + ": row " + std::to_string(i) + " not an array");
        if (i == 0) {
            m = qpm::Mat(rows, row.size());
        } else if (row.size() != m.cols) {
            throw parse_error(where + ": ragged rows");
        }
        for (std::size_t k = 0; k < row.size(); ++k) {
            const json& e = row[k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw parse_error(where + ": entry (" + std::to_string(i) + "," +
                                  std::to_string(k) + ") must be a [re, im] pair");
            m(i, k) = qpm::cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

namespace {

qpm::HermitianMatrix read_hermitian(const json& j, const std::string& where, std::size_t dim,
                                    std::ostream* warnings, double warn_threshold,
                                    double error_threshold) {
    const qpm::Mat m = matrix_from_json(j, where);
    if (m.rows != dim || m.cols != dim)
        throw parse_error(where + ": expected " + std::to_string(dim) + "x" +
                          std::to_string(dim) + " matrix, got " + std::to_string(m.rows) + "x" +
                          std::to_string(m.cols));
    const double asym = (m - m.adjoint()).frobenius();
    if (asym > error_threshold)
        throw parse_error(where + ": matrix is not Hermitian (asymmetry " + std::to_string(asym) +
                          ")");
    if (asym > warn_threshold && warnings)
        *warnings << "warning: " << where << " symmetrized (asymmetry " << asym << ")\n";
    return qpm::hermitize(m);
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(where + ": missing field \"" + key + "\"");
    return *it;
}

}  // namespace

InstanceFile parse_instance(const json& j, std::ostream* warnings, double warn_threshold,
                            double error_threshold) {
    if (!j.is_object()) throw parse_error("instance: top level must be a JSON object");
    InstanceFile f;
    const json& dim = require(j, "dim", "instance");
    if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0)
        throw parse_error("instance.dim: must be a positive integer");
    f.dim = dim.get<std::size_t>();

    const json& points = require(j, "points", "instance");
    if (!points.is_array() || points.empty())
        throw parse_error("instance.points: must be a nonempty array of labels");
    std::vector<std::string> labels;
    for (const json& p : points) {
        if (!p.is_string()) throw parse_error("instance.points: labels must be strings");
        labels.push_back(p.get<std::string>());
    }
    try {
        f.space = qpm::SampleSpace(std::move(labels));
    } catch (const qpm::error& e) {
        throw parse_error(std::string("instance.points: ") + e.what());
    }

    auto read_family = [&](const char* field, bool as_measure) {
        if (!j.contains(field)) return;
        const json& fam = j.at(field);
        if (!fam.is_object()) throw parse_error(std::string("instance.") + field + ": must be an object");
        for (auto it = fam.begin(); it != fam.end(); ++it) {
            const std::string where = std::string(field) + "." + it.key();
            if (!it.value().is_object())
                throw parse_error(where + ": must map point labels to matrices");
            std::vector<qpm::HermitianMatrix> values;
            for (const std::string& label : f.space.labels) {
                if (!it.value().contains(label))
                    throw parse_error(where + ": missing point \"" + label + "\"");
                values.push_back(read_hermitian(it.value().at(label), where + "." + label, f.dim,
                                                warnings, warn_threshold, error_threshold));
            }
            if (it.value().size() != f.space.size())
                throw parse_error(where + ": has entries outside the sample space");
            if (as_measure) {
                qpm::QuantumMeasure nu{f.space, f.dim, std::move(values), false};
                const qpm::ValidationReport rep = qpm::validate(nu);
                if (!rep.valid_povm)
                    throw parse_error(where + ": atoms are not positive semidefinite");
                nu.is_probability = rep.valid_probability;
                f.measures.emplace(it.key(), std::move(nu));
            } else {
                f.qrvs.emplace(it.key(),
                               qpm::QuantumRandomVariable{f.space, f.dim, std::move(values)});
            }
        }
    };
    read_family("measures", true);
    read_family("qrvs", false);

    if (j.contains("partitions")) {
        const json& parts = j.at("partitions");
        if (!parts.is_object()) throw parse_error("instance.partitions: must be an object");
        for (auto it = parts.begin(); it != parts.end(); ++it) {
            const std::string where = "partitions." + it.key();
            if (!it.value().is_array()) throw parse_error(where + ": must be an array of blocks");
            qpm::Partition p;
            for (const json& block : it.value()) {
                if (!block.is_array()) throw parse_error(where + ": blocks must be arrays");
                std::vector<std::size_t> idx;
                for (const json& label : block) {
                    if (!label.is_string()) throw parse_error(where + ": labels must be strings");
                    const auto found = f.space.index_of(label.get<std::string>());
                    if (!found)
                        throw parse_error(where + ": unknown point \"" +
                                          label.get<std::string>() + "\"");
                    idx.push_back(*found);
                }
                p.blocks.push_back(std::move(idx));
            }
            try {
                p.validate(f.space.size());
            } catch (const qpm::error& e) {
                throw parse_error(where + ": " + e.what());
            }
            f.partitions.emplace(it.key(), std::move(p));
        }
    }
    return f;
}

InstanceFile parse_instance_file(const std::string& path, std::ostream* warnings) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open instance file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    return parse_instance(j, warnings);
}

ordered_json serialize_instance(const InstanceFile& f) {
    ordered_json j;
    j["schema_version"] = 1;
    j["dim"] = f.dim;
    j["points"] = f.space.labels;
    auto family = [&](const auto& items, auto values_of) {
        ordered_json fam = ordered_json::object();
        for (const auto& [name, item] : items) {
            ordered_json obj = ordered_json::object();
            const auto& values = values_of(item);
            for (std::size_t i = 0; i < f.space.size(); ++i)
                obj[f.space.labels[i]] = matrix_to_json(values[i].mat());
            fam[name] = std::move(obj);
        }
        return fam;
    };
    j["measures"] = family(f.measures, [](const qpm::QuantumMeasure& m) -> const auto& {
        return m.atoms;
    });
    j["qrvs"] = family(f.qrvs, [](const qpm::QuantumRandomVariable& q) -> const auto& {
        return q.values;
    });
    ordered_json parts = ordered_json::object();
    for (const auto& [name, p] : f.partitions) {
        ordered_json blocks = ordered_json::array();
        for (const auto& block : p.blocks) {
            ordered_json labels = ordered_json::array();
            for (std::size_t i : block) labels.push_back(f.space.labels[i]);
            blocks.push_back(std::move(labels));
        }
        parts[name] = std::move(blocks);
    }
    j["partitions"] = std::move(parts);
    return j;
}

void write_instance_file(const InstanceFile& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open output file: " + path);
    out << serialize_instance(f).dump(2) << "\n";
    if (!out) throw parse_error("write failed: " + path);
}

InstanceFile generate_instance(std::size_t dim, std::size_t points, std::uint64_t seed) {
    InstanceFile f;
    f.dim = dim;
    f.space = qpm::SampleSpace::numbered(points);
    f.measures.emplace("nu1", qpm::random_povm(f.space, dim, qpm::Rng::derive_seed(seed, 1)));
    f.measures.emplace("nu2", qpm::random_povm(f.space, dim, qpm::Rng::derive_seed(seed, 2)));
    qpm::Rng rng(qpm::Rng::derive_seed(seed, 3));
    qpm::QuantumRandomVariable psi;
    psi.space = f.space;
    psi.dim = dim;
    for (std::size_t i = 0; i < points; ++i) psi.values.push_back(qpm::random_psd(dim, rng, 0.1));
    f.qrvs.emplace("psi", std::move(psi));
    const std::size_t blocks = points == 1 ? 1 : 2 + qpm::Rng(seed).below(points - 1);
    f.partitions.emplace("f",
                         qpm::random_partition(f.space, qpm::Rng::derive_seed(seed, 4), blocks));
    return f;
}

}  // namespace qpmcli
