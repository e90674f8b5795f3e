#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qpm/conditional.hpp"

namespace qpmcli {

inline constexpr const char* kToolVersion = "qpm 0.1.0";

struct CampaignOptions {
    std::string theorem;
    std::uint64_t trials{100};
    std::uint64_t seed{0};
    std::size_t dim{3};
    std::size_t points{4};
    double tolerance{1e-8};
};

struct TrialError {
    std::uint64_t trial;
    std::string message;
};

struct CampaignReport {
    CampaignOptions options;
    std::vector<double> residuals;
    double max_residual{0.0};
    double mean_residual{0.0};
    std::vector<TrialError> errors;
    bool pass{false};
    double wall_time_seconds{0.0};
};

const std::vector<std::string>& campaign_names();

// Runs one seeded campaign; deterministic for a fixed seed (per-trial seeds
// are derived from the campaign seed and trial index).
CampaignReport run_campaign(const CampaignOptions& options);

nlohmann::ordered_json report_to_json(const CampaignReport& report);

}  // namespace qpmcli
