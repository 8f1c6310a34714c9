#pragma once

#include "ssfs/pipeline.hpp"

#include <json.hpp>

#include <string>

namespace ssfs {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

Json config_to_json(const RunConfig& cfg);
/// Timing is omitted unless requested so identical runs serialize identically.
Json report_to_json(const RunReport& report, bool include_timing = false);
Json comparison_to_json(const ComparisonReport& report);
std::string dump(const Json& json);

/// CSV with columns window,generation,best_fitness,mean_fitness.
std::string de_history_csv(const RunReport& report);

}  // namespace ssfs
