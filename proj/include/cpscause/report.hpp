#pragma once

#include <string>
#include <vector>

#include "cpscause/search_engine.hpp"

namespace cpscause {

inline constexpr const char* kReportVersion = "v1";

struct Timing {
    double simulate_seconds = 0.0;
    double search_seconds = 0.0;
    double total_seconds = 0.0;
};

std::string config_to_json(const SearchConfig& cfg);
SearchConfig config_from_json(const std::string& text);

// Writes report.json, c.csv, per-cause witness/counterfactual CSVs and plot-data CSVs.
// Returns the report path.
std::string write_report(const std::string& out_dir, const AnalysisContext& ctx, const Scenario& scenario,
                         const SearchConfig& cfg, const SearchOutcome& outcome, const Timing& timing);

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> messages;
};

// Rebuilds the model from the report alone and re-runs is_cause on every record.
VerifyResult verify_report(const std::string& report_path);

}  // namespace cpscause
