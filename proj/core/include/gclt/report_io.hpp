#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gclt {

struct ReportRow {
    std::string experiment;
    std::string quantity;
    double empirical = 0.0;
    double se = 0.0;
    double theoretical = 0.0;
    double zscore = 0.0;
    std::string verdict; // "pass", "fail", or "info"
};

struct Report {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config_echo; // ordered
    std::vector<ReportRow> rows;
    bool all_pass = true;
};

enum class ReportFormat { Json, Csv };

std::string report_to_json(const Report& report);
// Fixed columns: experiment, quantity, empirical, se, theoretical, zscore,
// verdict.  An empty report serializes as the header line alone.
std::string report_to_csv(const Report& report);

// Deterministic: same report -> byte-identical file.
void emit_report(const Report& report, const std::string& path,
                 ReportFormat format);

} // namespace gclt
