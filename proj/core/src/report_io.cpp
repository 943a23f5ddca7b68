#include "gclt/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gclt {

namespace {

std::string json_number(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string report_to_json(const Report& report) {
    std::string out = "{\n";
    out += "  \"experiment\": " + json_string(report.experiment) + ",\n";
    out += "  \"config\": {";
    for (std::size_t i = 0; i < report.config_echo.size(); ++i) {
        if (i) out += ",";
        out += "\n    " + json_string(report.config_echo[i].first) + ": " +
               json_string(report.config_echo[i].second);
    }
    out += report.config_echo.empty() ? "},\n" : "\n  },\n";
    out += "  \"rows\": [";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& r = report.rows[i];
        if (i) out += ",";
        out += "\n    {\"experiment\": " + json_string(r.experiment);
        out += ", \"quantity\": " + json_string(r.quantity);
        out += ", \"empirical\": " + json_number(r.empirical);
        out += ", \"se\": " + json_number(r.se);
        out += ", \"theoretical\": " + json_number(r.theoretical);
        out += ", \"zscore\": " + json_number(r.zscore);
        out += ", \"verdict\": " + json_string(r.verdict) + "}";
    }
    out += report.rows.empty() ? "],\n" : "\n  ],\n";
    out += std::string("  \"all_pass\": ") +
           (report.all_pass ? "true" : "false") + "\n}\n";
    return out;
}

std::string report_to_csv(const Report& report) {
    std::string out = "experiment,quantity,empirical,se,theoretical,zscore,verdict\n";
    char buf[40];
    for (const ReportRow& r : report.rows) {
        out += csv_field(r.experiment) + ",";
        out += csv_field(r.quantity) + ",";
        std::snprintf(buf, sizeof buf, "%.17g", r.empirical);
        out += std::string(buf) + ",";
        std::snprintf(buf, sizeof buf, "%.17g", r.se);
        out += std::string(buf) + ",";
        std::snprintf(buf, sizeof buf, "%.17g", r.theoretical);
        out += std::string(buf) + ",";
        std::snprintf(buf, sizeof buf, "%.17g", r.zscore);
        out += std::string(buf) + ",";
        out += csv_field(r.verdict) + "\n";
    }
    return out;
}

void emit_report(const Report& report, const std::string& path,
                 ReportFormat format) {
    std::string body = format == ReportFormat::Json ? report_to_json(report)
                                                    : report_to_csv(report);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open report file: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("failed writing report file: " + path);
}

} // namespace gclt
