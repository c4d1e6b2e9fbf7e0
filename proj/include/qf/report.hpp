#pragma once

// Uniform result reporting for the command-line tool: named entries with a
// status and optional residual/witness, emitted as text or as JSON that
// parses back losslessly.

#include <string>
#include <vector>

namespace qf {

inline constexpr const char* kToolkitVersion = "1.0.0";

struct ReportEntry {
    std::string name;
    std::string status;  // "pass", "fail", "skip" or "info"
    double residual = 0.0;
    bool has_residual = false;
    std::string witness;

    bool operator==(const ReportEntry&) const = default;
};

struct Report {
    std::string command;  // full command echo
    std::string version = kToolkitVersion;
    unsigned long seed = 0;
    double tol = 0.0;
    std::vector<ReportEntry> entries;

    bool operator==(const Report&) const = default;

    bool all_pass() const;  // no entry with status "fail"
    void add(std::string name, std::string status);
    void add(std::string name, std::string status, double residual,
             std::string witness = {});

    std::string to_text() const;
    std::string to_data() const;  // JSON, single trailing newline
    static Report from_data(const std::string& text);
};

}  // namespace qf
