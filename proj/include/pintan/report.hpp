#pragma once

#include <string>
#include <vector>

#include "pintan/sim.hpp"

namespace pintan {

inline constexpr const char* kReportSchema = "pintan-report/1";
inline constexpr const char* kAggregateSchema = "pintan-aggregate/1";

/// Stable key order; equal reports serialize to equal bytes.
std::string report_json(const AttackReport& report, int indent = 2);

struct AggregateReport {
    std::vector<AttackReport> runs; // ordered by seed
    std::size_t successes() const;
    double success_rate() const;
};

std::string aggregate_json(const AggregateReport& aggregate, int indent = 2);

/// Few lines for a terminal.
std::string summary_text(const AttackReport& report);

} // namespace pintan
