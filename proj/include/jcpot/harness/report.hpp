#pragma once

// JSON serialization of configurations and reports, plus CSV table export.

#include <iosfwd>
#include <string>
#include <string_view>

#include "jcpot/harness/benchmark.hpp"

namespace jcpot::harness {

std::string config_to_json(const RunConfig& config);

// With include_timing = false the wall-clock fields are omitted, leaving
// the deterministic report body.
std::string serialize_report(const Report& report, bool include_timing = true);

// Throws kParse on malformed documents or an unknown schema version.
Report parse_report(std::string_view text);

// num_sources,method,runs,failures,mean_accuracy,std_accuracy,mean_l1_error,std_l1_error
void write_summary_csv(std::ostream& out, const Report& report);

}  // namespace jcpot::harness
