#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bnp/audit.hpp"
#include "bnp/dataset.hpp"

namespace bnp {

// RFC-4180 quoting: wraps the field in quotes when it contains a comma,
// quote, or newline, doubling embedded quotes.
[[nodiscard]] std::string csv_field(const std::string& raw);

// Parses one RFC-4180 document into rows of fields.
[[nodiscard]] std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Compact single-field witness rendering, e.g. "rebid t3 5",
// "fake-bid 9", "raise t7 9 + t8 9", "none".
[[nodiscard]] std::string format_witness(const std::optional<DeviationScenario>& witness);

void write_replay_csv(std::ostream& out, const std::vector<ReplayComparison>& rows);

// One row per block; scp columns repeat per coalition bound 1..collusion_c.
void write_audit_csv(std::ostream& out, const std::vector<BlockAudit>& rows,
                     std::size_t collusion_c);

}  // namespace bnp
