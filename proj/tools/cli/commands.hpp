// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace riskbid::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    kOk = 0,
    kSolverFailure = 2,
    kInputFailure = 3,
    kOrderingFailure = 4,
    kDominated = 5,
    kAuditFailure = 6,
};

/// solution.csv + meta.json in out_dir.
int cmd_solve(const fs::path& config, const fs::path& out_dir, std::ostream& out, std::ostream& err);

/// comparison.csv + verdict.json in out_dir; exit 4 when the ordering fails.
int cmd_compare(const fs::path& config, const fs::path& out_dir, std::ostream& out, std::ostream& err);

/// Prints verdicts, partitions and condition flags as JSON on `out`.
int cmd_safety(const fs::path& problem, std::ostream& out, std::ostream& err);

/// Reads solution.csv from dir, writes audit.json there; exit 6 on failure.
int cmd_audit(const fs::path& config, const fs::path& dir, std::optional<std::uint64_t> seed,
              std::ostream& out, std::ostream& err);

/// Reads solution.csv from dir, writes stats.json there.
int cmd_simulate(const fs::path& config, const fs::path& dir, std::uint64_t rounds,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

// Serialization, shared with the tests.
json to_json(const AuditReport& r);
json to_json(const StatsReport& s);
json verdict_json(const ComparisonReport& r);
json safety_json(const SafetyInput& in, bool& any_comparable);

/// Writes `text` to a sibling temp file, then renames it over `path`.
void write_atomic(const fs::path& path, const std::string& text);

/// Reads a `v,beta,foc_residual` table. Throws ConfigError when malformed.
EquilibriumSolution read_solution(const fs::path& csv, std::optional<std::pair<double, double>> anchor);

}  // namespace riskbid::cli
