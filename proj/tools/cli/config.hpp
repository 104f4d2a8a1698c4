// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "riskbid/fpa.hpp"
#include "riskbid/safety.hpp"
#include "riskbid/spa.hpp"
#include "riskbid/verification.hpp"

namespace riskbid::cli {

using nlohmann::json;

enum class Format { Fpa, Spa, Uniform };

const char* to_string(Format f) noexcept;

/// A validated scenario plus its fully defaulted echo.
struct ScenarioConfig {
    Format format = Format::Fpa;
    std::optional<FpaScenario> fpa;  ///< set for Format::Fpa
    std::optional<SpaScenario> spa;  ///< set for Format::Spa and Format::Uniform
    AuditOptions audit;
    std::uint64_t seed = 0;
    json echo;

    bool has_transform() const noexcept;
};

/// Parses a config document. A document with a top-level "config" object
/// (as written to meta.json) is unwrapped first. Throws ConfigError.
ScenarioConfig parse_config(const json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

struct SafetyInput {
    std::vector<StateRecord> states;
    double bid_a = 0.0;
    double bid_b = 0.0;
    std::optional<Format> format;  ///< absent: analyze both pricing rules
};

SafetyInput parse_safety(const json& doc);
SafetyInput load_safety(const std::filesystem::path& path);

/// Reads a JSON file; throws ConfigError on I/O or parse failure.
json read_json(const std::filesystem::path& path);

}  // namespace riskbid::cli
