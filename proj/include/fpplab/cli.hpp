#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fpplab::cli {

std::string version();

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,
    kValidationError = 2,
    kRareConditioning = 3,
    kGridOverflow = 4,
    kReplayMismatch = 5,
};

/// Replay refused: version mismatch, checksum failure or a payload that differs.
class ReplayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> subcommands();

/// Fills defaults, checks types and rejects unknown keys. The input must carry "subcommand".
/// Throws ValidationError.
nlohmann::json normalize_config(const nlohmann::json& config);

/// FNV-1a 64 of the compact dump of a normalized config, as 16 hex digits.
std::string config_checksum(const nlohmann::json& config);

/// Runs a normalized config and returns its payload (a pure function of the config).
nlohmann::json run_payload(const nlohmann::json& config);

/// Full record: subcommand, version, config, config_checksum, wall_time_s, payload, seed_schedule.
nlohmann::json run(const nlohmann::json& config);

/// Re-runs a stored record. Throws ReplayError on version mismatch, checksum failure or payload drift.
nlohmann::json replay(const nlohmann::json& record);

/// Published JSON schema (draft-07 subset: type, required, properties, items) for a subcommand's payload.
nlohmann::json payload_schema(const std::string& subcommand);

/// Checks `doc` against the subset of JSON schema emitted by payload_schema; returns the first violation.
std::optional<std::string> validate_against(const nlohmann::json& doc, const nlohmann::json& schema);

/// Entry point behind the fpplab executable.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fpplab::cli
