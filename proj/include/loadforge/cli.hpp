#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loadforge/factorize.hpp"
#include "loadforge/partition.hpp"
#include "loadforge/types.hpp"

namespace loadforge::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kInvalid = 3,    // parse or validation failure
    kNumerical = 4,  // solver or normalization failure
};

enum class Command { Learn, Analyze, InferActivations, Generate, Version };

enum class DataKind { Current, Power };

struct RunConfig {
    Command command = Command::Version;
    std::filesystem::path input;
    std::filesystem::path output;
    DataKind kind = DataKind::Power;

    // learn
    std::optional<Index> k;  // unset selects k automatically
    double snr_target = 50.0;
    Index k_max = 10;
    SolverOptions solver;

    // analyze
    std::vector<double> resample_seconds{30.0, 3600.0};
    double cadence = 30.0;  // seconds between periods of a current file

    // infer-activations
    PartitionKind partition = PartitionKind::Hourly;
    double threshold = 20.0;
    std::vector<std::string> holidays;

    // generate
    std::filesystem::path config;
    std::string preset;
    std::optional<double> span_days;

    double mains_rms = 230.0;
    std::optional<std::uint64_t> seed;  // unset falls back to 0, which is logged
};

using Dataset = std::variant<CurrentMatrix, PowerSeries>;

/// Loads and validates a dataset file of the declared kind.
Dataset ingest(const std::filesystem::path& path, DataKind kind);

/// "30s", "15m", "1h", "1d" or a plain number of seconds.
double parse_duration(std::string_view text);

/// Executes one subcommand and writes its artifacts plus a manifest.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig and runs it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loadforge::cli
