#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadforge/simulate.hpp"

namespace loadforge {

/// A parsed `generate` configuration.
///
/// The document is JSON. Top-level keys: `seed`, `span_days`, `start` (YYYY-MM-DD or epoch
/// seconds), `cadence_seconds`, `samples_per_period`, `mains` {rms, hz, phase},
/// `holidays` [dates], `weekends_off`, `noise_std`, `preset` ("shed" | "residential") and
/// `buildings` [...]. A building holds `name`, `ground_truth` ("power" | "current"),
/// `noise_std`, per-building overrides of the scalar keys above, and either `preset`
/// ("shed:<1..8>" | "residential") or `categories` [{id, devices: [...]}].
///
/// A device holds `class` (A-D, optional when implied), `count`, `signature`
/// ({"shape": name} | {"file": factor-model path}), `sigma` or `sigma_rel`, and
/// `activation` with `type` onoff | multistate | template | multisig plus the generator
/// fields (`profile`/`table`/`file`, `watts`/`peak_watts`, `arma`, `alpha`, `redraw_daily`).
struct GenerateConfig {
    std::vector<BuildingSpec> buildings;
    std::optional<std::uint64_t> seed;
    std::string canonical;  // sorted-key JSON of the document, seed excluded

    std::string hash() const;
};

/// Parses a configuration document. Relative file references resolve against `base_dir`.
/// Throws InvalidInput with the offending key path on schema violations.
GenerateConfig parse_generate_config(std::string_view text, const std::filesystem::path& base_dir = {});
GenerateConfig load_generate_config(const std::filesystem::path& path);

/// Equivalent of `{"preset": name, "span_days": span_days}`.
GenerateConfig preset_config(std::string_view name, double span_days = 7.0);

}  // namespace loadforge
