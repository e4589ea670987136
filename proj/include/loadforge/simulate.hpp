#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loadforge/genmodel.hpp"
#include "loadforge/manifest.hpp"
#include "loadforge/partition.hpp"
#include "loadforge/types.hpp"

namespace loadforge {

/// Device taxonomy by signature count and activation complexity.
enum class DeviceClass {
    OnOff,             // A: one signature, on/off activation
    MultiState,        // B: several signatures, discrete states
    VaryingLoad,       // C: one signature, continuously varying activation
    VaryingSignature,  // D: several signatures, varying activation split by a Dirichlet draw
};

char class_letter(DeviceClass c) noexcept;
DeviceClass parse_device_class(std::string_view text);

struct OnOffActivation {
    TransitionTable table{24};
    TimePartition partition = TimePartition::hourly();
    double watts = 0.0;  // power drawn while on
};

struct MultiStateActivation {
    MultiStateTable table;
    TimePartition partition = TimePartition::hourly();
    std::vector<double> watts;  // one magnitude per non-off state
};

struct ComplexActivation {
    ActivationTemplate tpl;
    TimePartition partition = TimePartition::halfminute_daytype();
    ArmaParams arma = ArmaParams::defaults();
};

struct MultiSigActivation {
    ActivationTemplate tpl;
    TimePartition partition = TimePartition::halfminute_daytype();
    ArmaParams arma = ArmaParams::defaults();
    std::vector<double> alpha;
    bool redraw_daily = false;
};

using ActivationModel = std::variant<OnOffActivation, MultiStateActivation, ComplexActivation, MultiSigActivation>;

struct DeviceSpec {
    DeviceClass device_class = DeviceClass::VaryingLoad;
    SignatureTemplate signature;
    ActivationModel activation;

    Index components() const noexcept { return signature.templ.cols(); }
    /// Class / component-count / generator consistency, and waveform length N.
    void validate(Index samples_per_period) const;
};

struct CategorySpec {
    std::string id;
    std::vector<DeviceSpec> devices;
};

struct Mains {
    double rms = 230.0;
    double hz = 50.0;
};

enum class GroundTruth { Power, Current };

struct BuildingSpec {
    std::string name = "building";
    std::vector<CategorySpec> categories;
    double start = 1514764800.0;  // 2018-01-01T00:00:00Z, a Monday
    double span_seconds = 86400.0;
    double cadence = 30.0;        // seconds between recorded waveforms
    Index samples_per_period = 200;
    Mains mains;
    std::optional<double> noise_std;  // amperes; unset = 0.1% of the peak clean current
    GroundTruth ground_truth = GroundTruth::Power;

    Timeline timeline() const;
    void validate() const;
};

/// v0(n) = rms * sqrt(2) * sin(2 pi n / N).
Vector voltage_waveform(double rms, Index samples);

struct DeviceTrace {
    Matrix signatures;   // N x K, normalized against v0
    Matrix activations;  // K x T, watts
    CurrentMatrix current() const { return CurrentMatrix(signatures * activations); }
};

/// Draws a signature (normalized against v0) and activations for one device.
DeviceTrace synthesize_device(const DeviceSpec& spec, const Vector& v0, const Timeline& timeline,
                              std::uint64_t seed);

struct CategoryTrace {
    std::string id;
    std::vector<DeviceTrace> devices;
    Vector power;  // sum over devices and components of the activations

    Matrix current() const;
};

struct SimulatedDataset {
    Timeline timeline;
    Vector voltage;
    CurrentMatrix total;
    Matrix noise;  // realized noise: total minus the summed category currents
    double noise_std = 0.0;
    std::vector<CategoryTrace> categories;

    PowerSeries total_power() const;
    PowerSeries category_power(std::size_t c) const;
};

/// Sums category currents (each the sum of its devices) and adds i.i.d. Gaussian noise.
/// Seeds derive hierarchically: building seed -> category index -> device index.
SimulatedDataset synthesize_building(const BuildingSpec& spec, std::uint64_t seed);

/// Writes `building_<k>/` directories (total current, per-category power or current, a
/// manifest) plus a top-level manifest. Returns the top-level manifest.
Manifest emit_shed(const std::vector<BuildingSpec>& specs, const std::filesystem::path& out_dir,
                   std::uint64_t root_seed, const std::string& config_hash = "");

/// Serializes a building spec (structure and generator parameters summary) for manifests.
nlohmann::ordered_json describe(const BuildingSpec& spec);

}  // namespace loadforge
