#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "loadforge/genmodel.hpp"
#include "loadforge/simulate.hpp"

namespace loadforge::library {

// Bundled generator presets so datasets can be produced without measured data.
// Waveforms are analytic harmonic mixtures and schedules are synthetic office patterns.

/// Names accepted by signature_shape.
std::vector<std::string> signature_names();

/// N x K current waveform template. Single-component shapes: resistive, rectifier, motor,
/// fluorescent. Multi-component shapes: vsd (3), split (2), microwave (2), lift (3),
/// compressor (2). Each column has a positive projection on the mains voltage.
Matrix signature_shape(std::string_view name, Index samples);

/// Hourly on/off tables: office, lighting, heater, fridge, kettle, washer, tv.
TransitionTable onoff_profile(std::string_view name);

/// Hourly (K+1)-state tables with a working-hours schedule: office, elevator, pump.
MultiStateTable multistate_profile(std::string_view name, Index states);

/// Half-minute week-day/day-off templates scaled to `peak_watts`: office, hvac, it,
/// lighting, constant.
ActivationTemplate template_profile(std::string_view name, double peak_watts);

/// The eight commercial buildings with the published class mix (A/B/C/D category counts).
/// Buildings 1 to 6 carry power ground truth, 7 and 8 current ground truth.
std::vector<BuildingSpec> shed_buildings(double span_seconds = 7 * 86400.0, Index samples_per_period = 200);

/// Class mix of shed building `index` (0-based): {A, B, C, D}.
std::array<int, 4> shed_class_counts(std::size_t index);

/// A household with five on/off appliances.
BuildingSpec residential_building(double span_seconds = 7 * 86400.0, Index samples_per_period = 200);

}  // namespace loadforge::library
