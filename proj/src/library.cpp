#include "loadforge/library.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "loadforge/errors.hpp"

namespace loadforge::library {

namespace {

constexpr double kPi = std::numbers::pi;

struct Harmonic {
    int order;
    double amplitude;
    double phase;
};

Vector harmonics(Index samples, std::initializer_list<Harmonic> terms) {
    Vector v = Vector::Zero(samples);
    for (Index n = 0; n < samples; ++n) {
        const double th = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(samples);
        for (const auto& h : terms) v(n) += h.amplitude * std::sin(h.order * th + h.phase);
    }
    return v;
}

// Capacitor-input rectifier: current flows in narrow pulses around the voltage peaks.
Vector pulse(Index samples, double sharpness, double shift) {
    Vector v(samples);
    for (Index n = 0; n < samples; ++n) {
        const double s = std::sin(2.0 * kPi * static_cast<double>(n) / static_cast<double>(samples) - shift);
        v(n) = std::copysign(std::pow(std::abs(s), sharpness), s);
    }
    return v;
}

Matrix columns(std::initializer_list<Vector> cols) {
    Matrix m(cols.begin()->size(), static_cast<Index>(cols.size()));
    Index k = 0;
    for (const auto& c : cols) m.col(k++) = c;
    return m;
}

double ramp(double h, double from, double to) {
    if (h <= from) return 0.0;
    if (h >= to) return 1.0;
    return 0.5 - 0.5 * std::cos(kPi * (h - from) / (to - from));
}

double window(double h, double up0, double up1, double down0, double down1) {
    return ramp(h, up0, up1) * (1.0 - ramp(h, down0, down1));
}

struct OnOffRates {
    double day_on, day_stay;
    double night_on, night_stay;
    int day_from, day_to;  // [from, to) hours using the day rates
};

TransitionTable hourly_table(const OnOffRates& r) {
    TransitionTable table(24);
    for (std::size_t h = 0; h < 24; ++h) {
        const bool day = static_cast<int>(h) >= r.day_from && static_cast<int>(h) < r.day_to;
        table.set(h, 0, day ? r.day_on : r.night_on);
        table.set(h, 1, day ? r.day_stay : r.night_stay);
    }
    return table;
}

struct ClassPreset {
    const char* label;
    const char* signature;
    const char* profile;
    double watts;
};

constexpr ClassPreset kOnOff[] = {
    {"lighting", "fluorescent", "lighting", 450.0},
    {"heater", "resistive", "heater", 1200.0},
    {"desk", "rectifier", "office", 250.0},
    {"boiler", "resistive", "office", 900.0},
};
constexpr ClassPreset kMultiState[] = {
    {"pump", "compressor", "pump", 900.0},
    {"elevator", "lift", "elevator", 1500.0},
    {"splitunit", "split", "office", 800.0},
    {"kitchen", "microwave", "office", 700.0},
};
constexpr ClassPreset kVarying[] = {
    {"hvac", "motor", "hvac", 6000.0},
    {"servers", "rectifier", "it", 4000.0},
    {"computers", "rectifier", "office", 3000.0},
    {"lights", "fluorescent", "lighting", 2500.0},
    {"ventilation", "motor", "constant", 1500.0},
};
constexpr ClassPreset kVaryingSig[] = {
    {"ahu", "vsd", "hvac", 8000.0},
    {"splits", "split", "office", 5000.0},
    {"lifts", "lift", "office", 3000.0},
    {"chiller", "compressor", "hvac", 6000.0},
};

constexpr std::array<std::array<int, 4>, 8> kShedMix = {{
    {4, 0, 2, 3},
    {1, 4, 2, 3},
    {0, 2, 2, 3},
    {2, 0, 4, 3},
    {0, 3, 4, 1},
    {3, 0, 3, 4},
    {0, 0, 3, 2},
    {0, 0, 4, 4},
}};

template <std::size_t M>
const ClassPreset& pick(const ClassPreset (&list)[M], std::size_t i) {
    return list[i % M];
}

std::vector<double> multistate_watts(double base, Index states) {
    std::vector<double> w;
    for (Index s = 1; s < states; ++s) w.push_back(base * (0.6 + 0.5 * static_cast<double>(s - 1)));
    return w;
}

}  // namespace

std::vector<std::string> signature_names() {
    return {"resistive", "rectifier", "motor", "fluorescent", "vsd", "split", "microwave", "lift", "compressor"};
}

Matrix signature_shape(std::string_view name, Index samples) {
    if (samples < 8) throw InvalidInput("signature library needs at least 8 samples per period");
    const Index n = samples;
    if (name == "resistive") return columns({harmonics(n, {{1, 1.0, 0.0}})});
    if (name == "rectifier") return columns({pulse(n, 6.0, 0.0)});
    if (name == "motor") return columns({harmonics(n, {{1, 1.0, -0.6}, {3, 0.08, 0.4}})});
    if (name == "fluorescent") return columns({harmonics(n, {{1, 1.0, 0.35}, {3, 0.25, 1.0}, {5, 0.12, 2.0}})});
    if (name == "vsd") {
        return columns({harmonics(n, {{1, 1.0, -0.15}, {5, 0.3, 0.0}}), pulse(n, 8.0, 0.1),
                        harmonics(n, {{1, 1.0, -0.4}, {7, 0.2, 0.5}})});
    }
    if (name == "split") {
        return columns({harmonics(n, {{1, 1.0, -0.6}, {3, 0.08, 0.4}}),
                        Vector(pulse(n, 5.0, 0.0) + harmonics(n, {{3, 0.1, 0.0}}))});
    }
    if (name == "microwave") {
        return columns({harmonics(n, {{1, 1.0, 0.0}, {3, 0.35, -0.5}}),
                        harmonics(n, {{1, 1.0, -0.3}, {2, 0.2, 0.0}})});
    }
    if (name == "lift") {
        return columns({harmonics(n, {{1, 1.0, -0.6}, {3, 0.08, 0.4}}), harmonics(n, {{1, 1.0, -1.0}, {5, 0.1, 0.0}}),
                        pulse(n, 4.0, 0.2)});
    }
    if (name == "compressor") {
        return columns({harmonics(n, {{1, 1.0, -0.7}, {3, 0.05, 0.0}}),
                        harmonics(n, {{1, 1.0, -0.2}, {3, 0.2, 0.8}})});
    }
    throw InvalidInput("unknown signature shape '" + std::string(name) + "'");
}

TransitionTable onoff_profile(std::string_view name) {
    if (name == "office") return hourly_table({0.02, 0.98, 0.002, 0.9, 8, 19});
    if (name == "lighting") return hourly_table({0.05, 0.995, 0.001, 0.95, 7, 20});
    if (name == "heater") return hourly_table({0.05, 0.95, 0.02, 0.9, 6, 20});
    if (name == "fridge") return hourly_table({0.0125, 0.975, 0.0125, 0.975, 0, 24});
    if (name == "kettle") return hourly_table({0.004, 0.75, 0.0004, 0.75, 7, 22});
    if (name == "washer") return hourly_table({0.001, 0.99, 0.0002, 0.99, 9, 21});
    if (name == "tv") return hourly_table({0.006, 0.995, 0.0002, 0.99, 18, 24});
    throw InvalidInput("unknown on/off profile '" + std::string(name) + "'");
}

MultiStateTable multistate_profile(std::string_view name, Index states) {
    if (states < 2) throw InvalidInput("multi-state profile needs at least two states");
    double day_start = 8, day_end = 19, day_on = 0.02, day_stay = 0.97, night_on = 0.002, night_stay = 0.9;
    if (name == "elevator") {
        day_on = 0.1;
        day_stay = 0.8;
        night_on = 0.005;
        night_stay = 0.6;
    } else if (name == "pump") {
        day_start = 6;
        day_end = 22;
        day_on = 0.01;
        day_stay = 0.99;
        night_on = 0.004;
        night_stay = 0.98;
    } else if (name != "office") {
        throw InvalidInput("unknown multi-state profile '" + std::string(name) + "'");
    }
    const Index on_states = states - 1;
    MultiStateTable table;
    for (int h = 0; h < 24; ++h) {
        const bool day = h >= day_start && h < day_end;
        const double on = day ? day_on : night_on;
        const double stay = day ? day_stay : night_stay;
        Matrix m = Matrix::Zero(states, states);
        m(0, 0) = 1.0 - on;
        for (Index s = 1; s < states; ++s) m(0, s) = on / static_cast<double>(on_states);
        for (Index s = 1; s < states; ++s) {
            const double leave = 1.0 - stay;
            if (on_states == 1) {
                m(s, 0) = leave;
            } else {
                m(s, 0) = 0.5 * leave;
                for (Index o = 1; o < states; ++o)
                    if (o != s) m(s, o) = 0.5 * leave / static_cast<double>(on_states - 1);
            }
            m(s, s) = stay;
        }
        table.transitions.push_back(std::move(m));
    }
    return table;
}

ActivationTemplate template_profile(std::string_view name, double peak_watts) {
    if (!(peak_watts >= 0.0) || !std::isfinite(peak_watts)) throw InvalidInput("template peak must be >= 0");
    std::function<double(double, bool)> shape;
    if (name == "office") {
        shape = [](double h, bool off) {
            if (off) return 0.15;
            return 0.15 + 0.85 * window(h, 7.0, 9.0, 18.0, 20.0) - 0.1 * window(h, 12.0, 12.75, 13.25, 14.0);
        };
    } else if (name == "hvac") {
        shape = [](double h, bool off) {
            if (off) return 0.1 + 0.05 * window(h, 10.0, 12.0, 16.0, 18.0);
            return 0.1 + 0.9 * window(h, 5.5, 7.5, 19.0, 21.0) * (0.8 + 0.2 * std::sin(kPi * (h - 8.0) / 11.0));
        };
    } else if (name == "it") {
        shape = [](double h, bool off) { return off ? 0.6 : 0.6 + 0.4 * window(h, 8.0, 9.5, 17.5, 19.0); };
    } else if (name == "lighting") {
        shape = [](double h, bool off) { return off ? 0.05 : 0.05 + 0.95 * window(h, 6.5, 7.5, 19.5, 20.5); };
    } else if (name == "constant") {
        shape = [](double, bool) { return 1.0; };
    } else {
        throw InvalidInput("unknown activation template '" + std::string(name) + "'");
    }
    ActivationTemplate tpl;
    tpl.device = std::string(name);
    constexpr std::size_t slots = 2880;
    tpl.values.resize(2 * slots);
    tpl.counts.assign(2 * slots, 0);
    for (std::size_t s = 0; s < slots; ++s) {
        const double h = (static_cast<double>(s) + 0.5) / 120.0;
        tpl.values[s] = peak_watts * std::max(0.0, shape(h, false));
        tpl.values[slots + s] = peak_watts * std::max(0.0, shape(h, true));
    }
    return tpl;
}

std::array<int, 4> shed_class_counts(std::size_t index) { return kShedMix.at(index); }

std::vector<BuildingSpec> shed_buildings(double span_seconds, Index samples_per_period) {
    std::vector<BuildingSpec> out;
    for (std::size_t b = 0; b < kShedMix.size(); ++b) {
        BuildingSpec spec;
        spec.name = "building_" + std::to_string(b + 1);
        spec.span_seconds = span_seconds;
        spec.samples_per_period = samples_per_period;
        spec.ground_truth = b < 6 ? GroundTruth::Power : GroundTruth::Current;
        const auto& mix = kShedMix[b];

        int number = 0;
        auto add_category = [&](char letter, const ClassPreset& p, std::size_t devices, auto make) {
            CategorySpec cat;
            cat.id = std::string(1, letter) + std::to_string(++number) + "_" + p.label;
            for (std::size_t d = 0; d < devices; ++d) {
                const double scale = 1.0 - 0.12 * static_cast<double>(d);
                cat.devices.push_back(make(p, scale));
            }
            spec.categories.push_back(std::move(cat));
        };

        for (int i = 0; i < mix[0]; ++i) {
            const std::size_t r = b + static_cast<std::size_t>(i);
            add_category('A', pick(kOnOff, r), 2 + r % 3, [&](const ClassPreset& p, double scale) {
                return DeviceSpec{DeviceClass::OnOff,
                                  SignatureTemplate::with_default_sigma(signature_shape(p.signature, samples_per_period)),
                                  OnOffActivation{onoff_profile(p.profile), TimePartition::hourly(), p.watts * scale}};
            });
        }
        for (int i = 0; i < mix[1]; ++i) {
            const std::size_t r = b + static_cast<std::size_t>(i);
            add_category('B', pick(kMultiState, r), 1 + r % 2, [&](const ClassPreset& p, double scale) {
                Matrix sig = signature_shape(p.signature, samples_per_period);
                const Index states = sig.cols() + 1;
                return DeviceSpec{DeviceClass::MultiState, SignatureTemplate::with_default_sigma(std::move(sig)),
                                  MultiStateActivation{multistate_profile(p.profile, states), TimePartition::hourly(),
                                                       multistate_watts(p.watts * scale, states)}};
            });
        }
        for (int i = 0; i < mix[2]; ++i) {
            const std::size_t r = b + static_cast<std::size_t>(i);
            add_category('C', pick(kVarying, r), 1 + r % 3, [&](const ClassPreset& p, double scale) {
                ComplexActivation act;
                act.tpl = template_profile(p.profile, p.watts * scale);
                return DeviceSpec{DeviceClass::VaryingLoad,
                                  SignatureTemplate::with_default_sigma(signature_shape(p.signature, samples_per_period)),
                                  std::move(act)};
            });
        }
        for (int i = 0; i < mix[3]; ++i) {
            const std::size_t r = b + static_cast<std::size_t>(i);
            add_category('D', pick(kVaryingSig, r), 1 + r % 2, [&](const ClassPreset& p, double scale) {
                Matrix sig = signature_shape(p.signature, samples_per_period);
                MultiSigActivation act;
                act.tpl = template_profile(p.profile, p.watts * scale);
                act.alpha.assign(static_cast<std::size_t>(sig.cols()), 2.0);
                return DeviceSpec{DeviceClass::VaryingSignature, SignatureTemplate::with_default_sigma(std::move(sig)),
                                  std::move(act)};
            });
        }
        out.push_back(std::move(spec));
    }
    return out;
}

BuildingSpec residential_building(double span_seconds, Index samples_per_period) {
    BuildingSpec spec;
    spec.name = "residential";
    spec.span_seconds = span_seconds;
    spec.samples_per_period = samples_per_period;
    struct Appliance {
        const char* id;
        const char* signature;
        const char* profile;
        double watts;
    };
    constexpr Appliance appliances[] = {
        {"fridge", "motor", "fridge", 120.0},       {"kettle", "resistive", "kettle", 2000.0},
        {"washer", "motor", "washer", 500.0},       {"tv", "rectifier", "tv", 150.0},
        {"lighting", "fluorescent", "tv", 60.0},
    };
    for (const auto& a : appliances) {
        CategorySpec cat;
        cat.id = a.id;
        cat.devices.push_back(DeviceSpec{
            DeviceClass::OnOff, SignatureTemplate::with_default_sigma(signature_shape(a.signature, samples_per_period)),
            OnOffActivation{onoff_profile(a.profile), TimePartition::hourly(), a.watts}});
        spec.categories.push_back(std::move(cat));
    }
    return spec;
}

}  // namespace loadforge::library
