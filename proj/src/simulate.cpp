#include "loadforge/simulate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "loadforge/errors.hpp"
#include "loadforge/factorize.hpp"
#include "loadforge/io.hpp"
#include "loadforge/stats.hpp"

namespace loadforge {

namespace {

constexpr std::uint64_t kSignatureStream = 0;
constexpr std::uint64_t kActivationStream = 1;
constexpr std::uint64_t kNoiseStream = 0;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string generator_name(const ActivationModel& m) {
    return std::visit(overloaded{[](const OnOffActivation&) { return std::string("onoff"); },
                                 [](const MultiStateActivation&) { return std::string("multistate"); },
                                 [](const ComplexActivation&) { return std::string("complex"); },
                                 [](const MultiSigActivation&) { return std::string("multisig"); }},
                      m);
}

std::string safe_id(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        out += ok ? c : '_';
    }
    return out;
}

}  // namespace

char class_letter(DeviceClass c) noexcept {
    switch (c) {
        case DeviceClass::OnOff: return 'A';
        case DeviceClass::MultiState: return 'B';
        case DeviceClass::VaryingLoad: return 'C';
        case DeviceClass::VaryingSignature: return 'D';
    }
    return '?';
}

DeviceClass parse_device_class(std::string_view text) {
    if (text == "A" || text == "a") return DeviceClass::OnOff;
    if (text == "B" || text == "b") return DeviceClass::MultiState;
    if (text == "C" || text == "c") return DeviceClass::VaryingLoad;
    if (text == "D" || text == "d") return DeviceClass::VaryingSignature;
    throw InvalidInput("unknown device class '" + std::string(text) + "' (expected A, B, C or D)");
}

void DeviceSpec::validate(Index samples_per_period) const {
    const Index k = components();
    if (k < 1) throw InvalidInput("device has no signature components");
    if (signature.templ.rows() != samples_per_period) {
        throw InvalidInput("device signature has " + std::to_string(signature.templ.rows()) +
                           " samples per period, building uses " + std::to_string(samples_per_period));
    }
    const std::string label = std::string("class ") + class_letter(device_class) + " device";
    switch (device_class) {
        case DeviceClass::OnOff:
            if (k != 1 || !std::holds_alternative<OnOffActivation>(activation))
                throw InvalidInput(label + " needs K = 1 and an on/off generator");
            break;
        case DeviceClass::MultiState: {
            const auto* m = std::get_if<MultiStateActivation>(&activation);
            if (k < 2 || !m) throw InvalidInput(label + " needs K > 1 and a multi-state generator");
            if (static_cast<Index>(m->watts.size()) != k || m->table.states() != k + 1)
                throw InvalidInput(label + ": state count must equal the signature count");
            break;
        }
        case DeviceClass::VaryingLoad:
            if (k != 1 || !std::holds_alternative<ComplexActivation>(activation))
                throw InvalidInput(label + " needs K = 1 and a template generator");
            break;
        case DeviceClass::VaryingSignature: {
            const auto* m = std::get_if<MultiSigActivation>(&activation);
            if (k < 2 || !m) throw InvalidInput(label + " needs K > 1 and a Dirichlet-mixed template generator");
            if (static_cast<Index>(m->alpha.size()) != k)
                throw InvalidInput(label + ": Dirichlet parameter count must equal the signature count");
            break;
        }
    }
}

Timeline BuildingSpec::timeline() const {
    const auto steps = static_cast<std::size_t>(std::floor(span_seconds / cadence + 1e-9));
    return Timeline{start, cadence, steps};
}

void BuildingSpec::validate() const {
    if (categories.empty()) throw InvalidInput("building '" + name + "' has no categories");
    if (samples_per_period < 2) throw InvalidInput("building '" + name + "': N must be at least 2");
    if (!(cadence > 0.0)) throw InvalidInput("building '" + name + "': cadence must be positive");
    if (!(span_seconds >= cadence)) throw InvalidInput("building '" + name + "': span shorter than one cadence step");
    if (!(mains.rms > 0.0)) throw InvalidInput("building '" + name + "': mains RMS must be positive");
    if (noise_std && !(*noise_std >= 0.0)) throw InvalidInput("building '" + name + "': noise_std must be >= 0");
    for (const auto& cat : categories) {
        if (cat.devices.empty()) throw InvalidInput("category '" + cat.id + "' has no devices");
        for (const auto& dev : cat.devices) dev.validate(samples_per_period);
    }
}

Vector voltage_waveform(double rms, Index samples) {
    if (samples < 2) throw InvalidInput("voltage waveform needs at least 2 samples");
    Vector v(samples);
    const double peak = rms * std::numbers::sqrt2;
    for (Index n = 0; n < samples; ++n) {
        v(n) = peak * std::sin(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(samples));
    }
    return v;
}

DeviceTrace synthesize_device(const DeviceSpec& spec, const Vector& v0, const Timeline& timeline,
                              std::uint64_t seed) {
    spec.validate(v0.size());
    DeviceTrace trace;
    trace.signatures =
        normalize_signatures(sample_signature(spec.signature, derive_seed(seed, kSignatureStream)), v0);
    const std::uint64_t act_seed = derive_seed(seed, kActivationStream);
    const auto cols = static_cast<Index>(timeline.length);

    trace.activations = std::visit(
        overloaded{
            [&](const OnOffActivation& m) -> Matrix {
                const auto states = sample_onoff(m.table, m.partition, timeline, act_seed);
                Matrix a(1, cols);
                for (Index t = 0; t < cols; ++t) a(0, t) = states[static_cast<std::size_t>(t)] ? m.watts : 0.0;
                return a;
            },
            [&](const MultiStateActivation& m) -> Matrix {
                return sample_multistate_activation(m.table, m.watts, m.partition, timeline, act_seed);
            },
            [&](const ComplexActivation& m) -> Matrix {
                const auto a = sample_complex_activation(m.tpl, m.arma, m.partition, timeline, act_seed);
                return Eigen::Map<const Eigen::RowVectorXd>(a.data(), cols);
            },
            [&](const MultiSigActivation& m) -> Matrix {
                return sample_multisig_activation(m.tpl, m.arma, m.alpha, m.partition, timeline, act_seed,
                                                  m.redraw_daily);
            }},
        spec.activation);
    return trace;
}

Matrix CategoryTrace::current() const {
    Matrix out = Matrix::Zero(devices.front().signatures.rows(), devices.front().activations.cols());
    for (const auto& d : devices) out.noalias() += d.signatures * d.activations;
    return out;
}

PowerSeries SimulatedDataset::total_power() const {
    return power_from_current(total, voltage, timeline.start, timeline.interval);
}

PowerSeries SimulatedDataset::category_power(std::size_t c) const {
    const Vector& p = categories.at(c).power;
    return PowerSeries(timeline.start, timeline.interval, std::vector<double>(p.data(), p.data() + p.size()));
}

SimulatedDataset synthesize_building(const BuildingSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Timeline timeline = spec.timeline();
    const Vector v0 = voltage_waveform(spec.mains.rms, spec.samples_per_period);
    const auto cols = static_cast<Index>(timeline.length);

    std::vector<CategoryTrace> cats;
    Matrix clean = Matrix::Zero(spec.samples_per_period, cols);
    for (std::size_t c = 0; c < spec.categories.size(); ++c) {
        const auto& cs = spec.categories[c];
        const std::uint64_t cat_seed = derive_seed(seed, c + 1);
        CategoryTrace trace;
        trace.id = cs.id;
        trace.power = Vector::Zero(cols);
        for (std::size_t d = 0; d < cs.devices.size(); ++d) {
            trace.devices.push_back(synthesize_device(cs.devices[d], v0, timeline, derive_seed(cat_seed, d)));
            trace.power += trace.devices.back().activations.colwise().sum().transpose();
        }
        clean += trace.current();
        cats.push_back(std::move(trace));
    }

    const double noise_std = spec.noise_std ? *spec.noise_std : 1e-3 * clean.cwiseAbs().maxCoeff();
    Matrix total = clean;
    if (noise_std > 0.0) {
        Rng rng(derive_seed(seed, kNoiseStream));
        std::normal_distribution<double> gauss(0.0, noise_std);
        for (Index t = 0; t < cols; ++t)
            for (Index n = 0; n < total.rows(); ++n) total(n, t) += gauss(rng);
    }
    Matrix noise = total - clean;

    return SimulatedDataset{timeline, v0, CurrentMatrix(std::move(total)), std::move(noise), noise_std,
                            std::move(cats)};
}

nlohmann::ordered_json describe(const BuildingSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    j["start"] = spec.start;
    j["span_seconds"] = spec.span_seconds;
    j["cadence_seconds"] = spec.cadence;
    j["samples_per_period"] = spec.samples_per_period;
    j["mains"] = {{"rms", spec.mains.rms}, {"hz", spec.mains.hz}};
    j["ground_truth"] = spec.ground_truth == GroundTruth::Power ? "power" : "current";
    if (spec.noise_std) j["noise_std"] = *spec.noise_std;
    auto& cats = j["categories"] = nlohmann::ordered_json::array();
    for (const auto& c : spec.categories) {
        nlohmann::ordered_json cj;
        cj["id"] = c.id;
        cj["devices"] = nlohmann::ordered_json::array();
        for (const auto& d : c.devices) {
            cj["devices"].push_back({{"class", std::string(1, class_letter(d.device_class))},
                                     {"components", d.components()},
                                     {"sigma", d.signature.sigma},
                                     {"generator", generator_name(d.activation)}});
        }
        cats.push_back(cj);
    }
    return j;
}

Manifest emit_shed(const std::vector<BuildingSpec>& specs, const std::filesystem::path& out_dir,
                   std::uint64_t root_seed, const std::string& config_hash) {
    if (specs.empty()) throw InvalidInput("emit_shed: no buildings to generate");
    for (const auto& s : specs) s.validate();

    Manifest top;
    top.command = "generate";
    top.config_hash = config_hash;
    top.seeds["root"] = root_seed;
    std::size_t category_total = 0;
    auto& buildings = top.details["buildings"] = nlohmann::ordered_json::array();

    for (std::size_t b = 0; b < specs.size(); ++b) {
        const auto& spec = specs[b];
        const std::string dir = "building_" + std::to_string(b + 1);
        const std::filesystem::path bdir = out_dir / dir;
        std::filesystem::create_directories(bdir);
        const std::uint64_t seed = derive_seed(root_seed, b);
        const SimulatedDataset data = synthesize_building(spec, seed);

        Manifest bm;
        bm.command = "generate";
        bm.config_hash = config_hash;
        bm.seeds["building"] = seed;

        {
            std::ostringstream ss;
            io::write_current_matrix(ss, data.total);
            io::write_file(bdir / "total_current.csv", ss.str());
            bm.add_file(bdir, "total_current.csv");
        }
        for (std::size_t c = 0; c < data.categories.size(); ++c) {
            std::ostringstream ss;
            std::string file = "cat_" + safe_id(data.categories[c].id);
            if (spec.ground_truth == GroundTruth::Power) {
                io::write_power_series(ss, data.category_power(c));
                file += "_power.csv";
            } else {
                io::write_current_matrix(ss, CurrentMatrix(data.categories[c].current()));
                file += "_current.csv";
            }
            io::write_file(bdir / file, ss.str());
            bm.add_file(bdir, file);
        }
        bm.details["building"] = describe(spec);
        bm.details["noise_std"] = data.noise_std;
        bm.details["periods"] = data.timeline.length;
        bm.details["category_count"] = spec.categories.size();
        bm.write(bdir / "manifest.json");

        for (const auto& [rel, sum] : bm.files) top.files[dir + "/" + rel] = sum;
        top.add_file(out_dir, dir + "/manifest.json");
        top.seeds[dir] = seed;
        category_total += spec.categories.size();
        buildings.push_back({{"directory", dir}, {"name", spec.name}, {"categories", spec.categories.size()}});
    }
    top.details["category_count"] = category_total;
    top.write(out_dir / "manifest.json");
    return top;
}

}  // namespace loadforge
