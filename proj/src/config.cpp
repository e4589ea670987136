#include "loadforge/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "loadforge/errors.hpp"
#include "loadforge/io.hpp"
#include "loadforge/library.hpp"
#include "loadforge/manifest.hpp"

namespace loadforge {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw InvalidInput("config " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) fail(where, "unknown key '" + key + "'");
    }
}

double number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(where, "missing " + key);
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where + "." + key, "must be finite");
    return d;
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(where, "missing " + key);
    const json& v = obj.at(key);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(where, "missing " + key);
    const json& v = obj.at(key);
    if (!v.is_array()) fail(where + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(where + "." + key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

bool boolean_or(const json& obj, const std::string& key, const std::string& where, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(where + "." + key, "expected true or false");
    return obj.at(key).get<bool>();
}

// Scalars a building inherits from the document and may override.
struct Scalars {
    double span_days = 7.0;
    double start = 1514764800.0;
    double cadence = 30.0;
    Index samples = 200;
    Mains mains;
    DayCalendar calendar;
    std::optional<double> noise_std;
};

void read_scalars(const json& obj, const std::string& where, Scalars& s) {
    if (obj.contains("span_days")) {
        s.span_days = number(obj, "span_days", where);
        if (!(s.span_days > 0.0)) fail(where + ".span_days", "must be positive");
    }
    if (obj.contains("start")) {
        const json& v = obj.at("start");
        if (v.is_string()) {
            s.start = static_cast<double>(DayCalendar::parse_date(v.get<std::string>())) * 86400.0;
        } else {
            s.start = number(obj, "start", where);
        }
    }
    if (obj.contains("cadence_seconds")) s.cadence = number(obj, "cadence_seconds", where);
    if (obj.contains("samples_per_period")) {
        const double n = number(obj, "samples_per_period", where);
        if (n != std::floor(n) || n < 8) fail(where + ".samples_per_period", "must be an integer >= 8");
        s.samples = static_cast<Index>(n);
    }
    if (obj.contains("mains")) {
        const json& m = obj.at("mains");
        check_keys(m, where + ".mains", {"rms", "hz", "phase"});
        s.mains.rms = number_or(m, "rms", where + ".mains", s.mains.rms);
        s.mains.hz = number_or(m, "hz", where + ".mains", s.mains.hz);
        if (m.contains("phase")) {
            const std::string phase = text(m, "phase", where + ".mains");
            if (phase != "single") fail(where + ".mains.phase", "only single-phase networks are supported");
        }
    }
    if (obj.contains("weekends_off") || obj.contains("holidays")) {
        DayCalendar cal(boolean_or(obj, "weekends_off", where, s.calendar.weekends_off()));
        for (auto day : s.calendar.holidays()) cal.add_holiday(day);
        if (obj.contains("holidays")) {
            const json& h = obj.at("holidays");
            if (!h.is_array()) fail(where + ".holidays", "expected an array of YYYY-MM-DD dates");
            for (const auto& d : h) {
                if (!d.is_string()) fail(where + ".holidays", "expected an array of YYYY-MM-DD dates");
                cal.add_holiday(DayCalendar::parse_date(d.get<std::string>()));
            }
        }
        s.calendar = cal;
    }
    if (obj.contains("noise_std")) {
        s.noise_std = number(obj, "noise_std", where);
        if (*s.noise_std < 0.0) fail(where + ".noise_std", "must be >= 0");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
    std::filesystem::path p(file);
    return p.is_absolute() || base.empty() ? p : base / p;
}

ArmaParams read_arma(const json& obj, const std::string& where) {
    if (!obj.contains("arma")) return ArmaParams::defaults();
    const json& a = obj.at("arma");
    const std::string w = where + ".arma";
    check_keys(a, w, {"phi", "theta", "sigma_w", "marginal_std"});
    std::vector<double> phi = a.contains("phi") ? numbers(a, "phi", w) : std::vector<double>{};
    std::vector<double> theta = a.contains("theta") ? numbers(a, "theta", w) : std::vector<double>{};
    if (a.contains("sigma_w") == a.contains("marginal_std")) fail(w, "give exactly one of sigma_w, marginal_std");
    ArmaParams p;
    if (a.contains("sigma_w")) {
        p = ArmaParams{std::move(phi), std::move(theta), number(a, "sigma_w", w)};
    } else {
        p = ArmaParams::with_marginal_std(std::move(phi), std::move(theta), number(a, "marginal_std", w));
    }
    p.validate();
    return p;
}

TimePartition partition_for(PartitionKind kind, const DayCalendar& cal) {
    switch (kind) {
        case PartitionKind::Single: return TimePartition::single();
        case PartitionKind::Hourly: return TimePartition::hourly();
        case PartitionKind::HalfMinuteDaytype: return TimePartition::halfminute_daytype(cal);
    }
    return TimePartition::hourly();
}

std::pair<ActivationTemplate, TimePartition> read_template(const json& act, const std::string& where,
                                                          const Scalars& s, const std::filesystem::path& base) {
    if (act.contains("file") == act.contains("profile")) fail(where, "give exactly one of profile, file");
    if (act.contains("profile")) {
        if (!act.contains("peak_watts")) fail(where, "profile templates need peak_watts");
        return {library::template_profile(text(act, "profile", where), number(act, "peak_watts", where)),
                TimePartition::halfminute_daytype(s.calendar)};
    }
    std::istringstream in(io::read_file(resolve(base, text(act, "file", where))));
    PartitionKind kind = PartitionKind::HalfMinuteDaytype;
    ActivationTemplate tpl = io::read_activation_template(in, &kind);
    if (act.contains("peak_watts")) fail(where, "peak_watts only applies to profile templates");
    return {std::move(tpl), partition_for(kind, s.calendar)};
}

DeviceSpec read_device(const json& d, const std::string& where, const Scalars& s, const std::filesystem::path& base) {
    check_keys(d, where, {"class", "count", "signature", "sigma", "sigma_rel", "activation"});
    if (!d.contains("signature")) fail(where, "missing signature");
    if (!d.contains("activation")) fail(where, "missing activation");

    const json& sj = d.at("signature");
    const std::string sw = where + ".signature";
    check_keys(sj, sw, {"shape", "file"});
    Matrix templ;
    if (sj.contains("shape") == sj.contains("file")) fail(sw, "give exactly one of shape, file");
    if (sj.contains("shape")) {
        templ = library::signature_shape(text(sj, "shape", sw), s.samples);
    } else {
        templ = io::load_factor_model(resolve(base, text(sj, "file", sw))).signatures;
    }
    SignatureTemplate sig = SignatureTemplate::with_default_sigma(templ);
    if (d.contains("sigma") && d.contains("sigma_rel")) fail(where, "give at most one of sigma, sigma_rel");
    if (d.contains("sigma")) sig.sigma = number(d, "sigma", where);
    if (d.contains("sigma_rel")) sig.sigma = sig.sigma * 100.0 * number(d, "sigma_rel", where);
    if (!(sig.sigma >= 0.0)) fail(where, "signature sigma must be >= 0");

    const json& act = d.at("activation");
    const std::string aw = where + ".activation";
    if (!act.is_object() || !act.contains("type")) fail(aw, "missing type");
    const std::string type = text(act, "type", aw);
    DeviceSpec spec;
    spec.signature = std::move(sig);
    if (type == "onoff") {
        check_keys(act, aw, {"type", "profile", "table", "watts"});
        if (act.contains("profile") == act.contains("table")) fail(aw, "give exactly one of profile, table");
        OnOffActivation a;
        if (act.contains("profile")) {
            a.table = library::onoff_profile(text(act, "profile", aw));
        } else {
            std::istringstream in(io::read_file(resolve(base, text(act, "table", aw))));
            PartitionKind kind = PartitionKind::Hourly;
            a.table = io::read_transition_table(in, &kind);
            a.partition = partition_for(kind, s.calendar);
        }
        a.watts = number(act, "watts", aw);
        if (!(a.watts >= 0.0)) fail(aw + ".watts", "must be >= 0");
        spec.device_class = DeviceClass::OnOff;
        spec.activation = std::move(a);
    } else if (type == "multistate") {
        check_keys(act, aw, {"type", "profile", "watts"});
        MultiStateActivation a;
        a.watts = numbers(act, "watts", aw);
        a.table = library::multistate_profile(text(act, "profile", aw), static_cast<Index>(a.watts.size()) + 1);
        spec.device_class = DeviceClass::MultiState;
        spec.activation = std::move(a);
    } else if (type == "template") {
        check_keys(act, aw, {"type", "profile", "file", "peak_watts", "arma"});
        auto [tpl, part] = read_template(act, aw, s, base);
        spec.device_class = DeviceClass::VaryingLoad;
        spec.activation = ComplexActivation{std::move(tpl), std::move(part), read_arma(act, aw)};
    } else if (type == "multisig") {
        check_keys(act, aw, {"type", "profile", "file", "peak_watts", "arma", "alpha", "redraw_daily"});
        auto [tpl, part] = read_template(act, aw, s, base);
        MultiSigActivation a{std::move(tpl), std::move(part), read_arma(act, aw), {}, false};
        a.alpha = act.contains("alpha") ? numbers(act, "alpha", aw)
                                        : std::vector<double>(static_cast<std::size_t>(templ.cols()), 2.0);
        a.redraw_daily = boolean_or(act, "redraw_daily", aw, false);
        spec.device_class = DeviceClass::VaryingSignature;
        spec.activation = std::move(a);
    } else {
        fail(aw + ".type", "unknown activation type '" + type + "' (onoff, multistate, template, multisig)");
    }
    if (d.contains("class")) spec.device_class = parse_device_class(text(d, "class", where));
    return spec;
}

void apply_scalars(BuildingSpec& spec, const Scalars& s) {
    spec.span_seconds = s.span_days * 86400.0;
    spec.start = s.start;
    spec.cadence = s.cadence;
    spec.samples_per_period = s.samples;
    spec.mains = s.mains;
    if (s.noise_std) spec.noise_std = s.noise_std;
    for (auto& cat : spec.categories) {
        for (auto& dev : cat.devices) {
            std::visit(
                [&](auto& a) {
                    if (a.partition.kind() == PartitionKind::HalfMinuteDaytype)
                        a.partition = TimePartition::halfminute_daytype(s.calendar);
                },
                dev.activation);
        }
    }
}

std::vector<BuildingSpec> expand_preset(const std::string& name, const std::string& where, const Scalars& s) {
    const double span = s.span_days * 86400.0;
    if (name == "shed") return library::shed_buildings(span, s.samples);
    if (name == "residential") return {library::residential_building(span, s.samples)};
    if (name.rfind("shed:", 0) == 0) {
        const std::string idx = name.substr(5);
        if (idx.size() == 1 && idx[0] >= '1' && idx[0] <= '8')
            return {library::shed_buildings(span, s.samples)[static_cast<std::size_t>(idx[0] - '1')]};
    }
    fail(where + ".preset", "unknown preset '" + name + "' (shed, shed:<1-8>, residential)");
}

BuildingSpec read_building(const json& b, const std::string& where, Scalars s, const std::filesystem::path& base) {
    check_keys(b, where, {"name", "preset", "categories", "ground_truth", "span_days", "start", "cadence_seconds",
                          "samples_per_period", "mains", "holidays", "weekends_off", "noise_std"});
    read_scalars(b, where, s);
    BuildingSpec spec;
    if (b.contains("preset") == b.contains("categories")) fail(where, "give exactly one of preset, categories");
    if (b.contains("preset")) {
        spec = expand_preset(text(b, "preset", where), where, s).front();
    } else {
        const json& cats = b.at("categories");
        if (!cats.is_array() || cats.empty()) fail(where + ".categories", "expected a non-empty array");
        for (std::size_t c = 0; c < cats.size(); ++c) {
            const std::string cw = where + ".categories[" + std::to_string(c) + "]";
            check_keys(cats[c], cw, {"id", "devices"});
            CategorySpec cat;
            cat.id = cats[c].contains("id") ? text(cats[c], "id", cw) : "cat" + std::to_string(c + 1);
            if (!cats[c].contains("devices") || !cats[c].at("devices").is_array() || cats[c].at("devices").empty())
                fail(cw + ".devices", "expected a non-empty array");
            const json& devs = cats[c].at("devices");
            for (std::size_t d = 0; d < devs.size(); ++d) {
                const std::string dw = cw + ".devices[" + std::to_string(d) + "]";
                double count = devs[d].contains("count") ? number(devs[d], "count", dw) : 1.0;
                if (count < 1 || count != std::floor(count)) fail(dw + ".count", "must be a positive integer");
                DeviceSpec dev = read_device(devs[d], dw, s, base);
                for (int i = 0; i < static_cast<int>(count); ++i) cat.devices.push_back(dev);
            }
            spec.categories.push_back(std::move(cat));
        }
    }
    if (b.contains("name")) spec.name = text(b, "name", where);
    if (b.contains("ground_truth")) {
        const std::string gt = text(b, "ground_truth", where);
        if (gt == "power") {
            spec.ground_truth = GroundTruth::Power;
        } else if (gt == "current") {
            spec.ground_truth = GroundTruth::Current;
        } else {
            fail(where + ".ground_truth", "expected power or current");
        }
    }
    apply_scalars(spec, s);
    try {
        spec.validate();
    } catch (const InvalidInput& e) {
        fail(where, e.what());
    }
    return spec;
}

}  // namespace

std::string GenerateConfig::hash() const { return sha256_hex(canonical); }

GenerateConfig parse_generate_config(std::string_view text_in, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text_in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    const std::string where = "$";
    check_keys(doc, where, {"seed", "span_days", "start", "cadence_seconds", "samples_per_period", "mains",
                            "holidays", "weekends_off", "noise_std", "preset", "buildings"});
    GenerateConfig cfg;
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) fail(where + ".seed", "expected a nonnegative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    Scalars s;
    read_scalars(doc, where, s);
    if (doc.contains("preset")) {
        for (auto& b : expand_preset(text(doc, "preset", where), where, s)) {
            apply_scalars(b, s);
            cfg.buildings.push_back(std::move(b));
        }
    }
    if (doc.contains("buildings")) {
        const json& bs = doc.at("buildings");
        if (!bs.is_array()) fail(where + ".buildings", "expected an array");
        for (std::size_t i = 0; i < bs.size(); ++i)
            cfg.buildings.push_back(read_building(bs[i], where + ".buildings[" + std::to_string(i) + "]", s, base_dir));
    }
    if (cfg.buildings.empty()) fail(where, "no buildings (set preset or buildings)");
    doc.erase("seed");
    cfg.canonical = doc.dump();
    return cfg;
}

GenerateConfig load_generate_config(const std::filesystem::path& path) {
    return parse_generate_config(io::read_file(path), path.parent_path());
}

GenerateConfig preset_config(std::string_view name, double span_days) {
    json doc = {{"preset", std::string(name)}, {"span_days", span_days}};
    return parse_generate_config(doc.dump());
}

}  // namespace loadforge
