#include "loadforge/cli.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadforge/config.hpp"
#include "loadforge/errors.hpp"
#include "loadforge/genmodel.hpp"
#include "loadforge/io.hpp"
#include "loadforge/manifest.hpp"
#include "loadforge/simulate.hpp"
#include "loadforge/stats.hpp"

namespace loadforge::cli {

namespace {

std::uint64_t effective_seed(const RunConfig& cfg, std::optional<std::uint64_t> fallback, std::ostream& err) {
    if (cfg.seed) return *cfg.seed;
    if (fallback) return *fallback;
    err << "loadforge: no seed given, using 0\n";
    return 0;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
    return std::filesystem::path(output.string() + ".manifest.json");
}

// Writes `content` to `output` and a sibling manifest describing it.
void emit(const std::filesystem::path& output, const std::string& content, Manifest manifest) {
    io::write_file(output, content);
    manifest.add_file(output.parent_path(), output.filename());
    manifest.write(manifest_path(output));
}

std::string hash_options(const nlohmann::ordered_json& options) { return sha256_hex(options.dump()); }

int run_learn(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.output.empty()) throw InvalidInput("learn: --out is required");
    const auto current = std::get<CurrentMatrix>(ingest(cfg.input, DataKind::Current));
    const Vector v0 = voltage_waveform(cfg.mains_rms, current.samples_per_period());

    SolverOptions opts = cfg.solver;
    opts.seed = effective_seed(cfg, std::nullopt, err);
    FactorModel model;
    if (cfg.k) {
        model = train_category(current, *cfg.k, v0, opts);
    } else {
        const Index cap = std::min({cfg.k_max, current.samples_per_period(), current.num_periods()});
        model = select_k(current, cfg.snr_target, cap, opts);
        normalize_model(model, v0);
        if (model.report.below_target) {
            err << "loadforge: no k <= " << cap << " reached " << cfg.snr_target << " dB; keeping k = " << model.k()
                << "\n";
        }
    }
    const double snr = reconstruction_snr(current, model);

    std::ostringstream text;
    io::write_factor_model(text, model);

    nlohmann::ordered_json options{{"k", cfg.k ? std::to_string(*cfg.k) : std::string("auto")},
                                   {"snr_target", cfg.snr_target},
                                   {"k_max", cfg.k_max},
                                   {"rel_tol", opts.rel_tol},
                                   {"max_iters", opts.max_iters},
                                   {"mains_rms", cfg.mains_rms},
                                   {"input_sha256", sha256_file(cfg.input)}};
    Manifest m;
    m.command = "learn";
    m.config_hash = hash_options(options);
    m.seeds["solver"] = opts.seed;
    m.details["options"] = options;
    m.details["k"] = model.k();
    m.details["snr_db"] = io::format_value(snr);
    m.details["iterations"] = model.report.iterations;
    m.details["converged"] = model.report.converged;
    m.details["below_target"] = model.report.below_target;
    m.details["pruned"] = model.report.pruned;
    emit(cfg.output, text.str(), std::move(m));

    out << "k=" << model.k() << " snr_db=" << io::format_value(snr) << " iterations=" << model.report.iterations
        << "\n";
    return kOk;
}

void report_row(std::ostream& csv, const std::string& metric, double interval, double value) {
    csv << metric << ',' << io::format_value(interval) << ',' << io::format_value(value) << '\n';
}

int run_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    const Dataset data = ingest(cfg.input, cfg.kind);
    std::optional<PowerSeries> power;
    std::vector<double> thd_values;
    if (const auto* current = std::get_if<CurrentMatrix>(&data)) {
        const Vector v0 = voltage_waveform(cfg.mains_rms, current->samples_per_period());
        power = power_from_current(*current, v0, 0.0, cfg.cadence);
        thd_values = thd(*current);
    } else {
        power = std::get<PowerSeries>(data);
    }

    std::vector<double> intervals = cfg.resample_seconds;
    if (intervals.empty()) intervals.push_back(power->interval());
    MetricReport report = compute_metrics(*power, intervals);
    report.thd_percent = thd_values;

    std::ostringstream csv;
    csv << "metric,interval_seconds,value\n";
    report_row(csv, "kurtosis", report.base_interval, report.kurtosis);
    report_row(csv, "entropy", report.base_interval, report.entropy);
    report_row(csv, "laplace_scale", report.base_interval, report.laplace_scale);
    for (const auto& [interval, acf] : report.acf_1day) report_row(csv, "acf_1day", interval, acf);
    if (!thd_values.empty()) {
        std::vector<double> finite;
        for (double v : thd_values)
            if (std::isfinite(v)) finite.push_back(v);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double cadence = power->interval();
        report_row(csv, "thd_median", cadence, finite.empty() ? nan : quantile(finite, 0.5));
        report_row(csv, "thd_p05", cadence, finite.empty() ? nan : quantile(finite, 0.05));
        report_row(csv, "thd_p95", cadence, finite.empty() ? nan : quantile(finite, 0.95));
    }

    nlohmann::ordered_json options{{"kind", cfg.kind == DataKind::Current ? "current" : "power"},
                                   {"resample_seconds", intervals},
                                   {"mains_rms", cfg.mains_rms},
                                   {"cadence", cfg.cadence},
                                   {"input_sha256", sha256_file(cfg.input)}};
    if (!cfg.output.empty()) {
        Manifest m;
        m.command = "analyze";
        m.config_hash = hash_options(options);
        m.details["options"] = options;
        emit(cfg.output, csv.str(), std::move(m));
        if (!thd_values.empty()) {
            std::ostringstream per_period;
            per_period << "period,thd_percent\n";
            for (std::size_t t = 0; t < thd_values.size(); ++t)
                per_period << t << ',' << io::format_value(thd_values[t]) << '\n';
            const std::filesystem::path thd_path = cfg.output.string() + ".thd.csv";
            Manifest tm;
            tm.command = "analyze";
            tm.config_hash = hash_options(options);
            emit(thd_path, per_period.str(), std::move(tm));
        }
    }
    out << csv.str();
    return kOk;
}

int run_infer(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    if (cfg.output.empty()) throw InvalidInput("infer-activations: --out is required");
    const auto power = std::get<PowerSeries>(ingest(cfg.input, DataKind::Power));
    DayCalendar calendar;
    for (const auto& h : cfg.holidays) calendar.add_holiday(DayCalendar::parse_date(h));

    std::ostringstream text;
    nlohmann::ordered_json options{{"partition", ""}, {"input_sha256", sha256_file(cfg.input)}};
    Manifest m;
    m.command = "infer-activations";
    if (cfg.partition == PartitionKind::HalfMinuteDaytype) {
        const TimePartition part = TimePartition::halfminute_daytype(calendar);
        options["partition"] = part.name();
        options["holidays"] = cfg.holidays;
        const ActivationTemplate tpl = learn_template(power, part);
        io::write_activation_template(text, tpl, part);
        std::size_t empty = 0;
        for (auto c : tpl.counts) empty += c == 0;
        m.details["unobserved_subsets"] = empty;
        out << "template subsets=" << tpl.values.size() << " unobserved=" << empty << "\n";
    } else {
        const TimePartition part =
            cfg.partition == PartitionKind::Single ? TimePartition::single() : TimePartition::hourly();
        options["partition"] = part.name();
        options["threshold"] = cfg.threshold;
        const auto states = threshold_onoff(power, cfg.threshold);
        const TransitionTable table = infer_transitions(states, timeline_of(power), part);
        io::write_transition_table(text, table, part);
        nlohmann::ordered_json smoothed = nlohmann::ordered_json::array();
        for (std::size_t tau = 0; tau < table.size(); ++tau)
            for (int j = 0; j < 2; ++j)
                if (table.smoothed(tau, j)) smoothed.push_back({{"tau", tau}, {"prev", j}});
        m.details["smoothed"] = smoothed;
        out << "transition subsets=" << table.size() << " smoothed=" << smoothed.size() << "\n";
    }
    m.config_hash = hash_options(options);
    m.details["options"] = options;
    emit(cfg.output, text.str(), std::move(m));
    return kOk;
}

int run_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.output.empty()) throw InvalidInput("generate: --out is required");
    GenerateConfig gen;
    if (!cfg.config.empty()) {
        if (!cfg.preset.empty()) throw InvalidInput("generate: use either --config or --preset");
        if (cfg.span_days) {
            auto doc = nlohmann::json::parse(io::read_file(cfg.config), nullptr, false);
            if (doc.is_discarded() || !doc.is_object()) throw InvalidInput("config is not a JSON object");
            doc["span_days"] = *cfg.span_days;
            gen = parse_generate_config(doc.dump(), cfg.config.parent_path());
        } else {
            gen = load_generate_config(cfg.config);
        }
    } else {
        gen = preset_config(cfg.preset.empty() ? "shed" : cfg.preset, cfg.span_days.value_or(7.0));
    }
    const std::uint64_t seed = effective_seed(cfg, gen.seed, err);
    const Manifest m = emit_shed(gen.buildings, cfg.output, seed, gen.hash());
    out << "buildings=" << gen.buildings.size() << " categories=" << m.details["category_count"].get<std::size_t>()
        << " files=" << m.files.size() << " seed=" << seed << "\n";
    return kOk;
}

std::vector<double> parse_durations(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_duration(item));
    }
    return out;
}

}  // namespace

Dataset ingest(const std::filesystem::path& path, DataKind kind) {
    if (kind == DataKind::Current) return io::load_current_matrix(path);
    return io::load_power_series(path);
}

double parse_duration(std::string_view text) {
    if (text.empty()) throw InvalidInput("empty duration");
    double scale = 1.0;
    switch (text.back()) {
        case 's': scale = 1.0; break;
        case 'm': scale = 60.0; break;
        case 'h': scale = 3600.0; break;
        case 'd': scale = 86400.0; break;
        default: scale = 0.0; break;
    }
    const std::string_view digits = scale == 0.0 ? text : text.substr(0, text.size() - 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || !(value > 0.0) || !std::isfinite(value)) {
        throw InvalidInput("invalid duration '" + std::string(text) + "' (expected e.g. 30s, 15m, 1h, 1d)");
    }
    return value * (scale == 0.0 ? 1.0 : scale);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::Learn: return run_learn(config, out, err);
            case Command::Analyze: return run_analyze(config, out, err);
            case Command::InferActivations: return run_infer(config, out, err);
            case Command::Generate: return run_generate(config, out, err);
            case Command::Version:
                out << "loadforge " << kToolVersion << " (format " << kFormatVersion << ")\n";
                return kOk;
        }
    } catch (const InvalidInput& e) {
        err << "loadforge: " << e.what() << "\n";
        return kInvalid;
    } catch (const NumericalError& e) {
        err << "loadforge: numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "loadforge: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err << "loadforge: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Load disaggregation models: learn, analyze, infer generators, generate datasets", "loadforge"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::optional<std::uint64_t> seed;
    std::string k_text = "auto";
    std::string kind_text = "power";
    std::string resample_text = "30s,1h";
    std::string partition_text = "hourly";
    std::string holidays_text;
    std::optional<double> span_days;

    auto* learn = app.add_subcommand("learn", "Fit signatures and activations to a current matrix");
    learn->add_option("--input", cfg.input, "CurrentMatrix file")->required();
    learn->add_option("--k", k_text, "Component count or 'auto'");
    learn->add_option("--snr-target", cfg.snr_target, "Target SNR in dB for --k auto");
    learn->add_option("--k-max", cfg.k_max, "Largest k tried by --k auto");
    learn->add_option("--max-iters", cfg.solver.max_iters, "Sweep cap");
    learn->add_option("--rel-tol", cfg.solver.rel_tol, "Relative objective decrease stopping rule");
    learn->add_option("--mains-rms", cfg.mains_rms, "Mains RMS voltage used for normalization");
    learn->add_option("--seed", seed, "Initialization seed");
    learn->add_option("--out", cfg.output, "FactorModel output file")->required();

    auto* analyze = app.add_subcommand("analyze", "Compute power-derivative statistics and THD");
    analyze->add_option("--input", cfg.input, "Power series or current matrix")->required();
    analyze->add_option("--kind", kind_text, "power or current")->check(CLI::IsMember({"power", "current"}));
    analyze->add_option("--resample", resample_text, "Comma-separated intervals, e.g. 30s,1h");
    analyze->add_option("--cadence", cfg.cadence, "Seconds between periods of a current file");
    analyze->add_option("--mains-rms", cfg.mains_rms, "Mains RMS voltage");
    analyze->add_option("--report", cfg.output, "MetricReport CSV output (stdout when omitted)");

    auto* infer = app.add_subcommand("infer-activations", "Estimate activation generator parameters");
    infer->add_option("--power", cfg.input, "Per-device power series")->required();
    infer->add_option("--partition", partition_text, "hourly, halfminute or single")
        ->check(CLI::IsMember({"hourly", "halfminute", "single"}));
    infer->add_option("--threshold", cfg.threshold, "On/off threshold in watts");
    infer->add_option("--holidays", holidays_text, "Comma-separated YYYY-MM-DD days off");
    infer->add_option("--out", cfg.output, "Parameter CSV output")->required();

    auto* generate = app.add_subcommand("generate", "Synthesize building datasets");
    generate->add_option("--config", cfg.config, "JSON building configuration");
    generate->add_option("--preset", cfg.preset, "shed, shed:<1-8> or residential");
    generate->add_option("--span-days", span_days, "Override the simulated span");
    generate->add_option("--seed", seed, "Root seed");
    generate->add_option("--out", cfg.output, "Output directory")->required();

    auto* version = app.add_subcommand("version", "Print the tool and format versions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "loadforge: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    cfg.seed = seed;
    cfg.span_days = span_days;
    try {
        if (learn->parsed()) {
            cfg.command = Command::Learn;
            if (k_text != "auto") {
                Index k = 0;
                const auto [ptr, ec] = std::from_chars(k_text.data(), k_text.data() + k_text.size(), k);
                if (ec != std::errc() || ptr != k_text.data() + k_text.size() || k < 1) {
                    err << "loadforge: --k expects a positive integer or 'auto'\n";
                    return kUsage;
                }
                cfg.k = k;
            }
        } else if (analyze->parsed()) {
            cfg.command = Command::Analyze;
            cfg.kind = kind_text == "current" ? DataKind::Current : DataKind::Power;
            cfg.resample_seconds = parse_durations(resample_text);
        } else if (infer->parsed()) {
            cfg.command = Command::InferActivations;
            cfg.partition = parse_partition_kind(partition_text);
            std::stringstream ss(holidays_text);
            std::string day;
            while (std::getline(ss, day, ','))
                if (!day.empty()) cfg.holidays.push_back(day);
        } else if (generate->parsed()) {
            cfg.command = Command::Generate;
        } else if (version->parsed()) {
            cfg.command = Command::Version;
        }
    } catch (const InvalidInput& e) {
        err << "loadforge: " << e.what() << "\n";
        return kUsage;
    }
    return run(cfg, out, err);
}

}  // namespace loadforge::cli
