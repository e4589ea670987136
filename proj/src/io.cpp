#include "loadforge/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "loadforge/errors.hpp"

namespace loadforge::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view field, double& v) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
    return r.ec == std::errc{} && r.ptr == field.data() + field.size();
}

double parse_finite(std::string_view field, std::size_t line, const std::string& where) {
    double v = 0.0;
    if (!parse_double(field, v)) {
        throw ParseError("cannot parse '" + std::string(field) + "' at " + where, line);
    }
    if (!std::isfinite(v)) {
        throw ParseError("non-finite value '" + std::string(field) + "' at " + where, line);
    }
    return v;
}

Index parse_count(std::string_view field, std::size_t line) {
    long long v = 0;
    const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
    if (r.ec != std::errc{} || r.ptr != field.data() + field.size() || v < 0) {
        throw ParseError("expected a nonnegative integer, got '" + std::string(field) + "'", line);
    }
    return static_cast<Index>(v);
}

// Next line that is not blank; false at end of stream.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) return true;
    }
    return false;
}

void expect_marker(std::istream& in, std::size_t& line_no, std::string_view marker) {
    std::string line;
    if (!next_line(in, line, line_no) || trim(line) != marker) {
        throw ParseError("expected '" + std::string(marker) + "'", line_no);
    }
}

PartitionKind read_partition_header(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!next_line(in, line, line_no)) throw ParseError("empty file", line_no);
    const auto fields = split(trim(line));
    if (fields.size() != 2 || fields[0] != "#partition") {
        throw ParseError("expected '#partition,<kind>' header", line_no);
    }
    try {
        return parse_partition_kind(fields[1]);
    } catch (const InvalidInput& e) {
        throw ParseError(e.what(), line_no);
    }
}

TimePartition partition_for(PartitionKind kind) {
    switch (kind) {
        case PartitionKind::Single: return TimePartition::single();
        case PartitionKind::Hourly: return TimePartition::hourly();
        case PartitionKind::HalfMinuteDaytype: return TimePartition::halfminute_daytype();
    }
    return TimePartition::single();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

std::string format_value(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, r.ptr);
}

std::string format_exact(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_matrix_block(std::ostream& out, const Matrix& m) {
    out << m.rows() << ',' << m.cols() << '\n';
    std::string line;
    for (Index c = 0; c < m.cols(); ++c) {
        line.clear();
        for (Index r = 0; r < m.rows(); ++r) {
            if (r) line += ',';
            line += format_value(m(r, c));
        }
        line += '\n';
        out << line;
    }
}

Matrix read_matrix_block(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!next_line(in, line, line_no)) throw ParseError("missing 'rows,cols' header", line_no);
    const auto header = split(trim(line));
    if (header.size() != 2) throw ParseError("header must be 'rows,cols'", line_no);
    const Index rows = parse_count(header[0], line_no);
    const Index cols = parse_count(header[1], line_no);

    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        if (!next_line(in, line, line_no)) {
            throw ParseError("expected " + std::to_string(cols) + " data lines, found " + std::to_string(c),
                             line_no);
        }
        const auto fields = split(trim(line));
        if (static_cast<Index>(fields.size()) != rows) {
            throw ParseError("ragged row: expected " + std::to_string(rows) + " values, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        for (Index r = 0; r < rows; ++r) {
            m(r, c) = parse_finite(fields[static_cast<std::size_t>(r)], line_no,
                                   "row " + std::to_string(c + 1) + ", column " + std::to_string(r + 1));
        }
    }
    return m;
}

void write_current_matrix(std::ostream& out, const CurrentMatrix& current) {
    write_matrix_block(out, current.values());
}

CurrentMatrix read_current_matrix(std::istream& in) {
    std::size_t line_no = 0;
    Matrix m = read_matrix_block(in, line_no);
    std::string extra;
    if (next_line(in, extra, line_no)) throw ParseError("unexpected trailing data", line_no);
    try {
        return CurrentMatrix(std::move(m));
    } catch (const InvalidInput& e) {
        throw ParseError(e.what(), 1);
    }
}

void write_power_series(std::ostream& out, const PowerSeries& p) {
    out << "timestamp,watts\n";
    std::string line;
    for (std::size_t i = 0; i < p.size(); ++i) {
        line = format_exact(p.timestamp(i));
        line += ',';
        line += format_value(p.watts()[i]);
        line += '\n';
        out << line;
    }
}

PowerSeries read_power_series(std::istream& in) {
    std::size_t line_no = 0;
    std::string line;
    std::vector<double> stamps;
    std::vector<double> watts;
    bool first = true;
    while (next_line(in, line, line_no)) {
        const auto fields = split(trim(line));
        if (first) {
            first = false;
            if (fields.size() == 2 && fields[0] == "timestamp") continue;
        }
        if (fields.size() != 2) {
            throw ParseError("expected 'timestamp,watts', found " + std::to_string(fields.size()) + " fields",
                             line_no);
        }
        const double t = parse_finite(fields[0], line_no, "timestamp");
        const double w = parse_finite(fields[1], line_no, "watts");
        if (!stamps.empty()) {
            if (!(t > stamps.back())) throw ParseError("timestamps must be strictly increasing", line_no);
            if (stamps.size() >= 2) {
                const double interval = stamps[1] - stamps[0];
                const double step = t - stamps.back();
                if (std::abs(step - interval) > 1e-6 * interval) {
                    throw GapError("line " + std::to_string(line_no) + ": gap in power series, sample at " +
                                       format_exact(stamps.back() + interval) + " is missing",
                                   stamps.back() + interval);
                }
            }
        }
        stamps.push_back(t);
        watts.push_back(w);
    }
    if (stamps.size() < 2) throw ParseError("power series needs at least two samples", line_no);
    return PowerSeries(stamps.front(), stamps[1] - stamps[0], std::move(watts));
}

void write_factor_model(std::ostream& out, const FactorModel& model) {
    out << "#signatures\n";
    write_matrix_block(out, model.signatures);
    out << "#activations\n";
    write_matrix_block(out, model.activations);
}

FactorModel read_factor_model(std::istream& in) {
    std::size_t line_no = 0;
    FactorModel model;
    expect_marker(in, line_no, "#signatures");
    model.signatures = read_matrix_block(in, line_no);
    expect_marker(in, line_no, "#activations");
    model.activations = read_matrix_block(in, line_no);
    if (model.activations.rows() != model.signatures.cols()) {
        throw ParseError("activation rows do not match signature columns", line_no);
    }
    if ((model.activations.array() < 0.0).any()) {
        throw ParseError("activations must be nonnegative", line_no);
    }
    return model;
}

void write_transition_table(std::ostream& out, const TransitionTable& table, const TimePartition& part) {
    out << "#partition," << part.name() << '\n';
    out << "tau,gamma_0_0,gamma_1_0,gamma_0_1,gamma_1_1,smoothed_0,smoothed_1\n";
    for (std::size_t tau = 0; tau < table.size(); ++tau) {
        out << tau << ',' << format_value(table.gamma(tau, 0, 0)) << ','
            << format_value(table.gamma(tau, 1, 0)) << ',' << format_value(table.gamma(tau, 0, 1)) << ','
            << format_value(table.gamma(tau, 1, 1)) << ',' << (table.smoothed(tau, 0) ? 1 : 0) << ','
            << (table.smoothed(tau, 1) ? 1 : 0) << '\n';
    }
}

TransitionTable read_transition_table(std::istream& in, PartitionKind* kind) {
    std::size_t line_no = 0;
    const PartitionKind k = read_partition_header(in, line_no);
    if (kind) *kind = k;
    const TimePartition part = partition_for(k);
    std::string line;
    if (!next_line(in, line, line_no) || split(trim(line)).size() != 7) {
        throw ParseError("expected transition table column header", line_no);
    }
    TransitionTable table(part.size());
    std::size_t seen = 0;
    while (next_line(in, line, line_no)) {
        const auto f = split(trim(line));
        if (f.size() != 7) throw ParseError("expected 7 fields", line_no);
        const auto tau = static_cast<std::size_t>(parse_count(f[0], line_no));
        if (tau != seen || tau >= part.size()) throw ParseError("subset index out of order", line_no);
        const double on0 = parse_finite(f[2], line_no, "gamma_1_0");
        const double on1 = parse_finite(f[4], line_no, "gamma_1_1");
        try {
            table.set(tau, 0, on0);
            table.set(tau, 1, on1);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), line_no);
        }
        table.mark_smoothed(tau, 0, f[5] == "1");
        table.mark_smoothed(tau, 1, f[6] == "1");
        ++seen;
    }
    if (seen != part.size()) {
        throw ParseError("expected " + std::to_string(part.size()) + " subsets, found " + std::to_string(seen),
                         line_no);
    }
    return table;
}

void write_activation_template(std::ostream& out, const ActivationTemplate& tpl, const TimePartition& part) {
    out << "#partition," << part.name() << '\n';
    out << "tau,watts,count\n";
    for (std::size_t tau = 0; tau < tpl.values.size(); ++tau) {
        const std::size_t count = tau < tpl.counts.size() ? tpl.counts[tau] : 0;
        out << tau << ',' << format_value(tpl.values[tau]) << ',' << count << '\n';
    }
}

ActivationTemplate read_activation_template(std::istream& in, PartitionKind* kind) {
    std::size_t line_no = 0;
    const PartitionKind k = read_partition_header(in, line_no);
    if (kind) *kind = k;
    const TimePartition part = partition_for(k);
    std::string line;
    if (!next_line(in, line, line_no) || split(trim(line)).size() != 3) {
        throw ParseError("expected template column header", line_no);
    }
    ActivationTemplate tpl;
    while (next_line(in, line, line_no)) {
        const auto f = split(trim(line));
        if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
        if (static_cast<std::size_t>(parse_count(f[0], line_no)) != tpl.values.size()) {
            throw ParseError("subset index out of order", line_no);
        }
        const double w = parse_finite(f[1], line_no, "watts");
        if (w < 0.0) throw ParseError("template values must be nonnegative", line_no);
        tpl.values.push_back(w);
        tpl.counts.push_back(static_cast<std::size_t>(parse_count(f[2], line_no)));
    }
    if (tpl.values.size() != part.size()) {
        throw ParseError("expected " + std::to_string(part.size()) + " subsets, found " +
                             std::to_string(tpl.values.size()),
                         line_no);
    }
    return tpl;
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

CurrentMatrix load_current_matrix(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_current_matrix(in);
}

PowerSeries load_power_series(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_power_series(in);
}

FactorModel load_factor_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_factor_model(in);
}

}  // namespace loadforge::io
