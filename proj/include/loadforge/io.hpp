#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "loadforge/factorize.hpp"
#include "loadforge/genmodel.hpp"
#include "loadforge/partition.hpp"
#include "loadforge/types.hpp"

namespace loadforge::io {

// Text formats. Matrix blocks are a `rows,cols` header followed by one line per column,
// each holding `rows` comma-separated decimals; a CurrentMatrix therefore reads as
// `N,T` then one period per line.

/// 9 significant digits, locale independent.
std::string format_value(double v);
/// Shortest text that parses back to the same double (used for timestamps).
std::string format_exact(double v);

void write_matrix_block(std::ostream& out, const Matrix& m);
/// Reads one block; `line` tracks the 1-based line number for error messages.
Matrix read_matrix_block(std::istream& in, std::size_t& line);

void write_current_matrix(std::ostream& out, const CurrentMatrix& current);
CurrentMatrix read_current_matrix(std::istream& in);

/// `timestamp,watts` header followed by one row per sample.
void write_power_series(std::ostream& out, const PowerSeries& p);
/// Rejects non-finite values, non-increasing timestamps and gaps in the sampling grid.
PowerSeries read_power_series(std::istream& in);

/// `#signatures` block (N x K) then `#activations` block (K x T).
void write_factor_model(std::ostream& out, const FactorModel& model);
FactorModel read_factor_model(std::istream& in);

void write_transition_table(std::ostream& out, const TransitionTable& table, const TimePartition& part);
TransitionTable read_transition_table(std::istream& in, PartitionKind* kind = nullptr);

void write_activation_template(std::ostream& out, const ActivationTemplate& tpl, const TimePartition& part);
ActivationTemplate read_activation_template(std::istream& in, PartitionKind* kind = nullptr);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: full content, binary mode, truncating.
void write_file(const std::filesystem::path& path, std::string_view content);

CurrentMatrix load_current_matrix(const std::filesystem::path& path);
PowerSeries load_power_series(const std::filesystem::path& path);
FactorModel load_factor_model(const std::filesystem::path& path);

}  // namespace loadforge::io
