#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "experts/core.hpp"

namespace experts {

/// Round log layout:
///   t,chosen,expected_cost,algorithm_cost,loss_0..loss_{n-1},prob_0..prob_{n-1}
/// Reals are written in shortest round-trip form, so rereading is exact.
void write_records_csv(std::ostream& out, std::span<const RoundRecord> records);
std::vector<RoundRecord> read_records_csv(std::istream& in);

/// Reads the loss_k columns (k = 0, 1, ...) of a CSV with a header row.
/// Other columns are ignored. Used for replayed adversaries and edge-time
/// tables. Throws DataError on malformed rows.
std::vector<std::vector<double>> read_loss_columns(std::istream& in);
std::vector<std::vector<double>> read_loss_columns(
    const std::filesystem::path& path);

/// Writes a header plus one loss_k row per entry of `rows`.
void write_loss_table(std::ostream& out,
                      const std::vector<std::vector<double>>& rows);

/// Shortest decimal string that rereads to the same double.
std::string format_real(double x);

}  // namespace experts
