#pragma once

#include <string>
#include <vector>

#include "eai/experiments.hpp"

namespace eai::io {

// Rectangular table, rendered as RFC-4180 CSV with a header row.
// Numeric cells carry 17 significant digits so files round-trip
// bit-exactly.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);
std::string csv_escape(const std::string& field);
std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::string& path);

// H matrix in the published layout: a block of amplitudes, a blank-label
// separator row, then the corresponding phases in degrees.
Table h_table(const CMat& h);

Table spectrum_table(const SpectrumResult& result);
Table scan_table(const std::vector<std::pair<double, double>>& rows,
                 const std::string& param_name = "x_mm");
Table fringe_table(const std::vector<std::pair<double, double>>& sweep);
Table visibility_table(const std::vector<VisibilityRow>& rows,
                       const std::string& param_name = "x_mm");
Table mode_table(const ModeSet& modes);
Table convergence_table(const std::vector<std::pair<int, double>>& rows);

}  // namespace eai::io
