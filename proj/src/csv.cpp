#include "eai/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace eai::io {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

std::vector<std::string> amp_phase(const cd& v) {
    return {format_double(std::abs(v)),
            format_double(std::arg(v) * kDegPerRad)};
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const Table& table) {
    std::string out;
    const auto emit = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += csv_escape(row[i]);
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) {
        emit(row);
    }
    return out;
}

void write_csv(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw config_error("cannot open '" + path + "' for writing");
    }
    const std::string text = to_csv(table);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw config_error("write to '" + path + "' failed");
    }
}

Table h_table(const CMat& h) {
    const int s = static_cast<int>(h.rows());
    Table t;
    t.header = {"block", "row"};
    for (int j = 0; j < s; ++j) {
        t.header.push_back("probe" + std::to_string(j));
    }
    for (int i = 0; i < s; ++i) {
        std::vector<std::string> row = {"amplitude", std::to_string(i)};
        for (int j = 0; j < s; ++j) {
            row.push_back(format_double(std::abs(h(i, j))));
        }
        t.rows.push_back(std::move(row));
    }
    for (int i = 0; i < s; ++i) {
        std::vector<std::string> row = {"phase_deg", std::to_string(i)};
        for (int j = 0; j < s; ++j) {
            row.push_back(format_double(std::arg(h(i, j)) * kDegPerRad));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table spectrum_table(const SpectrumResult& result) {
    Table t;
    t.header = {"freq_ghz", "power"};
    for (std::size_t i = 0; i < result.freq_ghz.size(); ++i) {
        t.rows.push_back(
            {format_double(result.freq_ghz[i]), format_double(result.power[i])});
    }
    return t;
}

Table scan_table(const std::vector<std::pair<double, double>>& rows,
                 const std::string& param_name) {
    Table t;
    t.header = {param_name, "power"};
    for (const auto& [param, power] : rows) {
        t.rows.push_back({format_double(param), format_double(power)});
    }
    return t;
}

Table fringe_table(const std::vector<std::pair<double, double>>& sweep) {
    Table t;
    t.header = {"dphi_rad", "power"};
    for (const auto& [dphi, power] : sweep) {
        t.rows.push_back({format_double(dphi), format_double(power)});
    }
    return t;
}

Table visibility_table(const std::vector<VisibilityRow>& rows,
                       const std::string& param_name) {
    Table t;
    t.header = {param_name, "amplitude", "phase_deg"};
    for (const auto& r : rows) {
        t.rows.push_back({format_double(r.param), format_double(r.amplitude),
                          format_double(r.phase_deg)});
    }
    return t;
}

Table mode_table(const ModeSet& modes) {
    Table t;
    t.header = {"mode",  "gamma",       "dipole",      "amp_x", "phase_x_deg",
                "amp_y", "phase_y_deg", "amp_z",       "phase_z_deg"};
    const int shown = std::max(modes.numerical_rank, 1);
    const int dipoles = static_cast<int>(modes.moments.rows()) / 3;
    for (int m = 0; m < shown && m < modes.moments.cols(); ++m) {
        for (int i = 0; i < dipoles; ++i) {
            std::vector<std::string> row = {std::to_string(m),
                                            format_double(modes.gamma(m)),
                                            std::to_string(i)};
            for (int c = 0; c < 3; ++c) {
                for (auto& cell : amp_phase(modes.moments(3 * i + c, m))) {
                    row.push_back(std::move(cell));
                }
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table convergence_table(const std::vector<std::pair<int, double>>& rows) {
    Table t;
    t.header = {"probes", "subspace_error"};
    for (const auto& [s, err] : rows) {
        t.rows.push_back({std::to_string(s), format_double(err)});
    }
    return t;
}

}  // namespace eai::io
