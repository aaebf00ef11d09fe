#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "csistat/distance.hpp"
#include "csistat/ingest.hpp"
#include "csistat/model.hpp"

namespace csistat {

// ---------------------------------------------------------------------------
// Increment model document
// ---------------------------------------------------------------------------

/// Model-exchange format: Gaussian parameters, raw and tuned truncation
/// bounds, bit widths and the PMF as ordered level/probability pairs.
inline nlohmann::json model_to_json(const IncrementModel& model) {
    nlohmann::json pmf = nlohmann::json::array();
    for (const auto& [level, p] : model.pmf) {
        pmf.push_back({{"level", level}, {"p", p}});
    }
    return nlohmann::json{{"mu", model.mu},
                          {"sigma", model.sigma},
                          {"delta_star_raw", model.delta_star_raw},
                          {"delta_star_tuned", model.delta_star},
                          {"q_inc", model.q_inc},
                          {"q_amp", model.q_amp},
                          {"pmf", pmf}};
}

inline IncrementModel model_from_json(const nlohmann::json& j) {
    IncrementModel model;
    try {
        model.mu = j.at("mu").get<double>();
        model.sigma = j.at("sigma").get<double>();
        model.delta_star_raw = j.at("delta_star_raw").get<double>();
        model.delta_star = j.at("delta_star_tuned").get<double>();
        model.q_inc = j.at("q_inc").get<int>();
        model.q_amp = j.at("q_amp").get<int>();
        for (const auto& pair : j.at("pmf")) {
            model.pmf[pair.at("level").get<int>()] = pair.at("p").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }
    model.validate();
    return model;
}

inline void save_model(const std::string& path, const IncrementModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("model: cannot write " + path);
    out << model_to_json(model).dump(2) << '\n';
}

inline IncrementModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("model: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("model: invalid JSON in " + path + ": " + e.what());
    }
    return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Quantized matrix CSV (pipeline output / analysis input)
// ---------------------------------------------------------------------------

inline void write_quantized_matrix_csv(const std::string& path,
                                       const QuantizedMatrix& q) {
    std::ofstream out(path);
    if (!out) throw IoError("quantized csv: cannot write " + path);
    for (std::size_t k = 0; k < q.values.rows(); ++k) {
        auto row = q.values.row(k);
        for (std::size_t n = 0; n < row.size(); ++n) {
            if (n) out << ',';
            out << row[n];
        }
        out << '\n';
    }
}

inline QuantizedMatrix read_quantized_matrix_csv(const std::string& path,
                                                 int q_amp) {
    std::ifstream in(path);
    if (!in) throw IoError("quantized csv: cannot open " + path);
    std::vector<std::int32_t> data;
    std::size_t cols = 0, rows = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line, ',');
        if (cols == 0) {
            cols = cells.size();
        } else if (cells.size() != cols) {
            throw ValidationError("quantized csv: ragged row " +
                                  std::to_string(lineno));
        }
        for (std::size_t n = 0; n < cells.size(); ++n) {
            const double v = detail::parse_cell(cells[n], lineno, n + 1);
            const auto level = static_cast<std::int32_t>(v);
            if (static_cast<double>(level) != v) {
                throw ValidationError("quantized csv: non-integer level at row " +
                                      std::to_string(lineno) + ", column " +
                                      std::to_string(n + 1));
            }
            data.push_back(level);
        }
        ++rows;
    }
    if (rows == 0) {
        throw ValidationError("quantized csv: no rows in " + path);
    }
    QuantizedMatrix q{Matrix<std::int32_t>(rows, cols, std::move(data)), q_amp};
    q.validate();
    return q;
}

// ---------------------------------------------------------------------------
// Distance report
// ---------------------------------------------------------------------------

/// Three-digit cell rendering (first three decimals as a zero-padded
/// integer), selected by --thesis-style.
inline std::string thesis_style_cell(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d",
                  static_cast<int>(std::llround(v * 1000.0)));
    return buf;
}

inline void write_distance_csv(const std::string& path,
                               const DistanceReport& report,
                               bool thesis_style = false) {
    std::ofstream out(path);
    if (!out) throw IoError("distance csv: cannot write " + path);
    out << "ref";
    for (const auto& label : report.labels) out << ',' << label;
    out << '\n';
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        out << report.labels[i];
        for (std::size_t j = 0; j < report.labels.size(); ++j) {
            out << ',';
            if (thesis_style) {
                out << thesis_style_cell(report.mean(i, j));
            } else {
                out << detail::format_double(report.mean(i, j));
            }
        }
        out << '\n';
    }
}

inline void write_distance_std_csv(const std::string& path,
                                   const DistanceReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("distance csv: cannot write " + path);
    out << "ref";
    for (const auto& label : report.labels) out << ',' << label;
    out << '\n';
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        out << report.labels[i];
        for (std::size_t j = 0; j < report.labels.size(); ++j) {
            out << ',' << detail::format_double(report.std_dev(i, j));
        }
        out << '\n';
    }
}

inline nlohmann::json distance_report_to_json(const DistanceReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < report.labels.size(); ++j) {
            row.push_back({{"mean", report.mean(i, j)},
                           {"std", report.std_dev(i, j)},
                           {"kind", cell_kind_name(report.kind(i, j))}});
        }
        cells.push_back(std::move(row));
    }
    return nlohmann::json{{"labels", report.labels}, {"cells", cells}};
}

inline void write_distance_json(const std::string& path,
                                const DistanceReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("distance json: cannot write " + path);
    out << distance_report_to_json(report).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Plot-ready data files
// ---------------------------------------------------------------------------

/// Two-column x,y CSV with a header line.
inline void write_xy_csv(const std::string& path, const std::string& x_name,
                         const std::string& y_name,
                         std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError("xy csv: column length mismatch");
    }
    std::ofstream out(path);
    if (!out) throw IoError("xy csv: cannot write " + path);
    out << x_name << ',' << y_name << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << detail::format_double(x[i]) << ',' << detail::format_double(y[i])
            << '\n';
    }
}

inline void write_histogram_csv(const std::string& path,
                                const WhdHistogram& hist) {
    std::ofstream out(path);
    if (!out) throw IoError("histogram csv: cannot write " + path);
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        out << detail::format_double(hist.edges[b]) << ','
            << detail::format_double(hist.edges[b + 1]) << ',' << hist.counts[b]
            << '\n';
    }
}

inline void write_heatmap_csv(const std::string& path,
                              const Matrix<std::int32_t>& m) {
    std::ofstream out(path);
    if (!out) throw IoError("heatmap csv: cannot write " + path);
    for (std::size_t k = 0; k < m.rows(); ++k) {
        auto row = m.row(k);
        for (std::size_t n = 0; n < row.size(); ++n) {
            if (n) out << ',';
            out << row[n];
        }
        out << '\n';
    }
}

/// Level histogram comparing an empirical distribution against a model PMF.
inline void write_level_pmf_csv(const std::string& path,
                                const std::map<int, double>& empirical,
                                const std::map<int, double>& model) {
    std::ofstream out(path);
    if (!out) throw IoError("pmf csv: cannot write " + path);
    out << "level,empirical,model\n";
    for (const auto& [level, p] : model) {
        const auto it = empirical.find(level);
        const double e = it == empirical.end() ? 0.0 : it->second;
        out << level << ',' << detail::format_double(e) << ','
            << detail::format_double(p) << '\n';
    }
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("json: cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace csistat
