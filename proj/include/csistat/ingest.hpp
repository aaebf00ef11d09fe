#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "csistat/model.hpp"

namespace csistat {

/// How complex samples are laid out in a trace row.
enum class ComplexLayout {
    InterleavedReIm,  // re0, im0, re1, im1, ...
    PairedColumns,    // re0, ..., reN-1, im0, ..., imN-1
};

/**
 * @brief Description of a CSI trace file: one frame per row, complex samples
 * as real-valued columns.
 */
struct TraceFileSpec {
    std::string path;
    ComplexLayout complex_layout = ComplexLayout::InterleavedReIm;
    char delimiter = ',';
    bool skip_header = false;

    void validate() const {
        if (delimiter != ',' && delimiter != ';' && delimiter != '\t') {
            throw ValidationError("trace spec: delimiter must be ',', ';' or tab");
        }
    }
};

/**
 * @brief Useful sub-carrier count before suppression removal:
 * 3.2 * bandwidth, times four under 802.11ax.
 */
inline int expected_subcarriers(int bandwidth_mhz, const std::string& standard) {
    if (bandwidth_mhz != 20 && bandwidth_mhz != 40 && bandwidth_mhz != 80 &&
        bandwidth_mhz != 160) {
        throw ValidationError("expected_subcarriers: unsupported bandwidth " +
                              std::to_string(bandwidth_mhz));
    }
    if (standard != "ac" && standard != "ax") {
        throw ValidationError("expected_subcarriers: standard must be 'ac' or 'ax'");
    }
    int n_sc = bandwidth_mhz * 16 / 5;  // 3.2 * BW, exact in integers
    if (standard == "ax") n_sc *= 4;
    return n_sc;
}

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline double parse_cell(const std::string& cell, std::size_t row,
                         std::size_t col) {
    const std::string t = trim(cell);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || t.empty()) {
        throw ValidationError("trace: non-numeric cell at row " +
                              std::to_string(row) + ", column " +
                              std::to_string(col));
    }
    return value;
}

inline std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

/// Round-trip-exact decimal rendering of a double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/**
 * @brief Loads a CSV trace into an Experiment of raw complex frames.
 *
 * Row and column numbers in error messages are 1-based file coordinates.
 * A column count differing from the bandwidth-derived expectation is a
 * warning, not a failure: the published counts describe pre-suppression
 * totals.
 */
inline Experiment load_trace(const TraceFileSpec& spec,
                             const ExperimentMetadata& metadata,
                             std::vector<std::string>* warnings = nullptr) {
    spec.validate();
    std::ifstream in(spec.path);
    if (!in) {
        throw IoError("trace: cannot open " + spec.path);
    }
    std::vector<CsiFrame> frames;
    std::string line;
    std::size_t row = 0;
    std::size_t expected_cols = 0;
    bool header_pending = spec.skip_header;
    while (std::getline(in, line)) {
        ++row;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line, spec.delimiter);
        if (cells.size() % 2 != 0) {
            throw ValidationError("trace: odd column count at row " +
                                  std::to_string(row));
        }
        if (expected_cols == 0) {
            expected_cols = cells.size();
        } else if (cells.size() != expected_cols) {
            throw ValidationError(
                "trace: ragged row " + std::to_string(row) + " (" +
                std::to_string(cells.size()) + " columns, expected " +
                std::to_string(expected_cols) + ")");
        }
        const std::size_t n_sc = cells.size() / 2;
        CsiFrame frame;
        frame.samples.resize(n_sc);
        for (std::size_t n = 0; n < n_sc; ++n) {
            std::size_t re_col, im_col;
            if (spec.complex_layout == ComplexLayout::InterleavedReIm) {
                re_col = 2 * n;
                im_col = 2 * n + 1;
            } else {
                re_col = n;
                im_col = n_sc + n;
            }
            frame.samples[n].re =
                detail::parse_cell(cells[re_col], row, re_col + 1);
            frame.samples[n].im =
                detail::parse_cell(cells[im_col], row, im_col + 1);
        }
        frames.push_back(std::move(frame));
    }
    if (frames.empty()) {
        throw ValidationError("trace: no frames in " + spec.path);
    }
    if (warnings) {
        const int expected =
            expected_subcarriers(metadata.bandwidth_mhz, metadata.modulation);
        if (frames[0].samples.size() != static_cast<std::size_t>(expected)) {
            warnings->push_back(
                "trace: " + std::to_string(frames[0].samples.size()) +
                " sub-carriers, expected " + std::to_string(expected) + " for " +
                std::to_string(metadata.bandwidth_mhz) + " MHz " +
                metadata.modulation);
        }
    }
    return Experiment(std::move(frames), metadata);
}

/// Writes an experiment back to the trace CSV format.
inline void write_trace(const std::string& path, const Experiment& exp,
                        ComplexLayout layout = ComplexLayout::InterleavedReIm,
                        char delimiter = ',') {
    std::ofstream out(path);
    if (!out) {
        throw IoError("trace: cannot write " + path);
    }
    for (const CsiFrame& frame : exp.frames()) {
        const std::size_t n_sc = frame.samples.size();
        for (std::size_t col = 0; col < 2 * n_sc; ++col) {
            std::size_t n;
            bool is_re;
            if (layout == ComplexLayout::InterleavedReIm) {
                n = col / 2;
                is_re = (col % 2) == 0;
            } else {
                is_re = col < n_sc;
                n = is_re ? col : col - n_sc;
            }
            if (col) out << delimiter;
            out << detail::format_double(is_re ? frame.samples[n].re
                                               : frame.samples[n].im);
        }
        out << '\n';
    }
}

/// Writes a quantized experiment in the trace format ingest reads: each level
/// becomes the real part of a sample with zero imaginary part, so the
/// amplitude chain recovers the levels exactly.
inline void write_quantized_trace(
    const std::string& path, const QuantizedMatrix& q,
    ComplexLayout layout = ComplexLayout::InterleavedReIm,
    char delimiter = ',') {
    std::ofstream out(path);
    if (!out) {
        throw IoError("trace: cannot write " + path);
    }
    const std::size_t n_sc = q.values.cols();
    for (std::size_t k = 0; k < q.values.rows(); ++k) {
        for (std::size_t col = 0; col < 2 * n_sc; ++col) {
            std::size_t n;
            bool is_re;
            if (layout == ComplexLayout::InterleavedReIm) {
                n = col / 2;
                is_re = (col % 2) == 0;
            } else {
                is_re = col < n_sc;
                n = is_re ? col : col - n_sc;
            }
            if (col) out << delimiter;
            if (is_re) {
                out << q.values(k, n);
            } else {
                out << 0;
            }
        }
        out << '\n';
    }
}

/// Columns removed by suppression stripping, alongside the surviving data.
struct StripResult {
    Experiment experiment;
    std::vector<std::size_t> removed;  // original column indices
};

/**
 * @brief Removes sub-carriers that are (0, 0) in every frame of the
 * experiment.
 *
 * Suppression is a property of the transmission, so a column is dropped only
 * when all frames agree; surviving columns keep their order.  Applying the
 * operation twice changes nothing.
 */
inline StripResult strip_suppressed(const Experiment& exp) {
    const std::size_t n_sc = exp.n_sc();
    std::vector<bool> suppressed(n_sc, true);
    for (const CsiFrame& frame : exp.frames()) {
        for (std::size_t n = 0; n < n_sc; ++n) {
            if (suppressed[n] && !frame.samples[n].is_zero()) {
                suppressed[n] = false;
            }
        }
    }
    std::vector<std::size_t> removed;
    for (std::size_t n = 0; n < n_sc; ++n) {
        if (suppressed[n]) removed.push_back(n);
    }
    if (removed.size() == n_sc) {
        throw NumericError("strip_suppressed: empty channel (all sub-carriers suppressed)");
    }
    if (removed.empty()) {
        return StripResult{exp, {}};
    }
    std::vector<CsiFrame> frames;
    frames.reserve(exp.frame_count());
    for (const CsiFrame& frame : exp.frames()) {
        CsiFrame kept;
        kept.rx_time = frame.rx_time;
        kept.samples.reserve(n_sc - removed.size());
        for (std::size_t n = 0; n < n_sc; ++n) {
            if (!suppressed[n]) kept.samples.push_back(frame.samples[n]);
        }
        frames.push_back(std::move(kept));
    }
    return StripResult{Experiment(std::move(frames), exp.metadata()),
                       std::move(removed)};
}

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const std::string& name) {
    if (!j.contains(name)) {
        throw ValidationError("metadata: missing mandatory field '" + name + "'");
    }
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("metadata: field '" + name + "' has the wrong type");
    }
}

}  // namespace detail

/**
 * @brief Parses the capture-side metadata JSON (Listing-style camelCase
 * field names).  Unknown fields are preserved verbatim.
 */
inline ExperimentMetadata metadata_from_json(const nlohmann::json& j) {
    using detail::require_field;
    ExperimentMetadata meta;
    const nlohmann::json date = require_field<nlohmann::json>(j, "date");
    meta.date.day = require_field<int>(date, "day");
    meta.date.month = require_field<int>(date, "month");
    meta.date.year = require_field<int>(date, "year");
    meta.location_id = require_field<std::string>(j, "locationID");
    meta.experiment = require_field<std::string>(j, "experiment");
    meta.ad_hoc_transmission = require_field<bool>(j, "adHocTransmission");
    meta.usleep_us = require_field<long>(j, "usleep");
    meta.avg_duration_s = require_field<long>(j, "avgDuration");
    meta.bandwidth_mhz = require_field<int>(j, "bandwidth");
    meta.modulation = require_field<std::string>(j, "modulation");
    meta.num_rx = require_field<int>(j, "numRx");
    meta.num_tx = require_field<int>(j, "numTx");
    meta.antennas_tx = require_field<int>(j, "numAntennasTx");
    meta.antennas_rx = require_field<int>(j, "numAntennasRx");
    meta.spatial_streams = require_field<int>(j, "numSpatialStreams");
    const nlohmann::json people = require_field<nlohmann::json>(j, "people");
    meta.people.present = require_field<bool>(people, "present");
    meta.people.num = require_field<int>(people, "num");
    meta.people.moving = require_field<bool>(people, "moving");
    meta.people.names = require_field<std::vector<std::string>>(people, "names");
    meta.notes = require_field<std::string>(j, "notes");
    if (j.contains("schemaVersion")) {
        meta.schema_version = j.at("schemaVersion").get<std::string>();
    }
    static const char* known[] = {
        "date", "locationID", "experiment", "adHocTransmission", "usleep",
        "avgDuration", "bandwidth", "modulation", "numRx", "numTx",
        "numAntennasTx", "numAntennasRx", "numSpatialStreams", "people",
        "notes", "schemaVersion"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool recognized = false;
        for (const char* k : known) {
            if (it.key() == k) {
                recognized = true;
                break;
            }
        }
        if (!recognized) meta.extra[it.key()] = it.value().dump();
    }
    meta.validate();
    return meta;
}

inline nlohmann::json metadata_to_json(const ExperimentMetadata& meta) {
    nlohmann::json j;
    j["date"] = {{"day", meta.date.day},
                 {"month", meta.date.month},
                 {"year", meta.date.year}};
    j["locationID"] = meta.location_id;
    j["experiment"] = meta.experiment;
    j["adHocTransmission"] = meta.ad_hoc_transmission;
    j["usleep"] = meta.usleep_us;
    j["avgDuration"] = meta.avg_duration_s;
    j["bandwidth"] = meta.bandwidth_mhz;
    j["modulation"] = meta.modulation;
    j["numRx"] = meta.num_rx;
    j["numTx"] = meta.num_tx;
    j["numAntennasTx"] = meta.antennas_tx;
    j["numAntennasRx"] = meta.antennas_rx;
    j["numSpatialStreams"] = meta.spatial_streams;
    j["people"] = {{"present", meta.people.present},
                   {"num", meta.people.num},
                   {"moving", meta.people.moving},
                   {"names", meta.people.names}};
    j["notes"] = meta.notes;
    j["schemaVersion"] = meta.schema_version;
    for (const auto& [key, raw] : meta.extra) {
        j[key] = nlohmann::json::parse(raw);
    }
    return j;
}

inline ExperimentMetadata load_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("metadata: cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("metadata: invalid JSON in " + path + ": " +
                              e.what());
    }
    return metadata_from_json(j);
}

inline void write_metadata(const std::string& path,
                           const ExperimentMetadata& meta) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("metadata: cannot write " + path);
    }
    out << metadata_to_json(meta).dump(2) << '\n';
}

/// Location registry: a JSON object mapping location IDs to descriptions.
inline std::map<std::string, std::string> load_location_registry(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("locations: cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("locations: invalid JSON in " + path + ": " +
                              e.what());
    }
    if (!j.is_object()) {
        throw ValidationError("locations: expected a JSON object");
    }
    std::map<std::string, std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string()) {
            throw ValidationError("locations: description of '" + it.key() +
                                  "' must be a string");
        }
        out[it.key()] = it.value().get<std::string>();
    }
    return out;
}

}  // namespace csistat
