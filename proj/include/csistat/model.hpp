#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csistat/error.hpp"
#include "csistat/matrix.hpp"

namespace csistat {

/**
 * @brief One I/Q sample of a CSI on a single sub-carrier.
 *
 * Values are dimensionless receiver units; the capture hardware applies an
 * unknown gain, which is why the normalization stages exist at all.
 */
struct ComplexSample {
    double re = 0.0;
    double im = 0.0;

    bool finite() const noexcept {
        return std::isfinite(re) && std::isfinite(im);
    }
    bool is_zero() const noexcept { return re == 0.0 && im == 0.0; }

    bool operator==(const ComplexSample&) const = default;
};

/**
 * @brief One captured CSI: a sample per sub-carrier plus the reception time.
 *
 * The reception time is optional; downstream processing only ever orders
 * frames by index, so a missing timestamp costs nothing but annotation.
 */
struct CsiFrame {
    std::vector<ComplexSample> samples;
    std::optional<double> rx_time;  // seconds, monotone within an experiment
};

/// Presence and movement of people during a capture.
struct PeopleInfo {
    bool present = false;
    int num = 0;
    bool moving = false;
    std::vector<std::string> names;
};

struct CaptureDate {
    int day = 1;
    int month = 1;
    int year = 1970;
};

/**
 * @brief Experiment annotations mirroring the capture-side JSON document.
 *
 * `extra` preserves any fields the schema does not know about, so a
 * round-trip through the toolkit never loses information.
 */
struct ExperimentMetadata {
    CaptureDate date;
    std::string location_id;
    std::string experiment;
    bool ad_hoc_transmission = false;
    long usleep_us = 0;           // inter-packet gap, microseconds
    long avg_duration_s = 1;      // average experiment duration, seconds
    int bandwidth_mhz = 20;       // one of 20, 40, 80, 160
    std::string modulation;       // "ac" or "ax"
    int num_rx = 1;
    int num_tx = 1;
    int antennas_tx = 1;
    int antennas_rx = 1;
    int spatial_streams = 1;
    PeopleInfo people;
    std::string notes;
    std::string schema_version = "2024-09";   // forward-compatibility marker
    std::map<std::string, std::string> extra;  // unknown fields, raw JSON text

    /// Checks the cross-field invariants; throws ValidationError on breach.
    void validate() const {
        if (people.present != (people.num > 0)) {
            throw ValidationError(
                "metadata: people.present must match people.num > 0");
        }
        if (people.moving && !people.present) {
            throw ValidationError(
                "metadata: people.moving requires people.present");
        }
        if (!people.names.empty() &&
            people.names.size() != static_cast<std::size_t>(people.num)) {
            throw ValidationError(
                "metadata: people.names length must equal people.num or be empty");
        }
        if (bandwidth_mhz != 20 && bandwidth_mhz != 40 && bandwidth_mhz != 80 &&
            bandwidth_mhz != 160) {
            throw ValidationError("metadata: unsupported bandwidth " +
                                  std::to_string(bandwidth_mhz));
        }
        if (modulation != "ac" && modulation != "ax") {
            throw ValidationError("metadata: modulation must be 'ac' or 'ax'");
        }
        if (usleep_us < 0 || avg_duration_s <= 0 || num_rx < 1 || num_tx < 1 ||
            antennas_tx < 1 || antennas_rx < 1 || spatial_streams < 1) {
            throw ValidationError("metadata: field out of range");
        }
        if (people.num < 0) {
            throw ValidationError("metadata: people.num must be >= 0");
        }
    }
};

/// Environment class of an experiment, derived from the people annotations.
enum class Scenario { Empty, Static, FullyDynamic };

inline Scenario scenario_of(const ExperimentMetadata& meta) {
    if (!meta.people.present) return Scenario::Empty;
    return meta.people.moving ? Scenario::FullyDynamic : Scenario::Static;
}

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Empty: return "Empty";
        case Scenario::Static: return "Static";
        case Scenario::FullyDynamic: return "FullyDynamic";
    }
    return "Unknown";
}

/**
 * @brief An ordered collection of frames sharing one capture configuration.
 *
 * Construction enforces the structural invariants (non-empty uniform frames,
 * finite samples, monotone reception times); broken input is rejected, never
 * repaired.
 */
class Experiment {
public:
    Experiment(std::vector<CsiFrame> frames, ExperimentMetadata metadata)
        : frames_(std::move(frames)), metadata_(std::move(metadata)) {
        if (frames_.empty()) {
            throw ValidationError("experiment: no frames");
        }
        n_sc_ = frames_[0].samples.size();
        if (n_sc_ == 0) {
            throw ValidationError("experiment: empty frame");
        }
        std::optional<double> prev_time;
        for (std::size_t k = 0; k < frames_.size(); ++k) {
            const CsiFrame& f = frames_[k];
            if (f.samples.size() != n_sc_) {
                throw ValidationError("experiment: frame " + std::to_string(k) +
                                      " has " + std::to_string(f.samples.size()) +
                                      " samples, expected " +
                                      std::to_string(n_sc_));
            }
            for (std::size_t n = 0; n < f.samples.size(); ++n) {
                if (!f.samples[n].finite()) {
                    throw ValidationError(
                        "experiment: non-finite sample at frame " +
                        std::to_string(k) + ", sub-carrier " + std::to_string(n));
                }
            }
            if (f.rx_time) {
                if (prev_time && *f.rx_time < *prev_time) {
                    throw ValidationError(
                        "experiment: rx_time decreases at frame " +
                        std::to_string(k));
                }
                prev_time = f.rx_time;
            }
        }
        metadata_.validate();
    }

    const std::vector<CsiFrame>& frames() const noexcept { return frames_; }
    const ExperimentMetadata& metadata() const noexcept { return metadata_; }

    /// Number of frames (M_csi).
    std::size_t frame_count() const noexcept { return frames_.size(); }
    /// Number of useful sub-carriers after suppression removal.
    std::size_t n_sc() const noexcept { return n_sc_; }

private:
    std::vector<CsiFrame> frames_;
    ExperimentMetadata metadata_;
    std::size_t n_sc_ = 0;
};

/// Pipeline stage an amplitude matrix belongs to.
enum class Stage { Raw, EnergyNormalized, UnitNormalized };

/**
 * @brief M x N real amplitudes at a declared pipeline stage.
 *
 * Raw and EnergyNormalized matrices carry non-negative finite values;
 * UnitNormalized ones live in [0, 1].  A matrix freshly produced by
 * unit normalization additionally attains 0 and 1 somewhere, but matrices
 * re-entering the unit stage through dequantization need not, so only the
 * range is checked here.
 */
struct AmplitudeMatrix {
    Matrix<double> values;
    Stage stage = Stage::Raw;

    void validate() const {
        for (double v : values.data()) {
            if (!std::isfinite(v)) {
                throw ValidationError("amplitude: non-finite value");
            }
            if (v < 0.0) {
                throw ValidationError("amplitude: negative value");
            }
            if (stage == Stage::UnitNormalized && v > 1.0) {
                throw ValidationError("amplitude: value above 1 at unit stage");
            }
        }
    }
};

/// M x N integer amplitudes on the [0, 2^q_amp - 1] grid.
struct QuantizedMatrix {
    Matrix<std::int32_t> values;
    int q_amp = 10;

    std::int32_t grid_max() const noexcept { return (1 << q_amp) - 1; }

    void validate() const {
        const std::int32_t top = grid_max();
        for (std::int32_t v : values.data()) {
            if (v < 0 || v > top) {
                throw ValidationError("quantized: level outside [0, 2^q_amp - 1]");
            }
        }
    }
};

/**
 * @brief Per-experiment representative CSI, on the unit or quantized scale.
 */
class ReferenceCsi {
public:
    enum class Scale { Unit, Quantized };

    static ReferenceCsi unit(std::vector<double> values) {
        for (double v : values) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ValidationError("reference: unit value outside [0,1]");
            }
        }
        ReferenceCsi r;
        r.scale_ = Scale::Unit;
        r.unit_ = std::move(values);
        return r;
    }

    static ReferenceCsi quantized(std::vector<std::int32_t> levels, int q_amp) {
        const std::int32_t top = (1 << q_amp) - 1;
        for (std::int32_t v : levels) {
            if (v < 0 || v > top) {
                throw ValidationError("reference: level outside grid");
            }
        }
        ReferenceCsi r;
        r.scale_ = Scale::Quantized;
        r.levels_ = std::move(levels);
        r.q_amp_ = q_amp;
        return r;
    }

    Scale scale() const noexcept { return scale_; }
    int q_amp() const {
        if (scale_ != Scale::Quantized) {
            throw ValidationError("reference: q_amp only defined on quantized scale");
        }
        return q_amp_;
    }
    std::size_t size() const noexcept {
        return scale_ == Scale::Unit ? unit_.size() : levels_.size();
    }
    const std::vector<double>& unit_values() const {
        if (scale_ != Scale::Unit) {
            throw ValidationError("reference: not on unit scale");
        }
        return unit_;
    }
    const std::vector<std::int32_t>& levels() const {
        if (scale_ != Scale::Quantized) {
            throw ValidationError("reference: not on quantized scale");
        }
        return levels_;
    }

private:
    ReferenceCsi() = default;
    Scale scale_ = Scale::Unit;
    std::vector<double> unit_;
    std::vector<std::int32_t> levels_;
    int q_amp_ = 0;
};

/**
 * @brief Fitted increment model: Gaussian parameters, truncation bound and
 * the quantized PMF over symmetric integer levels.
 *
 * `delta_star` is the effective (possibly grid-tuned) truncation bound on the
 * unit increment scale; `delta_star_raw` keeps the pre-tuning value so the
 * model document stays auditable.
 */
struct IncrementModel {
    double mu = 0.0;
    double sigma = 0.0;
    double delta_star = 0.0;
    double delta_star_raw = 0.0;
    int q_inc = 4;
    int q_amp = 10;
    std::map<int, double> pmf;  // level in [-(2^(q_inc-1)-1), +(2^(q_inc-1)-1)]

    int level_max() const noexcept { return (1 << (q_inc - 1)) - 1; }

    void validate() const {
        if (q_inc != 3 && q_inc != 4 && q_inc != 5) {
            throw ValidationError("model: q_inc must be 3, 4 or 5");
        }
        if (!(sigma > 0.0)) {
            throw ValidationError("model: sigma must be positive");
        }
        if (!(delta_star > 0.0)) {
            throw ValidationError("model: delta_star must be positive");
        }
        const std::size_t support = (1u << q_inc) - 1;
        if (pmf.size() != support) {
            throw ValidationError("model: pmf support must have 2^q_inc - 1 levels");
        }
        const int top = level_max();
        double total = 0.0;
        for (const auto& [level, p] : pmf) {
            if (level < -top || level > top) {
                throw ValidationError("model: pmf level outside support");
            }
            if (p < 0.0) {
                throw ValidationError("model: negative probability");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw ValidationError("model: pmf does not sum to 1");
        }
        for (const auto& [level, p] : pmf) {
            if (std::abs(p - pmf.at(-level)) > 1e-12) {
                throw ValidationError("model: pmf not symmetric");
            }
        }
    }
};

/**
 * @brief Per-sub-carrier amplitude of a frame (Pythagorean magnitude).
 *
 * Rejects non-finite samples with the offending index.
 */
inline std::vector<double> amplitude(const CsiFrame& frame) {
    std::vector<double> out;
    out.reserve(frame.samples.size());
    for (std::size_t n = 0; n < frame.samples.size(); ++n) {
        const ComplexSample& s = frame.samples[n];
        if (!s.finite()) {
            throw ValidationError("amplitude: non-finite sample at sub-carrier " +
                                  std::to_string(n));
        }
        out.push_back(std::hypot(s.re, s.im));
    }
    return out;
}

/**
 * @brief Per-sub-carrier phase of a frame, four-quadrant, in (-pi, pi].
 *
 * Kept so ingestion is lossless; nothing downstream consumes it.
 */
inline std::vector<double> phase(const CsiFrame& frame) {
    std::vector<double> out;
    out.reserve(frame.samples.size());
    for (std::size_t n = 0; n < frame.samples.size(); ++n) {
        const ComplexSample& s = frame.samples[n];
        if (!s.finite()) {
            throw ValidationError("phase: non-finite sample at sub-carrier " +
                                  std::to_string(n));
        }
        if (s.is_zero()) {
            throw NumericError("phase: undefined for zero sample at sub-carrier " +
                               std::to_string(n));
        }
        out.push_back(std::atan2(s.im, s.re));
    }
    return out;
}

/// Stacks every frame's amplitude into a Raw M x N matrix.
inline AmplitudeMatrix amplitude_matrix(const Experiment& exp) {
    Matrix<double> values(exp.frame_count(), exp.n_sc());
    for (std::size_t k = 0; k < exp.frame_count(); ++k) {
        const std::vector<double> amp = amplitude(exp.frames()[k]);
        auto row = values.row(k);
        for (std::size_t n = 0; n < amp.size(); ++n) row[n] = amp[n];
    }
    return AmplitudeMatrix{std::move(values), Stage::Raw};
}

}  // namespace csistat
