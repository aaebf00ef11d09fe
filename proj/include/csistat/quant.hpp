#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csistat/model.hpp"

namespace csistat {

namespace detail {

inline void require_q_inc(int q_inc) {
    if (q_inc != 3 && q_inc != 4 && q_inc != 5) {
        throw ValidationError("q_inc must be 3, 4 or 5");
    }
}

/// Smallest integer q with 2^q >= x, robust against log2 rounding.
inline int ceil_log2(double x) {
    int q = static_cast<int>(std::ceil(std::log2(x)));
    while (std::ldexp(1.0, q) < x) ++q;
    while (q > 0 && std::ldexp(1.0, q - 1) >= x) --q;
    return q;
}

}  // namespace detail

/**
 * @brief Two-sided tail mass of a zero-mean normal beyond +-delta_star.
 */
inline double gaussian_tail_weight(double delta_star, double sigma) {
    if (!(delta_star > 0.0) || !(sigma > 0.0)) {
        throw ValidationError("gaussian_tail_weight: inputs must be positive");
    }
    return std::erfc(delta_star / (sigma * std::sqrt(2.0)));
}

/// Truncation bound choice: delta_star = n * sigma with the tail weight below
/// 10/n_sc; in_band reports whether the tail also stays above 1/n_sc, i.e.
/// whether it is still estimable from n_sc samples.
struct DeltaStarChoice {
    double delta_star = 0.0;
    int n = 0;
    bool in_band = false;
};

/**
 * @brief Picks the smallest integer multiple of sigma whose two-sided tail
 * weight drops below 10/n_sc.
 *
 * The tail sequence decreases fast, so it can jump the whole
 * (1/n_sc, 10/n_sc) window; in that case in_band is false and the choice
 * still honors the upper bound.
 */
inline DeltaStarChoice select_delta_star(double sigma, std::size_t n_sc) {
    if (!(sigma > 0.0)) {
        throw ValidationError("select_delta_star: sigma must be positive");
    }
    if (n_sc < 2) {
        throw ValidationError("select_delta_star: n_sc must be >= 2");
    }
    const double upper = 10.0 / static_cast<double>(n_sc);
    const double lower = 1.0 / static_cast<double>(n_sc);
    for (int n = 1; n <= 64; ++n) {
        const double tail = std::erfc(n / std::sqrt(2.0));
        if (tail < upper) {
            return DeltaStarChoice{n * sigma, n, tail > lower};
        }
    }
    return DeltaStarChoice{64 * sigma, 64, false};
}

/**
 * @brief Quantized-Gaussian PMF over 2^q_inc - 1 equal-width bins spanning
 * [-delta_star, +delta_star].
 *
 * Interior bins carry the normal mass over the bin; the outermost bins
 * additionally absorb their side's tail beyond +-delta_star.  The negative
 * side is mirrored from the positive one, so symmetry is exact.
 */
inline std::map<int, double> quantized_gaussian_pmf(double sigma, int q_inc,
                                                    double delta_star) {
    detail::require_q_inc(q_inc);
    if (!(sigma > 0.0) || !(delta_star > 0.0)) {
        throw ValidationError("quantized_gaussian_pmf: inputs must be positive");
    }
    const int levels = (1 << q_inc) - 1;
    const int v_max = (levels - 1) / 2;
    const double w = 2.0 * delta_star / levels;
    const double inv = 1.0 / (sigma * std::sqrt(2.0));

    std::map<int, double> pmf;
    // center bin straddles zero
    pmf[0] = std::erf((w / 2.0) * inv);
    for (int v = 1; v <= v_max; ++v) {
        const double lo = v * w - w / 2.0;
        double mass;
        if (v == v_max) {
            mass = 0.5 * std::erfc(lo * inv);  // bin plus everything beyond
        } else {
            const double hi = v * w + w / 2.0;
            mass = 0.5 * (std::erfc(lo * inv) - std::erfc(hi * inv));
        }
        pmf[v] = mass;
        pmf[-v] = mass;
    }
    return pmf;
}

/**
 * @brief Empirical drop-in replacement for the Gaussian PMF: same binning,
 * probabilities from sample frequencies.  Samples beyond +-delta_star
 * accumulate on the boundary bins.
 */
inline std::map<int, double> empirical_pmf(std::span<const double> samples,
                                           int q_inc, double delta_star) {
    detail::require_q_inc(q_inc);
    if (!(delta_star > 0.0)) {
        throw ValidationError("empirical_pmf: delta_star must be positive");
    }
    if (samples.empty()) {
        throw ValidationError("empirical_pmf: no samples");
    }
    const int levels = (1 << q_inc) - 1;
    const int v_max = (levels - 1) / 2;
    const double w = 2.0 * delta_star / levels;
    std::map<int, long long> counts;
    for (int v = -v_max; v <= v_max; ++v) counts[v] = 0;
    for (double x : samples) {
        int v = static_cast<int>(std::round(x / w));
        if (v > v_max) v = v_max;
        if (v < -v_max) v = -v_max;
        ++counts[v];
    }
    std::map<int, double> pmf;
    const double total = static_cast<double>(samples.size());
    for (const auto& [v, c] : counts) pmf[v] = static_cast<double>(c) / total;
    return pmf;
}

/**
 * @brief Amplitude bit budget for a coherent grid:
 * q_amp = ceil(log2((2^q_inc + 1) / delta_star)).
 */
inline int q_amp_from(int q_inc, double delta_star) {
    detail::require_q_inc(q_inc);
    if (!(delta_star > 0.0)) {
        throw ValidationError("q_amp_from: delta_star must be positive");
    }
    if (delta_star > 1.0) {
        throw ValidationError(
            "q_amp_from: delta_star exceeds 1 (increments on the unit scale cannot)");
    }
    const double x = ((1 << q_inc) + 1) / delta_star;
    return detail::ceil_log2(x);
}

/**
 * @brief Rounds delta_star up to the first amplitude sampling boundary,
 * i.e. the smallest multiple of 1/(2^q_amp - 1) that is >= delta_star.
 */
inline double tune_delta_star(double delta_star, int q_amp) {
    if (q_amp < 1) {
        throw ValidationError("tune_delta_star: q_amp must be >= 1");
    }
    if (!(delta_star > 0.0)) {
        throw ValidationError("tune_delta_star: delta_star must be positive");
    }
    const double grid = static_cast<double>((1 << q_amp) - 1);
    const double r = delta_star * grid;
    double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, r)) {
        k = std::ceil(r);
    }
    if (k < 1.0) k = 1.0;
    return k / grid;
}

/**
 * @brief Uniform quantization of unit-scale amplitudes onto
 * [0, 2^q_amp - 1], rounding halves away from zero.
 */
inline QuantizedMatrix quantize_amplitudes(const AmplitudeMatrix& m, int q_amp) {
    if (m.stage != Stage::UnitNormalized) {
        throw ValidationError("quantize_amplitudes: expects a UnitNormalized matrix");
    }
    if (q_amp < 1 || q_amp > 30) {
        throw ValidationError("quantize_amplitudes: q_amp out of range");
    }
    const double top = static_cast<double>((1 << q_amp) - 1);
    Matrix<std::int32_t> out(m.values.rows(), m.values.cols());
    for (std::size_t i = 0; i < m.values.data().size(); ++i) {
        const double v = m.values.data()[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError("quantize_amplitudes: value outside [0,1]");
        }
        out.data()[i] = static_cast<std::int32_t>(std::round(v * top));
    }
    return QuantizedMatrix{std::move(out), q_amp};
}

/**
 * @brief Inverse of quantize_amplitudes up to the rounding error:
 * value = level / (2^q_amp - 1).
 */
inline AmplitudeMatrix dequantize_amplitudes(const QuantizedMatrix& q) {
    q.validate();
    const double top = static_cast<double>(q.grid_max());
    Matrix<double> out(q.values.rows(), q.values.cols());
    for (std::size_t i = 0; i < q.values.data().size(); ++i) {
        out.data()[i] = static_cast<double>(q.values.data()[i]) / top;
    }
    return AmplitudeMatrix{std::move(out), Stage::UnitNormalized};
}

/**
 * @brief Reference CSI of a quantized experiment: per-sub-carrier mean level
 * rounded back onto the grid.
 */
inline ReferenceCsi quantized_reference(const QuantizedMatrix& q) {
    if (q.values.rows() == 0) {
        throw ValidationError("quantized_reference: empty experiment");
    }
    std::vector<std::int32_t> ref(q.values.cols());
    for (std::size_t n = 0; n < q.values.cols(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < q.values.rows(); ++k) {
            acc += static_cast<double>(q.values(k, n));
        }
        ref[n] = static_cast<std::int32_t>(
            std::round(acc / static_cast<double>(q.values.rows())));
    }
    return ReferenceCsi::quantized(std::move(ref), q.q_amp);
}

/**
 * @brief Quantizes increments onto the symmetric level grid
 * [-(2^(q_inc-1)-1), +(2^(q_inc-1)-1)].
 *
 * Values are clamped to [-delta_star, +delta_star] first (tails accumulate
 * on the boundary levels), then mapped linearly with +-delta_star landing on
 * the extreme levels; zero maps to level zero.
 */
inline std::vector<int> quantize_increments(std::span<const double> values,
                                            int q_inc, double delta_star) {
    detail::require_q_inc(q_inc);
    if (!(delta_star > 0.0)) {
        throw ValidationError("quantize_increments: delta_star must be positive");
    }
    const int v_max = (1 << (q_inc - 1)) - 1;
    const double scale = static_cast<double>(v_max) / delta_star;
    std::vector<int> out;
    out.reserve(values.size());
    for (double x : values) {
        const double clamped = std::clamp(x, -delta_star, delta_star);
        int v = static_cast<int>(std::round(clamped * scale));
        v = std::clamp(v, -v_max, v_max);
        out.push_back(v);
    }
    return out;
}

/**
 * @brief Reinterprets an integer-valued amplitude matrix as quantized levels.
 *
 * Used when a quantized trace was round-tripped through the complex trace
 * format; any cell that is not an exact grid level is rejected.
 */
inline QuantizedMatrix quantized_from_amplitudes(const AmplitudeMatrix& m,
                                                 int q_amp) {
    const double top = static_cast<double>((1 << q_amp) - 1);
    Matrix<std::int32_t> out(m.values.rows(), m.values.cols());
    for (std::size_t i = 0; i < m.values.data().size(); ++i) {
        const double v = m.values.data()[i];
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9 || r < 0.0 || r > top) {
            throw ValidationError(
                "quantized_from_amplitudes: value is not a grid level");
        }
        out.data()[i] = static_cast<std::int32_t>(r);
    }
    return QuantizedMatrix{std::move(out), q_amp};
}

/**
 * @brief Sample-extremes variant of the increment quantizer, anchored on the
 * observed min and max instead of +-delta_star:
 * round((x - min) / (max - min) * (2^q_inc - 2)) - (2^(q_inc-1) - 1).
 */
inline std::vector<int> quantize_increments_extremes(
    std::span<const double> values, int q_inc) {
    detail::require_q_inc(q_inc);
    if (values.empty()) {
        throw ValidationError("quantize_increments_extremes: no samples");
    }
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) {
        throw NumericError("quantize_increments_extremes: degenerate range");
    }
    const double span = hi - lo;
    const double steps = static_cast<double>((1 << q_inc) - 2);
    const int offset = (1 << (q_inc - 1)) - 1;
    std::vector<int> out;
    out.reserve(values.size());
    for (double x : values) {
        out.push_back(
            static_cast<int>(std::round((x - lo) / span * steps)) - offset);
    }
    return out;
}

}  // namespace csistat
