#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "csistat/model.hpp"

namespace csistat {

namespace detail {

/// Sums rows [lo, hi) column-wise with pairwise splitting over the frame axis.
inline std::vector<double> column_sum_pairwise(const Matrix<double>& m,
                                               std::size_t lo, std::size_t hi) {
    if (hi - lo <= 16) {
        std::vector<double> acc(m.cols(), 0.0);
        for (std::size_t k = lo; k < hi; ++k) {
            auto row = m.row(k);
            for (std::size_t n = 0; n < m.cols(); ++n) acc[n] += row[n];
        }
        return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<double> left = column_sum_pairwise(m, lo, mid);
    std::vector<double> right = column_sum_pairwise(m, mid, hi);
    for (std::size_t n = 0; n < left.size(); ++n) left[n] += right[n];
    return left;
}

}  // namespace detail

/**
 * @brief Removes the AGC gain by dividing each frame by its mean amplitude.
 *
 * After this step every frame has unit mean energy, so per-frame receiver
 * gains cancel exactly: energy_normalize(alpha * m) == energy_normalize(m)
 * for any alpha > 0.
 */
inline AmplitudeMatrix energy_normalize(const AmplitudeMatrix& m) {
    if (m.stage != Stage::Raw) {
        throw ValidationError("energy_normalize: expects a Raw amplitude matrix");
    }
    Matrix<double> out(m.values.rows(), m.values.cols());
    for (std::size_t k = 0; k < m.values.rows(); ++k) {
        auto row = m.values.row(k);
        const double mean = pairwise_sum(row) / static_cast<double>(row.size());
        if (!(mean > 0.0)) {
            throw NumericError("energy_normalize: zero-energy frame " +
                               std::to_string(k));
        }
        auto dst = out.row(k);
        for (std::size_t n = 0; n < row.size(); ++n) dst[n] = row[n] / mean;
    }
    return AmplitudeMatrix{std::move(out), Stage::EnergyNormalized};
}

/// Result of the [0,1] mapping; a_max is the span the values were divided by
/// (the post-subtraction maximum), so x * a_max + a_min inverts the transform.
struct UnitNormalization {
    AmplitudeMatrix matrix;
    double a_min = 0.0;
    double a_max = 0.0;
};

/**
 * @brief Maps the whole experiment into [0, 1].
 *
 * The minimum and maximum are global over all frames and sub-carriers, never
 * per frame; individual frames need not span the full interval, but at least
 * one cell reaches 0 and at least one reaches 1.
 */
inline UnitNormalization unit_normalize(const AmplitudeMatrix& m) {
    if (m.stage != Stage::EnergyNormalized) {
        throw ValidationError(
            "unit_normalize: expects an EnergyNormalized amplitude matrix");
    }
    if (m.values.empty()) {
        throw ValidationError("unit_normalize: empty matrix");
    }
    const auto [lo_it, hi_it] =
        std::minmax_element(m.values.data().begin(), m.values.data().end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    if (!(span > 0.0)) {
        throw NumericError("unit_normalize: degenerate dynamic range (max == min)");
    }
    Matrix<double> out(m.values.rows(), m.values.cols());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = (m.values.data()[i] - lo) / span;
    }
    return UnitNormalization{AmplitudeMatrix{std::move(out), Stage::UnitNormalized},
                             lo, span};
}

/**
 * @brief Per-sub-carrier average over all frames: the experiment's
 * representative CSI.
 */
inline ReferenceCsi reference_csi(const AmplitudeMatrix& m) {
    if (m.stage != Stage::UnitNormalized) {
        throw ValidationError("reference_csi: expects a UnitNormalized matrix");
    }
    if (m.values.rows() == 0) {
        throw ValidationError("reference_csi: empty matrix");
    }
    std::vector<double> sums =
        detail::column_sum_pairwise(m.values, 0, m.values.rows());
    const double inv_m = 1.0 / static_cast<double>(m.values.rows());
    for (double& v : sums) {
        v *= inv_m;
        // Guard the [0,1] invariant against the last rounding step.
        v = std::clamp(v, 0.0, 1.0);
    }
    return ReferenceCsi::unit(std::move(sums));
}

}  // namespace csistat
