#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "csistat/model.hpp"

namespace csistat {

/**
 * @brief h-step increment matrix: out(k, n) = A(k+h, n) - A(k, n).
 *
 * On unit-normalized amplitudes every increment lies in [-1, 1].
 */
inline Matrix<double> increments(const AmplitudeMatrix& m, std::size_t h = 1) {
    if (h < 1) {
        throw ValidationError("increments: step h must be >= 1");
    }
    if (m.values.rows() <= h) {
        throw ValidationError("increments: need more than h frames (h=" +
                              std::to_string(h) + ", frames=" +
                              std::to_string(m.values.rows()) + ")");
    }
    const std::size_t rows = m.values.rows() - h;
    Matrix<double> out(rows, m.values.cols());
    for (std::size_t k = 0; k < rows; ++k) {
        auto lo = m.values.row(k);
        auto hi = m.values.row(k + h);
        auto dst = out.row(k);
        for (std::size_t n = 0; n < dst.size(); ++n) dst[n] = hi[n] - lo[n];
    }
    return out;
}

/**
 * @brief One-step sigma estimate, implemented exactly as printed:
 * the per-sub-carrier root of the summed squares is divided by (M_csi - 1)
 * outside the root, then averaged across sub-carriers.
 *
 * Note this is deliberately not the standard sample standard deviation;
 * the maximum-likelihood fit lives in fit_gaussian.
 */
inline double sigma_paper_one_step(const Matrix<double>& d) {
    if (d.rows() < 1 || d.cols() < 1) {
        throw ValidationError("sigma_paper_one_step: empty increment matrix");
    }
    const double denom = static_cast<double>(d.rows());  // M_csi - 1
    double acc = 0.0;
    for (std::size_t n = 0; n < d.cols(); ++n) {
        double ss = 0.0;
        for (std::size_t k = 0; k < d.rows(); ++k) {
            const double v = d(k, n);
            ss += v * v;
        }
        acc += std::sqrt(ss) / denom;
    }
    return acc / static_cast<double>(d.cols());
}

/**
 * @brief Multi-step sigma estimate pooling h-step increments for
 * h = 1 .. floor(M/2), with M_T = sum over h of (M - h) pooled samples
 * per sub-carrier.
 */
inline double sigma_paper_multi_step(const AmplitudeMatrix& m) {
    const std::size_t rows = m.values.rows();
    if (rows < 4) {
        throw ValidationError("sigma_paper_multi_step: insufficient frames (need >= 4)");
    }
    const std::size_t h_max = rows / 2;
    std::size_t m_t = 0;
    for (std::size_t h = 1; h <= h_max; ++h) m_t += rows - h;
    const double denom = static_cast<double>(m_t) - 1.0;

    double acc = 0.0;
    for (std::size_t n = 0; n < m.values.cols(); ++n) {
        double ss = 0.0;
        for (std::size_t h = 1; h <= h_max; ++h) {
            for (std::size_t k = 0; k + h < rows; ++k) {
                const double v = m.values(k + h, n) - m.values(k, n);
                ss += v * v;
            }
        }
        acc += std::sqrt(ss) / denom;
    }
    return acc / static_cast<double>(m.values.cols());
}

/// Maximum-likelihood Gaussian fit of a pooled sample.
struct GaussianFit {
    double mu = 0.0;
    double sigma = 0.0;      // population denominator
    bool degenerate = false; // all samples equal
};

inline GaussianFit fit_gaussian(std::span<const double> pooled) {
    if (pooled.size() < 2) {
        throw ValidationError("fit_gaussian: need at least 2 samples");
    }
    const double mu =
        pairwise_sum(pooled) / static_cast<double>(pooled.size());
    double ss = 0.0;
    for (double v : pooled) {
        const double c = v - mu;
        ss += c * c;
    }
    const double sigma = std::sqrt(ss / static_cast<double>(pooled.size()));
    return GaussianFit{mu, sigma, sigma == 0.0};
}

/// Pooled fit over every cell of an increment matrix (all sub-carriers
/// concatenated, matching the flat-array fit of the processing code).
inline GaussianFit fit_gaussian(const Matrix<double>& d) {
    return fit_gaussian(std::span<const double>(d.data()));
}

/// Increments mapped into [0, 1]; d_max is the span divided by, so
/// x * d_max + d_min inverts the transform.
struct IncrementNormalization {
    Matrix<double> matrix;
    double d_min = 0.0;
    double d_max = 0.0;
};

/**
 * @brief Applies the amplitude [0,1] mapping verbatim to increments.
 */
inline IncrementNormalization normalize_increments(const Matrix<double>& d) {
    if (d.empty()) {
        throw ValidationError("normalize_increments: empty matrix");
    }
    double lo = d.data()[0];
    double hi = d.data()[0];
    for (double v : d.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    if (!(span > 0.0)) {
        throw NumericError(
            "normalize_increments: degenerate dynamic range (max == min)");
    }
    Matrix<double> out(d.rows(), d.cols());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = (d.data()[i] - lo) / span;
    }
    return IncrementNormalization{std::move(out), lo, span};
}

/**
 * @brief Sample autocorrelation at lags 0..max_lag, mean-removed and
 * normalized so out[0] == 1.
 *
 * Uses the biased estimator (lag sums divided by the full length), which
 * keeps the sequence smooth at large lags.
 */
inline std::vector<double> autocorrelation(std::span<const double> series,
                                           std::size_t max_lag) {
    if (max_lag < 1) {
        throw ValidationError("autocorrelation: max_lag must be >= 1");
    }
    if (series.size() <= max_lag) {
        throw ValidationError("autocorrelation: series shorter than max_lag + 1");
    }
    const double mean =
        pairwise_sum(series) / static_cast<double>(series.size());
    std::vector<double> centered(series.begin(), series.end());
    for (double& v : centered) v -= mean;

    double var = 0.0;
    for (double v : centered) var += v * v;
    if (!(var > 0.0)) {
        throw NumericError("autocorrelation: zero-variance series");
    }
    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t t = 0; t + lag < centered.size(); ++t) {
            acc += centered[t] * centered[t + lag];
        }
        out[lag] = acc / var;  // the two 1/L factors cancel
    }
    return out;
}

}  // namespace csistat
