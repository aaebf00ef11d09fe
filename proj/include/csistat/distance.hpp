#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "csistat/model.hpp"
#include "csistat/quant.hpp"

namespace csistat {

/// Parses a "10110010"-style bit string into 0/1 symbols.
inline std::vector<int> bits_from_string(const std::string& s) {
    std::vector<int> out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') {
            throw ValidationError("bit string: unexpected character '" +
                                  std::string(1, c) + "'");
        }
        out.push_back(c - '0');
    }
    return out;
}

/**
 * @brief Weighted Hamming distance: sum of |a[i] - b[i]| * w[i].
 *
 * Bounded by 0 <= WHD <= sum(w) on bit strings, with the maximum reached by
 * one's complements.
 */
inline long long whd_weighted(std::span<const int> a, std::span<const int> b,
                              std::span<const long long> w) {
    if (a.size() != b.size() || a.size() != w.size()) {
        throw ValidationError("whd_weighted: length mismatch");
    }
    long long acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<long long>(std::abs(a[i] - b[i])) * w[i];
    }
    return acc;
}

inline long long whd_weighted(const std::string& a, const std::string& b,
                              std::span<const long long> w) {
    const auto av = bits_from_string(a);
    const auto bv = bits_from_string(b);
    return whd_weighted(av, bv, w);
}

/// Plain Hamming distance: number of differing positions.
inline std::size_t hamming(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw ValidationError("hamming: length mismatch");
    }
    std::size_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += (a[i] ^ b[i]) != 0;
    }
    return acc;
}

inline std::size_t hamming(const std::string& a, const std::string& b) {
    const auto av = bits_from_string(a);
    const auto bv = bits_from_string(b);
    return hamming(av, bv);
}

/**
 * @brief WHD between two quantized CSI vectors in base-10 form: the bit
 * weights are implicit in the binary-to-decimal conversion, so the distance
 * reduces to the sum of absolute level differences.
 */
inline long long whd_csi(std::span<const std::int32_t> x,
                         std::span<const std::int32_t> y) {
    if (x.size() != y.size()) {
        throw ValidationError("whd_csi: length mismatch");
    }
    long long acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += std::abs(static_cast<long long>(x[i]) - y[i]);
    }
    return acc;
}

/// Mean and population standard deviation of per-frame WHDs.
struct WhdStats {
    double mean = 0.0;
    double std_dev = 0.0;
};

/**
 * @brief Average WHD between a reference CSI and every frame of an
 * experiment, plus the dispersion of the per-frame distances.
 */
inline WhdStats avg_whd(const ReferenceCsi& ref, const QuantizedMatrix& exp) {
    if (ref.scale() != ReferenceCsi::Scale::Quantized) {
        throw ValidationError("avg_whd: reference must be on the quantized scale");
    }
    if (ref.q_amp() != exp.q_amp) {
        throw ValidationError("avg_whd: grid mismatch");
    }
    if (ref.size() != exp.values.cols()) {
        throw ValidationError("avg_whd: sub-carrier count mismatch");
    }
    if (exp.values.rows() == 0) {
        throw ValidationError("avg_whd: empty experiment");
    }
    const auto& levels = ref.levels();
    const double m = static_cast<double>(exp.values.rows());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < exp.values.rows(); ++k) {
        const double d =
            static_cast<double>(whd_csi(levels, exp.values.row(k)));
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / m;
    const double var = std::max(0.0, sum_sq / m - mean * mean);
    return WhdStats{mean, std::sqrt(var)};
}

/// Maximum achievable WHD for the grid: n_sc * (2^q_amp - 1).
inline double max_whd(std::size_t n_sc, int q_amp) {
    return static_cast<double>(n_sc) *
           static_cast<double>((1 << q_amp) - 1);
}

/**
 * @brief Normalizes an average WHD by the maximum achievable distance so
 * experiments across setups become comparable on a [0, 1] scale.
 */
inline double normalized_avg_whd(double mean_whd, std::size_t n_sc, int q_amp) {
    if (n_sc == 0 || q_amp < 1) {
        throw ValidationError("normalized_avg_whd: inputs must be positive");
    }
    if (mean_whd < 0.0) {
        throw ValidationError("normalized_avg_whd: negative mean");
    }
    return mean_whd / max_whd(n_sc, q_amp);
}

/// Classification of a distance-matrix cell.
enum class CellKind { Internal, External, CrossSetup };

inline const char* cell_kind_name(CellKind k) {
    switch (k) {
        case CellKind::Internal: return "Internal";
        case CellKind::External: return "External";
        case CellKind::CrossSetup: return "CrossSetup";
    }
    return "Unknown";
}

/// One experiment entering a distance matrix.
struct LabeledExperiment {
    std::string label;
    QuantizedMatrix data;
    ExperimentMetadata metadata;
};

/**
 * @brief Square matrix of normalized average WHDs between experiments.
 *
 * Cell (i, j) compares the reference CSI of experiment i with all frames of
 * experiment j; the matrix is generally not symmetric.  The diagonal is
 * Internal, off-diagonal cells of the same scenario are External (regardless
 * of people count), different scenarios are CrossSetup.
 */
struct DistanceReport {
    std::vector<std::string> labels;
    Matrix<double> mean;          // normalized average WHD
    Matrix<double> std_dev;       // normalized WHD standard deviation
    Matrix<int> kinds;            // CellKind as int, for flat storage

    CellKind kind(std::size_t i, std::size_t j) const {
        return static_cast<CellKind>(kinds(i, j));
    }
};

inline DistanceReport distance_matrix(
    const std::vector<LabeledExperiment>& experiments, unsigned jobs = 1) {
    if (experiments.empty()) {
        throw ValidationError("distance_matrix: no experiments");
    }
    const std::size_t count = experiments.size();
    const std::size_t n_sc = experiments[0].data.values.cols();
    const int q_amp = experiments[0].data.q_amp;
    for (const auto& e : experiments) {
        if (e.data.q_amp != q_amp || e.data.values.cols() != n_sc) {
            throw ValidationError("distance_matrix: grid mismatch between '" +
                                  experiments[0].label + "' and '" + e.label +
                                  "'");
        }
    }
    std::vector<ReferenceCsi> refs;
    refs.reserve(count);
    for (const auto& e : experiments) refs.push_back(quantized_reference(e.data));

    DistanceReport report;
    report.labels.reserve(count);
    for (const auto& e : experiments) report.labels.push_back(e.label);
    report.mean = Matrix<double>(count, count);
    report.std_dev = Matrix<double>(count, count);
    report.kinds = Matrix<int>(count, count);

    const double denom = max_whd(n_sc, q_amp);
    auto fill_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < count; ++j) {
            const WhdStats stats = avg_whd(refs[i], experiments[j].data);
            report.mean(i, j) = stats.mean / denom;
            report.std_dev(i, j) = stats.std_dev / denom;
            CellKind kind;
            if (i == j) {
                kind = CellKind::Internal;
            } else if (scenario_of(experiments[i].metadata) ==
                       scenario_of(experiments[j].metadata)) {
                kind = CellKind::External;
            } else {
                kind = CellKind::CrossSetup;
            }
            report.kinds(i, j) = static_cast<int>(kind);
        }
    };

    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fill_row(i);
    } else {
        // Rows are independent and write disjoint cells, so the result does
        // not depend on the worker count.
        const unsigned workers =
            static_cast<unsigned>(std::min<std::size_t>(jobs, count));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < count; i += workers) fill_row(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return report;
}

/// Histogram of per-frame normalized WHDs over [0, 1].
struct WhdHistogram {
    std::vector<double> edges;        // n_bins + 1 edges
    std::vector<std::size_t> counts;  // n_bins counts, total = frame count
};

inline WhdHistogram whd_distribution(const ReferenceCsi& ref,
                                     const QuantizedMatrix& exp,
                                     std::size_t n_bins = 100) {
    if (n_bins < 2) {
        throw ValidationError("whd_distribution: need at least 2 bins");
    }
    if (ref.scale() != ReferenceCsi::Scale::Quantized ||
        ref.q_amp() != exp.q_amp || ref.size() != exp.values.cols()) {
        throw ValidationError("whd_distribution: reference/experiment mismatch");
    }
    const double denom = max_whd(exp.values.cols(), exp.q_amp);
    WhdHistogram hist;
    hist.edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        hist.edges[b] = static_cast<double>(b) / static_cast<double>(n_bins);
    }
    hist.counts.assign(n_bins, 0);
    const auto& levels = ref.levels();
    for (std::size_t k = 0; k < exp.values.rows(); ++k) {
        const double v =
            static_cast<double>(whd_csi(levels, exp.values.row(k))) / denom;
        std::size_t bin = static_cast<std::size_t>(
            v * static_cast<double>(n_bins));
        if (bin >= n_bins) bin = n_bins - 1;
        ++hist.counts[bin];
    }
    return hist;
}

/// The two compared matrices plus their elementwise difference, ready for
/// external heatmap plotting.
struct HeatmapTriple {
    Matrix<std::int32_t> a;
    Matrix<std::int32_t> b;
    Matrix<std::int32_t> diff;  // a - b
};

inline HeatmapTriple amplitude_heatmap_export(const QuantizedMatrix& a,
                                              const QuantizedMatrix& b) {
    if (a.values.rows() != b.values.rows() ||
        a.values.cols() != b.values.cols()) {
        throw ValidationError("heatmap: shape mismatch");
    }
    Matrix<std::int32_t> diff(a.values.rows(), a.values.cols());
    for (std::size_t i = 0; i < diff.data().size(); ++i) {
        diff.data()[i] = a.values.data()[i] - b.values.data()[i];
    }
    return HeatmapTriple{a.values, b.values, std::move(diff)};
}

}  // namespace csistat
