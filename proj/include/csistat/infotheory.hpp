#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csistat/model.hpp"
#include "csistat/quant.hpp"

namespace csistat {

/**
 * @brief Joint probability mass function of two discrete variables.
 *
 * probabilities(x, y) indexes the X alphabet on rows and the Y alphabet on
 * columns; entries are non-negative and sum to 1 within 1e-12.
 */
class JointPmf {
public:
    explicit JointPmf(Matrix<double> probabilities)
        : p_(std::move(probabilities)) {
        if (p_.empty()) {
            throw ValidationError("joint pmf: empty matrix");
        }
        double total = 0.0;
        for (double v : p_.data()) {
            if (v < 0.0) {
                throw ValidationError("joint pmf: negative probability");
            }
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw ValidationError("joint pmf: probabilities sum to " +
                                  std::to_string(total) + ", expected 1");
        }
    }

    const Matrix<double>& probabilities() const noexcept { return p_; }
    std::size_t x_size() const noexcept { return p_.rows(); }
    std::size_t y_size() const noexcept { return p_.cols(); }

    std::vector<double> marginal_x() const {
        std::vector<double> out(p_.rows(), 0.0);
        for (std::size_t x = 0; x < p_.rows(); ++x) {
            for (std::size_t y = 0; y < p_.cols(); ++y) out[x] += p_(x, y);
        }
        return out;
    }

    std::vector<double> marginal_y() const {
        std::vector<double> out(p_.cols(), 0.0);
        for (std::size_t x = 0; x < p_.rows(); ++x) {
            for (std::size_t y = 0; y < p_.cols(); ++y) out[y] += p_(x, y);
        }
        return out;
    }

    JointPmf transposed() const {
        Matrix<double> t(p_.cols(), p_.rows());
        for (std::size_t x = 0; x < p_.rows(); ++x) {
            for (std::size_t y = 0; y < p_.cols(); ++y) t(y, x) = p_(x, y);
        }
        return JointPmf(std::move(t));
    }

private:
    Matrix<double> p_;
};

/**
 * @brief Mutual information of a joint PMF, in bits.
 *
 * Zero-probability cells contribute nothing: the vanishing factor in front of
 * the logarithm wins, so 0 * log(0 / q) = 0 by convention.
 */
inline double mutual_information(const JointPmf& j) {
    const auto px = j.marginal_x();
    const auto py = j.marginal_y();
    double acc = 0.0;
    for (std::size_t x = 0; x < j.x_size(); ++x) {
        for (std::size_t y = 0; y < j.y_size(); ++y) {
            const double p = j.probabilities()(x, y);
            if (p > 0.0) {
                acc += p * std::log2(p / (px[x] * py[y]));
            }
        }
    }
    return acc;
}

/// Shannon entropy of a marginal PMF, in bits, with 0 log 0 = 0.
inline double entropy(std::span<const double> pmf) {
    double acc = 0.0;
    for (double p : pmf) {
        if (p < 0.0) {
            throw ValidationError("entropy: negative probability");
        }
        if (p > 0.0) acc -= p * std::log2(p);
    }
    return acc;
}

inline double entropy(const std::map<int, double>& pmf) {
    double acc = 0.0;
    for (const auto& [level, p] : pmf) {
        if (p > 0.0) acc -= p * std::log2(p);
    }
    return acc;
}

/// Joint entropy H(X, Y) in bits.
inline double joint_entropy(const JointPmf& j) {
    return entropy(std::span<const double>(j.probabilities().data()));
}

/// Which variable is known in a conditional entropy.
enum class Given { X, Y };

/// H(X|Y) for Given::Y, H(Y|X) for Given::X.
inline double conditional_entropy(const JointPmf& j, Given given) {
    if (given == Given::Y) {
        return joint_entropy(j) - entropy(std::span<const double>(j.marginal_y()));
    }
    return joint_entropy(j) - entropy(std::span<const double>(j.marginal_x()));
}

/**
 * @brief Bilinear (atanh-style) expansion of the natural logarithm:
 * 2 * sum over odd j <= 2*terms - 1 of (1/j) * ((x-1)/(x+1))^j.
 */
inline double log_bilinear(double x, int terms) {
    if (!(x > 0.0)) {
        throw ValidationError("log_bilinear: x must be positive");
    }
    if (terms < 1) {
        throw ValidationError("log_bilinear: need at least one term");
    }
    const double u = (x - 1.0) / (x + 1.0);
    const double u2 = u * u;
    double power = u;
    double acc = 0.0;
    for (int t = 0; t < terms; ++t) {
        const int j = 2 * t + 1;
        acc += power / static_cast<double>(j);
        power *= u2;
    }
    return 2.0 * acc;
}

/**
 * @brief Taylor expansion of log(x) - log(a) about a:
 * sum of (-1)^(j+1) (x-a)^j / (j a^j).
 *
 * Converges only for |x - a| < a; outside that region the call is rejected.
 */
inline double log_taylor_about(double x, double a, int terms) {
    if (!(a > 0.0)) {
        throw ValidationError("log_taylor_about: a must be positive");
    }
    if (terms < 1) {
        throw ValidationError("log_taylor_about: need at least one term");
    }
    const double d = x - a;
    if (!(std::abs(d) < a)) {
        throw NumericError("log_taylor_about: |x - a| >= a, series diverges");
    }
    const double u = d / a;
    double power = u;
    double acc = 0.0;
    for (int j = 1; j <= terms; ++j) {
        acc += (j % 2 == 1 ? power : -power) / static_cast<double>(j);
        power *= u;
    }
    return acc;
}

/**
 * @brief First-order MI approximation under constant marginals:
 * sum over reference symbols and values of P(a|a*) * (P(a|a*) - uniform_p).
 *
 * This is the natural-log first-order expansion with the marginal weights
 * cancelled, not a true mutual information; it is exact only in the limit of
 * conditionals close to the uniform marginal.
 */
inline double mi_uniform_marginal(
    const std::vector<std::vector<double>>& conditionals, double uniform_p) {
    if (!(uniform_p > 0.0 && uniform_p <= 1.0)) {
        throw ValidationError("mi_uniform_marginal: uniform_p must be in (0, 1]");
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < conditionals.size(); ++r) {
        const auto& row = conditionals[r];
        double row_sum = 0.0;
        for (double p : row) row_sum += p;
        if (std::abs(row_sum - 1.0) > 1e-9) {
            throw ValidationError("mi_uniform_marginal: conditional row " +
                                  std::to_string(r) + " does not sum to 1");
        }
        for (double p : row) acc += p * (p - uniform_p);
    }
    return acc;
}

/**
 * @brief log2-probability of one full CSI under the uniform-alphabet
 * assumption: -n_sc * q_amp.
 *
 * Kept in the log domain on purpose; the linear value underflows for any
 * realistic alphabet.
 */
inline double csi_log_probability(std::size_t n_sc, int q_amp) {
    if (n_sc == 0 || q_amp < 1) {
        throw ValidationError("csi_log_probability: inputs must be positive");
    }
    return -static_cast<double>(n_sc) * static_cast<double>(q_amp);
}

namespace detail {

inline int required_reduction(int q_amp) { return q_amp > 12 ? q_amp - 12 : 0; }

inline void check_reduction(int q_amp, int reduction) {
    if (reduction < 1) {
        throw ValidationError("mi: alphabet reduction must be >= 1");
    }
    if (reduction >= q_amp) {
        throw ValidationError("mi: reduction leaves no alphabet bits");
    }
    if (q_amp - reduction > 12) {
        throw NumericError(
            "mi: reduced alphabet too large for per-sub-carrier joints; need "
            "reduction >= " +
            std::to_string(required_reduction(q_amp)));
    }
}

}  // namespace detail

/**
 * @brief Conditional distribution of a frame symbol on the reduced alphabet,
 * given a reference level: the model PMF shifted to the reference, clamped to
 * the grid, then coarsened by dropping `reduction` low bits.
 */
inline std::vector<double> shifted_conditional(std::int32_t ref_level,
                                               const IncrementModel& model,
                                               int reduction) {
    const std::int32_t grid_top = (1 << model.q_amp) - 1;
    const std::size_t reduced_size =
        static_cast<std::size_t>(1) << (model.q_amp - reduction);
    std::vector<double> cond(reduced_size, 0.0);
    for (const auto& [level, p] : model.pmf) {
        std::int32_t x = std::clamp(ref_level + level, 0, grid_top);
        cond[static_cast<std::size_t>(x) >> reduction] += p;
    }
    return cond;
}

namespace detail {

/**
 * Per-frame MI contribution of one sub-carrier: the mutual information
 * between the increment draw and the resulting reduced symbol, evaluated
 * through the explicit joint.  The symbol is a function of the draw, so the
 * value equals the entropy of the shifted conditional; a deterministic model
 * therefore contributes zero.
 */
inline double subcarrier_mi_term(std::int32_t ref_level,
                                 const IncrementModel& model, int reduction) {
    const std::int32_t grid_top = (1 << model.q_amp) - 1;
    const std::size_t reduced_size =
        static_cast<std::size_t>(1) << (model.q_amp - reduction);
    Matrix<double> joint(model.pmf.size(), reduced_size, 0.0);
    std::size_t row = 0;
    for (const auto& [level, p] : model.pmf) {
        std::int32_t x = std::clamp(ref_level + level, 0, grid_top);
        joint(row, static_cast<std::size_t>(x) >> reduction) += p;
        ++row;
    }
    return mutual_information(JointPmf(std::move(joint)));
}

}  // namespace detail

/**
 * @brief Internal MI of an experiment: the per-frame MI between the reference
 * CSI and a frame, summed over frames.
 *
 * Each per-frame term is itself a sum of per-sub-carrier MI values on the
 * alphabet reduced by `reduction` low bits, treating sub-carriers as
 * independent.  The one-step conditional is the model PMF shifted to the
 * reference level, so every frame of the experiment contributes the same
 * amount and the total scales with the frame count.
 */
inline double internal_mi(const QuantizedMatrix& exp, const IncrementModel& model,
                          int reduction) {
    detail::check_reduction(model.q_amp, reduction);
    if (exp.q_amp != model.q_amp) {
        throw ValidationError("internal_mi: experiment and model grids differ");
    }
    model.validate();
    const ReferenceCsi ref = quantized_reference(exp);
    double per_frame = 0.0;
    for (std::int32_t level : ref.levels()) {
        per_frame += detail::subcarrier_mi_term(level, model, reduction);
    }
    return per_frame * static_cast<double>(exp.values.rows());
}

/**
 * @brief External MI: the reference and increment model come from one
 * experiment, the frames from another.  E(A,B) and E(B,A) are generally
 * different.
 */
inline double external_mi(const QuantizedMatrix& ref_exp,
                          const QuantizedMatrix& other_exp,
                          const IncrementModel& model_of_ref, int reduction) {
    detail::check_reduction(model_of_ref.q_amp, reduction);
    if (ref_exp.q_amp != other_exp.q_amp ||
        ref_exp.q_amp != model_of_ref.q_amp) {
        throw ValidationError("external_mi: grid mismatch between experiments");
    }
    if (ref_exp.values.cols() != other_exp.values.cols()) {
        throw ValidationError("external_mi: sub-carrier counts differ");
    }
    model_of_ref.validate();
    const ReferenceCsi ref = quantized_reference(ref_exp);
    double per_frame = 0.0;
    for (std::int32_t level : ref.levels()) {
        per_frame += detail::subcarrier_mi_term(level, model_of_ref, reduction);
    }
    return per_frame * static_cast<double>(other_exp.values.rows());
}

}  // namespace csistat
