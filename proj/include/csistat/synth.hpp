#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "csistat/model.hpp"
#include "csistat/quant.hpp"
#include "csistat/rng.hpp"

namespace csistat {

/// A generated experiment plus the number of walk steps that hit the grid
/// boundary and were saturated.
struct SynthResult {
    QuantizedMatrix matrix;
    std::size_t clamp_events = 0;
};

/**
 * @brief Random-walk trace generator: frame 1 is the reference, every later
 * frame adds per-sub-carrier integer increments drawn i.i.d. from the model
 * PMF, saturating at the grid boundaries.
 *
 * Draws come from a seeded xoshiro256** stream, consumed frame-major then
 * sub-carrier by sub-carrier, with the PMF walked in ascending level order;
 * a seed therefore pins the output exactly.
 */
inline SynthResult generate_experiment(const ReferenceCsi& ref,
                                       const IncrementModel& model,
                                       std::size_t m_frames,
                                       std::uint64_t seed) {
    if (m_frames < 1) {
        throw ValidationError("generate_experiment: need at least one frame");
    }
    if (ref.scale() != ReferenceCsi::Scale::Quantized) {
        throw ValidationError("generate_experiment: reference must be quantized");
    }
    if (ref.q_amp() != model.q_amp) {
        throw ValidationError("generate_experiment: grid mismatch");
    }
    // Generation accepts any proper distribution on the level support, so
    // deliberately drifting walks stay expressible; the symmetry invariant
    // applies to fitted models, not to the generator input.
    {
        const int top = model.level_max();
        double total = 0.0;
        for (const auto& [level, p] : model.pmf) {
            if (level < -top || level > top || p < 0.0) {
                throw ValidationError("generate_experiment: invalid pmf");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw ValidationError("generate_experiment: pmf does not sum to 1");
        }
    }

    const std::size_t n_sc = ref.size();
    const std::int32_t grid_top = (1 << model.q_amp) - 1;
    Matrix<std::int32_t> out(m_frames, n_sc);
    for (std::size_t n = 0; n < n_sc; ++n) out(0, n) = ref.levels()[n];

    // Cumulative distribution in ascending level order.
    std::vector<int> levels;
    std::vector<double> cdf;
    levels.reserve(model.pmf.size());
    cdf.reserve(model.pmf.size());
    double acc = 0.0;
    for (const auto& [level, p] : model.pmf) {
        acc += p;
        levels.push_back(level);
        cdf.push_back(acc);
    }
    cdf.back() = 1.0;  // close the top against rounding

    Xoshiro256StarStar rng(seed);
    std::size_t clamped = 0;
    for (std::size_t k = 1; k < m_frames; ++k) {
        for (std::size_t n = 0; n < n_sc; ++n) {
            const double u = rng.uniform();
            std::size_t idx = 0;
            while (u >= cdf[idx]) ++idx;
            const std::int32_t next = out(k - 1, n) + levels[idx];
            if (next < 0) {
                out(k, n) = 0;
                ++clamped;
            } else if (next > grid_top) {
                out(k, n) = grid_top;
                ++clamped;
            } else {
                out(k, n) = next;
            }
        }
    }
    return SynthResult{QuantizedMatrix{std::move(out), model.q_amp}, clamped};
}

/// One scenario of a synthetic corpus.
struct SyntheticScenario {
    std::string label;
    ReferenceCsi reference;
    IncrementModel model;
    QuantizedMatrix data;
    ExperimentMetadata metadata;
    std::size_t clamp_events = 0;
};

struct ScenarioSuiteParams {
    std::size_t n_scenarios = 3;
    std::int32_t separation = 100;      // pairwise reference separation, levels
    std::vector<double> spreads;        // per-scenario increment sigma, levels
    std::size_t n_sc = 256;
    std::size_t m_frames = 2000;
    int q_amp = 10;
    int q_inc = 4;
    std::uint64_t seed = 1;
};

/**
 * @brief Builds a labeled synthetic corpus: reference CSIs at pairwise mean
 * separation >= `separation` levels, each expanded into a random walk with
 * its scenario's spread.
 *
 * References share one spectral shape and differ by constant level offsets,
 * so the pairwise mean separation is exactly the offset difference.  Each
 * scenario carries metadata tagging it Empty / Static / FullyDynamic in
 * order, with people counts growing for the dynamic ones.
 */
inline std::vector<SyntheticScenario> make_scenario_suite(
    const ScenarioSuiteParams& params) {
    if (params.n_scenarios < 1) {
        throw ValidationError("scenario suite: need at least one scenario");
    }
    if (params.separation < 1) {
        throw ValidationError("scenario suite: separation must be positive");
    }
    if (params.spreads.size() != params.n_scenarios) {
        throw ValidationError(
            "scenario suite: one spread per scenario required");
    }
    const std::int32_t grid_top = (1 << params.q_amp) - 1;
    const std::int32_t span =
        static_cast<std::int32_t>(params.n_scenarios - 1) * params.separation;
    if (span >= grid_top) {
        throw ValidationError("scenario suite: separations exceed the grid");
    }
    const std::int32_t base = (grid_top - span) / 2;
    const double shape_amp =
        std::min({static_cast<double>(params.separation) / 4.0,
                  static_cast<double>(base) / 2.0,
                  static_cast<double>(grid_top - (base + span)) / 2.0});

    const double step = 1.0 / static_cast<double>(grid_top);
    const int level_cap = (1 << (params.q_inc - 1)) - 1;  // support half-width
    const double delta_star_levels = static_cast<double>(level_cap) + 0.5;

    std::vector<SyntheticScenario> suite;
    suite.reserve(params.n_scenarios);
    for (std::size_t i = 0; i < params.n_scenarios; ++i) {
        const std::int32_t offset =
            base + static_cast<std::int32_t>(i) * params.separation;
        std::vector<std::int32_t> ref_levels(params.n_sc);
        for (std::size_t n = 0; n < params.n_sc; ++n) {
            const double shape =
                shape_amp * std::sin(2.0 * M_PI * 3.0 * static_cast<double>(n) /
                                     static_cast<double>(params.n_sc));
            std::int32_t v = offset + static_cast<std::int32_t>(std::round(shape));
            ref_levels[n] = std::clamp(v, 0, grid_top);
        }
        ReferenceCsi ref =
            ReferenceCsi::quantized(std::move(ref_levels), params.q_amp);

        const double spread = params.spreads[i];
        if (!(spread > 0.0)) {
            throw ValidationError("scenario suite: spreads must be positive");
        }
        IncrementModel model;
        model.mu = 0.0;
        model.sigma = spread * step;
        model.delta_star = delta_star_levels * step;
        model.delta_star_raw = model.delta_star;
        model.q_inc = params.q_inc;
        model.q_amp = params.q_amp;
        // Bins one level wide: delta_star sits half a level past the support.
        model.pmf =
            quantized_gaussian_pmf(spread, params.q_inc, delta_star_levels);

        SynthResult gen = generate_experiment(ref, model, params.m_frames,
                                              params.seed + i);

        ExperimentMetadata meta;
        meta.date = CaptureDate{1, 1, 2024};
        meta.location_id = "SYNTH";
        meta.experiment = "synthetic";
        meta.ad_hoc_transmission = true;
        meta.usleep_us = 10000;
        meta.avg_duration_s = 600;
        meta.bandwidth_mhz = 20;
        meta.modulation = "ax";
        if (i == 0) {
            meta.people = PeopleInfo{false, 0, false, {}};
        } else if (i == 1) {
            meta.people = PeopleInfo{true, 1, false, {}};
        } else {
            meta.people = PeopleInfo{true, static_cast<int>(i), true, {}};
        }
        meta.notes = "synthetic scenario " + std::to_string(i);

        suite.push_back(SyntheticScenario{"S" + std::to_string(i),
                                          std::move(ref), std::move(model),
                                          std::move(gen.matrix), std::move(meta),
                                          gen.clamp_events});
    }
    return suite;
}

}  // namespace csistat
