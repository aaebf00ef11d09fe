#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csistat/increments.hpp"
#include "csistat/infotheory.hpp"
#include "csistat/ingest.hpp"
#include "csistat/normalize.hpp"
#include "csistat/quant.hpp"
#include "csistat/serialize.hpp"
#include "csistat/synth.hpp"

namespace csistat {

/// Which anchoring the increment quantizer uses in histogram sweeps.
enum class IncrementAnchor { DeltaStar, Extremes };

struct PipelineOptions {
    TraceFileSpec trace;
    std::string metadata_path;
    std::string out_dir = ".";
    std::string stem;                    // output file prefix; default: trace stem
    std::vector<int> q_inc_values = {4};  // first entry drives the model
    bool fixed_3_sigma = false;
    IncrementAnchor anchor = IncrementAnchor::DeltaStar;
};

struct PipelineResult {
    IncrementModel model;
    QuantizedMatrix quantized;
    std::vector<std::size_t> suppressed;
    std::vector<std::string> warnings;
    double a_min = 0.0;
    double a_max = 0.0;
    double sigma_one_step = 0.0;
    std::optional<double> sigma_multi_step;
    int delta_star_multiplier = 0;
    bool delta_star_in_band = false;
    std::vector<std::string> written;  // paths of emitted files
};

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

/**
 * @brief The full conditioning chain: suppression stripping, amplitude
 * extraction, AGC removal, unit normalization, increment fit, truncation
 * bound selection, grid tuning and quantization.
 *
 * Emits the quantized trace, the increment model document and a stage report
 * carrying every constant needed to audit the run.  Extra q_inc values
 * produce per-width increment histogram files comparing the empirical level
 * frequencies with the fitted PMF.
 */
inline PipelineResult run_pipeline(const PipelineOptions& options) {
    if (options.q_inc_values.empty()) {
        throw ValidationError("pipeline: need at least one q_inc");
    }
    PipelineResult result;

    const ExperimentMetadata metadata = load_metadata(options.metadata_path);
    const Experiment raw =
        load_trace(options.trace, metadata, &result.warnings);
    StripResult stripped = strip_suppressed(raw);
    result.suppressed = stripped.removed;

    const AmplitudeMatrix amplitudes = amplitude_matrix(stripped.experiment);
    std::vector<double> frame_energies(amplitudes.values.rows());
    for (std::size_t k = 0; k < amplitudes.values.rows(); ++k) {
        auto row = amplitudes.values.row(k);
        frame_energies[k] =
            pairwise_sum(row) / static_cast<double>(row.size());
    }
    const AmplitudeMatrix energy = energy_normalize(amplitudes);
    UnitNormalization unit = unit_normalize(energy);
    result.a_min = unit.a_min;
    result.a_max = unit.a_max;

    const Matrix<double> diffs = increments(unit.matrix, 1);
    const GaussianFit fit = fit_gaussian(diffs);
    if (fit.degenerate) {
        throw NumericError("pipeline: increments are constant, nothing to model");
    }
    result.sigma_one_step = sigma_paper_one_step(diffs);
    if (unit.matrix.values.rows() >= 4) {
        result.sigma_multi_step = sigma_paper_multi_step(unit.matrix);
    }

    double delta_star_raw;
    if (options.fixed_3_sigma) {
        result.delta_star_multiplier = 3;
        result.delta_star_in_band = false;
        delta_star_raw = 3.0 * fit.sigma;
    } else {
        const DeltaStarChoice choice =
            select_delta_star(fit.sigma, stripped.experiment.n_sc());
        result.delta_star_multiplier = choice.n;
        result.delta_star_in_band = choice.in_band;
        delta_star_raw = choice.delta_star;
    }

    const int q_inc = options.q_inc_values.front();
    const int q_amp = q_amp_from(q_inc, delta_star_raw);
    const double delta_star = tune_delta_star(delta_star_raw, q_amp);

    IncrementModel model;
    model.mu = fit.mu;
    model.sigma = fit.sigma;
    model.delta_star = delta_star;
    model.delta_star_raw = delta_star_raw;
    model.q_inc = q_inc;
    model.q_amp = q_amp;
    model.pmf = quantized_gaussian_pmf(fit.sigma, q_inc, delta_star);
    model.validate();
    result.model = model;

    result.quantized = quantize_amplitudes(unit.matrix, q_amp);

    std::filesystem::create_directories(options.out_dir);
    const std::string stem =
        options.stem.empty()
            ? std::filesystem::path(options.trace.path).stem().string()
            : options.stem;

    const std::string quant_path =
        detail::join_path(options.out_dir, stem + "_quantized.csv");
    write_quantized_matrix_csv(quant_path, result.quantized);
    result.written.push_back(quant_path);

    const std::string model_path =
        detail::join_path(options.out_dir, stem + "_model.json");
    save_model(model_path, model);
    result.written.push_back(model_path);

    // Per-q_inc increment histograms (empirical vs fitted PMF).
    for (int qi : options.q_inc_values) {
        const int qa = q_amp_from(qi, delta_star_raw);
        const double ds = tune_delta_star(delta_star_raw, qa);
        std::vector<int> levels;
        if (options.anchor == IncrementAnchor::DeltaStar) {
            levels = quantize_increments(diffs.data(), qi, ds);
        } else {
            levels = quantize_increments_extremes(diffs.data(), qi);
        }
        std::map<int, double> empirical;
        const int v_max = (1 << (qi - 1)) - 1;
        for (int v = -v_max; v <= v_max; ++v) empirical[v] = 0.0;
        for (int v : levels) empirical[v] += 1.0;
        for (auto& [v, c] : empirical) {
            c /= static_cast<double>(levels.size());
        }
        const std::map<int, double> pmf =
            quantized_gaussian_pmf(fit.sigma, qi, ds);
        const std::string hist_path = detail::join_path(
            options.out_dir, stem + "_increments_qinc" + std::to_string(qi) +
                                 ".csv");
        write_level_pmf_csv(hist_path, empirical, pmf);
        result.written.push_back(hist_path);
    }

    nlohmann::json report{
        {"trace", options.trace.path},
        {"frames", result.quantized.values.rows()},
        {"n_sc", result.quantized.values.cols()},
        {"suppressed_subcarriers", result.suppressed},
        {"warnings", result.warnings},
        {"a_min", result.a_min},
        {"a_max", result.a_max},
        {"frame_energy", frame_energies},
        {"mu", fit.mu},
        {"sigma_mle", fit.sigma},
        {"sigma_one_step", result.sigma_one_step},
        {"delta_star_raw", delta_star_raw},
        {"delta_star_tuned", delta_star},
        {"delta_star_multiplier", result.delta_star_multiplier},
        {"delta_star_in_band", result.delta_star_in_band},
        {"q_inc", q_inc},
        {"q_amp", q_amp},
    };
    if (result.sigma_multi_step) {
        report["sigma_multi_step"] = *result.sigma_multi_step;
    }
    const std::string report_path =
        detail::join_path(options.out_dir, stem + "_report.json");
    write_json_file(report_path, report);
    result.written.push_back(report_path);

    return result;
}

// ---------------------------------------------------------------------------
// Analysis commands over quantized corpora
// ---------------------------------------------------------------------------

/// (quantized CSV, metadata JSON) input pair.
struct ExperimentInput {
    std::string trace_path;
    std::string metadata_path;
};

inline std::vector<LabeledExperiment> load_quantized_experiments(
    const std::vector<ExperimentInput>& inputs, int q_amp) {
    if (inputs.empty()) {
        throw ValidationError("no experiments given");
    }
    std::vector<LabeledExperiment> experiments;
    experiments.reserve(inputs.size());
    for (const auto& input : inputs) {
        ExperimentMetadata meta = load_metadata(input.metadata_path);
        QuantizedMatrix data = read_quantized_matrix_csv(input.trace_path, q_amp);
        experiments.push_back(LabeledExperiment{
            std::filesystem::path(input.trace_path).stem().string(),
            std::move(data), std::move(meta)});
    }
    return experiments;
}

struct DistanceCommandOptions {
    std::vector<ExperimentInput> inputs;
    int q_amp = 10;
    std::string out_dir = ".";
    bool thesis_style = false;
    unsigned jobs = 1;
};

inline std::vector<std::string> cmd_distance(const DistanceCommandOptions& opt) {
    const auto experiments = load_quantized_experiments(opt.inputs, opt.q_amp);
    const DistanceReport report = distance_matrix(experiments, opt.jobs);
    std::filesystem::create_directories(opt.out_dir);
    std::vector<std::string> written;
    const std::string csv = detail::join_path(opt.out_dir, "distance.csv");
    write_distance_csv(csv, report, opt.thesis_style);
    written.push_back(csv);
    const std::string std_csv =
        detail::join_path(opt.out_dir, "distance_std.csv");
    write_distance_std_csv(std_csv, report);
    written.push_back(std_csv);
    const std::string json_path =
        detail::join_path(opt.out_dir, "distance.json");
    write_distance_json(json_path, report);
    written.push_back(json_path);
    return written;
}

struct HistCommandOptions {
    ExperimentInput input;
    int q_amp = 10;
    std::size_t bins = 100;
    std::string out_dir = ".";
};

inline std::vector<std::string> cmd_hist(const HistCommandOptions& opt) {
    const ExperimentMetadata meta = load_metadata(opt.input.metadata_path);
    const QuantizedMatrix data =
        read_quantized_matrix_csv(opt.input.trace_path, opt.q_amp);
    const ReferenceCsi ref = quantized_reference(data);
    const WhdHistogram hist = whd_distribution(ref, data, opt.bins);
    std::filesystem::create_directories(opt.out_dir);
    const std::string stem =
        std::filesystem::path(opt.input.trace_path).stem().string();
    std::vector<std::string> written;
    const std::string csv =
        detail::join_path(opt.out_dir, stem + "_whd_hist.csv");
    write_histogram_csv(csv, hist);
    written.push_back(csv);
    const std::string sidecar =
        detail::join_path(opt.out_dir, stem + "_whd_hist.json");
    write_json_file(sidecar,
                    nlohmann::json{{"experiment", stem},
                                   {"scenario", scenario_name(scenario_of(meta))},
                                   {"bins", opt.bins},
                                   {"q_amp", opt.q_amp},
                                   {"frames", data.values.rows()},
                                   {"n_sc", data.values.cols()}});
    written.push_back(sidecar);
    return written;
}

struct AutocorrCommandOptions {
    std::string trace_path;  // quantized matrix CSV
    int q_amp = 10;
    std::size_t subcarrier = 0;
    std::size_t max_lag = 50;
    std::string out_dir = ".";
};

inline std::vector<std::string> cmd_autocorr(const AutocorrCommandOptions& opt) {
    const QuantizedMatrix data =
        read_quantized_matrix_csv(opt.trace_path, opt.q_amp);
    if (opt.subcarrier >= data.values.cols()) {
        throw ValidationError("autocorr: sub-carrier index out of range");
    }
    std::vector<double> series(data.values.rows());
    for (std::size_t k = 0; k < data.values.rows(); ++k) {
        series[k] = static_cast<double>(data.values(k, opt.subcarrier));
    }
    std::vector<double> diffs(series.size() - 1);
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        diffs[k] = series[k + 1] - series[k];
    }
    const std::vector<double> amp_acf = autocorrelation(series, opt.max_lag);
    const std::vector<double> inc_acf = autocorrelation(diffs, opt.max_lag);

    std::filesystem::create_directories(opt.out_dir);
    const std::string stem =
        std::filesystem::path(opt.trace_path).stem().string();
    std::vector<double> lags(opt.max_lag + 1);
    for (std::size_t l = 0; l <= opt.max_lag; ++l) {
        lags[l] = static_cast<double>(l);
    }
    std::vector<std::string> written;
    const std::string amp_csv =
        detail::join_path(opt.out_dir, stem + "_acf_amplitude.csv");
    write_xy_csv(amp_csv, "lag", "rho", lags, amp_acf);
    written.push_back(amp_csv);
    const std::string inc_csv =
        detail::join_path(opt.out_dir, stem + "_acf_increments.csv");
    write_xy_csv(inc_csv, "lag", "rho", lags, inc_acf);
    written.push_back(inc_csv);
    const std::string sidecar =
        detail::join_path(opt.out_dir, stem + "_acf.json");
    write_json_file(sidecar, nlohmann::json{{"trace", opt.trace_path},
                                            {"subcarrier", opt.subcarrier},
                                            {"max_lag", opt.max_lag},
                                            {"q_amp", opt.q_amp}});
    written.push_back(sidecar);
    return written;
}

struct HeatmapCommandOptions {
    std::string trace_a;
    std::string trace_b;
    int q_amp = 10;
    std::string out_dir = ".";
};

inline std::vector<std::string> cmd_heatmap(const HeatmapCommandOptions& opt) {
    const QuantizedMatrix a = read_quantized_matrix_csv(opt.trace_a, opt.q_amp);
    const QuantizedMatrix b = read_quantized_matrix_csv(opt.trace_b, opt.q_amp);
    const HeatmapTriple triple = amplitude_heatmap_export(a, b);
    std::filesystem::create_directories(opt.out_dir);
    std::vector<std::string> written;
    const std::string a_csv = detail::join_path(opt.out_dir, "heatmap_a.csv");
    write_heatmap_csv(a_csv, triple.a);
    written.push_back(a_csv);
    const std::string b_csv = detail::join_path(opt.out_dir, "heatmap_b.csv");
    write_heatmap_csv(b_csv, triple.b);
    written.push_back(b_csv);
    const std::string d_csv =
        detail::join_path(opt.out_dir, "heatmap_diff.csv");
    write_heatmap_csv(d_csv, triple.diff);
    written.push_back(d_csv);
    const std::string sidecar = detail::join_path(opt.out_dir, "heatmap.json");
    write_json_file(sidecar, nlohmann::json{{"a", opt.trace_a},
                                            {"b", opt.trace_b},
                                            {"q_amp", opt.q_amp}});
    written.push_back(sidecar);
    return written;
}

struct MiCommandOptions {
    std::vector<std::string> trace_paths;  // one or two quantized CSVs
    std::string model_path;
    int reduction = 4;
    std::string out_dir = ".";
};

inline std::vector<std::string> cmd_mi(const MiCommandOptions& opt) {
    if (opt.trace_paths.empty() || opt.trace_paths.size() > 2) {
        throw ValidationError("mi: give one or two quantized traces");
    }
    const IncrementModel model = load_model(opt.model_path);
    std::vector<QuantizedMatrix> data;
    for (const auto& path : opt.trace_paths) {
        data.push_back(read_quantized_matrix_csv(path, model.q_amp));
    }
    nlohmann::json out{
        {"reduction", opt.reduction},
        {"alphabet_size", 1 << (model.q_amp - opt.reduction)},
        {"q_amp", model.q_amp},
        {"note", "reduced-alphabet values; not comparable with full-scale MI"},
    };
    out["internal"] = nlohmann::json::array();
    for (std::size_t i = 0; i < data.size(); ++i) {
        out["internal"].push_back(
            {{"trace", opt.trace_paths[i]},
             {"mi_bits", internal_mi(data[i], model, opt.reduction)}});
    }
    if (data.size() == 2) {
        out["external_ab"] =
            external_mi(data[0], data[1], model, opt.reduction);
        out["external_ba"] =
            external_mi(data[1], data[0], model, opt.reduction);
    }
    std::filesystem::create_directories(opt.out_dir);
    const std::string path = detail::join_path(opt.out_dir, "mi.json");
    write_json_file(path, out);
    return {path};
}

struct SynthCommandOptions {
    ScenarioSuiteParams params;
    std::string out_dir = ".";
    ComplexLayout layout = ComplexLayout::InterleavedReIm;
};

/// Writes a synthetic corpus in the exact formats ingest reads back.
inline std::vector<std::string> cmd_synth(const SynthCommandOptions& opt) {
    const std::vector<SyntheticScenario> suite = make_scenario_suite(opt.params);
    std::filesystem::create_directories(opt.out_dir);
    std::vector<std::string> written;
    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& scenario : suite) {
        const std::string trace_path =
            detail::join_path(opt.out_dir, scenario.label + "_trace.csv");
        write_quantized_trace(trace_path, scenario.data, opt.layout);
        written.push_back(trace_path);
        const std::string meta_path =
            detail::join_path(opt.out_dir, scenario.label + "_metadata.json");
        write_metadata(meta_path, scenario.metadata);
        written.push_back(meta_path);
        const std::string model_path =
            detail::join_path(opt.out_dir, scenario.label + "_model.json");
        save_model(model_path, scenario.model);
        written.push_back(model_path);
        manifest.push_back(
            {{"label", scenario.label},
             {"trace", trace_path},
             {"metadata", meta_path},
             {"model", model_path},
             {"scenario", scenario_name(scenario_of(scenario.metadata))},
             {"clamp_events", scenario.clamp_events}});
    }
    const std::string manifest_path =
        detail::join_path(opt.out_dir, "suite.json");
    write_json_file(manifest_path,
                    nlohmann::json{{"seed", opt.params.seed},
                                   {"scenarios", manifest}});
    written.push_back(manifest_path);
    return written;
}

}  // namespace csistat
