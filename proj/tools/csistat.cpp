// Batch front-end for the CSI statistical pipeline: ingestion, conditioning,
// increment modeling, quantization, WHD analysis, desk-scale MI and synthetic
// trace generation.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csistat/pipeline.hpp"

namespace {

int exit_code_for(const csistat::Error& e) {
    switch (e.kind()) {
        case csistat::ErrorKind::Validation: return 1;
        case csistat::ErrorKind::Numeric: return 2;
        case csistat::ErrorKind::Io: return 3;
    }
    return 1;
}

char delimiter_from(const std::string& name) {
    if (name == ",") return ',';
    if (name == ";") return ';';
    if (name == "tab" || name == "\\t") return '\t';
    throw csistat::ValidationError("unsupported delimiter '" + name + "'");
}

void print_written(const std::vector<std::string>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"csistat - CSI trace conditioning, quantization and analysis"};
    app.require_subcommand(1);

    // Global options, visible to every subcommand.
    std::uint64_t seed = 1;
    std::vector<int> q_inc_values;
    bool fixed_3_sigma = false;
    bool skip_header = false;
    bool thesis_style = false;
    unsigned jobs = 1;
    std::string out_dir = ".";
    std::string layout_name = "interleaved";
    app.add_option("--seed", seed, "Seed for synthetic generation")
        ->capture_default_str();
    app.add_option("--q-inc", q_inc_values,
                   "Increment bit widths; the first drives the model")
        ->check(CLI::IsMember({3, 4, 5}));
    app.add_flag("--fixed-3-sigma", fixed_3_sigma,
                 "Use delta* = 3 sigma instead of the tail-weight rule");
    app.add_option("--jobs", jobs, "Worker cap for parallel sections")
        ->capture_default_str();
    app.add_option("--out", out_dir,
                   "Output directory (CSI_STAT_OUT overrides)")
        ->capture_default_str();
    app.add_flag("--header", skip_header, "Skip one header row in trace CSVs");
    app.add_option("--layout", layout_name, "Complex sample layout")
        ->check(CLI::IsMember({"interleaved", "paired"}))
        ->capture_default_str();
    app.add_flag("--thesis-style", thesis_style,
                 "Print distance cells as the first three decimal digits");

    // CSI_STAT_OUT overrides --out, so resolve the directory at use time.
    auto effective_out = [&out_dir]() -> std::string {
        if (const char* env = std::getenv("CSI_STAT_OUT")) return env;
        return out_dir;
    };

    // pipeline
    auto* pipeline = app.add_subcommand(
        "pipeline", "Condition a raw trace and emit its quantized form");
    pipeline->fallthrough();
    std::string trace_path, metadata_path, stem, delimiter_name = ",";
    std::string anchor_name = "dstar";
    pipeline->add_option("trace", trace_path, "Raw trace CSV")->required();
    pipeline->add_option("metadata", metadata_path, "Metadata JSON")->required();
    pipeline->add_option("--delimiter", delimiter_name, "Cell delimiter")
        ->check(CLI::IsMember({",", ";", "tab"}))
        ->capture_default_str();
    pipeline->add_option("--stem", stem, "Output file prefix");
    pipeline
        ->add_option("--anchor", anchor_name,
                     "Increment quantizer anchoring for histogram sweeps")
        ->check(CLI::IsMember({"dstar", "extremes"}))
        ->capture_default_str();
    pipeline->callback([&] {
        csistat::PipelineOptions options;
        options.trace.path = trace_path;
        options.trace.delimiter = delimiter_from(delimiter_name);
        options.trace.skip_header = skip_header;
        options.trace.complex_layout = layout_name == "paired"
                                           ? csistat::ComplexLayout::PairedColumns
                                           : csistat::ComplexLayout::InterleavedReIm;
        options.metadata_path = metadata_path;
        options.out_dir = effective_out();
        options.stem = stem;
        if (!q_inc_values.empty()) options.q_inc_values = q_inc_values;
        options.fixed_3_sigma = fixed_3_sigma;
        options.anchor = anchor_name == "extremes"
                             ? csistat::IncrementAnchor::Extremes
                             : csistat::IncrementAnchor::DeltaStar;
        const csistat::PipelineResult result = csistat::run_pipeline(options);
        for (const auto& warning : result.warnings) {
            std::cerr << "warning: " << warning << '\n';
        }
        print_written(result.written);
    });

    // distance
    auto* distance = app.add_subcommand(
        "distance", "Distance matrix over quantized experiments");
    distance->fallthrough();
    std::vector<std::string> distance_files;
    int q_amp = 10;
    distance
        ->add_option("files", distance_files,
                     "Pairs: quantized CSV then metadata JSON, repeated")
        ->required();
    distance->add_option("--q-amp", q_amp, "Amplitude bit width of the inputs")
        ->capture_default_str();
    distance->callback([&] {
        if (distance_files.size() < 2 || distance_files.size() % 2 != 0) {
            throw csistat::ValidationError(
                "distance: arguments must be (quantized.csv metadata.json) pairs");
        }
        csistat::DistanceCommandOptions options;
        for (std::size_t i = 0; i < distance_files.size(); i += 2) {
            options.inputs.push_back(
                {distance_files[i], distance_files[i + 1]});
        }
        options.q_amp = q_amp;
        options.out_dir = effective_out();
        options.thesis_style = thesis_style;
        options.jobs = jobs;
        print_written(csistat::cmd_distance(options));
    });

    // hist
    auto* hist = app.add_subcommand(
        "hist", "Distribution of the normalized internal WHD");
    hist->fallthrough();
    std::string hist_trace, hist_meta;
    std::size_t bins = 100;
    hist->add_option("trace", hist_trace, "Quantized CSV")->required();
    hist->add_option("metadata", hist_meta, "Metadata JSON")->required();
    hist->add_option("--q-amp", q_amp, "Amplitude bit width")
        ->capture_default_str();
    hist->add_option("--bins", bins, "Histogram bin count")
        ->capture_default_str();
    hist->callback([&] {
        csistat::HistCommandOptions options;
        options.input = {hist_trace, hist_meta};
        options.q_amp = q_amp;
        options.bins = bins;
        options.out_dir = effective_out();
        print_written(csistat::cmd_hist(options));
    });

    // autocorr
    auto* autocorr = app.add_subcommand(
        "autocorr", "Amplitude and increment autocorrelation on a sub-carrier");
    autocorr->fallthrough();
    std::string acf_trace;
    std::size_t subcarrier = 0, max_lag = 50;
    autocorr->add_option("trace", acf_trace, "Quantized CSV")->required();
    autocorr->add_option("--q-amp", q_amp, "Amplitude bit width")
        ->capture_default_str();
    autocorr->add_option("--subcarrier", subcarrier, "Sub-carrier index")
        ->capture_default_str();
    autocorr->add_option("--max-lag", max_lag, "Largest lag")
        ->capture_default_str();
    autocorr->callback([&] {
        csistat::AutocorrCommandOptions options;
        options.trace_path = acf_trace;
        options.q_amp = q_amp;
        options.subcarrier = subcarrier;
        options.max_lag = max_lag;
        options.out_dir = effective_out();
        print_written(csistat::cmd_autocorr(options));
    });

    // heatmap
    auto* heatmap = app.add_subcommand(
        "heatmap", "Two quantized experiments and their difference");
    heatmap->fallthrough();
    std::string heat_a, heat_b;
    heatmap->add_option("a", heat_a, "First quantized CSV")->required();
    heatmap->add_option("b", heat_b, "Second quantized CSV")->required();
    heatmap->add_option("--q-amp", q_amp, "Amplitude bit width")
        ->capture_default_str();
    heatmap->callback([&] {
        csistat::HeatmapCommandOptions options;
        options.trace_a = heat_a;
        options.trace_b = heat_b;
        options.q_amp = q_amp;
        options.out_dir = effective_out();
        print_written(csistat::cmd_heatmap(options));
    });

    // mi
    auto* mi = app.add_subcommand(
        "mi", "Reduced-alphabet internal/external mutual information");
    mi->fallthrough();
    std::vector<std::string> mi_traces;
    std::string model_path;
    int reduction = 4;
    mi->add_option("traces", mi_traces, "One or two quantized CSVs")
        ->required()
        ->expected(1, 2);
    mi->add_option("--model", model_path, "Increment model JSON")->required();
    mi->add_option("--reduce", reduction, "Low bits dropped from the alphabet")
        ->capture_default_str();
    mi->callback([&] {
        csistat::MiCommandOptions options;
        options.trace_paths = mi_traces;
        options.model_path = model_path;
        options.reduction = reduction;
        options.out_dir = effective_out();
        print_written(csistat::cmd_mi(options));
    });

    // synth
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic scenario suite in ingest formats");
    synth->fallthrough();
    std::size_t scenarios = 3, frames = 2000, n_sc = 256;
    std::int32_t separation = 100;
    std::vector<double> spreads;
    int synth_q_amp = 10;
    synth->add_option("--scenarios", scenarios, "Scenario count")
        ->capture_default_str();
    synth->add_option("--separation", separation, "Reference separation, levels")
        ->capture_default_str();
    synth
        ->add_option("--spread", spreads,
                     "Per-scenario increment sigma in levels (one per scenario)")
        ->expected(-1);
    synth->add_option("--frames", frames, "Frames per experiment")
        ->capture_default_str();
    synth->add_option("--subcarriers", n_sc, "Sub-carrier count")
        ->capture_default_str();
    synth->add_option("--q-amp", synth_q_amp, "Amplitude bit width")
        ->capture_default_str();
    synth->callback([&] {
        csistat::SynthCommandOptions options;
        options.params.n_scenarios = scenarios;
        options.params.separation = separation;
        options.params.spreads = spreads.empty()
                                     ? std::vector<double>(scenarios, 2.0)
                                     : spreads;
        options.params.n_sc = n_sc;
        options.params.m_frames = frames;
        options.params.q_amp = synth_q_amp;
        options.params.q_inc = q_inc_values.empty() ? 4 : q_inc_values.front();
        options.params.seed = seed;
        options.out_dir = effective_out();
        options.layout = layout_name == "paired"
                             ? csistat::ComplexLayout::PairedColumns
                             : csistat::ComplexLayout::InterleavedReIm;
        print_written(csistat::cmd_synth(options));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const csistat::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}
