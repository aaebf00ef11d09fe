// End-to-end tests of the batch CLI: golden-file comparisons on a fixed-seed
// synthetic corpus plus exit-code and output-shape checks.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("csistat_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_in(const fs::path& dir, const std::string& args,
           const std::string& redirect = "") {
    std::string cmd = "cd '" + dir.string() + "' && '" CSISTAT_BIN "' " + args;
    if (!redirect.empty()) {
        cmd += " " + redirect;
    } else {
        cmd += " > /dev/null 2> stderr.txt";
    }
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_matches_golden(const fs::path& produced, const std::string& name) {
    const fs::path golden = fs::path(CSISTAT_GOLDEN_DIR) / name;
    INFO("comparing " << produced << " against " << golden);
    REQUIRE(fs::exists(golden));
    REQUIRE(fs::exists(produced));
    CHECK(slurp(produced) == slurp(golden));
}

// The fixed-seed corpus every golden file derives from.
const char* kSynthArgs =
    "synth --scenarios 2 --separation 120 --spread 1.5 3 --frames 60 "
    "--subcarriers 24 --q-amp 10 --seed 11";

void make_corpus(const fs::path& dir) {
    REQUIRE(run_in(dir, kSynthArgs) == 0);
    REQUIRE(run_in(dir,
                   "pipeline S0_trace.csv S0_metadata.json --q-inc 4 "
                   "--q-inc 3 --q-inc 5") == 0);
    REQUIRE(run_in(dir, "pipeline S1_trace.csv S1_metadata.json") == 0);
}

}  // namespace

TEST_CASE("--help lists every subcommand") {
    TempDir dir;
    REQUIRE(run_in(dir.path, "--help", "> help.txt 2>&1") == 0);
    const std::string help = slurp(dir.path / "help.txt");
    for (const char* name :
         {"pipeline", "distance", "hist", "autocorr", "heatmap", "mi",
          "synth"}) {
        INFO("subcommand " << name);
        CHECK(help.find(name) != std::string::npos);
    }
}

TEST_CASE("synthetic corpus generation matches its golden files") {
    TempDir dir;
    REQUIRE(run_in(dir.path, kSynthArgs) == 0);
    for (const char* name :
         {"S0_trace.csv", "S0_metadata.json", "S0_model.json", "S1_trace.csv",
          "S1_metadata.json", "S1_model.json", "suite.json"}) {
        check_matches_golden(dir.path / name, name);
    }
}

TEST_CASE("pipeline outputs match their golden files") {
    TempDir dir;
    make_corpus(dir.path);
    for (const char* name :
         {"S0_trace_quantized.csv", "S0_trace_model.json",
          "S0_trace_report.json", "S0_trace_increments_qinc3.csv",
          "S0_trace_increments_qinc4.csv", "S0_trace_increments_qinc5.csv",
          "S1_trace_quantized.csv"}) {
        check_matches_golden(dir.path / name, name);
    }
}

TEST_CASE("analysis wrappers match their golden files") {
    TempDir dir;
    make_corpus(dir.path);

    SECTION("hist") {
        REQUIRE(run_in(dir.path,
                       "hist S0_trace_quantized.csv S0_metadata.json "
                       "--q-amp 10 --bins 20") == 0);
        check_matches_golden(dir.path / "S0_trace_quantized_whd_hist.csv",
                             "S0_trace_quantized_whd_hist.csv");
        check_matches_golden(dir.path / "S0_trace_quantized_whd_hist.json",
                             "S0_trace_quantized_whd_hist.json");
    }
    SECTION("autocorr") {
        REQUIRE(run_in(dir.path,
                       "autocorr S0_trace_quantized.csv --q-amp 10 "
                       "--subcarrier 3 --max-lag 10") == 0);
        check_matches_golden(dir.path / "S0_trace_quantized_acf_amplitude.csv",
                             "S0_trace_quantized_acf_amplitude.csv");
        check_matches_golden(dir.path / "S0_trace_quantized_acf_increments.csv",
                             "S0_trace_quantized_acf_increments.csv");
        check_matches_golden(dir.path / "S0_trace_quantized_acf.json",
                             "S0_trace_quantized_acf.json");
    }
    SECTION("heatmap") {
        REQUIRE(run_in(dir.path,
                       "heatmap S0_trace_quantized.csv S1_trace_quantized.csv "
                       "--q-amp 10") == 0);
        check_matches_golden(dir.path / "heatmap_a.csv", "heatmap_a.csv");
        check_matches_golden(dir.path / "heatmap_b.csv", "heatmap_b.csv");
        check_matches_golden(dir.path / "heatmap_diff.csv", "heatmap_diff.csv");
    }
    SECTION("mi") {
        REQUIRE(run_in(dir.path,
                       "mi S0_trace_quantized.csv --model S0_trace_model.json "
                       "--reduce 4") == 0);
        check_matches_golden(dir.path / "mi.json", "mi.json");
    }
    SECTION("distance") {
        REQUIRE(run_in(dir.path,
                       "distance S0_trace_quantized.csv S0_metadata.json "
                       "S1_trace_quantized.csv S1_metadata.json --q-amp 10") ==
                0);
        check_matches_golden(dir.path / "distance.csv", "distance.csv");
        check_matches_golden(dir.path / "distance_std.csv", "distance_std.csv");
        check_matches_golden(dir.path / "distance.json", "distance.json");
    }
}

TEST_CASE("distance of a duplicated experiment collapses") {
    TempDir dir;
    make_corpus(dir.path);
    REQUIRE(run_in(dir.path,
                   "distance S0_trace_quantized.csv S0_metadata.json "
                   "S0_trace_quantized.csv S0_metadata.json --q-amp 10") == 0);
    const auto report =
        nlohmann::json::parse(slurp(dir.path / "distance.json"));
    const auto& cells = report.at("cells");
    CHECK(cells[0][0].at("mean") == cells[0][1].at("mean"));
    CHECK(cells[1][0].at("mean") == cells[1][1].at("mean"));
    CHECK(cells[0][0].at("kind") == "Internal");
    CHECK(cells[0][1].at("kind") == "External");
}

TEST_CASE("thesis-style formatting prints three-digit cells") {
    TempDir dir;
    make_corpus(dir.path);
    REQUIRE(run_in(dir.path,
                   "distance S0_trace_quantized.csv S0_metadata.json "
                   "S1_trace_quantized.csv S1_metadata.json --q-amp 10 "
                   "--thesis-style") == 0);
    std::ifstream in(dir.path / "distance.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    // label,ddd,ddd
    const auto first = row.find(',');
    const std::string cell = row.substr(first + 1, 3);
    CHECK(cell.size() == 3);
    for (char c : cell) CHECK(std::isdigit(static_cast<unsigned char>(c)));
    CHECK(row[row.find(',') + 4] == ',');
}

TEST_CASE("CSI_STAT_OUT overrides --out") {
    TempDir dir;
    fs::create_directories(dir.path / "env_wins");
    const std::string cmd =
        "cd '" + dir.path.string() + "' && CSI_STAT_OUT=env_wins '" CSISTAT_BIN
        "' " + std::string(kSynthArgs) + " --out ignored > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir.path / "env_wins" / "suite.json"));
    CHECK_FALSE(fs::exists(dir.path / "ignored" / "suite.json"));
}

TEST_CASE("exit codes follow the error taxonomy") {
    TempDir dir;
    SECTION("missing input file is an I/O failure") {
        CHECK(run_in(dir.path, "pipeline missing.csv missing.json") == 3);
    }
    SECTION("malformed metadata is a validation failure") {
        std::ofstream(dir.path / "t.csv") << "1,0\n";
        std::ofstream(dir.path / "m.json") << "{}";
        CHECK(run_in(dir.path, "pipeline t.csv m.json") == 1);
    }
    SECTION("constant traces are a numeric failure") {
        std::ofstream trace(dir.path / "t.csv");
        for (int k = 0; k < 8; ++k) trace << "3,0,3,0\n";
        trace.close();
        std::ofstream meta(dir.path / "m.json");
        meta << R"({"date":{"day":1,"month":1,"year":2024},"locationID":"L",
                    "experiment":"capture","adHocTransmission":true,
                    "usleep":1000,"avgDuration":60,"bandwidth":20,
                    "modulation":"ax","numRx":1,"numTx":1,"numAntennasTx":1,
                    "numAntennasRx":1,"numSpatialStreams":1,
                    "people":{"present":false,"num":0,"moving":false,
                    "names":[]},"notes":""})";
        meta.close();
        CHECK(run_in(dir.path, "pipeline t.csv m.json") == 2);
    }
    SECTION("empty argument lists are usage errors") {
        CHECK(run_in(dir.path, "distance") == 1);
        CHECK(run_in(dir.path, "") == 1);
        CHECK(run_in(dir.path, "frobnicate") == 1);
    }
}

TEST_CASE("synthetic corpora round-trip through the ingest pipeline") {
    // synth -> pipeline re-quantizes its own output; the conditioning chain
    // on an already-quantized trace must keep every frame's structure.
    TempDir dir;
    make_corpus(dir.path);
    // The pipeline ran on the synthetic traces; its quantized output exists
    // and parses back with the advertised grid.
    const std::string quantized = slurp(dir.path / "S0_trace_quantized.csv");
    std::size_t rows = 0;
    for (char c : quantized) rows += c == '\n';
    CHECK(rows == 60);
}
