#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "csistat/distance.hpp"
#include "csistat/rng.hpp"
#include "csistat/synth.hpp"

using namespace csistat;

namespace {

const std::vector<long long> kByteWeights = {8, 7, 6, 5, 4, 3, 2, 1};

ExperimentMetadata meta_for(Scenario scenario, int people = 0) {
    ExperimentMetadata meta;
    meta.location_id = "U004";
    meta.experiment = "capture";
    meta.modulation = "ax";
    meta.usleep_us = 10000;
    meta.avg_duration_s = 600;
    switch (scenario) {
        case Scenario::Empty:
            meta.people = PeopleInfo{false, 0, false, {}};
            break;
        case Scenario::Static:
            meta.people = PeopleInfo{true, people > 0 ? people : 1, false, {}};
            break;
        case Scenario::FullyDynamic:
            meta.people = PeopleInfo{true, people > 0 ? people : 4, true, {}};
            break;
    }
    return meta;
}

std::vector<std::int32_t> random_levels(std::size_t n, Xoshiro256StarStar& rng,
                                        std::int32_t top) {
    std::vector<std::int32_t> out(n);
    for (auto& v : out) {
        v = static_cast<std::int32_t>(rng.next() % std::uint64_t(top + 1));
    }
    return out;
}

}  // namespace

TEST_CASE("weighted hamming distance worked example") {
    CHECK(whd_weighted("10110010", "11101100", kByteWeights) == 21);
    CHECK(whd_weighted("10110010", "10110010", kByteWeights) == 0);
    CHECK(whd_weighted("10110010", "01001101", kByteWeights) == 36);
    CHECK_THROWS_AS(whd_weighted("101", "10", kByteWeights), ValidationError);
}

TEST_CASE("hamming distance worked example") {
    CHECK(hamming("10011011", "11010001") == 3);
    CHECK(hamming("10011011", "10011011") == 0);
    CHECK(hamming("10011011", "01100100") == 8);
    CHECK_THROWS_AS(hamming("1", "10"), ValidationError);
}

TEST_CASE("whd with unit weights reduces to hamming") {
    Xoshiro256StarStar rng(6);
    const std::vector<long long> ones(16, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> a(16), b(16);
        for (auto& v : a) v = int(rng.next() & 1);
        for (auto& v : b) v = int(rng.next() & 1);
        CHECK(whd_weighted(a, b, ones) ==
              static_cast<long long>(hamming(a, b)));
    }
}

TEST_CASE("csi distance in base 10") {
    const std::vector<std::int32_t> x = {3, 5};
    const std::vector<std::int32_t> y = {1, 9};
    CHECK(whd_csi(x, y) == 6);
    CHECK(whd_csi(x, x) == 0);
    const std::vector<std::int32_t> zeros(4, 0);
    const std::vector<std::int32_t> full(4, 1023);
    CHECK(whd_csi(zeros, full) == 4 * 1023);
    CHECK_THROWS_AS(whd_csi(x, zeros), ValidationError);
}

TEST_CASE("decimal distance carries the bit weights for single-bit changes") {
    // Blocks differing in at most one bit: |a - b| in base 10 equals the
    // weighted bitwise distance with weights 2^(q-1) ... 1 per block.
    Xoshiro256StarStar rng(7);
    const int q = 4;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t blocks = 8;
        std::vector<std::int32_t> a(blocks), b(blocks);
        std::vector<int> bits_a, bits_b;
        std::vector<long long> weights;
        for (std::size_t i = 0; i < blocks; ++i) {
            a[i] = static_cast<std::int32_t>(rng.next() % 16);
            int flip = static_cast<int>(rng.next() % (q + 1));  // q means none
            b[i] = flip == q ? a[i] : (a[i] ^ (1 << flip));
            for (int bit = q - 1; bit >= 0; --bit) {
                bits_a.push_back((a[i] >> bit) & 1);
                bits_b.push_back((b[i] >> bit) & 1);
                weights.push_back(1LL << bit);
            }
        }
        CHECK(whd_csi(a, b) == whd_weighted(bits_a, bits_b, weights));
    }
}

TEST_CASE("csi distance is a metric") {
    Xoshiro256StarStar rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = random_levels(12, rng, 1023);
        const auto b = random_levels(12, rng, 1023);
        const auto c = random_levels(12, rng, 1023);
        CHECK(whd_csi(a, b) >= 0);
        CHECK(whd_csi(a, a) == 0);
        if (a != b) CHECK(whd_csi(a, b) > 0);
        CHECK(whd_csi(a, b) == whd_csi(b, a));
        CHECK(whd_csi(a, c) <= whd_csi(a, b) + whd_csi(b, c));
    }
}

TEST_CASE("average whd statistics") {
    const ReferenceCsi ref = ReferenceCsi::quantized({10, 10}, 10);
    SECTION("all frames equal the reference") {
        QuantizedMatrix exp{Matrix<std::int32_t>(3, 2, {10, 10, 10, 10, 10, 10}),
                            10};
        const WhdStats stats = avg_whd(ref, exp);
        CHECK(stats.mean == 0.0);
        CHECK(stats.std_dev == 0.0);
    }
    SECTION("frames at distances 2 and 4") {
        QuantizedMatrix exp{Matrix<std::int32_t>(2, 2, {11, 11, 12, 12}), 10};
        const WhdStats stats = avg_whd(ref, exp);
        CHECK(stats.mean == Catch::Approx(3.0).margin(1e-15));
        CHECK(stats.std_dev == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("single frame has zero dispersion") {
        QuantizedMatrix exp{Matrix<std::int32_t>(1, 2, {13, 10}), 10};
        const WhdStats stats = avg_whd(ref, exp);
        CHECK(stats.mean == 3.0);
        CHECK(stats.std_dev == 0.0);
    }
    SECTION("grid mismatch is rejected") {
        QuantizedMatrix exp{Matrix<std::int32_t>(1, 2, {1, 1}), 9};
        CHECK_THROWS_AS(avg_whd(ref, exp), ValidationError);
    }
}

TEST_CASE("normalization by the maximum achievable distance") {
    CHECK(normalized_avg_whd(max_whd(256, 10), 256, 10) == 1.0);
    CHECK(normalized_avg_whd(0.0, 256, 10) == 0.0);
    // the linear pre-image of the 0.008 internal cell printed for E0
    CHECK(normalized_avg_whd(2088.98, 256, 10) ==
          Catch::Approx(0.008).margin(5e-4));
    CHECK_THROWS_AS(normalized_avg_whd(-1.0, 256, 10), ValidationError);
}

TEST_CASE("distance matrix structure") {
    SECTION("single experiment gives a 1x1 internal matrix") {
        QuantizedMatrix exp{Matrix<std::int32_t>(2, 3, {1, 2, 3, 3, 2, 1}), 10};
        const DistanceReport report = distance_matrix(
            {{"only", exp, meta_for(Scenario::Empty)}});
        REQUIRE(report.labels.size() == 1);
        CHECK(report.kind(0, 0) == CellKind::Internal);
    }
    SECTION("duplicated experiments collapse to the diagonal value") {
        QuantizedMatrix exp{
            Matrix<std::int32_t>(4, 3,
                                 {5, 9, 2, 6, 8, 3, 5, 9, 2, 7, 8, 4}),
            10};
        const DistanceReport report = distance_matrix(
            {{"a", exp, meta_for(Scenario::Empty)},
             {"b", exp, meta_for(Scenario::Empty)}});
        CHECK(report.mean(0, 1) == report.mean(0, 0));
        CHECK(report.mean(1, 0) == report.mean(1, 1));
        CHECK(report.kind(0, 1) == CellKind::External);
    }
    SECTION("cell kinds follow the scenario classes") {
        QuantizedMatrix exp{Matrix<std::int32_t>(1, 2, {1, 2}), 10};
        const DistanceReport report = distance_matrix(
            {{"e", exp, meta_for(Scenario::Empty)},
             {"fd2", exp, meta_for(Scenario::FullyDynamic, 2)},
             {"fd5", exp, meta_for(Scenario::FullyDynamic, 5)}});
        CHECK(report.kind(0, 1) == CellKind::CrossSetup);
        // same scenario, different people count: external within scenario
        CHECK(report.kind(1, 2) == CellKind::External);
        CHECK(report.kind(2, 2) == CellKind::Internal);
    }
    SECTION("well-separated synthetic scenarios are diagonal-minimal") {
        ScenarioSuiteParams params;
        params.n_scenarios = 3;
        params.separation = 150;
        params.spreads = {1.0, 2.0, 3.0};
        params.n_sc = 32;
        params.m_frames = 200;
        params.seed = 77;
        const auto suite = make_scenario_suite(params);
        std::vector<LabeledExperiment> experiments;
        for (const auto& s : suite) {
            experiments.push_back({s.label, s.data, s.metadata});
        }
        const DistanceReport report = distance_matrix(experiments);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                if (i != j) {
                    CHECK(report.mean(i, i) < report.mean(i, j));
                }
                CHECK(report.mean(i, j) <= 1.0);
                CHECK(report.mean(i, j) >= 0.0);
            }
        }
        SECTION("worker count does not change the result") {
            const DistanceReport parallel = distance_matrix(experiments, 4);
            CHECK(parallel.mean == report.mean);
            CHECK(parallel.std_dev == report.std_dev);
        }
    }
    SECTION("grid mismatch is rejected") {
        QuantizedMatrix a{Matrix<std::int32_t>(1, 2, {1, 2}), 10};
        QuantizedMatrix b{Matrix<std::int32_t>(1, 2, {1, 2}), 9};
        CHECK_THROWS_AS(
            distance_matrix({{"a", a, meta_for(Scenario::Empty)},
                             {"b", b, meta_for(Scenario::Empty)}}),
            ValidationError);
    }
}

TEST_CASE("whd distribution histograms") {
    const ReferenceCsi ref = ReferenceCsi::quantized({100, 100}, 10);
    SECTION("identical frames put all mass in the first bin") {
        QuantizedMatrix exp{
            Matrix<std::int32_t>(5, 2, {100, 100, 100, 100, 100, 100, 100, 100,
                                        100, 100}),
            10};
        const WhdHistogram hist = whd_distribution(ref, exp, 10);
        CHECK(hist.counts[0] == 5);
        for (std::size_t b = 1; b < hist.counts.size(); ++b) {
            CHECK(hist.counts[b] == 0);
        }
    }
    SECTION("two clusters populate two bins") {
        QuantizedMatrix exp{
            Matrix<std::int32_t>(4, 2,
                                 {100, 100, 100, 100, 800, 800, 800, 800}),
            10};
        const WhdHistogram hist = whd_distribution(ref, exp, 4);
        std::size_t populated = 0, total = 0;
        for (std::size_t c : hist.counts) {
            populated += c > 0;
            total += c;
        }
        CHECK(populated == 2);
        CHECK(total == 4);
    }
    SECTION("dynamic scenarios disperse more than static ones") {
        ScenarioSuiteParams params;
        params.n_scenarios = 2;
        params.separation = 100;
        params.spreads = {1.0, 6.0};
        params.n_sc = 32;
        params.m_frames = 400;
        params.seed = 5;
        const auto suite = make_scenario_suite(params);
        double stds[2];
        for (std::size_t i = 0; i < 2; ++i) {
            const WhdStats stats =
                avg_whd(quantized_reference(suite[i].data), suite[i].data);
            stds[i] = stats.std_dev;
        }
        CHECK(stds[1] > stds[0]);
    }
}

TEST_CASE("heatmap export") {
    QuantizedMatrix a{Matrix<std::int32_t>(2, 2, {5, 6, 7, 8}), 10};
    QuantizedMatrix b{Matrix<std::int32_t>(2, 2, {1, 6, 9, 8}), 10};
    const HeatmapTriple ab = amplitude_heatmap_export(a, b);
    CHECK(ab.diff(0, 0) == 4);
    CHECK(ab.diff(0, 1) == 0);
    CHECK(ab.diff(1, 0) == -2);
    const HeatmapTriple ba = amplitude_heatmap_export(b, a);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ab.diff.data()[i] == -ba.diff.data()[i]);
    }
    const HeatmapTriple aa = amplitude_heatmap_export(a, a);
    for (std::int32_t v : aa.diff.data()) CHECK(v == 0);

    QuantizedMatrix c{Matrix<std::int32_t>(1, 2, {1, 2}), 10};
    CHECK_THROWS_AS(amplitude_heatmap_export(a, c), ValidationError);
}
