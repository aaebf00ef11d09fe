#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "csistat/infotheory.hpp"
#include "csistat/rng.hpp"

using namespace csistat;

namespace {

JointPmf random_joint(std::size_t nx, std::size_t ny, Xoshiro256StarStar& rng) {
    Matrix<double> p(nx, ny);
    double total = 0.0;
    for (double& v : p.data()) {
        v = 0.01 + rng.uniform();
        total += v;
    }
    for (double& v : p.data()) v /= total;
    return JointPmf(std::move(p));
}

// Independent double-sum MI oracle over an explicit (increment, symbol)
// joint: the model PMF shifted to the reference level, clamped to the grid
// and coarsened by dropping low bits.  Mirrors nothing of the library code
// path beyond the published construction.
double mi_term_oracle(int ref_level, const IncrementModel& model,
                      int reduction) {
    const int grid_top = (1 << model.q_amp) - 1;
    const std::size_t k_red = std::size_t(1) << (model.q_amp - reduction);
    std::vector<std::vector<double>> joint(model.pmf.size(),
                                           std::vector<double>(k_red, 0.0));
    std::size_t d = 0;
    for (const auto& [level, p] : model.pmf) {
        int x = ref_level + level;
        if (x < 0) x = 0;
        if (x > grid_top) x = grid_top;
        joint[d][std::size_t(x) >> reduction] += p;
        ++d;
    }
    std::vector<double> pd(joint.size(), 0.0);
    std::vector<double> px(k_red, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
        for (std::size_t x = 0; x < k_red; ++x) {
            pd[i] += joint[i][x];
            px[x] += joint[i][x];
        }
    }
    double mi = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
        for (std::size_t x = 0; x < k_red; ++x) {
            const double p = joint[i][x];
            if (p > 0.0) mi += p * std::log2(p / (pd[i] * px[x]));
        }
    }
    return mi;
}

double internal_mi_oracle(const QuantizedMatrix& exp,
                          const IncrementModel& model, int reduction) {
    double per_frame = 0.0;
    for (std::size_t n = 0; n < exp.values.cols(); ++n) {
        double mean = 0.0;
        for (std::size_t k = 0; k < exp.values.rows(); ++k) {
            mean += exp.values(k, n);
        }
        const int ref = static_cast<int>(
            std::round(mean / double(exp.values.rows())));
        per_frame += mi_term_oracle(ref, model, reduction);
    }
    return per_frame * double(exp.values.rows());
}

IncrementModel toy_model(int q_amp, std::map<int, double> pmf) {
    IncrementModel model;
    model.sigma = 0.01;
    model.delta_star = 0.1;
    model.delta_star_raw = 0.1;
    model.q_inc = 3;
    model.q_amp = q_amp;
    model.pmf = std::move(pmf);
    return model;
}

std::map<int, double> symmetric_pmf() {
    return {{-3, 0.05}, {-2, 0.10}, {-1, 0.15}, {0, 0.40},
            {1, 0.15},  {2, 0.10},  {3, 0.05}};
}

std::map<int, double> point_mass_pmf() {
    return {{-3, 0.0}, {-2, 0.0}, {-1, 0.0}, {0, 1.0},
            {1, 0.0},  {2, 0.0},  {3, 0.0}};
}

}  // namespace

TEST_CASE("mutual information basics") {
    SECTION("independent joint has zero MI") {
        Matrix<double> p(4, 4);
        Xoshiro256StarStar rng(1);
        std::vector<double> px(4), py(4);
        double sx = 0, sy = 0;
        for (auto& v : px) { v = 0.1 + rng.uniform(); sx += v; }
        for (auto& v : py) { v = 0.1 + rng.uniform(); sy += v; }
        for (std::size_t x = 0; x < 4; ++x) {
            for (std::size_t y = 0; y < 4; ++y) {
                p(x, y) = (px[x] / sx) * (py[y] / sy);
            }
        }
        CHECK(std::abs(mutual_information(JointPmf(p))) < 1e-12);
    }
    SECTION("deterministic copy over four symbols carries 2 bits") {
        Matrix<double> p(4, 4, 0.0);
        for (std::size_t i = 0; i < 4; ++i) p(i, i) = 0.25;
        CHECK(mutual_information(JointPmf(p)) ==
              Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("entropy identity on a random 8x8 joint") {
        Xoshiro256StarStar rng(2);
        const JointPmf j = random_joint(8, 8, rng);
        const double via_entropies =
            entropy(std::span<const double>(j.marginal_x())) +
            entropy(std::span<const double>(j.marginal_y())) -
            joint_entropy(j);
        CHECK(mutual_information(j) ==
              Catch::Approx(via_entropies).margin(1e-12));
    }
}

TEST_CASE("entropy building blocks") {
    SECTION("uniform over 2^k symbols") {
        for (int k = 1; k <= 4; ++k) {
            std::vector<double> u(std::size_t(1) << k,
                                  1.0 / double(std::size_t(1) << k));
            CHECK(entropy(std::span<const double>(u)) ==
                  Catch::Approx(double(k)).margin(1e-12));
        }
    }
    SECTION("point mass carries nothing") {
        const std::vector<double> p = {0.0, 1.0, 0.0};
        CHECK(entropy(std::span<const double>(p)) == 0.0);
    }
    SECTION("conditional entropy symmetry identity") {
        Xoshiro256StarStar rng(3);
        const JointPmf j = random_joint(5, 7, rng);
        const double lhs =
            entropy(std::span<const double>(j.marginal_x())) -
            conditional_entropy(j, Given::Y);
        const double rhs =
            entropy(std::span<const double>(j.marginal_y())) -
            conditional_entropy(j, Given::X);
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
}

TEST_CASE("all four entropy forms agree with the double sum") {
    Xoshiro256StarStar rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t nx = 2 + rng.next() % 15;
        const std::size_t ny = 2 + rng.next() % 15;
        const JointPmf j = random_joint(nx, ny, rng);
        const double mi = mutual_information(j);
        const double hx = entropy(std::span<const double>(j.marginal_x()));
        const double hy = entropy(std::span<const double>(j.marginal_y()));
        const double hxy = joint_entropy(j);
        CHECK(mi == Catch::Approx(hx - conditional_entropy(j, Given::Y))
                        .margin(1e-12));
        CHECK(mi == Catch::Approx(hy - conditional_entropy(j, Given::X))
                        .margin(1e-12));
        CHECK(mi == Catch::Approx(hx + hy - hxy).margin(1e-12));
        CHECK(mi == Catch::Approx(hxy - conditional_entropy(j, Given::Y) -
                                  conditional_entropy(j, Given::X))
                        .margin(1e-12));
        CHECK(mi >= -1e-12);
        CHECK(mutual_information(j.transposed()) ==
              Catch::Approx(mi).margin(1e-12));
    }
}

TEST_CASE("bilinear logarithm expansion") {
    CHECK(log_bilinear(1.0, 5) == 0.0);
    CHECK(log_bilinear(2.0, 25) == Catch::Approx(std::log(2.0)).margin(1e-10));
    CHECK(log_bilinear(0.5, 25) == Catch::Approx(-std::log(2.0)).margin(1e-10));
    SECTION("error decreases monotonically in the term count") {
        double prev = 1e300;
        for (int t = 1; t <= 20; ++t) {
            const double err = std::abs(log_bilinear(2.0, t) - std::log(2.0));
            if (t <= 5) {
                CHECK(err < prev);  // strict while far from machine precision
            } else {
                CHECK(err <= prev);  // converged sums plateau at rounding
            }
            prev = err;
        }
    }
    CHECK_THROWS_AS(log_bilinear(-1.0, 5), ValidationError);
}

TEST_CASE("taylor expansion of log(x) - log(a)") {
    CHECK(log_taylor_about(1.7, 1.7, 10) == 0.0);
    CHECK(log_taylor_about(1.5, 1.0, 40) ==
          Catch::Approx(std::log(1.5)).margin(1e-9));
    SECTION("about a = 1 it reduces to the centred series term by term") {
        const double x = 1.3;
        for (int terms = 1; terms <= 12; ++terms) {
            double series = 0.0;  // independently-coded centred expansion
            for (int j = 1; j <= terms; ++j) {
                const double term = std::pow(x - 1.0, j) / double(j);
                series += (j % 2 == 1) ? term : -term;
            }
            CHECK(log_taylor_about(x, 1.0, terms) ==
                  Catch::Approx(series).margin(1e-15));
        }
    }
    SECTION("general center") {
        CHECK(log_taylor_about(2.5, 2.0, 60) ==
              Catch::Approx(std::log(2.5) - std::log(2.0)).margin(1e-12));
    }
    SECTION("alternating error decreases monotonically") {
        double prev = 1e300;
        for (int t = 1; t <= 30; ++t) {
            const double err =
                std::abs(log_taylor_about(1.5, 1.0, t) - std::log(1.5));
            if (t <= 5) {
                CHECK(err < prev);
            } else {
                CHECK(err <= prev);
            }
            prev = err;
        }
    }
    CHECK_THROWS_AS(log_taylor_about(2.1, 1.0, 5), NumericError);
}

TEST_CASE("first-order MI under constant marginals") {
    SECTION("uniform conditionals carry nothing") {
        const std::vector<std::vector<double>> cond(
            4, std::vector<double>(4, 0.25));
        CHECK(mi_uniform_marginal(cond, 0.25) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("deterministic conditionals contribute 1 - 1/K per row") {
        const std::size_t k = 8;
        std::vector<std::vector<double>> cond;
        for (std::size_t r = 0; r < 3; ++r) {
            std::vector<double> row(k, 0.0);
            row[r] = 1.0;
            cond.push_back(std::move(row));
        }
        CHECK(mi_uniform_marginal(cond, 1.0 / double(k)) ==
              Catch::Approx(3.0 * (1.0 - 1.0 / double(k))).margin(1e-12));
    }
    SECTION("agrees with exact MI to first order near uniformity") {
        const std::size_t k = 4;
        const double eps = 1e-3;
        // doubly balanced perturbation keeps both marginals uniform
        const double pattern[4][4] = {{+1, -1, 0, 0},
                                      {-1, +1, 0, 0},
                                      {0, 0, +1, -1},
                                      {0, 0, -1, +1}};
        std::vector<std::vector<double>> cond(k, std::vector<double>(k));
        Matrix<double> joint(k, k);
        for (std::size_t y = 0; y < k; ++y) {
            for (std::size_t x = 0; x < k; ++x) {
                cond[y][x] = 1.0 / double(k) + eps * pattern[y][x];
                joint(x, y) = cond[y][x] / double(k);
            }
        }
        const double exact_nats =
            mutual_information(JointPmf(joint)) * std::log(2.0);
        const double approx = mi_uniform_marginal(cond, 1.0 / double(k));
        CHECK(std::abs(approx - exact_nats) <
              (eps * double(k)) * (eps * double(k)));
    }
    SECTION("rows must be distributions") {
        const std::vector<std::vector<double>> bad = {{0.5, 0.4}};
        CHECK_THROWS_AS(mi_uniform_marginal(bad, 0.5), ValidationError);
    }
}

TEST_CASE("log-domain CSI probability") {
    CHECK(csi_log_probability(256, 10) == -2560.0);
    CHECK(csi_log_probability(1, 1) == -1.0);
    CHECK(csi_log_probability(1024, 10) == -10240.0);
}

TEST_CASE("internal MI on desk-scale toys") {
    SECTION("deterministic model over frames equal to the reference is zero") {
        Matrix<std::int32_t> frames(4, 2);
        for (std::size_t k = 0; k < 4; ++k) {
            frames(k, 0) = 3;
            frames(k, 1) = 5;
        }
        const QuantizedMatrix exp{frames, 3};
        const IncrementModel model = toy_model(3, point_mass_pmf());
        CHECK(internal_mi(exp, model, 1) == 0.0);
    }
    SECTION("matches the brute-force double-sum oracle") {
        const QuantizedMatrix exp{
            Matrix<std::int32_t>(3, 2, {1, 6, 2, 7, 0, 5}), 3};
        const IncrementModel model = toy_model(3, symmetric_pmf());
        const double got = internal_mi(exp, model, 1);
        CHECK(got == Catch::Approx(internal_mi_oracle(exp, model, 1))
                         .margin(1e-12));
        CHECK(got > 0.0);
    }
    SECTION("per-sub-carrier term equals the entropy of the conditional") {
        const IncrementModel model = toy_model(3, symmetric_pmf());
        for (int ref = 0; ref <= 7; ++ref) {
            const auto cond = shifted_conditional(ref, model, 1);
            CHECK(mi_term_oracle(ref, model, 1) ==
                  Catch::Approx(entropy(std::span<const double>(cond)))
                      .margin(1e-12));
        }
    }
    SECTION("identical experiments and models give identical MI") {
        const QuantizedMatrix exp{
            Matrix<std::int32_t>(3, 2, {1, 6, 2, 7, 0, 5}), 3};
        const IncrementModel model = toy_model(3, symmetric_pmf());
        CHECK(internal_mi(exp, model, 1) == internal_mi(exp, model, 1));
    }
    SECTION("rejects a reduction that leaves an oversized alphabet") {
        const QuantizedMatrix exp{Matrix<std::int32_t>(2, 1, {0, 1}), 20};
        IncrementModel model = toy_model(20, symmetric_pmf());
        CHECK_THROWS_WITH(internal_mi(exp, model, 2),
                          Catch::Matchers::ContainsSubstring("reduction >= 8"));
    }
    SECTION("rejects r = 0") {
        const QuantizedMatrix exp{Matrix<std::int32_t>(2, 1, {0, 1}), 3};
        const IncrementModel model = toy_model(3, symmetric_pmf());
        CHECK_THROWS_AS(internal_mi(exp, model, 0), ValidationError);
    }
}

TEST_CASE("external MI on desk-scale toys") {
    const IncrementModel model_a = toy_model(3, symmetric_pmf());
    IncrementModel model_b = toy_model(3, {{-3, 0.02}, {-2, 0.08}, {-1, 0.25},
                                           {0, 0.30}, {1, 0.25}, {2, 0.08},
                                           {3, 0.02}});
    const QuantizedMatrix exp_a{
        Matrix<std::int32_t>(3, 2, {1, 6, 2, 7, 0, 5}), 3};
    const QuantizedMatrix exp_b{
        Matrix<std::int32_t>(5, 2, {4, 1, 5, 2, 3, 1, 4, 2, 4, 1}), 3};

    SECTION("external against itself equals internal") {
        CHECK(external_mi(exp_a, exp_a, model_a, 1) ==
              Catch::Approx(internal_mi(exp_a, model_a, 1)).margin(1e-12));
    }
    SECTION("matches the oracle with the other experiment's frame count") {
        // reference and model of A, frames counted from B
        const double oracle =
            internal_mi_oracle(exp_a, model_a, 1) /
            double(exp_a.values.rows()) * double(exp_b.values.rows());
        CHECK(external_mi(exp_a, exp_b, model_a, 1) ==
              Catch::Approx(oracle).margin(1e-12));
    }
    SECTION("the pair of external values differs on asymmetric input") {
        const double e_ab = external_mi(exp_a, exp_b, model_a, 1);
        const double e_ba = external_mi(exp_b, exp_a, model_b, 1);
        CHECK(e_ab != e_ba);
    }
}
