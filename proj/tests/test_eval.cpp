#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "scengen/data.hpp"
#include "scengen/errors.hpp"
#include "scengen/eval.hpp"
#include "scengen/rng.hpp"

using namespace scengen;

namespace {

ScenarioBatch two_site_batch() {
    // two samples, T = 3; site series pool to length-6 vectors
    Matrix s0(2, 3), s1(2, 3);
    s0(0, 0) = 0.1; s0(0, 1) = 0.5; s0(0, 2) = 0.9;
    s0(1, 0) = 0.2; s0(1, 1) = 0.4; s0(1, 2) = 0.3;
    s1(0, 0) = 0.3; s1(0, 1) = 0.7; s1(0, 2) = 0.2;
    s1(1, 0) = 0.9; s1(1, 1) = 0.1; s1(1, 2) = 0.5;
    return ScenarioBatch::make(2, 3, {s0, s1}, {});
}

Matrix constant_sample(std::size_t sites, std::size_t T, double v) {
    return Matrix(sites, T, v);
}

ScenarioBatch five_scenario_batch() {
    std::vector<std::vector<double>> rows = {
        {0.0, 0.2, 0.4, 0.6},
        {0.1, 0.1, 0.1, 0.1},
        {0.9, 0.8, 0.7, 1.0},
        {0.3, 0.5, 0.2, 0.4},
        {0.05, 0.9, 0.6, 0.25},
    };
    std::vector<Matrix> samples;
    for (const auto& r : rows) {
        Matrix m(1, 4);
        m.data = r;
        samples.push_back(m);
    }
    return ScenarioBatch::make(1, 4, samples, {});
}

}  // namespace

TEST_CASE("pooled pearson matrix matches an external oracle") {
    auto c = pearson_matrix(two_site_batch());
    REQUIRE(c.n == 2);
    CHECK(c.at(0, 0) == 1.0);
    CHECK(c.at(1, 1) == 1.0);
    CHECK(c.at(0, 1) == doctest::Approx(-0.34412360080584264).epsilon(1e-12));
    CHECK(c.at(0, 1) == c.at(1, 0));
    CHECK(c.defined(0, 1));
}

TEST_CASE("pearson marks correlations with constant series as undefined") {
    Matrix s0(2, 3), s1(2, 3);
    for (std::size_t t = 0; t < 3; ++t) {
        s0(0, t) = 0.1 * (t + 1);
        s0(1, t) = 0.5;  // constant site
        s1(0, t) = 0.9 - 0.2 * t;
        s1(1, t) = 0.5;
    }
    auto batch = ScenarioBatch::make(2, 3, {s0, s1}, {});
    auto c = pearson_matrix(batch);
    CHECK(c.defined(0, 0));
    CHECK(c.at(1, 1) == 1.0);  // diagonal stays defined by convention
    CHECK_FALSE(c.defined(0, 1));
    CHECK_FALSE(c.defined(1, 0));
    CHECK(std::isnan(c.at(0, 1)));

    // single-site batches have no cross-correlations to report
    auto single = ScenarioBatch::make(1, 3, {Matrix(1, 3, 0.2)}, {});
    CHECK_THROWS_AS(pearson_matrix(single), ValidationError);
}

TEST_CASE("pearson clamps tiny numeric overshoot into [-1, 1]") {
    // perfectly anti-correlated sites
    Matrix s(2, 4);
    for (std::size_t t = 0; t < 4; ++t) {
        s(0, t) = 0.1 + 0.2 * t;
        s(1, t) = 0.9 - 0.2 * t;
    }
    auto c = pearson_matrix(ScenarioBatch::make(2, 4, {s}, {}));
    CHECK(c.at(0, 1) >= -1.0);
    CHECK(c.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("correlation distance is the Frobenius norm of the difference") {
    CorrelationMatrix a, b;
    a.n = b.n = 2;
    a.values = {1.0, 0.5, 0.5, 1.0};
    b.values = {1.0, 0.1, 0.1, 1.0};
    CHECK(correlation_distance(a, b) == doctest::Approx(0.5656854249492381).epsilon(1e-12));
    CHECK(correlation_distance(a, a) == 0.0);

    CorrelationMatrix c;
    c.n = 3;
    c.values.assign(9, 0.0);
    CHECK_THROWS_AS(correlation_distance(a, c), ValidationError);
    b.values[1] = std::nan("");
    CHECK_THROWS_AS(correlation_distance(a, b), ValidationError);
}

TEST_CASE("linear-interpolation quantiles match the standard convention") {
    std::vector<double> sorted = {0.1, 0.2, 0.35, 0.5, 0.8};
    CHECK(quantile_sorted(sorted, 0.0) == 0.1);
    CHECK(quantile_sorted(sorted, 1.0) == 0.8);
    CHECK(quantile_sorted(sorted, 0.25) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(quantile_sorted(sorted, 0.5) == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(quantile_sorted(sorted, 0.75) == doctest::Approx(0.5).epsilon(1e-12));
    // h = 0.6 * 4 = 2.4 interpolates between elements 2 and 3
    CHECK(quantile_sorted(sorted, 0.6) == doctest::Approx(0.41).epsilon(1e-12));
    CHECK(quantile_sorted({7.0}, 0.3) == 7.0);
    CHECK_THROWS_AS(quantile_sorted({}, 0.5), ValidationError);
    CHECK_THROWS_AS(quantile_sorted(sorted, -0.1), ValidationError);
    CHECK_THROWS_AS(quantile_sorted(sorted, 1.1), ValidationError);
}

TEST_CASE("box stats keep whiskers at extreme data inside the 1.5 IQR fences") {
    auto b = box_stats({1.0, 2.0, 2.5, 3.0, 3.5, 4.0, 100.0});
    CHECK(b.q1 == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(b.median == 3.0);
    CHECK(b.q3 == doctest::Approx(3.75).epsilon(1e-12));
    CHECK(b.whisker_lo == 1.0);
    CHECK(b.whisker_hi == 4.0);  // 100 sits outside the upper fence

    CHECK_THROWS_AS(box_stats({1.0, 2.0, 3.0}), ValidationError);  // needs >= 4 values
}

TEST_CASE("generator stats summarize per-scenario means and variances") {
    auto st = generator_stats(five_scenario_batch());
    REQUIRE(st.scenario_means.size() == 5);
    CHECK(st.scenario_means[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(st.scenario_means[2] == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(st.scenario_variances[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(st.scenario_variances[4] == doctest::Approx(0.10625).epsilon(1e-12));

    // frozen external values for the mean box
    CHECK(st.mean_box.q1 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(st.mean_box.median == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(st.mean_box.q3 == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(st.mean_box.whisker_lo == doctest::Approx(0.1).epsilon(1e-12));
    // 0.85 lies beyond q3 + 1.5 * 0.15 = 0.675, so the whisker stops at 0.45
    CHECK(st.mean_box.whisker_hi == doctest::Approx(0.45).epsilon(1e-12));

    Matrix one(1, 4, 0.5);
    auto too_few = ScenarioBatch::make(1, 4, {one, one, one}, {});
    CHECK_THROWS_AS(generator_stats(too_few), ValidationError);
}

TEST_CASE("wind/solar classifier keys on the night band") {
    auto cls = ModeClassifier::wind_solar(24);
    CHECK(cls.modes() == std::vector<std::string>{"solar", "wind"});

    Matrix solar(1, 24, 0.0);
    for (std::size_t t = 6; t < 18; ++t) solar(0, t) = 0.7;
    CHECK(cls.classify(solar) == "solar");

    Matrix wind(1, 24, 0.5);
    CHECK(cls.classify(wind) == "wind");

    // faint night output still counts as solar under the threshold
    Matrix faint = solar;
    faint(0, 0) = 0.01;
    CHECK(cls.classify(faint) == "solar");

    // multi-site samples average the night band across sites
    Matrix two(2, 24, 0.0);
    for (std::size_t t = 6; t < 18; ++t) {
        two(0, t) = 0.6;
        two(1, t) = 0.8;
    }
    CHECK(cls.classify(two) == "solar");

    CHECK_THROWS_AS(cls.classify(Matrix(1, 12, 0.5)), ValidationError);
    CHECK_THROWS_AS(ModeClassifier::wind_solar(4), ValidationError);
}

TEST_CASE("calm/gusty classifier splits on the scenario mean level") {
    auto cls = ModeClassifier::calm_gusty(24);
    CHECK(cls.modes() == std::vector<std::string>{"calm", "gusty"});
    CHECK(cls.classify(constant_sample(1, 24, 0.2)) == "calm");
    CHECK(cls.classify(constant_sample(1, 24, 0.6)) == "gusty");
    CHECK(cls.classify(constant_sample(1, 24, 0.39)) == "calm");
    CHECK(cls.classify(constant_sample(1, 24, 0.41)) == "gusty");
}

TEST_CASE("mode purity reports exact counts") {
    std::vector<Matrix> samples;
    for (int k = 0; k < 7; ++k) samples.push_back(constant_sample(1, 24, 0.2));
    for (int k = 0; k < 3; ++k) samples.push_back(constant_sample(1, 24, 0.7));
    auto batch = ScenarioBatch::make(1, 24, samples, {});
    auto rep = mode_purity(batch, ModeClassifier::calm_gusty(24));

    REQUIRE(rep.modes == std::vector<std::string>{"calm", "gusty"});
    CHECK(rep.counts == std::vector<std::size_t>{7, 3});
    CHECK(rep.total == 10);
    CHECK(rep.dominant_mode == "calm");
    CHECK(rep.purity() == 0.7);
    CHECK(rep.fraction(0) == 0.7);
    CHECK(rep.fraction(1) == 0.3);
}

TEST_CASE("classifiers agree with the synthesizers that feed them") {
    auto rng_s = RngStream::child(71, 1);
    auto rng_w = RngStream::child(71, 2);
    auto solar = synth_solar(200, 24, rng_s);
    auto wind = synth_wind(200, 24, WindRegime::gusty, rng_w);

    auto ws = ModeClassifier::wind_solar(24);
    auto solar_rep = mode_purity(solar, ws);
    CHECK(solar_rep.dominant_mode == "solar");
    CHECK(solar_rep.purity() == 1.0);  // night band is exactly zero by construction
    auto wind_rep = mode_purity(wind, ws);
    CHECK(wind_rep.dominant_mode == "wind");
    CHECK(wind_rep.purity() > 0.95);

    auto rng_c = RngStream::child(71, 3);
    auto rng_g = RngStream::child(71, 4);
    auto calm = synth_wind(200, 24, WindRegime::calm, rng_c);
    auto gusty = synth_wind(200, 24, WindRegime::gusty, rng_g);
    auto cg = ModeClassifier::calm_gusty(24);
    CHECK(mode_purity(calm, cg).dominant_mode == "calm");
    CHECK(mode_purity(calm, cg).purity() > 0.9);
    // gusty day means spread widely (volatile AR plus ramps), so a fifth of
    // them dip under the midpoint; the dominant mode is still right
    CHECK(mode_purity(gusty, cg).dominant_mode == "gusty");
    CHECK(mode_purity(gusty, cg).purity() > 0.7);
}
