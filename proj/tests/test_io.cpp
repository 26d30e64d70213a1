#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "scengen/data.hpp"
#include "scengen/errors.hpp"
#include "scengen/rng.hpp"
#include "scengen/scenario_io.hpp"

using namespace scengen;
using testutil::TempDir;

namespace {

// Values on the 1/256 grid print exactly at 9 significant digits, so file
// round trips compare bitwise.
ScenarioBatch grid_batch(std::size_t n_sites, std::size_t timesteps, std::size_t count,
                         std::uint64_t seed) {
    auto rng = RngStream::child(seed, 90);
    std::vector<Matrix> samples;
    for (std::size_t k = 0; k < count; ++k) {
        Matrix s(n_sites, timesteps);
        for (double& v : s.data) v = static_cast<double>(rng.below(257)) / 256.0;
        samples.push_back(std::move(s));
    }
    return ScenarioBatch::make(n_sites, timesteps, std::move(samples),
                               Provenance{Provenance::Kind::generated, 0});
}

}  // namespace

TEST_CASE("scenario csv round-trips grid values bitwise") {
    TempDir tmp("scen_rt");
    auto b0 = grid_batch(2, 6, 3, 1);
    auto b1 = grid_batch(2, 6, 2, 2);
    auto ref = grid_batch(2, 6, 4, 3);
    write_scenario_csv(tmp.file("s.csv"), {{-1, ref}, {0, b0}, {1, b1}});

    auto got = read_scenario_csv(tmp.file("s.csv"));
    REQUIRE(got.size() == 3);
    // map ordering puts the reference block first
    CHECK(got[0].first == -1);
    CHECK(got[0].second.provenance.kind == Provenance::Kind::historical);
    CHECK(got[1].first == 0);
    CHECK(got[1].second.provenance.kind == Provenance::Kind::generated);
    CHECK(got[1].second.provenance.generator_index == 0);
    CHECK(got[2].first == 1);

    REQUIRE(got[1].second.count() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(got[1].second.samples[k].data == b0.samples[k].data);
    }
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(got[0].second.samples[k].data == ref.samples[k].data);
    }
}

TEST_CASE("scenario csv keeps nine significant digits for arbitrary values") {
    TempDir tmp("scen_prec");
    auto rng = RngStream::child(4, 91);
    Matrix s(1, 5);
    for (double& v : s.data) v = rng.uniform();
    auto batch = ScenarioBatch::make(1, 5, {s}, {});
    write_scenario_csv(tmp.file("s.csv"), {{0, batch}});
    auto got = read_scenario_csv(tmp.file("s.csv"));
    for (std::size_t t = 0; t < 5; ++t) {
        CHECK(got[0].second.samples[0](0, t) ==
              doctest::Approx(s(0, t)).epsilon(1e-8));
    }
}

TEST_CASE("scenario csv rejects malformed inputs") {
    TempDir tmp("scen_bad");
    auto write_and_expect = [&](const std::string& text, const std::string& needle) {
        tmp.write("s.csv", text);
        try {
            read_scenario_csv(tmp.file("s.csv"));
            FAIL_CHECK("expected rejection of:\n" << text);
        } catch (const ValidationError& e) {
            CAPTURE(text);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    write_and_expect("scenario,generator,site,t0\n", "header");
    write_and_expect("generator,scenario,site,t0,t2\n", "t1");
    write_and_expect("generator,scenario,site,t0,t1\n0,0,0,0.5\n", "row 2");
    write_and_expect("generator,scenario,site,t0\n0,0,0,1.5\n", "normalized");
    write_and_expect("generator,scenario,site,t0\n0,0,0,-0.1\n", "normalized");
    write_and_expect("generator,scenario,site,t0\n0,0,0,0.5\n0,0,0,0.5\n", "duplicate");
    write_and_expect("generator,scenario,site,t0\n0,1,0,0.5\n", "contiguous");
    write_and_expect("generator,scenario,site,t0\n0,0,1,0.5\n", "contiguous");
    write_and_expect("generator,scenario,site,t0\n0,0,0,0.5\n0,1,0,0.5\n0,1,1,0.5\n", "ragged");
    write_and_expect("generator,scenario,site,t0\n0,-1,0,0.5\n", "negative");
    write_and_expect("generator,scenario,site,t0\nx,0,0,0.5\n", "malformed");
}

TEST_CASE("capacity scaling turns normalized scenarios into megawatts") {
    TempDir tmp("scen_mw");
    Matrix s(2, 3);
    for (std::size_t t = 0; t < 3; ++t) {
        s(0, t) = 0.5;
        s(1, t) = 0.25;
    }
    auto batch = ScenarioBatch::make(2, 3, {s}, {});
    std::vector<double> caps = {16.0, 8.0};
    write_scenario_csv(tmp.file("mw.csv"), {{0, batch}}, &caps);

    auto text = tmp.read("mw.csv");
    CHECK(text.find(",8,8,8") != std::string::npos);  // 0.5 * 16
    CHECK(text.find(",2,2,2") != std::string::npos);  // 0.25 * 8
    // MW values exceed 1, so reading them as normalized fails
    CHECK_THROWS_AS(read_scenario_csv(tmp.file("mw.csv")), ValidationError);

    std::vector<double> short_caps = {16.0};
    CHECK_THROWS_AS(write_scenario_csv(tmp.file("x.csv"), {{0, batch}}, &short_caps),
                    ValidationError);
}

TEST_CASE("labels csv round-trips and validates") {
    TempDir tmp("labels");
    std::vector<std::string> labels = {"wind", "solar", "wind"};
    write_labels_csv(tmp.file("l.csv"), labels);
    CHECK(read_labels_csv(tmp.file("l.csv")) == labels);

    tmp.write("bad1.csv", "scenario,label\n1,wind\n");
    CHECK_THROWS_AS(read_labels_csv(tmp.file("bad1.csv")), ValidationError);
    tmp.write("bad2.csv", "scenario,label\n0,\n");
    CHECK_THROWS_AS(read_labels_csv(tmp.file("bad2.csv")), ValidationError);
    tmp.write("bad3.csv", "label,scenario\n");
    CHECK_THROWS_AS(read_labels_csv(tmp.file("bad3.csv")), ValidationError);
    tmp.write("bad4.csv", "scenario,label\n");
    CHECK_THROWS_AS(read_labels_csv(tmp.file("bad4.csv")), ValidationError);
}

TEST_CASE("timeseries export starts at 2020-01-01 and steps through whole days") {
    TempDir tmp("ts");
    auto batch = grid_batch(2, 24, 2, 7);
    write_timeseries_csv(tmp.file("d.csv"), batch, {"a", "b"}, 16.0);

    auto text = tmp.read("d.csv");
    CHECK(text.rfind("timestamp,a,b\n", 0) == 0);
    CHECK(text.find("2020-01-01T00:00:00,") != std::string::npos);
    CHECK(text.find("2020-01-01T23:00:00,") != std::string::npos);
    CHECK(text.find("2020-01-02T23:00:00,") != std::string::npos);
    CHECK(text.find("2020-01-03") == std::string::npos);  // only two days written

    CHECK_THROWS_AS(write_timeseries_csv(tmp.file("x.csv"), batch, {"a"}, 16.0),
                    ValidationError);
    auto odd = grid_batch(1, 7, 1, 8);  // 7 does not divide 1440
    CHECK_THROWS_AS(write_timeseries_csv(tmp.file("x.csv"), odd, {"a"}, 16.0), ValidationError);
}

TEST_CASE("timeseries export round-trips through the dataset loader") {
    TempDir tmp("ts_rt");
    auto batch = grid_batch(2, 24, 3, 9);
    write_timeseries_csv(tmp.file("d.csv"), batch, {"a", "b"}, 16.0);
    tmp.write("m.json", R"({
 "sites": {
  "a": {"capacity_mw": 16.0, "resolution_minutes": 60},
  "b": {"capacity_mw": 16.0, "resolution_minutes": 60}
 }
})");
    auto manifest = DatasetManifest::load(tmp.file("m.json"));
    auto windowed = window_into_days(load_csv(tmp.file("d.csv"), manifest));
    CHECK(windowed.dropped_tail_points == 0);
    REQUIRE(windowed.batch.count() == 3);
    // grid values scale by the dyadic capacity and back without loss
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(windowed.batch.samples[k].data == batch.samples[k].data);
    }
}
