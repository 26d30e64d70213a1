#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scengen/matrix.hpp"
#include "scengen/rng.hpp"

namespace scengen {

struct SiteMeta {
    double capacity_mw = 0.0;     // > 0
    int resolution_minutes = 60;  // > 0 and must divide a day evenly
};

// Site metadata keyed by site id. Stored as a JSON document on disk.
struct DatasetManifest {
    std::map<std::string, SiteMeta> sites;

    static DatasetManifest load(const std::string& path);
    void save(const std::string& path) const;
    const SiteMeta& require(const std::string& site_id) const;
};

// One site's contiguous power series in MW at a fixed resolution.
struct SiteSeries {
    std::string site_id;
    double capacity_mw = 0.0;
    int resolution_minutes = 60;
    std::vector<double> values_mw;
};

struct Provenance {
    enum class Kind { historical, synthetic, generated };
    Kind kind = Kind::historical;
    int generator_index = -1;  // set when kind == generated
};

// A set of day-long scenario samples, each an n_sites x timesteps matrix of
// capacity-normalized values in [0, 1].
struct ScenarioBatch {
    std::size_t n_sites = 0;
    std::size_t timesteps = 0;
    std::vector<Matrix> samples;
    Provenance provenance;

    static ScenarioBatch make(std::size_t n_sites, std::size_t timesteps,
                              std::vector<Matrix> samples, Provenance provenance);
    std::size_t count() const { return samples.size(); }
};

// Parses `timestamp,<site>,...` CSV. Every site column must appear in the
// manifest and vice versa. Rejects malformed rows, non-monotonic or gapped
// timestamps, and negative values, naming the offending row.
std::vector<SiteSeries> load_csv(const std::string& path, const DatasetManifest& manifest);

struct WindowedData {
    ScenarioBatch batch;
    std::size_t dropped_tail_points = 0;  // trailing samples short of a full day
    std::size_t overage_count = 0;        // values clamped at capacity
};

// Cuts aligned series into day-long windows and normalizes by capacity.
WindowedData window_into_days(const std::vector<SiteSeries>& series);

struct NormalizeResult {
    Matrix values;
    std::size_t overage_count = 0;
};

// value / capacity clamped to 1.0; counts clamped entries.
NormalizeResult normalize(const Matrix& values_mw, double capacity_mw);
Matrix denormalize(const Matrix& normalized, double capacity_mw);

// Row layout used whenever a scenario sample is handed to a net: sites are
// concatenated, site s occupying columns [s*T, (s+1)*T).
Matrix flatten_batch(const ScenarioBatch& batch);
ScenarioBatch unflatten_rows(const Matrix& rows, std::size_t n_sites, std::size_t timesteps,
                             Provenance provenance);

// Fisher-Yates permutation of 0..n-1 drawn from rng.
std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng);

// One epoch of mini-batches: a fresh permutation of all samples cut into
// groups of m, the final batch partial when m does not divide the count.
// Rows are flattened samples.
std::vector<Matrix> shuffle_and_batch(const ScenarioBatch& batch, std::size_t m, RngStream& rng);

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng);

// Night band for a day of T steps: [0, T/4) and [T - T/4, T). Solar synthesis
// is exactly zero there; the wind/solar classifier keys on it.
std::pair<std::size_t, std::size_t> solar_day_band(std::size_t timesteps);

enum class WindRegime { calm, gusty };

// Single-site PV days: exact-zero night band, sine-bell daylight profile with
// randomized peak in [0.5, 1.0] and multiplicative cloud dips.
ScenarioBatch synth_solar(std::size_t count, std::size_t timesteps, RngStream& rng);

// Single-site wind days from a smoothed random walk. Calm: level 0.2, low
// volatility. Gusty: level 0.6, high volatility plus occasional ramp events.
ScenarioBatch synth_wind(std::size_t count, std::size_t timesteps, WindRegime regime,
                         RngStream& rng);

// Multi-site wind days driven by correlated Gaussian innovations with the
// given target correlation (factorized; must be symmetric positive definite
// with unit diagonal). Shaping and clipping attenuate the realized
// correlation somewhat.
ScenarioBatch synth_spatiotemporal(std::size_t count, std::size_t timesteps,
                                   const Matrix& target_corr, RngStream& rng);

}  // namespace scengen
