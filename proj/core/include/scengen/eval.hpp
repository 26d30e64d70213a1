#pragma once

#include <string>
#include <vector>

#include "scengen/data.hpp"
#include "scengen/matrix.hpp"

namespace scengen {

// Site-by-site Pearson correlations. Entries touching a constant series are
// undefined and stored as NaN; the diagonal is exactly 1.
struct CorrelationMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // n x n row-major

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    bool defined(std::size_t i, std::size_t j) const;
};

// Correlations over each site's series pooled across all samples.
CorrelationMatrix pearson_matrix(const ScenarioBatch& batch);

// Frobenius norm of the entrywise difference. Rejects shape mismatches and
// matrices with undefined entries.
double correlation_distance(const CorrelationMatrix& a, const CorrelationMatrix& b);

struct BoxStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;  // smallest value >= q1 - 1.5*IQR
    double whisker_hi = 0.0;  // largest value <= q3 + 1.5*IQR
};

// Linear-interpolation quantile of sorted data at p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

BoxStats box_stats(std::vector<double> values);

struct GeneratorStats {
    std::vector<double> scenario_means;      // mean over all entries, per sample
    std::vector<double> scenario_variances;  // population variance, per sample
    BoxStats mean_box;
    BoxStats variance_box;
};

// Needs at least 4 samples for quartiles.
GeneratorStats generator_stats(const ScenarioBatch& batch);

// Rule-based scenario mode classifiers, fixed to the timestep count they were
// built for.
struct ModeClassifier {
    enum class Family { wind_solar, calm_gusty };
    Family family = Family::wind_solar;
    std::size_t timesteps = 0;
    double night_threshold = 0.02;  // wind_solar: night-band mean below => solar
    double level_midpoint = 0.4;    // calm_gusty: scenario mean below => calm

    static ModeClassifier wind_solar(std::size_t timesteps);
    static ModeClassifier calm_gusty(std::size_t timesteps);

    std::vector<std::string> modes() const;
    std::string classify(const Matrix& sample) const;
};

struct ModePurityReport {
    std::vector<std::string> modes;
    std::vector<std::size_t> counts;  // parallel to modes; sums to total
    std::size_t total = 0;
    std::string dominant_mode;

    double purity() const;                    // max count / total
    double fraction(std::size_t mode) const;  // counts[mode] / total
};

ModePurityReport mode_purity(const ScenarioBatch& batch, const ModeClassifier& classifier);

}  // namespace scengen
