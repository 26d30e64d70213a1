#include "scengen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scengen/errors.hpp"

namespace scengen {

bool CorrelationMatrix::defined(std::size_t i, std::size_t j) const {
    return !std::isnan(at(i, j));
}

CorrelationMatrix pearson_matrix(const ScenarioBatch& batch) {
    if (batch.n_sites < 2) throw ValidationError("pearson_matrix: needs at least two sites");
    const std::size_t n = batch.n_sites;
    const std::size_t len = batch.count() * batch.timesteps;

    // Pooled series per site: all samples concatenated.
    std::vector<std::vector<double>> pooled(n, std::vector<double>(len));
    for (std::size_t k = 0; k < batch.count(); ++k) {
        const Matrix& s = batch.samples[k];
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(s.data.begin() + i * batch.timesteps, batch.timesteps,
                        pooled[i].begin() + k * batch.timesteps);
        }
    }

    std::vector<double> mean(n, 0.0), sd(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (double v : pooled[i]) acc += v;
        mean[i] = acc / static_cast<double>(len);
        double ss = 0.0;
        for (double v : pooled[i]) ss += (v - mean[i]) * (v - mean[i]);
        sd[i] = std::sqrt(ss / static_cast<double>(len));
    }

    CorrelationMatrix c;
    c.n = n;
    c.values.assign(n * n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        c.values[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (sd[i] == 0.0 || sd[j] == 0.0) continue;  // undefined, stays NaN
            double cov = 0.0;
            for (std::size_t t = 0; t < len; ++t) {
                cov += (pooled[i][t] - mean[i]) * (pooled[j][t] - mean[j]);
            }
            cov /= static_cast<double>(len);
            double rho = cov / (sd[i] * sd[j]);
            rho = std::clamp(rho, -1.0, 1.0);  // guard rounding excursions
            c.values[i * n + j] = rho;
            c.values[j * n + i] = rho;
        }
    }
    return c;
}

double correlation_distance(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.n != b.n) throw ValidationError("correlation_distance: dimension mismatch");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (std::isnan(a.values[i]) || std::isnan(b.values[i])) {
            throw ValidationError("correlation_distance: undefined correlation entry");
        }
        const double d = a.values[i] - b.values[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ValidationError("quantile_sorted: empty data");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile_sorted: p outside [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
    if (values.size() < 4) throw ValidationError("box_stats: needs at least 4 values");
    std::sort(values.begin(), values.end());
    BoxStats b;
    b.q1 = quantile_sorted(values, 0.25);
    b.median = quantile_sorted(values, 0.5);
    b.q3 = quantile_sorted(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_lo = *std::find_if(values.begin(), values.end(),
                                 [&](double v) { return v >= lo_fence; });
    for (double v : values) {
        if (v <= hi_fence) b.whisker_hi = v;
    }
    return b;
}

GeneratorStats generator_stats(const ScenarioBatch& batch) {
    if (batch.count() < 4) throw ValidationError("generator_stats: needs at least 4 samples");
    GeneratorStats g;
    g.scenario_means.reserve(batch.count());
    g.scenario_variances.reserve(batch.count());
    const double n = static_cast<double>(batch.n_sites * batch.timesteps);
    for (const Matrix& s : batch.samples) {
        double acc = 0.0;
        for (double v : s.data) acc += v;
        const double mean = acc / n;
        double ss = 0.0;
        for (double v : s.data) ss += (v - mean) * (v - mean);
        g.scenario_means.push_back(mean);
        g.scenario_variances.push_back(ss / n);
    }
    g.mean_box = box_stats(g.scenario_means);
    g.variance_box = box_stats(g.scenario_variances);
    return g;
}

ModeClassifier ModeClassifier::wind_solar(std::size_t timesteps) {
    solar_day_band(timesteps);  // validates timesteps >= 8
    ModeClassifier c;
    c.family = Family::wind_solar;
    c.timesteps = timesteps;
    return c;
}

ModeClassifier ModeClassifier::calm_gusty(std::size_t timesteps) {
    if (timesteps < 2) throw ValidationError("ModeClassifier: needs timesteps >= 2");
    ModeClassifier c;
    c.family = Family::calm_gusty;
    c.timesteps = timesteps;
    return c;
}

std::vector<std::string> ModeClassifier::modes() const {
    if (family == Family::wind_solar) return {"solar", "wind"};
    return {"calm", "gusty"};
}

std::string ModeClassifier::classify(const Matrix& sample) const {
    if (sample.cols != timesteps) {
        throw ValidationError("ModeClassifier: built for " + std::to_string(timesteps) +
                              " timesteps, sample has " + std::to_string(sample.cols));
    }
    if (family == Family::wind_solar) {
        const auto [day_start, day_end] = solar_day_band(timesteps);
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < sample.rows; ++s) {
            for (std::size_t t = 0; t < timesteps; ++t) {
                if (t < day_start || t >= day_end) {
                    acc += sample(s, t);
                    ++count;
                }
            }
        }
        return acc / static_cast<double>(count) < night_threshold ? "solar" : "wind";
    }
    double acc = 0.0;
    for (double v : sample.data) acc += v;
    return acc / static_cast<double>(sample.size()) < level_midpoint ? "calm" : "gusty";
}

double ModePurityReport::purity() const {
    std::size_t best = 0;
    for (std::size_t c : counts) best = std::max(best, c);
    return static_cast<double>(best) / static_cast<double>(total);
}

double ModePurityReport::fraction(std::size_t mode) const {
    return static_cast<double>(counts.at(mode)) / static_cast<double>(total);
}

ModePurityReport mode_purity(const ScenarioBatch& batch, const ModeClassifier& classifier) {
    if (batch.timesteps != classifier.timesteps) {
        throw ValidationError("mode_purity: classifier built for " +
                              std::to_string(classifier.timesteps) + " timesteps, batch has " +
                              std::to_string(batch.timesteps));
    }
    ModePurityReport r;
    r.modes = classifier.modes();
    r.counts.assign(r.modes.size(), 0);
    r.total = batch.count();
    for (const Matrix& s : batch.samples) {
        const std::string mode = classifier.classify(s);
        for (std::size_t i = 0; i < r.modes.size(); ++i) {
            if (r.modes[i] == mode) {
                ++r.counts[i];
                break;
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.counts.size(); ++i) {
        if (r.counts[i] > r.counts[best]) best = i;
    }
    r.dominant_mode = r.modes[best];
    return r;
}

}  // namespace scengen
