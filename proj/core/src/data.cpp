#include "scengen/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "civil_time.hpp"
#include "scengen/errors.hpp"

namespace scengen {

namespace {

using nlohmann::json;

json parse_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ValidationError(std::string(what) + ": cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string(what) + ": " + path + ": " + e.what());
    }
    return j;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

}  // namespace

DatasetManifest DatasetManifest::load(const std::string& path) {
    json j = parse_json_file(path, "manifest");
    if (!j.is_object()) throw ValidationError("manifest: top level must be an object");
    reject_unknown_keys(j, {"sites"}, "manifest");
    if (!j.contains("sites") || !j["sites"].is_object() || j["sites"].empty()) {
        throw ValidationError("manifest: needs a non-empty 'sites' object");
    }
    DatasetManifest m;
    for (auto it = j["sites"].begin(); it != j["sites"].end(); ++it) {
        const json& s = it.value();
        if (!s.is_object()) throw ValidationError("manifest: site " + it.key() + " must be an object");
        reject_unknown_keys(s, {"capacity_mw", "resolution_minutes"}, "manifest site " + it.key());
        if (!s.contains("capacity_mw") || !s.contains("resolution_minutes")) {
            throw ValidationError("manifest: site " + it.key() +
                                  " needs capacity_mw and resolution_minutes");
        }
        SiteMeta meta;
        meta.capacity_mw = s["capacity_mw"].get<double>();
        meta.resolution_minutes = s["resolution_minutes"].get<int>();
        if (!(meta.capacity_mw > 0.0)) {
            throw ValidationError("manifest: site " + it.key() + " capacity must be > 0");
        }
        if (meta.resolution_minutes < 1 || 1440 % meta.resolution_minutes != 0) {
            throw ValidationError("manifest: site " + it.key() +
                                  " resolution must divide a day evenly");
        }
        m.sites[it.key()] = meta;
    }
    return m;
}

void DatasetManifest::save(const std::string& path) const {
    json j;
    for (const auto& [id, meta] : sites) {
        j["sites"][id] = {{"capacity_mw", meta.capacity_mw},
                          {"resolution_minutes", meta.resolution_minutes}};
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("manifest: cannot write " + path);
    out << j.dump(2) << "\n";
}

const SiteMeta& DatasetManifest::require(const std::string& site_id) const {
    auto it = sites.find(site_id);
    if (it == sites.end()) throw ValidationError("manifest: unknown site '" + site_id + "'");
    return it->second;
}

ScenarioBatch ScenarioBatch::make(std::size_t n_sites, std::size_t timesteps,
                                  std::vector<Matrix> samples, Provenance provenance) {
    if (n_sites < 1) throw ValidationError("ScenarioBatch: n_sites must be >= 1");
    if (timesteps < 2) throw ValidationError("ScenarioBatch: timesteps must be >= 2");
    if (samples.empty()) throw ValidationError("ScenarioBatch: needs at least one sample");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Matrix& s = samples[k];
        if (s.rows != n_sites || s.cols != timesteps) {
            throw ValidationError("ScenarioBatch: sample " + std::to_string(k) +
                                  " has shape " + std::to_string(s.rows) + "x" +
                                  std::to_string(s.cols) + ", expected " +
                                  std::to_string(n_sites) + "x" + std::to_string(timesteps));
        }
        for (double v : s.data) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ValidationError("ScenarioBatch: sample " + std::to_string(k) +
                                      " has a value outside [0, 1]");
            }
        }
    }
    ScenarioBatch b;
    b.n_sites = n_sites;
    b.timesteps = timesteps;
    b.samples = std::move(samples);
    b.provenance = provenance;
    return b;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double_field(const std::string& s, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                              ": malformed number '" + s + "'");
    }
    return v;
}

int days_in_month(int y, int m) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return d[m - 1];
}

// ISO-8601 timestamp at minute precision -> minutes since 1970-01-01T00:00.
std::int64_t parse_timestamp_minutes(const std::string& s, std::size_t row) {
    int y = 0, mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
    char sep = 0;
    int n = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep, &hh, &mi, &ss);
    if (n < 6 || (sep != 'T' && sep != ' ')) {
        throw ValidationError("row " + std::to_string(row) + ": malformed timestamp '" + s + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || hh < 0 || hh > 23 || mi < 0 ||
        mi > 59) {
        throw ValidationError("row " + std::to_string(row) + ": timestamp out of range '" + s +
                              "'");
    }
    if (n == 7 && ss != 0) {
        throw ValidationError("row " + std::to_string(row) +
                              ": sub-minute timestamps unsupported: '" + s + "'");
    }
    return detail::days_from_civil(y, mo, d) * 1440 + hh * 60 + mi;
}

}  // namespace

std::vector<SiteSeries> load_csv(const std::string& path, const DatasetManifest& manifest) {
    std::ifstream in(path);
    if (!in) throw ValidationError("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("load_csv: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "timestamp") {
        throw ValidationError("row 1: header must be 'timestamp,<site>,...'");
    }

    std::vector<std::string> site_ids(header.begin() + 1, header.end());
    for (std::size_t i = 0; i < site_ids.size(); ++i) {
        if (site_ids[i].empty()) throw ValidationError("row 1: empty site column name");
        for (std::size_t j = i + 1; j < site_ids.size(); ++j) {
            if (site_ids[i] == site_ids[j]) {
                throw ValidationError("row 1: duplicate site column '" + site_ids[i] + "'");
            }
        }
        manifest.require(site_ids[i]);  // throws when the manifest lacks it
    }
    for (const auto& [id, meta] : manifest.sites) {
        if (std::find(site_ids.begin(), site_ids.end(), id) == site_ids.end()) {
            throw ValidationError("load_csv: manifest site '" + id + "' missing from " + path);
        }
    }

    const int resolution = manifest.require(site_ids[0]).resolution_minutes;
    for (const std::string& id : site_ids) {
        if (manifest.require(id).resolution_minutes != resolution) {
            throw ValidationError("load_csv: sites in one file must share a resolution");
        }
    }

    std::vector<SiteSeries> series(site_ids.size());
    for (std::size_t i = 0; i < site_ids.size(); ++i) {
        series[i].site_id = site_ids[i];
        series[i].capacity_mw = manifest.require(site_ids[i]).capacity_mw;
        series[i].resolution_minutes = resolution;
    }

    std::size_t row = 1;
    std::int64_t prev_minutes = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        const std::int64_t minutes = parse_timestamp_minutes(fields[0], row);
        if (!first) {
            if (minutes <= prev_minutes) {
                throw ValidationError("row " + std::to_string(row) +
                                      ": timestamps must be strictly increasing");
            }
            if (minutes - prev_minutes != resolution) {
                throw ValidationError("row " + std::to_string(row) + ": gap of " +
                                      std::to_string(minutes - prev_minutes) +
                                      " minutes (expected " + std::to_string(resolution) + ")");
            }
        }
        prev_minutes = minutes;
        first = false;
        for (std::size_t i = 0; i < site_ids.size(); ++i) {
            const double v = parse_double_field(fields[i + 1], row, i + 2);
            if (!std::isfinite(v)) {
                throw ValidationError("row " + std::to_string(row) + ": non-finite value");
            }
            if (v < 0.0) {
                throw ValidationError("row " + std::to_string(row) + ": negative power value");
            }
            series[i].values_mw.push_back(v);
        }
    }
    if (first) throw ValidationError("load_csv: " + path + " has no data rows");
    return series;
}

NormalizeResult normalize(const Matrix& values_mw, double capacity_mw) {
    if (!(capacity_mw > 0.0)) throw ValidationError("normalize: capacity must be > 0");
    NormalizeResult r;
    r.values = Matrix(values_mw.rows, values_mw.cols);
    for (std::size_t i = 0; i < values_mw.size(); ++i) {
        const double v = values_mw.data[i];
        if (!(v >= 0.0)) throw ValidationError("normalize: negative input value");
        double scaled = v / capacity_mw;
        if (scaled > 1.0) {
            scaled = 1.0;
            ++r.overage_count;
        }
        r.values.data[i] = scaled;
    }
    return r;
}

Matrix denormalize(const Matrix& normalized, double capacity_mw) {
    if (!(capacity_mw > 0.0)) throw ValidationError("denormalize: capacity must be > 0");
    Matrix out(normalized.rows, normalized.cols);
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        out.data[i] = normalized.data[i] * capacity_mw;
    }
    return out;
}

WindowedData window_into_days(const std::vector<SiteSeries>& series) {
    if (series.empty()) throw ValidationError("window_into_days: no series");
    const int resolution = series[0].resolution_minutes;
    const std::size_t len = series[0].values_mw.size();
    for (const SiteSeries& s : series) {
        if (s.resolution_minutes != resolution) {
            throw ValidationError("window_into_days: series resolutions differ");
        }
        if (s.values_mw.size() != len) {
            throw ValidationError("window_into_days: series lengths differ");
        }
    }
    if (resolution < 1 || 1440 % resolution != 0) {
        throw ValidationError("window_into_days: resolution must divide a day evenly");
    }
    const std::size_t ppd = static_cast<std::size_t>(1440 / resolution);
    if (len < ppd) {
        throw ValidationError("window_into_days: series shorter than one day (" +
                              std::to_string(len) + " < " + std::to_string(ppd) + " points)");
    }

    WindowedData out;
    const std::size_t windows = len / ppd;
    out.dropped_tail_points = len % ppd;

    // Normalize each full site row once, then slice.
    std::vector<std::vector<double>> norm(series.size());
    for (std::size_t s = 0; s < series.size(); ++s) {
        Matrix row(1, windows * ppd);
        std::copy_n(series[s].values_mw.begin(), windows * ppd, row.data.begin());
        NormalizeResult nr = normalize(row, series[s].capacity_mw);
        out.overage_count += nr.overage_count;
        norm[s] = std::move(nr.values.data);
    }

    std::vector<Matrix> samples;
    samples.reserve(windows);
    for (std::size_t w = 0; w < windows; ++w) {
        Matrix sample(series.size(), ppd);
        for (std::size_t s = 0; s < series.size(); ++s) {
            for (std::size_t t = 0; t < ppd; ++t) sample(s, t) = norm[s][w * ppd + t];
        }
        samples.push_back(std::move(sample));
    }
    out.batch = ScenarioBatch::make(series.size(), ppd, std::move(samples),
                                    Provenance{Provenance::Kind::historical, -1});
    return out;
}

Matrix flatten_batch(const ScenarioBatch& batch) {
    Matrix rows(batch.count(), batch.n_sites * batch.timesteps);
    for (std::size_t k = 0; k < batch.count(); ++k) {
        std::copy(batch.samples[k].data.begin(), batch.samples[k].data.end(),
                  rows.data.begin() + k * rows.cols);
    }
    return rows;
}

ScenarioBatch unflatten_rows(const Matrix& rows, std::size_t n_sites, std::size_t timesteps,
                             Provenance provenance) {
    if (rows.cols != n_sites * timesteps) {
        throw ValidationError("unflatten_rows: row width " + std::to_string(rows.cols) +
                              " != n_sites * timesteps");
    }
    std::vector<Matrix> samples;
    samples.reserve(rows.rows);
    for (std::size_t k = 0; k < rows.rows; ++k) {
        Matrix s(n_sites, timesteps);
        std::copy_n(rows.data.begin() + k * rows.cols, rows.cols, s.data.begin());
        samples.push_back(std::move(s));
    }
    return ScenarioBatch::make(n_sites, timesteps, std::move(samples), provenance);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

std::vector<Matrix> shuffle_and_batch(const ScenarioBatch& batch, std::size_t m, RngStream& rng) {
    const std::size_t n = batch.count();
    if (m < 1) throw ValidationError("shuffle_and_batch: m must be >= 1");
    if (m > n) {
        throw ValidationError("shuffle_and_batch: batch size " + std::to_string(m) +
                              " exceeds sample count " + std::to_string(n));
    }
    std::vector<std::size_t> perm = shuffled_indices(n, rng);

    const std::size_t width = batch.n_sites * batch.timesteps;
    std::vector<Matrix> out;
    for (std::size_t start = 0; start < n; start += m) {
        const std::size_t size = std::min(m, n - start);
        Matrix rows(size, width);
        for (std::size_t r = 0; r < size; ++r) {
            const Matrix& s = batch.samples[perm[start + r]];
            std::copy(s.data.begin(), s.data.end(), rows.data.begin() + r * width);
        }
        out.push_back(std::move(rows));
    }
    return out;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.normal();
    return m;
}

std::pair<std::size_t, std::size_t> solar_day_band(std::size_t timesteps) {
    if (timesteps < 8) throw ValidationError("solar_day_band: needs timesteps >= 8");
    const std::size_t quarter = timesteps / 4;
    return {quarter, timesteps - quarter};
}

ScenarioBatch synth_solar(std::size_t count, std::size_t timesteps, RngStream& rng) {
    if (count < 1) throw ValidationError("synth_solar: count must be >= 1");
    const auto [day_start, day_end] = solar_day_band(timesteps);
    const double span = static_cast<double>(day_end - day_start);

    std::vector<Matrix> samples;
    samples.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Matrix s(1, timesteps, 0.0);
        const double peak = rng.uniform(0.5, 1.0);
        double cloud = 0.0;  // AR(1) cloud cover, dips are max(0, cloud)
        for (std::size_t t = day_start; t < day_end; ++t) {
            cloud = 0.8 * cloud + 0.15 * rng.normal();
            const double dip = std::min(0.5, std::max(0.0, cloud));
            const double bell =
                std::sin(M_PI * (static_cast<double>(t - day_start) + 0.5) / span);
            s(0, t) = peak * bell * (1.0 - dip);
        }
        samples.push_back(std::move(s));
    }
    return ScenarioBatch::make(1, timesteps, std::move(samples),
                               Provenance{Provenance::Kind::synthetic, -1});
}

namespace {

struct ArParams {
    double level;
    double phi;
    double sigma;
    double stationary_sd() const { return sigma / std::sqrt(1.0 - phi * phi); }
};

constexpr ArParams kCalm{0.2, 0.9, 0.05};
constexpr ArParams kGusty{0.6, 0.9, 0.15};

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace

ScenarioBatch synth_wind(std::size_t count, std::size_t timesteps, WindRegime regime,
                         RngStream& rng) {
    if (count < 1) throw ValidationError("synth_wind: count must be >= 1");
    if (timesteps < 2) throw ValidationError("synth_wind: timesteps must be >= 2");
    const ArParams p = regime == WindRegime::calm ? kCalm : kGusty;

    std::vector<Matrix> samples;
    samples.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        bool has_ramp = false;
        std::size_t ramp_at = 0;
        double ramp_sign = 1.0;
        if (regime == WindRegime::gusty) {
            has_ramp = rng.uniform() < 0.35;
            ramp_at = 1 + static_cast<std::size_t>(rng.uniform() *
                                                   static_cast<double>(timesteps - 1));
            if (ramp_at >= timesteps) ramp_at = timesteps - 1;
            ramp_sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        }

        Matrix s(1, timesteps);
        double x = 0.0;
        for (std::size_t t = 0; t < timesteps; ++t) {
            if (t == 0) {
                x = p.level + p.stationary_sd() * rng.normal();
            } else {
                x = p.level + p.phi * (x - p.level) + p.sigma * rng.normal();
            }
            double v = x;
            if (has_ramp && t >= ramp_at) {
                v += ramp_sign * (t == ramp_at ? 0.15 : 0.3);
            }
            s(0, t) = clamp01(v);
        }
        samples.push_back(std::move(s));
    }
    return ScenarioBatch::make(1, timesteps, std::move(samples),
                               Provenance{Provenance::Kind::synthetic, -1});
}

namespace {

// Lower Cholesky factor; rejects non-positive-definite input.
Matrix cholesky_lower(const Matrix& a) {
    const std::size_t n = a.rows;
    Matrix l(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            if (i == j) {
                if (acc <= 1e-12) {
                    throw ValidationError(
                        "synth_spatiotemporal: target correlation is not positive definite "
                        "(pivot " + std::to_string(acc) + " at index " + std::to_string(i) + ")");
                }
                l(i, j) = std::sqrt(acc);
            } else {
                l(i, j) = acc / l(j, j);
            }
        }
    }
    return l;
}

}  // namespace

ScenarioBatch synth_spatiotemporal(std::size_t count, std::size_t timesteps,
                                   const Matrix& target_corr, RngStream& rng) {
    if (count < 1) throw ValidationError("synth_spatiotemporal: count must be >= 1");
    if (timesteps < 2) throw ValidationError("synth_spatiotemporal: timesteps must be >= 2");
    const std::size_t n = target_corr.rows;
    if (n < 1 || target_corr.cols != n) {
        throw ValidationError("synth_spatiotemporal: target correlation must be square");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(target_corr(i, i) - 1.0) > 1e-12) {
            throw ValidationError("synth_spatiotemporal: target correlation needs unit diagonal");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(target_corr(i, j) - target_corr(j, i)) > 1e-12) {
                throw ValidationError("synth_spatiotemporal: target correlation not symmetric");
            }
        }
    }
    const Matrix chol = cholesky_lower(target_corr);
    const ArParams p = kCalm;

    std::vector<Matrix> samples;
    samples.reserve(count);
    std::vector<double> z(n), eps(n), x(n);
    for (std::size_t k = 0; k < count; ++k) {
        Matrix s(n, timesteps);
        for (std::size_t t = 0; t < timesteps; ++t) {
            for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j <= i; ++j) acc += chol(i, j) * z[j];
                eps[i] = acc;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (t == 0) {
                    x[i] = p.level + p.stationary_sd() * eps[i];
                } else {
                    x[i] = p.level + p.phi * (x[i] - p.level) + p.sigma * eps[i];
                }
                s(i, t) = clamp01(x[i]);
            }
        }
        samples.push_back(std::move(s));
    }
    return ScenarioBatch::make(n, timesteps, std::move(samples),
                               Provenance{Provenance::Kind::synthetic, -1});
}

}  // namespace scengen
