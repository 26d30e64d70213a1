#include "scengen/scenario_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "civil_time.hpp"
#include "scengen/errors.hpp"

namespace scengen {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

long parse_long(const std::string& s, std::size_t row, const char* what) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("row " + std::to_string(row) + ": malformed " + what + " '" + s +
                              "'");
    }
    return v;
}

double parse_value(const std::string& s, std::size_t row) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("row " + std::to_string(row) + ": malformed value '" + s + "'");
    }
    return v;
}

}  // namespace

void write_scenario_csv(const std::string& path,
                        const std::vector<std::pair<int, ScenarioBatch>>& batches,
                        const std::vector<double>* capacities_mw) {
    if (batches.empty()) throw ValidationError("write_scenario_csv: nothing to write");
    const std::size_t timesteps = batches[0].second.timesteps;
    const std::size_t n_sites = batches[0].second.n_sites;
    for (const auto& [idx, batch] : batches) {
        if (batch.timesteps != timesteps || batch.n_sites != n_sites) {
            throw ValidationError("write_scenario_csv: batches must share shape");
        }
    }
    if (capacities_mw && capacities_mw->size() != n_sites) {
        throw ValidationError("write_scenario_csv: capacity list must have one entry per site");
    }

    std::ofstream out(path);
    if (!out) throw ValidationError("write_scenario_csv: cannot write " + path);
    out << "generator,scenario,site";
    for (std::size_t t = 0; t < timesteps; ++t) out << ",t" << t;
    out << "\n";
    for (const auto& [idx, batch] : batches) {
        for (std::size_t k = 0; k < batch.count(); ++k) {
            for (std::size_t s = 0; s < n_sites; ++s) {
                out << idx << "," << k << "," << s;
                for (std::size_t t = 0; t < timesteps; ++t) {
                    double v = batch.samples[k](s, t);
                    if (capacities_mw) v *= (*capacities_mw)[s];
                    out << "," << format_value(v);
                }
                out << "\n";
            }
        }
    }
}

std::vector<std::pair<int, ScenarioBatch>> read_scenario_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("read_scenario_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("read_scenario_csv: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_line(line);
    if (header.size() < 4 || header[0] != "generator" || header[1] != "scenario" ||
        header[2] != "site") {
        throw ValidationError("row 1: header must be 'generator,scenario,site,t0,...'");
    }
    const std::size_t timesteps = header.size() - 3;
    for (std::size_t t = 0; t < timesteps; ++t) {
        if (header[3 + t] != "t" + std::to_string(t)) {
            throw ValidationError("row 1: expected column t" + std::to_string(t));
        }
    }

    // generator -> scenario -> site -> values
    std::map<int, std::map<long, std::map<long, std::vector<double>>>> table;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        const int gen = static_cast<int>(parse_long(fields[0], row, "generator index"));
        const long scen = parse_long(fields[1], row, "scenario index");
        const long site = parse_long(fields[2], row, "site index");
        if (scen < 0 || site < 0) {
            throw ValidationError("row " + std::to_string(row) + ": negative index");
        }
        std::vector<double> values(timesteps);
        for (std::size_t t = 0; t < timesteps; ++t) {
            const double v = parse_value(fields[3 + t], row);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ValidationError("row " + std::to_string(row) +
                                      ": value outside [0, 1]; normalized scenarios expected");
            }
            values[t] = v;
        }
        auto& slot = table[gen][scen][site];
        if (!slot.empty()) {
            throw ValidationError("row " + std::to_string(row) + ": duplicate (generator " +
                                  std::to_string(gen) + ", scenario " + std::to_string(scen) +
                                  ", site " + std::to_string(site) + ")");
        }
        slot = std::move(values);
    }

    std::vector<std::pair<int, ScenarioBatch>> out;
    for (const auto& [gen, scenarios] : table) {
        const std::size_t n_sites = scenarios.begin()->second.size();
        std::vector<Matrix> samples;
        long expected_scen = 0;
        for (const auto& [scen, sites] : scenarios) {
            if (scen != expected_scen++) {
                throw ValidationError("generator " + std::to_string(gen) +
                                      ": scenario indices must be contiguous from 0");
            }
            if (sites.size() != n_sites) {
                throw ValidationError("generator " + std::to_string(gen) + ", scenario " +
                                      std::to_string(scen) + ": ragged site count");
            }
            Matrix sample(n_sites, timesteps);
            long expected_site = 0;
            for (const auto& [site, values] : sites) {
                if (site != expected_site++) {
                    throw ValidationError("generator " + std::to_string(gen) + ", scenario " +
                                          std::to_string(scen) +
                                          ": site indices must be contiguous from 0");
                }
                std::copy(values.begin(), values.end(),
                          sample.data.begin() + static_cast<std::size_t>(site) * timesteps);
            }
            samples.push_back(std::move(sample));
        }
        Provenance prov = gen >= 0 ? Provenance{Provenance::Kind::generated, gen}
                                   : Provenance{Provenance::Kind::historical, -1};
        out.emplace_back(gen, ScenarioBatch::make(n_sites, timesteps, std::move(samples), prov));
    }
    return out;
}

void write_labels_csv(const std::string& path, const std::vector<std::string>& labels) {
    std::ofstream out(path);
    if (!out) throw ValidationError("write_labels_csv: cannot write " + path);
    out << "scenario,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
}

std::vector<std::string> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("read_labels_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("read_labels_csv: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "scenario,label") {
        throw ValidationError("row 1: labels header must be 'scenario,label'");
    }
    std::vector<std::string> labels;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != 2) {
            throw ValidationError("row " + std::to_string(row) + ": expected 'scenario,label'");
        }
        const long idx = parse_long(fields[0], row, "scenario index");
        if (idx != static_cast<long>(labels.size())) {
            throw ValidationError("row " + std::to_string(row) +
                                  ": scenario indices must be contiguous from 0");
        }
        if (fields[1].empty()) {
            throw ValidationError("row " + std::to_string(row) + ": empty label");
        }
        labels.push_back(fields[1]);
    }
    if (labels.empty()) throw ValidationError("read_labels_csv: no labels in " + path);
    return labels;
}

void write_timeseries_csv(const std::string& path, const ScenarioBatch& batch,
                          const std::vector<std::string>& site_ids, double capacity_mw) {
    if (site_ids.size() != batch.n_sites) {
        throw ValidationError("write_timeseries_csv: need one site id per site");
    }
    if (!(capacity_mw > 0.0)) throw ValidationError("write_timeseries_csv: capacity must be > 0");
    if (1440 % batch.timesteps != 0) {
        throw ValidationError("write_timeseries_csv: timesteps must divide a day evenly");
    }
    const std::int64_t step = static_cast<std::int64_t>(1440 / batch.timesteps);
    const std::int64_t origin = detail::days_from_civil(2020, 1, 1) * 1440;

    std::ofstream out(path);
    if (!out) throw ValidationError("write_timeseries_csv: cannot write " + path);
    out << "timestamp";
    for (const std::string& id : site_ids) out << "," << id;
    out << "\n";
    std::int64_t minutes = origin;
    char stamp[48];
    for (const Matrix& sample : batch.samples) {
        for (std::size_t t = 0; t < batch.timesteps; ++t, minutes += step) {
            int y, mo, d;
            detail::civil_from_days(minutes / 1440, y, mo, d);
            const int hh = static_cast<int>((minutes % 1440) / 60);
            const int mi = static_cast<int>(minutes % 60);
            std::snprintf(stamp, sizeof(stamp), "%04d-%02d-%02dT%02d:%02d:00", y, mo, d, hh, mi);
            out << stamp;
            for (std::size_t s = 0; s < batch.n_sites; ++s) {
                out << "," << format_value(sample(s, t) * capacity_mw);
            }
            out << "\n";
        }
    }
}

}  // namespace scengen
