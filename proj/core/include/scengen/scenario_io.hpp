#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scengen/data.hpp"

namespace scengen {

// Scenario CSV: header `generator,scenario,site,t0,...,t{T-1}`, one row per
// (scenario, site). Values carry 9 significant digits. Generator index -1 is
// reserved for reference (non-generated) scenarios.
void write_scenario_csv(const std::string& path,
                        const std::vector<std::pair<int, ScenarioBatch>>& batches,
                        const std::vector<double>* capacities_mw = nullptr);

// Inverse of write_scenario_csv for normalized files. Rejects values outside
// [0, 1], ragged scenarios, and inconsistent shapes.
std::vector<std::pair<int, ScenarioBatch>> read_scenario_csv(const std::string& path);

// Labels CSV: header `scenario,label`, one row per sample index.
void write_labels_csv(const std::string& path, const std::vector<std::string>& labels);
std::vector<std::string> read_labels_csv(const std::string& path);

// Exports a day-sample batch as a continuous `timestamp,<site>,...` series in
// MW: consecutive days from 2020-01-01T00:00 at resolution 1440/timesteps
// minutes (timesteps must divide a day evenly).
void write_timeseries_csv(const std::string& path, const ScenarioBatch& batch,
                          const std::vector<std::string>& site_ids, double capacity_mw);

}  // namespace scengen
