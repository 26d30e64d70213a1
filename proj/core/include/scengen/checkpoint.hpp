#pragma once

#include <string>

#include "scengen/trainer.hpp"

namespace scengen {

// Checkpoints are a single JSON document: format version, config, net shapes,
// per-particle weights at full 64-bit round-trip precision, counters, and
// every rng stream state. Serialization is key-sorted, so identical state
// yields identical bytes.
void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);

// TrainingConfig as a JSON object (text form). Parsing rejects unknown keys;
// omitted keys take their defaults. Prior scales serialize as a number or the
// string "flat".
std::string training_config_to_json_text(const TrainingConfig& config);
TrainingConfig training_config_from_json_text(const std::string& text);

}  // namespace scengen
