#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaia/adam.hpp"
#include "gaia/models.hpp"

namespace gaia {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// On disk: 8-byte magic "GAIACKPT", little-endian uint64 header length, a
/// JSON header (format version, model kind, layer shapes, offsets, SHA-256 of
/// the payload), then the payload as little-endian 64-bit floats.
struct Checkpoint {
  AnyModel model;
  std::vector<AdamState> optimizers;  // same order as network_names()
  std::uint64_t step = 0;
  std::string config_snapshot;
};

/// Named networks of a model in a fixed order, e.g. "encoder", "decoder" or
/// "generator.encoder", ...
std::vector<std::string> network_names(const AnyModel& model);
std::vector<const MlpNetwork*> networks(const AnyModel& model);

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws CorruptionError on a truncated or tampered file and IoError on a
/// version mismatch.
Checkpoint load_checkpoint(const std::string& path);
/// As above, and additionally requires the stored shapes to match `arch`
/// (DimensionError otherwise).
Checkpoint load_checkpoint(const std::string& path, ModelKind kind, const ArchitectureConfig& arch);

}  // namespace gaia
