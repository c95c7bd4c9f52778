#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlp.hpp"

namespace tbnpb {

// Trained per-grasp latent code, persisted alongside the network weights.
struct LatentEntry {
  std::uint32_t grasp_id = 0;
  Eigen::VectorXd code;
};

struct ModelFile {
  MlpModel model;
  std::vector<LatentEntry> latents;
};

// Versioned binary layout: magic "TBNPB1", dimensions, normalization stats,
// then row-major layer parameters, all as 64-bit little-endian values.
// Loading rejects any other version string.
void save_model(const std::string& path, const MlpModel& model,
                const std::vector<LatentEntry>& latents);

ModelFile load_model(const std::string& path);

// Byte-level parameter snapshot, used to assert that latent-only updates
// leave the weights bit-identical.
std::string serialize_params(const MlpModel& model);

const Eigen::VectorXd* find_latent(const std::vector<LatentEntry>& latents,
                                   std::uint32_t grasp_id);

}  // namespace tbnpb
