#pragma once

#include <cstdint>
#include <filesystem>

#include "ldspec/md.hpp"

namespace ldspec {

/// Binary trajectory record, little-endian 64-bit floats, ion-major per
/// frame. Header carries counts, the species map, the sample interval and
/// duration, plus the per-frame species temperature block.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

Trajectory read_trajectory(const std::filesystem::path& path);

/// Text export for small runs: one "time_s,ion,species,x_m,y_m,z_m" row per
/// ion per frame.
void export_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// FNV-1a 64-bit hash of a file's bytes; run manifests use it to pin outputs.
std::uint64_t fnv1a_file_hash(const std::filesystem::path& path);

} // namespace ldspec
