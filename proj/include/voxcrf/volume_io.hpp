#pragma once

#include <filesystem>
#include <variant>

#include "voxcrf/volume.hpp"

namespace voxcrf {

// On-disk volumes are a JSON header `<name>.json` plus a raw payload
// `<name>.raw` holding samples in storage order with no padding:
//
//   {"dims":[nx,ny,nz],"dtype":"f32le","order":"x-fastest"}                  ScalarVolume
//   {"dims":[nx,ny,nz],"dtype":"u8","order":"x-fastest","num_labels":L}      LabelVolume
//   {"dims":[nx,ny,nz],"dtype":"f64le","order":"x-fastest","num_labels":L}   LabelField
//
// LabelField payloads keep the label index fastest within each voxel.
using AnyVolume = std::variant<ScalarVolume, LabelVolume, LabelField>;

struct VolumePaths {
    std::filesystem::path header;
    std::filesystem::path payload;
};

// Accepts `name`, `name.json` or `name.raw`.
VolumePaths volume_paths(const std::filesystem::path& path);

AnyVolume load_volume(const std::filesystem::path& path);
ScalarVolume load_scalar_volume(const std::filesystem::path& path);
LabelVolume load_label_volume(const std::filesystem::path& path);
LabelField load_label_field(const std::filesystem::path& path);

void save_volume(const ScalarVolume& volume, const std::filesystem::path& path);
void save_volume(const LabelVolume& volume, const std::filesystem::path& path);
void save_volume(const LabelField& field, const std::filesystem::path& path);

}  // namespace voxcrf
