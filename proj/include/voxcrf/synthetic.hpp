#pragma once

#include <cstdint>
#include <span>

#include "voxcrf/volume.hpp"

namespace voxcrf {

struct Sphere {
    double cx = 0, cy = 0, cz = 0;
    double radius = 1;
    double intensity = 1;
};

struct SyntheticScene {
    ScalarVolume intensity;
    LabelVolume labels;
};

// Binary nodule phantom. A voxel at integer position p is labelled 1 when
// |p - c| <= radius for some sphere; it takes the intensity of the first such
// sphere, else `background`. Zero-mean Gaussian noise of std `noise_sigma` is
// then added voxel by voxel in storage order (one Rng::normal() per voxel when
// noise_sigma > 0, none otherwise).
SyntheticScene make_synthetic_nodule(const GridDims& dims, std::span<const Sphere> spheres,
                                     double background, double noise_sigma, std::uint64_t seed);

// Logistic two-label unaries: U(1) = sharpness * (I - threshold), U(0) = -U(1).
UnaryField unary_from_intensity(const ScalarVolume& volume, double threshold, double sharpness);

}  // namespace voxcrf
