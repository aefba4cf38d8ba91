#pragma once

#include <optional>
#include <span>
#include <vector>

#include "voxcrf/volume.hpp"

namespace voxcrf {

// Normalized, symmetric sampled Gaussian with taps at -radius..radius.
struct Gaussian1D {
    double sigma = 1.0;
    int radius = 3;
    std::vector<double> weights;  // 2 * radius + 1 entries

    double weight(int k) const { return weights[static_cast<std::size_t>(k + radius)]; }
};

int default_radius(double sigma);  // ceil(3 sigma), at least 1

Gaussian1D gaussian_kernel_1d(double sigma, std::optional<int> radius = std::nullopt);

// Separable smoothing along x, then y, then z. At the borders the kernel is
// renormalized over the taps that fall inside the grid, so constants are
// preserved. Computation runs in double precision.
std::vector<double> filter_values(std::span<const double> values, const GridDims& dims,
                                  const Gaussian1D& kernel);

ScalarVolume filter_volume(const ScalarVolume& volume, double sigma,
                           std::optional<int> radius = std::nullopt);

// Soft label mask with values in [0, 1], exactly 1 on labelled voxels.
class MaskVolume {
public:
    MaskVolume() = default;
    MaskVolume(GridDims dims, std::vector<float> data);

    const GridDims& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }
    float operator[](std::size_t i) const { return data_[i]; }
    std::span<const float> data() const { return data_; }

    static MaskVolume from_labels(const LabelVolume& labels);
    static MaskVolume from_scalar(const ScalarVolume& volume);
    ScalarVolume to_scalar() const;

    friend bool operator==(const MaskVolume&, const MaskVolume&) = default;

private:
    GridDims dims_;
    std::vector<float> data_;
};

struct MaskParams {
    double sigma = 1.0;
    double floor = 0.01;
    std::optional<int> radius;
};

// Blur the binary label image, force labelled voxels to 1 and zero every
// blurred value below `floor`. Throws DataError for non-binary labels.
MaskVolume make_label_mask(const LabelVolume& labels, const MaskParams& params);

}  // namespace voxcrf
