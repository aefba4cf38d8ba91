#include "voxcrf/gaussian_filter.hpp"

#include <algorithm>
#include <cmath>

#include "voxcrf/error.hpp"

namespace voxcrf {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be positive");
}

// One renormalized 1D pass along the axis with the given stride and length.
void filter_axis(const std::vector<double>& in, std::vector<double>& out, const GridDims& dims,
                 int axis, const Gaussian1D& kernel) {
    const std::size_t len = axis == 0 ? dims.nx : axis == 1 ? dims.ny : dims.nz;
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? dims.nx : dims.nx * dims.ny;
    const auto r = static_cast<std::ptrdiff_t>(kernel.radius);
    const auto n = static_cast<std::ptrdiff_t>(len);

    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto pos = static_cast<std::ptrdiff_t>((i / stride) % len);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-r, -pos);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(r, n - 1 - pos);
        double acc = 0.0;
        double norm = 0.0;
        for (std::ptrdiff_t k = lo; k <= hi; ++k) {
            const double w = kernel.weights[static_cast<std::size_t>(k + r)];
            acc += w * in[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + k * static_cast<std::ptrdiff_t>(stride))];
            norm += w;
        }
        out[i] = acc / norm;
    }
}

}  // namespace

int default_radius(double sigma) {
    check_sigma(sigma);
    return std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
}

Gaussian1D gaussian_kernel_1d(double sigma, std::optional<int> radius) {
    check_sigma(sigma);
    const int r = radius ? *radius : default_radius(sigma);
    if (r < 1) throw ParameterError("kernel radius must be >= 1");

    Gaussian1D g;
    g.sigma = sigma;
    g.radius = r;
    g.weights.resize(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int k = -r; k <= r; ++k) {
        const double w = std::exp(-double(k) * double(k) / (2.0 * sigma * sigma));
        g.weights[static_cast<std::size_t>(k + r)] = w;
        sum += w;
    }
    for (auto& w : g.weights) w /= sum;
    // Mirror so the taps are bit-symmetric regardless of summation rounding.
    for (int k = 1; k <= r; ++k) g.weights[static_cast<std::size_t>(r - k)] = g.weights[static_cast<std::size_t>(r + k)];
    return g;
}

std::vector<double> filter_values(std::span<const double> values, const GridDims& dims,
                                  const Gaussian1D& kernel) {
    if (values.size() != dims.voxels()) throw DimensionError("value count does not match dims");
    std::vector<double> a(values.begin(), values.end());
    std::vector<double> b(a.size());
    filter_axis(a, b, dims, 0, kernel);
    filter_axis(b, a, dims, 1, kernel);
    filter_axis(a, b, dims, 2, kernel);
    return b;
}

ScalarVolume filter_volume(const ScalarVolume& volume, double sigma, std::optional<int> radius) {
    volume.validate();
    const auto kernel = gaussian_kernel_1d(sigma, radius);
    std::vector<double> values(volume.data().begin(), volume.data().end());
    const auto smoothed = filter_values(values, volume.dims(), kernel);
    std::vector<float> out(smoothed.size());
    std::transform(smoothed.begin(), smoothed.end(), out.begin(),
                   [](double v) { return static_cast<float>(v); });
    return ScalarVolume(volume.dims(), std::move(out));
}

// MaskVolume

MaskVolume::MaskVolume(GridDims dims, std::vector<float> data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != dims_.voxels()) throw DimensionError("mask data length does not match dims");
    for (float v : data_) {
        if (!(v >= 0.0f && v <= 1.0f)) throw DataError("mask values must lie in [0, 1]");
    }
}

MaskVolume MaskVolume::from_labels(const LabelVolume& labels) {
    if (!labels.is_binary()) throw DataError("mask requires binary labels");
    std::vector<float> v(labels.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = labels[i] ? 1.0f : 0.0f;
    return MaskVolume(labels.dims(), std::move(v));
}

MaskVolume MaskVolume::from_scalar(const ScalarVolume& volume) {
    return MaskVolume(volume.dims(), std::vector<float>(volume.data().begin(), volume.data().end()));
}

ScalarVolume MaskVolume::to_scalar() const { return ScalarVolume(dims_, data_); }

MaskVolume make_label_mask(const LabelVolume& labels, const MaskParams& params) {
    if (!labels.is_binary()) throw DataError("mask requires binary labels");
    if (!(params.floor >= 0.0 && params.floor < 1.0)) throw ParameterError("floor must be in [0, 1)");
    const auto kernel = gaussian_kernel_1d(params.sigma, params.radius);

    std::vector<double> values(labels.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = labels[i];
    const auto blurred = filter_values(values, labels.dims(), kernel);

    std::vector<float> mask(values.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (labels[i] == 1) {
            mask[i] = 1.0f;
        } else {
            const double b = std::clamp(blurred[i], 0.0, 1.0);
            mask[i] = b >= params.floor ? static_cast<float>(b) : 0.0f;
        }
    }
    return MaskVolume(labels.dims(), std::move(mask));
}

}  // namespace voxcrf
