#include "voxcrf/synthetic.hpp"

#include <cmath>

#include "voxcrf/error.hpp"
#include "voxcrf/random.hpp"

namespace voxcrf {

namespace {

void check_sphere(const GridDims& dims, const Sphere& s) {
    if (!(s.radius > 0.0) || !std::isfinite(s.radius)) {
        throw ParameterError("sphere radius must be positive");
    }
    auto inside = [](double c, std::size_t n) {
        return std::isfinite(c) && c >= 0.0 && c <= static_cast<double>(n - 1);
    };
    if (!inside(s.cx, dims.nx) || !inside(s.cy, dims.ny) || !inside(s.cz, dims.nz)) {
        throw ParameterError("sphere center lies outside the grid");
    }
    if (!std::isfinite(s.intensity)) throw ParameterError("sphere intensity must be finite");
}

}  // namespace

SyntheticScene make_synthetic_nodule(const GridDims& dims, std::span<const Sphere> spheres,
                                     double background, double noise_sigma, std::uint64_t seed) {
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ParameterError("noise sigma must be finite and >= 0");
    }
    if (!std::isfinite(background)) throw ParameterError("background must be finite");
    for (const auto& s : spheres) check_sphere(dims, s);

    ScalarVolume intensity(dims);
    LabelVolume labels(dims, 2);
    Rng rng(seed);

    std::size_t i = 0;
    for (std::size_t z = 0; z < dims.nz; ++z) {
        for (std::size_t y = 0; y < dims.ny; ++y) {
            for (std::size_t x = 0; x < dims.nx; ++x, ++i) {
                double value = background;
                for (const auto& s : spheres) {
                    const double dx = static_cast<double>(x) - s.cx;
                    const double dy = static_cast<double>(y) - s.cy;
                    const double dz = static_cast<double>(z) - s.cz;
                    if (dx * dx + dy * dy + dz * dz <= s.radius * s.radius) {
                        value = s.intensity;
                        labels[i] = 1;
                        break;
                    }
                }
                if (noise_sigma > 0.0) value += noise_sigma * rng.normal();
                intensity[i] = static_cast<float>(value);
            }
        }
    }
    intensity.validate();
    return {std::move(intensity), std::move(labels)};
}

UnaryField unary_from_intensity(const ScalarVolume& volume, double threshold, double sharpness) {
    if (!(sharpness > 0.0) || !std::isfinite(sharpness)) {
        throw ParameterError("sharpness must be positive");
    }
    if (!std::isfinite(threshold)) throw ParameterError("threshold must be finite");
    volume.validate();
    std::vector<double> u(volume.size() * 2);
    for (std::size_t i = 0; i < volume.size(); ++i) {
        const double fg = sharpness * (static_cast<double>(volume[i]) - threshold);
        u[2 * i] = -fg;
        u[2 * i + 1] = fg;
    }
    return UnaryField(volume.dims(), 2, std::move(u));
}

}  // namespace voxcrf
