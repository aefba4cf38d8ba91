#pragma once

// Reference computations for the tests: direct formulas in long double and
// brute-force loops, independent of the library code paths.

#include <cmath>
#include <cstddef>
#include <vector>

#include "voxcrf/volume.hpp"

namespace oracle {

// Unit-coefficient appearance / smoothness kernel straight from the formula.
inline void kernel(double dx, double dy, double dz, double di, double ta, double tb, double tg,
                   double& k1, double& k2) {
    const long double d2 = (long double)dx * dx + (long double)dy * dy + (long double)dz * dz;
    const long double dii = (long double)di * di;
    k1 = (double)std::exp(-d2 / (2.0L * ta * ta) - dii / (2.0L * tb * tb));
    k2 = (double)std::exp(-d2 / (2.0L * tg * tg));
}

inline std::vector<double> softmax(const std::vector<double>& u) {
    long double top = u[0];
    for (double v : u) top = std::max<long double>(top, v);
    long double s = 0;
    for (double v : u) s += std::exp((long double)v - top);
    std::vector<double> out;
    for (double v : u) out.push_back((double)(std::exp((long double)v - top) / s));
    return out;
}

// Direct 3D convolution with the product Gaussian, renormalized over the
// in-bounds taps of each output voxel.
inline std::vector<double> convolve3d(const std::vector<double>& v, const voxcrf::GridDims& d,
                                      double sigma, int r) {
    std::vector<double> out(v.size());
    auto w = [&](int k) { return std::exp(-(double)k * k / (2 * sigma * sigma)); };
    for (int z = 0; z < (int)d.nz; ++z)
        for (int y = 0; y < (int)d.ny; ++y)
            for (int x = 0; x < (int)d.nx; ++x) {
                long double acc = 0, norm = 0;
                for (int c = -r; c <= r; ++c)
                    for (int b = -r; b <= r; ++b)
                        for (int a = -r; a <= r; ++a) {
                            const int px = x + a, py = y + b, pz = z + c;
                            if (px < 0 || py < 0 || pz < 0 || px >= (int)d.nx || py >= (int)d.ny ||
                                pz >= (int)d.nz)
                                continue;
                            const long double ww = (long double)w(a) * w(b) * w(c);
                            acc += ww * v[px + d.nx * (py + d.ny * pz)];
                            norm += ww;
                        }
                out[x + d.nx * (y + d.ny * z)] = (double)(acc / norm);
            }
    return out;
}

inline std::size_t sphere_voxels(const voxcrf::GridDims& d, double cx, double cy, double cz, double r) {
    std::size_t n = 0;
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y)
            for (std::size_t x = 0; x < d.nx; ++x) {
                const double a = x - cx, b = y - cy, c = z - cz;
                n += a * a + b * b + c * c <= r * r;
            }
    return n;
}

}  // namespace oracle
