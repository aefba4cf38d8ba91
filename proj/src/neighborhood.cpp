#include "voxcrf/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "voxcrf/error.hpp"

namespace voxcrf {

std::string_view to_string(NeighborhoodMode mode) {
    switch (mode) {
        case NeighborhoodMode::Six: return "six";
        case NeighborhoodMode::Eighteen: return "eighteen";
        case NeighborhoodMode::TwentySix: return "twenty_six";
    }
    return "?";
}

NeighborhoodMode parse_neighborhood_mode(std::string_view text) {
    if (text == "six" || text == "6") return NeighborhoodMode::Six;
    if (text == "eighteen" || text == "18") return NeighborhoodMode::Eighteen;
    if (text == "twenty_six" || text == "twenty-six" || text == "26") {
        return NeighborhoodMode::TwentySix;
    }
    throw ParameterError("unknown neighborhood mode '" + std::string(text) + "'");
}

bool NeighborOffset::is_forward() const {
    return std::tuple(dz, dy, dx) > std::tuple(0, 0, 0);
}

std::vector<NeighborOffset> neighborhood_offsets(NeighborhoodMode mode, double alpha) {
    const int max_ring = mode == NeighborhoodMode::Six ? 1 : mode == NeighborhoodMode::Eighteen ? 2 : 3;
    std::vector<NeighborOffset> out;
    for (int ring = 1; ring <= max_ring; ++ring) {
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx * dx + dy * dy + dz * dz != ring) continue;
                    out.push_back({dx, dy, dz, ring, ring == 1 ? 1.0 : alpha});
                }
            }
        }
    }
    return out;
}

void KernelSpec::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(w1) || !finite(w2) || w1 < 0 || w2 < 0) {
        throw ParameterError("kernel coefficients w1, w2 must be finite and >= 0");
    }
    if (!(theta_alpha > 0) || !(theta_beta > 0) || !(theta_gamma > 0) || !finite(theta_alpha) ||
        !finite(theta_beta) || !finite(theta_gamma)) {
        throw ParameterError("kernel bandwidths must be finite and > 0");
    }
    if (!finite(alpha) || alpha < 0) throw ParameterError("alpha must be finite and >= 0");
    if (g_sigma) {
        if (!(*g_sigma > 0) || !finite(*g_sigma)) throw ParameterError("g_sigma must be > 0");
        if (!(g_radius >= 1) || !finite(g_radius)) throw ParameterError("g_radius must be >= 1");
    }
}

KernelComponents kernel_components(const KernelSpec& spec, const Vec3& delta_p, double intensity_i,
                                   double intensity_j) {
    const double d2 = delta_p.squared_norm();
    if (d2 == 0.0) throw ParameterError("kernel is undefined for a zero offset");
    const double di = intensity_i - intensity_j;
    KernelComponents k;
    k.appearance = std::exp(-d2 / (2.0 * spec.theta_alpha * spec.theta_alpha) -
                            di * di / (2.0 * spec.theta_beta * spec.theta_beta));
    k.smoothness = std::exp(-d2 / (2.0 * spec.theta_gamma * spec.theta_gamma));
    return k;
}

double truncation_weight(const KernelSpec& spec, const Vec3& delta_p) {
    if (!spec.g_sigma) return 1.0;
    const double d2 = delta_p.squared_norm();
    if (d2 > spec.g_radius * spec.g_radius) return 0.0;
    return std::exp(-d2 / (2.0 * *spec.g_sigma * *spec.g_sigma));
}

KernelTable build_kernel_table(const ScalarVolume& volume, const KernelSpec& spec) {
    spec.validate();
    volume.validate();

    KernelTable t;
    t.dims_ = volume.dims();
    t.spec_ = spec;
    t.offsets_ = neighborhood_offsets(spec.mode, spec.alpha);

    struct SlotConstants {
        Vec3 delta;
        double scale;
    };
    std::vector<SlotConstants> slots;
    for (const auto& o : t.offsets_) {
        const Vec3 d{double(o.dx), double(o.dy), double(o.dz)};
        slots.push_back({d, o.ring_scale * truncation_weight(spec, d)});
    }

    const auto& dims = t.dims_;
    const std::size_t n = dims.voxels();
    t.row_start_.reserve(n + 1);
    t.neighbor_.reserve(n * t.offsets_.size());
    t.slot_.reserve(n * t.offsets_.size());
    t.k1_.reserve(n * t.offsets_.size());
    t.k2_.reserve(n * t.offsets_.size());
    t.row_start_.push_back(0);

    std::size_t i = 0;
    for (std::size_t z = 0; z < dims.nz; ++z) {
        for (std::size_t y = 0; y < dims.ny; ++y) {
            for (std::size_t x = 0; x < dims.nx; ++x, ++i) {
                const double intensity_i = volume[i];
                for (std::size_t s = 0; s < t.offsets_.size(); ++s) {
                    const auto& o = t.offsets_[s];
                    const auto px = static_cast<std::ptrdiff_t>(x) + o.dx;
                    const auto py = static_cast<std::ptrdiff_t>(y) + o.dy;
                    const auto pz = static_cast<std::ptrdiff_t>(z) + o.dz;
                    if (!dims.contains(px, py, pz)) continue;
                    const std::size_t j = static_cast<std::size_t>(px) +
                                          dims.nx * (static_cast<std::size_t>(py) +
                                                     dims.ny * static_cast<std::size_t>(pz));
                    const auto k = kernel_components(spec, slots[s].delta, intensity_i, volume[j]);
                    t.neighbor_.push_back(j);
                    t.slot_.push_back(static_cast<std::uint8_t>(s));
                    t.k1_.push_back(slots[s].scale * k.appearance);
                    t.k2_.push_back(slots[s].scale * k.smoothness);
                }
                t.row_start_.push_back(t.neighbor_.size());
            }
        }
    }
    return t;
}

std::optional<std::size_t> KernelTable::find_edge(std::size_t voxel, std::size_t slot) const {
    if (voxel >= dims_.voxels()) throw IndexError("voxel index outside kernel table");
    const auto first = slot_.begin() + static_cast<std::ptrdiff_t>(edge_begin(voxel));
    const auto last = slot_.begin() + static_cast<std::ptrdiff_t>(edge_end(voxel));
    const auto it = std::lower_bound(first, last, static_cast<std::uint8_t>(slot));
    if (it == last || *it != slot) return std::nullopt;
    return static_cast<std::size_t>(it - slot_.begin());
}

KernelTable KernelTable::scaled(double appearance_factor, double smoothness_factor) const {
    if (!(appearance_factor >= 0) || !(smoothness_factor >= 0) || !std::isfinite(appearance_factor) ||
        !std::isfinite(smoothness_factor)) {
        throw ParameterError("kernel scale factors must be finite and >= 0");
    }
    KernelTable t = *this;
    for (auto& v : t.k1_) v *= appearance_factor;
    for (auto& v : t.k2_) v *= smoothness_factor;
    return t;
}

KernelTable KernelTable::with_weights(double w1, double w2) const {
    KernelTable t = *this;
    t.spec_.w1 = w1;
    t.spec_.w2 = w2;
    t.spec_.validate();
    return t;
}

double KernelTable::max_weighted_edge() const {
    double best = 0.0;
    for (std::size_t e = 0; e < num_edges(); ++e) {
        best = std::max(best, spec_.w1 * k1_[e] + spec_.w2 * k2_[e]);
    }
    return best;
}

}  // namespace voxcrf
