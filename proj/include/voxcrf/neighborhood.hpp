#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxcrf/volume.hpp"

namespace voxcrf {

// Face (6), face+edge (18) or full 3x3x3 (26) neighbourhood.
enum class NeighborhoodMode { Six, Eighteen, TwentySix };

std::string_view to_string(NeighborhoodMode mode);
// Accepts "six"/"6", "eighteen"/"18", "twenty_six"/"twenty-six"/"26".
NeighborhoodMode parse_neighborhood_mode(std::string_view text);

struct NeighborOffset {
    int dx = 0, dy = 0, dz = 0;
    int ring = 1;             // dx^2 + dy^2 + dz^2
    double ring_scale = 1.0;  // 1 on faces, alpha on edges and corners

    // True for the half of the offsets whose (dz, dy, dx) is lexicographically positive.
    bool is_forward() const;
    friend bool operator==(const NeighborOffset&, const NeighborOffset&) = default;
};

// Offsets sorted by ring, then lexicographically by (dz, dy, dx). Ring-1
// offsets therefore come first and in the same order in every mode, so the
// per-voxel summation order over shared offsets never depends on the mode.
std::vector<NeighborOffset> neighborhood_offsets(NeighborhoodMode mode, double alpha = 1.0);

struct KernelSpec {
    double w1 = 1.0;           // appearance coefficient
    double w2 = 1.0;           // smoothness coefficient
    double theta_alpha = 1.0;  // spatial bandwidth of the appearance term
    double theta_beta = 0.5;   // intensity bandwidth of the appearance term
    double theta_gamma = 1.0;  // spatial bandwidth of the smoothness term
    NeighborhoodMode mode = NeighborhoodMode::Six;
    double alpha = 1.0;        // scale of non-face neighbours
    std::optional<double> g_sigma;  // truncation weight bandwidth; nullopt = off
    double g_radius = 1.0;          // truncation cutoff distance

    // Throws ParameterError on a violated invariant.
    void validate() const;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
    double squared_norm() const { return x * x + y * y + z * z; }
};

struct KernelComponents {
    double appearance = 0;  // exp(-|dp|^2 / 2 theta_alpha^2 - dI^2 / 2 theta_beta^2)
    double smoothness = 0;  // exp(-|dp|^2 / 2 theta_gamma^2)
};

// Unit-coefficient kernel terms for a pair of distinct sites; w1 and w2 are
// applied later, in the weighted filter step. Throws ParameterError for a
// zero offset.
KernelComponents kernel_components(const KernelSpec& spec, const Vec3& delta_p, double intensity_i,
                                   double intensity_j);

// g(|dp|): 1 when off, else exp(-|dp|^2 / 2 g_sigma^2) inside g_radius and 0 beyond.
double truncation_weight(const KernelSpec& spec, const Vec3& delta_p);

// Precomputed kernel values for every in-bounds (voxel, offset) edge, stored
// CSR-style: the edges of voxel i are [edge_begin(i), edge_end(i)) and appear
// in offset order. Each stored value already includes ring_scale and g.
class KernelTable {
public:
    KernelTable() = default;

    const GridDims& dims() const { return dims_; }
    const KernelSpec& spec() const { return spec_; }
    std::span<const NeighborOffset> offsets() const { return offsets_; }

    std::size_t num_edges() const { return neighbor_.size(); }
    std::size_t edge_begin(std::size_t voxel) const { return row_start_[voxel]; }
    std::size_t edge_end(std::size_t voxel) const { return row_start_[voxel + 1]; }

    std::size_t neighbor(std::size_t edge) const { return neighbor_[edge]; }
    std::size_t offset_slot(std::size_t edge) const { return slot_[edge]; }
    double appearance(std::size_t edge) const { return k1_[edge]; }
    double smoothness(std::size_t edge) const { return k2_[edge]; }

    // Edge from `voxel` along offsets()[slot], if that neighbour is in bounds.
    std::optional<std::size_t> find_edge(std::size_t voxel, std::size_t slot) const;

    // Copy with the appearance / smoothness components multiplied by the factors.
    KernelTable scaled(double appearance_factor, double smoothness_factor) const;
    // Copy with a different w1 / w2; the stored components do not depend on them.
    KernelTable with_weights(double w1, double w2) const;

    // Largest w1*K1 + w2*K2 over all edges.
    double max_weighted_edge() const;

    friend KernelTable build_kernel_table(const ScalarVolume& volume, const KernelSpec& spec);

private:
    GridDims dims_;
    KernelSpec spec_;
    std::vector<NeighborOffset> offsets_;
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> neighbor_;
    std::vector<std::uint8_t> slot_;
    std::vector<double> k1_;
    std::vector<double> k2_;
};

KernelTable build_kernel_table(const ScalarVolume& volume, const KernelSpec& spec);

}  // namespace voxcrf
