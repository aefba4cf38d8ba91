#pragma once

#include <cstddef>
#include <vector>

#include "voxcrf/meanfield.hpp"
#include "voxcrf/neighborhood.hpp"
#include "voxcrf/volume.hpp"

namespace voxcrf {

// Exact inference by enumerating every labelling of a tiny grid. The energy
// matches the mean-field update Q_i ∝ exp(U_i - sum_j mu K_ij Q_j):
//
//   E(x) = -sum_i U_i(x_i) + sum_{unordered edges (i,j)} mu(x_i, x_j) (w1 K1_ij + w2 K2_ij)
//
// and P(x) = exp(-E(x)) / Z.

inline constexpr std::size_t kMaxConfigurations = std::size_t{1} << 20;

struct PairwiseEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0;  // w1 * K1 + w2 * K2
};

// One entry per unordered neighbour pair, taken from the forward offsets of
// the table, in voxel order then offset order.
std::vector<PairwiseEdge> unordered_edges(const KernelTable& table);

double config_energy(const LabelVolume& config, const UnaryField& unary, const KernelTable& table,
                     const CompatibilityMatrix& mu);

struct ExactMarginals {
    BeliefField marginals;
    double log_z = 0;
};

// Throws EnumerationRefused when L^voxels exceeds kMaxConfigurations.
ExactMarginals exact_marginals(const UnaryField& unary, const KernelTable& table,
                               const CompatibilityMatrix& mu);

// Minimum-energy labelling; ties go to the lexicographically smallest
// configuration (voxel 0 compared first).
LabelVolume map_config(const UnaryField& unary, const KernelTable& table,
                       const CompatibilityMatrix& mu);

std::size_t configuration_count(const GridDims& dims, int num_labels);

}  // namespace voxcrf
