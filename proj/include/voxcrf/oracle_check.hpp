#pragma once

#include <cstdint>

#include "voxcrf/gibbs.hpp"
#include "voxcrf/meanfield.hpp"

namespace voxcrf {

struct RandomInstance {
    ScalarVolume intensity;
    KernelTable table;
    UnaryField unary;
};

// Seeded test problem for oracle comparisons. Intensities are uniform in
// [0, 1). Each voxel gets a random dominant label d with
//   U(d) = b (1 + u),   U(l != d) = -b u'   (u, u' uniform in [0, 1))
// where b = unary_ratio * P and P = max|mu| * max_edge(w1 K1 + w2 K2) is the
// largest pairwise magnitude (b = 1 when P = 0). The dominant label thus
// leads every other label by at least unary_ratio * P.
RandomInstance make_random_instance(const GridDims& dims, int num_labels, const KernelSpec& spec,
                                    const CompatibilityMatrix& mu, double unary_ratio,
                                    std::uint64_t seed);

struct OracleComparison {
    double max_marginal_deviation = 0;  // max_i,l |Q_i(l) - P_i(l)|
    double argmax_agreement = 0;        // fraction of voxels with equal argmax
    double log_z = 0;
    ConvergenceReport report;
};

OracleComparison compare_with_oracle(const UnaryField& unary, const KernelTable& table,
                                     const CompatibilityMatrix& mu, const InferenceConfig& config);

}  // namespace voxcrf
