#include "voxcrf/oracle_check.hpp"

#include <algorithm>
#include <cmath>

#include "voxcrf/error.hpp"
#include "voxcrf/random.hpp"

namespace voxcrf {

RandomInstance make_random_instance(const GridDims& dims, int num_labels, const KernelSpec& spec,
                                    const CompatibilityMatrix& mu, double unary_ratio,
                                    std::uint64_t seed) {
    if (num_labels < 2) throw ParameterError("instances need at least two labels");
    if (mu.num_labels() != num_labels) throw DimensionError("compatibility matrix size mismatch");
    if (!(unary_ratio > 0)) throw ParameterError("unary ratio must be positive");

    Rng rng(seed);
    ScalarVolume intensity(dims);
    for (auto& v : intensity.data()) v = static_cast<float>(rng.uniform());
    KernelTable table = build_kernel_table(intensity, spec);

    const double pairwise = mu.max_abs() * table.max_weighted_edge();
    const double base = pairwise > 0 ? unary_ratio * pairwise : 1.0;
    LabelField u(dims, num_labels);
    for (std::size_t i = 0; i < dims.voxels(); ++i) {
        const auto dominant = static_cast<int>(rng.index(static_cast<std::size_t>(num_labels)));
        for (int l = 0; l < num_labels; ++l) {
            u(i, l) = l == dominant ? base * (1.0 + rng.uniform()) : -base * rng.uniform();
        }
    }
    return {std::move(intensity), std::move(table), UnaryField(std::move(u))};
}

OracleComparison compare_with_oracle(const UnaryField& unary, const KernelTable& table,
                                     const CompatibilityMatrix& mu, const InferenceConfig& config) {
    const auto exact = exact_marginals(unary, table, mu);
    auto mf = run_inference(unary, table, mu, config);

    OracleComparison r;
    r.log_z = exact.log_z;
    r.report = std::move(mf.report);
    const auto a = argmax_labels(mf.beliefs);
    const auto b = argmax_labels(exact.marginals);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < unary.voxels(); ++i) {
        agree += a[i] == b[i];
        for (int l = 0; l < unary.num_labels(); ++l) {
            r.max_marginal_deviation =
                std::max(r.max_marginal_deviation, std::abs(mf.beliefs(i, l) - exact.marginals(i, l)));
        }
    }
    r.argmax_agreement = static_cast<double>(agree) / static_cast<double>(unary.voxels());
    return r;
}

}  // namespace voxcrf
