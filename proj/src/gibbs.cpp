#include "voxcrf/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "voxcrf/error.hpp"

namespace voxcrf {

namespace {

void check_inputs(const UnaryField& unary, const KernelTable& table, const CompatibilityMatrix& mu) {
    require_same_dims(unary.dims(), table.dims(), "unary vs kernel table");
    if (mu.num_labels() != unary.num_labels()) {
        throw DimensionError("compatibility matrix size does not match label count");
    }
}

double energy(std::span<const std::uint8_t> x, const UnaryField& unary,
              const std::vector<PairwiseEdge>& edges, const CompatibilityMatrix& mu) {
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e -= unary(i, x[i]);
    for (const auto& edge : edges) e += mu(x[edge.i], x[edge.j]) * edge.weight;
    return e;
}

// Calls fn(config, index) for every labelling, in lexicographic order with
// voxel 0 as the most significant position.
template <typename Fn>
void enumerate(std::size_t voxels, int num_labels, Fn&& fn) {
    std::vector<std::uint8_t> x(voxels, 0);
    std::size_t index = 0;
    while (true) {
        fn(std::span<const std::uint8_t>(x), index++);
        std::size_t pos = voxels;
        while (pos > 0) {
            --pos;
            if (x[pos] + 1 < num_labels) {
                ++x[pos];
                break;
            }
            x[pos] = 0;
            if (pos == 0) return;
        }
    }
}

}  // namespace

std::size_t configuration_count(const GridDims& dims, int num_labels) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < dims.voxels(); ++i) {
        if (count > kMaxConfigurations / static_cast<std::size_t>(num_labels)) {
            throw EnumerationRefused("grid too large for exact enumeration (" +
                                     std::to_string(dims.voxels()) + " voxels, " +
                                     std::to_string(num_labels) + " labels)");
        }
        count *= static_cast<std::size_t>(num_labels);
    }
    return count;
}

std::vector<PairwiseEdge> unordered_edges(const KernelTable& table) {
    std::vector<PairwiseEdge> edges;
    const double w1 = table.spec().w1;
    const double w2 = table.spec().w2;
    for (std::size_t i = 0; i < table.dims().voxels(); ++i) {
        for (std::size_t e = table.edge_begin(i); e < table.edge_end(i); ++e) {
            if (!table.offsets()[table.offset_slot(e)].is_forward()) continue;
            edges.push_back({i, table.neighbor(e), w1 * table.appearance(e) + w2 * table.smoothness(e)});
        }
    }
    return edges;
}

double config_energy(const LabelVolume& config, const UnaryField& unary, const KernelTable& table,
                     const CompatibilityMatrix& mu) {
    check_inputs(unary, table, mu);
    require_same_dims(config.dims(), unary.dims(), "configuration vs unary");
    for (auto v : config.data()) {
        if (v >= unary.num_labels()) throw DataError("configuration label exceeds label count");
    }
    return energy(config.data(), unary, unordered_edges(table), mu);
}

ExactMarginals exact_marginals(const UnaryField& unary, const KernelTable& table,
                               const CompatibilityMatrix& mu) {
    check_inputs(unary, table, mu);
    const std::size_t n = unary.voxels();
    const int L = unary.num_labels();
    const std::size_t count = configuration_count(unary.dims(), L);
    const auto edges = unordered_edges(table);

    // First pass: log-weights -E(x) and log Z by log-sum-exp.
    std::vector<double> log_weight(count);
    double top = -std::numeric_limits<double>::infinity();
    enumerate(n, L, [&](std::span<const std::uint8_t> x, std::size_t k) {
        log_weight[k] = -energy(x, unary, edges, mu);
        top = std::max(top, log_weight[k]);
    });
    double sum = 0.0;
    for (double v : log_weight) sum += std::exp(v - top);
    const double log_z = top + std::log(sum);

    // Second pass: accumulate marginals.
    LabelField marg(unary.dims(), L);
    enumerate(n, L, [&](std::span<const std::uint8_t> x, std::size_t k) {
        const double p = std::exp(log_weight[k] - log_z);
        for (std::size_t i = 0; i < n; ++i) marg(i, x[i]) += p;
    });
    // Remove the residual of the floating-point re-summation.
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : marg.voxel(i)) s += v;
        for (double& v : marg.voxel(i)) v /= s;
    }
    return {BeliefField(std::move(marg)), log_z};
}

LabelVolume map_config(const UnaryField& unary, const KernelTable& table,
                       const CompatibilityMatrix& mu) {
    check_inputs(unary, table, mu);
    const std::size_t n = unary.voxels();
    const int L = unary.num_labels();
    configuration_count(unary.dims(), L);
    if (L > 256) throw ParameterError("too many labels for a label volume");
    const auto edges = unordered_edges(table);

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> best_x(n, 0);
    enumerate(n, L, [&](std::span<const std::uint8_t> x, std::size_t) {
        const double e = energy(x, unary, edges, mu);
        if (e < best) {
            best = e;
            best_x.assign(x.begin(), x.end());
        }
    });
    return LabelVolume(unary.dims(), L, std::move(best_x));
}

}  // namespace voxcrf
