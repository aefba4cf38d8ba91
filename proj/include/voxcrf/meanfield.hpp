#pragma once

#include <functional>
#include <vector>

#include "voxcrf/neighborhood.hpp"
#include "voxcrf/volume.hpp"

namespace voxcrf {

// Symmetric L x L label compatibility mu(l, l').
class CompatibilityMatrix {
public:
    CompatibilityMatrix() = default;
    // Row-major values; throws ParameterError unless square, finite and symmetric.
    CompatibilityMatrix(int num_labels, std::vector<double> values);

    // scale * [l != l']
    static CompatibilityMatrix potts(int num_labels, double scale);
    static CompatibilityMatrix identity(int num_labels);
    static CompatibilityMatrix zeros(int num_labels);

    int num_labels() const { return num_labels_; }
    double operator()(int l, int lp) const { return values_[l * num_labels_ + lp]; }
    std::span<const double> values() const { return values_; }
    double max_abs() const;

    // Same matrix with labels relabelled: result(a, b) = this(perm[a], perm[b]).
    CompatibilityMatrix permuted(std::span<const int> perm) const;
    bool operator==(const CompatibilityMatrix&) const = default;

private:
    int num_labels_ = 0;
    std::vector<double> values_;
};

struct InferenceConfig {
    int max_iters = 10;
    double tol = 1e-5;  // on max_i,l |Q_i(l) - Q_i_prev(l)|

    void validate() const;
};

struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> max_delta;  // one entry per iteration
    bool converged = false;
};

// Step (2) output: one message field per kernel component.
struct Messages {
    LabelField appearance;
    LabelField smoothness;
};

// Q_i(l) = exp(U_i(l)) / Z_i, computed with per-voxel max subtraction.
BeliefField init_beliefs(const UnaryField& unary);

// Q~_i^(m)(l) = sum over in-bounds edges (i, j) of K_m[i, j] * Q_j(l).
Messages message_pass(const BeliefField& beliefs, const KernelTable& table);

// w1 * Q~^(1) + w2 * Q~^(2)
LabelField weighted_filter(const Messages& messages, const KernelSpec& spec);

// Q^_i(l) = sum_l' mu(l, l') * Qv_i(l')
LabelField compatibility_transform(const LabelField& field, const CompatibilityMatrix& mu);

// U_i(l) - Q^_i(l)
LabelField add_unary(const UnaryField& unary, const LabelField& hat);

BeliefField softmax_normalize(const LabelField& activation);

struct InferenceResult {
    BeliefField beliefs;
    ConvergenceReport report;
};

// Called after every full iteration with the 1-based iteration number.
using IterationObserver = std::function<void(int, const BeliefField&)>;

// Step (1) once, then synchronous steps (2)-(6) until the largest belief
// change is <= config.tol or config.max_iters iterations have run. The
// coefficients w1, w2 are taken from table.spec().
//
// Summation order is fixed: per voxel, edges in offset order, then labels
// in increasing order, so results are bit-reproducible.
InferenceResult run_inference(const UnaryField& unary, const KernelTable& table,
                              const CompatibilityMatrix& mu, const InferenceConfig& config,
                              const IterationObserver& observer = {});

// Most probable label per voxel; ties go to the smallest label index.
LabelVolume argmax_labels(const BeliefField& beliefs);

}  // namespace voxcrf
