#include "voxcrf/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "voxcrf/error.hpp"

namespace voxcrf {

// CompatibilityMatrix

CompatibilityMatrix::CompatibilityMatrix(int num_labels, std::vector<double> values)
    : num_labels_(num_labels), values_(std::move(values)) {
    if (num_labels < 1) throw ParameterError("compatibility matrix needs at least one label");
    if (values_.size() != static_cast<std::size_t>(num_labels) * num_labels) {
        throw ParameterError("compatibility matrix must be L x L");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw ParameterError("compatibility matrix holds a non-finite value");
    }
    for (int a = 0; a < num_labels; ++a) {
        for (int b = a + 1; b < num_labels; ++b) {
            if ((*this)(a, b) != (*this)(b, a)) {
                throw ParameterError("compatibility matrix must be symmetric");
            }
        }
    }
}

CompatibilityMatrix CompatibilityMatrix::potts(int num_labels, double scale) {
    std::vector<double> v(static_cast<std::size_t>(num_labels) * num_labels, scale);
    for (int l = 0; l < num_labels; ++l) v[l * num_labels + l] = 0.0;
    return CompatibilityMatrix(num_labels, std::move(v));
}

CompatibilityMatrix CompatibilityMatrix::identity(int num_labels) {
    std::vector<double> v(static_cast<std::size_t>(num_labels) * num_labels, 0.0);
    for (int l = 0; l < num_labels; ++l) v[l * num_labels + l] = 1.0;
    return CompatibilityMatrix(num_labels, std::move(v));
}

CompatibilityMatrix CompatibilityMatrix::zeros(int num_labels) {
    return CompatibilityMatrix(num_labels,
                               std::vector<double>(static_cast<std::size_t>(num_labels) * num_labels));
}

double CompatibilityMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

CompatibilityMatrix CompatibilityMatrix::permuted(std::span<const int> perm) const {
    if (perm.size() != static_cast<std::size_t>(num_labels_)) {
        throw ParameterError("permutation size does not match label count");
    }
    std::vector<double> v(values_.size());
    for (int a = 0; a < num_labels_; ++a) {
        for (int b = 0; b < num_labels_; ++b) v[a * num_labels_ + b] = (*this)(perm[a], perm[b]);
    }
    return CompatibilityMatrix(num_labels_, std::move(v));
}

void InferenceConfig::validate() const {
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(tol >= 0) || !std::isfinite(tol)) throw ParameterError("tol must be finite and >= 0");
}

namespace {

// In-place kernels shared by the public step functions and run_inference.

void softmax_into(std::span<const double> activation, int num_labels, std::span<double> out) {
    const auto L = static_cast<std::size_t>(num_labels);
    for (std::size_t base = 0; base < activation.size(); base += L) {
        double top = activation[base];
        for (std::size_t l = 1; l < L; ++l) top = std::max(top, activation[base + l]);
        double sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            out[base + l] = std::exp(activation[base + l] - top);
            sum += out[base + l];
        }
        for (std::size_t l = 0; l < L; ++l) out[base + l] /= sum;
    }
}

void message_pass_into(std::span<const double> q, int num_labels, const KernelTable& table,
                       std::span<double> appearance, std::span<double> smoothness) {
    const auto L = static_cast<std::size_t>(num_labels);
    const std::size_t n = table.dims().voxels();
    std::fill(appearance.begin(), appearance.end(), 0.0);
    std::fill(smoothness.begin(), smoothness.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* a = appearance.data() + i * L;
        double* s = smoothness.data() + i * L;
        for (std::size_t e = table.edge_begin(i); e < table.edge_end(i); ++e) {
            const double k1 = table.appearance(e);
            const double k2 = table.smoothness(e);
            const double* qj = q.data() + table.neighbor(e) * L;
            for (std::size_t l = 0; l < L; ++l) {
                a[l] += k1 * qj[l];
                s[l] += k2 * qj[l];
            }
        }
    }
}

void weighted_filter_into(std::span<const double> appearance, std::span<const double> smoothness,
                          double w1, double w2, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = w1 * appearance[k] + w2 * smoothness[k];
}

void compatibility_into(std::span<const double> field, const CompatibilityMatrix& mu,
                        std::span<double> out) {
    const auto L = static_cast<std::size_t>(mu.num_labels());
    for (std::size_t base = 0; base < field.size(); base += L) {
        for (std::size_t l = 0; l < L; ++l) {
            double acc = 0.0;
            for (std::size_t lp = 0; lp < L; ++lp) {
                acc += mu(static_cast<int>(l), static_cast<int>(lp)) * field[base + lp];
            }
            out[base + l] = acc;
        }
    }
}

void add_unary_into(std::span<const double> unary, std::span<const double> hat, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = unary[k] - hat[k];
}

void check_table(const LabelField& field, const KernelTable& table) {
    require_same_dims(field.dims(), table.dims(), "field vs kernel table");
}

void check_labels(const LabelField& field, const CompatibilityMatrix& mu) {
    if (field.num_labels() != mu.num_labels()) {
        throw DimensionError("compatibility matrix size does not match label count");
    }
}

}  // namespace

BeliefField init_beliefs(const UnaryField& unary) {
    if (!unary.all_finite()) throw DataError("unary field holds a non-finite value");
    return softmax_normalize(unary);
}

Messages message_pass(const BeliefField& beliefs, const KernelTable& table) {
    check_table(beliefs, table);
    Messages m{LabelField(beliefs.dims(), beliefs.num_labels()),
               LabelField(beliefs.dims(), beliefs.num_labels())};
    message_pass_into(beliefs.data(), beliefs.num_labels(), table, m.appearance.data(),
                      m.smoothness.data());
    return m;
}

LabelField weighted_filter(const Messages& messages, const KernelSpec& spec) {
    if (!messages.appearance.same_shape(messages.smoothness)) {
        throw DimensionError("message fields differ in shape");
    }
    LabelField out(messages.appearance.dims(), messages.appearance.num_labels());
    weighted_filter_into(messages.appearance.data(), messages.smoothness.data(), spec.w1, spec.w2,
                         out.data());
    return out;
}

LabelField compatibility_transform(const LabelField& field, const CompatibilityMatrix& mu) {
    check_labels(field, mu);
    LabelField out(field.dims(), field.num_labels());
    compatibility_into(field.data(), mu, out.data());
    return out;
}

LabelField add_unary(const UnaryField& unary, const LabelField& hat) {
    if (!unary.same_shape(hat)) throw DimensionError("unary and message field differ in shape");
    LabelField out(unary.dims(), unary.num_labels());
    add_unary_into(unary.data(), hat.data(), out.data());
    return out;
}

BeliefField softmax_normalize(const LabelField& activation) {
    if (!activation.all_finite()) throw DataError("activation holds a non-finite value");
    LabelField out(activation.dims(), activation.num_labels());
    softmax_into(activation.data(), activation.num_labels(), out.data());
    return BeliefField(std::move(out));
}

InferenceResult run_inference(const UnaryField& unary, const KernelTable& table,
                              const CompatibilityMatrix& mu, const InferenceConfig& config,
                              const IterationObserver& observer) {
    config.validate();
    check_table(unary, table);
    check_labels(unary, mu);
    table.spec().validate();

    const GridDims dims = unary.dims();
    const int L = unary.num_labels();
    const double w1 = table.spec().w1;
    const double w2 = table.spec().w2;

    LabelField q = init_beliefs(unary);
    LabelField next(dims, L), appearance(dims, L), smoothness(dims, L), combined(dims, L),
        hat(dims, L), activation(dims, L);

    ConvergenceReport report;
    for (int it = 1; it <= config.max_iters; ++it) {
        message_pass_into(q.data(), L, table, appearance.data(), smoothness.data());
        weighted_filter_into(appearance.data(), smoothness.data(), w1, w2, combined.data());
        compatibility_into(combined.data(), mu, hat.data());
        add_unary_into(unary.data(), hat.data(), activation.data());
        if (!activation.all_finite()) throw DataError("mean-field activation became non-finite");
        softmax_into(activation.data(), L, next.data());

        double delta = 0.0;
        const auto qn = next.data();
        const auto qo = q.data();
        for (std::size_t k = 0; k < qn.size(); ++k) delta = std::max(delta, std::abs(qn[k] - qo[k]));
        std::swap(q, next);

        report.iterations = it;
        report.max_delta.push_back(delta);
        if (observer) observer(it, BeliefField(q));
        if (delta <= config.tol) {
            report.converged = true;
            break;
        }
    }
    return {BeliefField(std::move(q)), std::move(report)};
}

LabelVolume argmax_labels(const BeliefField& beliefs) {
    if (beliefs.num_labels() > 256) throw ParameterError("too many labels for a label volume");
    std::vector<std::uint8_t> out(beliefs.voxels());
    for (std::size_t i = 0; i < beliefs.voxels(); ++i) {
        const auto q = beliefs.voxel(i);
        int best = 0;
        for (int l = 1; l < beliefs.num_labels(); ++l) {
            if (q[l] > q[best]) best = l;
        }
        out[i] = static_cast<std::uint8_t>(best);
    }
    return LabelVolume(beliefs.dims(), beliefs.num_labels(), std::move(out));
}

}  // namespace voxcrf
