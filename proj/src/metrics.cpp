#include "voxcrf/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "voxcrf/error.hpp"

namespace voxcrf {

namespace {

double clamped_log(double p) { return std::log(std::max(p, kLogClamp)); }

void require_binary_beliefs(const BeliefField& beliefs) {
    if (beliefs.num_labels() != 2) throw DimensionError("loss requires two-label beliefs");
}

void require_binary(const LabelVolume& labels, const char* what) {
    if (!labels.is_binary()) throw DataError(std::string(what) + " must be binary");
}

}  // namespace

WeightVolume::WeightVolume(GridDims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != dims_.voxels()) throw DimensionError("weight data length does not match dims");
    for (double w : data_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("weights must be finite and >= 0");
    }
}

WeightVolume WeightVolume::ones(const GridDims& dims) {
    return WeightVolume(dims, std::vector<double>(dims.voxels(), 1.0));
}

WeightVolume weighted_label_image(const LabelVolume& labels, double beta) {
    require_binary(labels, "labels");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be positive");
    std::vector<double> w(labels.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = labels[i] ? beta : 1.0;
    return WeightVolume(labels.dims(), std::move(w));
}

double masked_cross_entropy(const BeliefField& beliefs, const MaskVolume& mask,
                            const WeightVolume& weights) {
    require_binary_beliefs(beliefs);
    require_same_dims(beliefs.dims(), mask.dims(), "beliefs vs mask");
    require_same_dims(beliefs.dims(), weights.dims(), "beliefs vs weights");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < beliefs.voxels(); ++i) {
        const double m = mask[i];
        const double w = weights[i];
        double term = 0.0;
        if (m != 0.0) term -= m * clamped_log(beliefs(i, 1));
        if (m != 1.0) term -= (1.0 - m) * clamped_log(beliefs(i, 0));
        num += w * term;
        den += w;
    }
    if (!(den > 0.0)) throw DataError("total loss weight is zero");
    return num / den;
}

double binary_cross_entropy(const BeliefField& beliefs, const LabelVolume& labels) {
    require_binary_beliefs(beliefs);
    require_binary(labels, "labels");
    require_same_dims(beliefs.dims(), labels.dims(), "beliefs vs labels");
    double sum = 0.0;
    for (std::size_t i = 0; i < beliefs.voxels(); ++i) sum -= clamped_log(beliefs(i, labels[i]));
    return sum / static_cast<double>(beliefs.voxels());
}

double combined_loss(const BeliefField& fcn_beliefs, const BeliefField& crf_beliefs,
                     const MaskVolume& mask, const WeightVolume& weights, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must be in [0, 1]");
    const double a = masked_cross_entropy(fcn_beliefs, mask, weights);
    const double b = masked_cross_entropy(crf_beliefs, mask, weights);
    return (1.0 - lambda) * a + lambda * b;
}

ConfusionCounts confusion_counts(const LabelVolume& pred, const LabelVolume& truth) {
    require_same_dims(pred.dims(), truth.dims(), "prediction vs truth");
    require_binary(pred, "prediction");
    require_binary(truth, "truth");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == 1;
        const bool t = truth[i] == 1;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

PrecisionReport precision_metrics(const LabelVolume& pred, const LabelVolume& truth) {
    PrecisionReport r;
    r.counts = confusion_counts(pred, truth);
    const auto& c = r.counts;
    if (c.tp + c.fp > 0) r.pos_prec = double(c.tp) / double(c.tp + c.fp);
    if (c.tn + c.fn > 0) r.neg_prec = double(c.tn) / double(c.tn + c.fn);
    return r;
}

std::optional<double> PrecisionReport::pos_percent() const {
    if (!pos_prec) return std::nullopt;
    return *pos_prec * 100.0;
}

std::optional<double> PrecisionReport::neg_percent() const {
    if (!neg_prec) return std::nullopt;
    return *neg_prec * 100.0;
}

}  // namespace voxcrf
