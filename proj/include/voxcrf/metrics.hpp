#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "voxcrf/gaussian_filter.hpp"
#include "voxcrf/volume.hpp"

namespace voxcrf {

// Probability floor applied before taking logs in the cross-entropy losses.
inline constexpr double kLogClamp = 1e-12;

class WeightVolume {
public:
    WeightVolume() = default;
    WeightVolume(GridDims dims, std::vector<double> data);
    static WeightVolume ones(const GridDims& dims);

    const GridDims& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    std::span<const double> data() const { return data_; }

private:
    GridDims dims_;
    std::vector<double> data_;
};

// beta on labelled voxels, 1 elsewhere.
WeightVolume weighted_label_image(const LabelVolume& labels, double beta);

// sum_i w_i * (-m_i log Q_i(1) - (1 - m_i) log Q_i(0)) / sum_i w_i
double masked_cross_entropy(const BeliefField& beliefs, const MaskVolume& mask,
                            const WeightVolume& weights);

// Unweighted mean of -log Q_i(label_i).
double binary_cross_entropy(const BeliefField& beliefs, const LabelVolume& labels);

// (1 - lambda) * loss(fcn) + lambda * loss(crf)
double combined_loss(const BeliefField& fcn_beliefs, const BeliefField& crf_beliefs,
                     const MaskVolume& mask, const WeightVolume& weights, double lambda);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct PrecisionReport {
    ConfusionCounts counts;
    // Fractions in [0, 1]; empty when the denominator is zero.
    std::optional<double> pos_prec;  // tp / (tp + fp)
    std::optional<double> neg_prec;  // tn / (tn + fn)

    std::optional<double> pos_percent() const;
    std::optional<double> neg_percent() const;
};

ConfusionCounts confusion_counts(const LabelVolume& pred, const LabelVolume& truth);
PrecisionReport precision_metrics(const LabelVolume& pred, const LabelVolume& truth);

}  // namespace voxcrf
