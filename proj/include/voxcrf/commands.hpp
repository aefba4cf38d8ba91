#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "voxcrf/experiment.hpp"
#include "voxcrf/metrics.hpp"

namespace voxcrf {

// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfigError = 2, kExitDataError = 3 };

struct Evaluation {
    double loss = 0;
    PrecisionReport precision;
};

// {"loss", "pos_prec", "neg_prec", "tp", "fp", "tn", "fn"}; precisions in
// percent, null when undefined.
nlohmann::json metrics_json(const Evaluation& evaluation);

// Loss against the plain label image, or against make_label_mask(truth)
// when config.filtered is set, or against `mask` when given; voxel weights
// are weighted_label_image(truth, config.beta).
Evaluation evaluate_beliefs(const ExperimentConfig& config, const BeliefField& beliefs,
                            const LabelVolume& truth, const MaskVolume* mask = nullptr);

struct RefineResult {
    BeliefField beliefs;
    LabelVolume labels;
    ConvergenceReport report;
    std::optional<Evaluation> evaluation;
};

// build_kernel_table -> run_inference -> argmax_labels. With config.crf
// false the beliefs are softmax(U) and no iteration runs.
RefineResult refine_volume(const ExperimentConfig& config, const ScalarVolume& intensity,
                           const UnaryField& unary, const LabelVolume* truth = nullptr);

nlohmann::json cmd_synth(const ExperimentConfig& config);
nlohmann::json cmd_refine(const ExperimentConfig& config);
nlohmann::json cmd_filter_labels(const ExperimentConfig& config);
nlohmann::json cmd_evaluate(const ExperimentConfig& config);
nlohmann::json cmd_oracle_check(const ExperimentConfig& config);

// CSV with header `<grid keys>,loss,pos_prec,neg_prec,iterations,converged,status`,
// one row per combination in grid order. Failing combinations keep their
// row with empty metrics and status `error: <message>`.
std::string cmd_sweep(const ExperimentConfig& config);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace voxcrf
