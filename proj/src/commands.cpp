#include "voxcrf/commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "voxcrf/error.hpp"
#include "voxcrf/gibbs.hpp"
#include "voxcrf/oracle_check.hpp"
#include "voxcrf/synthetic.hpp"
#include "voxcrf/volume_io.hpp"

namespace voxcrf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

const std::string& require_path(const std::string& value, const char* key) {
    if (value.empty()) throw ParameterError(std::string("'") + key + "' is required");
    return value;
}

fs::path output_dir(const ExperimentConfig& config) {
    const fs::path dir = require_path(config.out, "out");
    fs::create_directories(dir);
    return dir;
}

UnaryField load_or_derive_unary(const ExperimentConfig& config, const ScalarVolume& intensity) {
    if (config.unary.empty()) return unary_from_intensity(intensity, config.threshold, config.sharpness);
    UnaryField u(load_label_field(config.unary));
    require_same_dims(u.dims(), intensity.dims(), "unary vs intensity");
    return u;
}

BeliefField lift_labels(const LabelVolume& labels) {
    const int L = std::max(2, labels.num_labels());
    LabelField f(labels.dims(), L, kLogClamp / (L - 1));
    for (std::size_t i = 0; i < labels.size(); ++i) f(i, labels[i]) = 1.0 - kLogClamp;
    return BeliefField(std::move(f));
}

json report_json(const ConvergenceReport& r) {
    return {{"iterations", r.iterations}, {"converged", r.converged}, {"max_delta", r.max_delta}};
}

}  // namespace

json metrics_json(const Evaluation& e) {
    const auto& p = e.precision;
    return {{"loss", e.loss},
            {"pos_prec", optional_json(p.pos_percent())},
            {"neg_prec", optional_json(p.neg_percent())},
            {"tp", p.counts.tp},
            {"fp", p.counts.fp},
            {"tn", p.counts.tn},
            {"fn", p.counts.fn}};
}

Evaluation evaluate_beliefs(const ExperimentConfig& config, const BeliefField& beliefs,
                            const LabelVolume& truth, const MaskVolume* mask) {
    require_same_dims(beliefs.dims(), truth.dims(), "beliefs vs truth");
    const MaskVolume built = mask ? MaskVolume()
                             : config.filtered ? make_label_mask(truth, config.mask_params)
                                               : MaskVolume::from_labels(truth);
    const MaskVolume& m = mask ? *mask : built;
    Evaluation e;
    e.loss = masked_cross_entropy(beliefs, m, weighted_label_image(truth, config.beta));
    e.precision = precision_metrics(argmax_labels(beliefs), truth);
    return e;
}

RefineResult refine_volume(const ExperimentConfig& config, const ScalarVolume& intensity,
                           const UnaryField& unary, const LabelVolume* truth) {
    require_same_dims(unary.dims(), intensity.dims(), "unary vs intensity");
    RefineResult r;
    if (config.crf) {
        const auto table = build_kernel_table(intensity, config.kernel);
        auto result = run_inference(unary, table, config.compatibility(unary.num_labels()), config.inference);
        r.beliefs = std::move(result.beliefs);
        r.report = std::move(result.report);
    } else {
        r.beliefs = init_beliefs(unary);
        r.report.converged = true;
    }
    r.labels = argmax_labels(r.beliefs);
    if (truth) r.evaluation = evaluate_beliefs(config, r.beliefs, *truth);
    return r;
}

json cmd_synth(const ExperimentConfig& config) {
    const auto dir = output_dir(config);
    const auto scene =
        make_synthetic_nodule(config.dims, config.spheres, config.background, config.noise, config.seed);
    const auto unary = unary_from_intensity(scene.intensity, config.threshold, config.sharpness);
    save_volume(scene.intensity, dir / "intensity");
    save_volume(scene.labels, dir / "labels");
    save_volume(unary, dir / "unary");
    return {{"dims", {config.dims.nx, config.dims.ny, config.dims.nz}},
            {"seed", config.seed},
            {"spheres", config.spheres.size()},
            {"positive_voxels", scene.labels.count(1)},
            {"intensity", (dir / "intensity.json").string()},
            {"labels", (dir / "labels.json").string()},
            {"unary", (dir / "unary.json").string()}};
}

json cmd_refine(const ExperimentConfig& config) {
    const auto intensity = load_scalar_volume(require_path(config.intensity, "intensity"));
    const auto unary = load_or_derive_unary(config, intensity);
    std::optional<LabelVolume> truth;
    if (!config.truth.empty()) truth = load_label_volume(config.truth);

    const auto r = refine_volume(config, intensity, unary, truth ? &*truth : nullptr);
    json j = report_json(r.report);
    j["mode"] = config.crf ? std::string(to_string(config.kernel.mode)) : std::string("none");
    if (!config.out.empty()) {
        const auto dir = output_dir(config);
        save_volume(r.beliefs, dir / "beliefs");
        save_volume(r.labels, dir / "labels");
        j["beliefs"] = (dir / "beliefs.json").string();
        j["labels"] = (dir / "labels.json").string();
    }
    if (r.evaluation) j["metrics"] = metrics_json(*r.evaluation);
    return j;
}

json cmd_filter_labels(const ExperimentConfig& config) {
    const auto labels = load_label_volume(require_path(config.labels, "labels"));
    const auto dir = output_dir(config);
    const auto mask = make_label_mask(labels, config.mask_params);
    save_volume(mask.to_scalar(), dir / "mask");
    std::size_t nonzero = 0;
    for (float v : mask.data()) nonzero += v > 0.0f;
    return {{"mask", (dir / "mask.json").string()},
            {"sigma", config.mask_params.sigma},
            {"floor", config.mask_params.floor},
            {"nonzero_voxels", nonzero},
            {"labelled_voxels", labels.count(1)}};
}

json cmd_evaluate(const ExperimentConfig& config) {
    const auto truth = load_label_volume(require_path(config.truth, "truth"));
    BeliefField beliefs;
    if (!config.beliefs.empty()) {
        beliefs = BeliefField(load_label_field(config.beliefs));
    } else if (!config.prediction.empty()) {
        beliefs = lift_labels(load_label_volume(config.prediction));
    } else {
        throw ParameterError("'beliefs' or 'prediction' is required");
    }

    std::optional<MaskVolume> mask;
    std::string mask_kind = config.filtered ? "filtered" : "plain";
    if (!config.mask.empty()) {
        mask = MaskVolume::from_scalar(load_scalar_volume(config.mask));
        mask_kind = "file";
    }
    const auto e = evaluate_beliefs(config, beliefs, truth, mask ? &*mask : nullptr);
    json j = metrics_json(e);
    j["mask"] = mask_kind;

    if (!config.unary.empty()) {
        const BeliefField fcn = init_beliefs(UnaryField(load_label_field(config.unary)));
        const auto fcn_eval = evaluate_beliefs(config, fcn, truth, mask ? &*mask : nullptr);
        const MaskVolume m = mask ? *mask
                             : config.filtered ? make_label_mask(truth, config.mask_params)
                                               : MaskVolume::from_labels(truth);
        j["fcn_loss"] = fcn_eval.loss;
        j["combined_loss"] =
            combined_loss(fcn, beliefs, m, weighted_label_image(truth, config.beta), config.lambda);
    }
    return j;
}

std::string cmd_sweep(const ExperimentConfig& config) {
    if (config.grid.empty()) throw ParameterError("sweep needs at least one grid axis");
    require_path(config.truth, "truth");
    require_path(config.intensity, "intensity");

    std::ostringstream csv;
    for (const auto& axis : config.grid.axes()) csv << axis.first << ",";
    csv << "loss,pos_prec,neg_prec,iterations,converged,status\n";

    const std::size_t n = config.grid.combinations();
    for (std::size_t k = 0; k < n; ++k) {
        const auto values = config.grid.combination(k);
        for (const auto& v : values) csv << v << ",";
        try {
            ConfigMap m = config.source;
            for (std::size_t a = 0; a < values.size(); ++a) m[config.grid.axes()[a].first] = values[a];
            auto combo = parse_experiment_config(m);
            if (!config.out.empty()) {
                char name[32];
                std::snprintf(name, sizeof name, "combo-%04zu", k);
                combo.out = (fs::path(config.out) / name).string();
            }
            const auto intensity = load_scalar_volume(combo.intensity);
            const auto unary = load_or_derive_unary(combo, intensity);
            const auto truth = load_label_volume(combo.truth);
            const auto r = refine_volume(combo, intensity, unary, &truth);
            if (!combo.out.empty()) {
                const auto dir = output_dir(combo);
                save_volume(r.beliefs, dir / "beliefs");
                save_volume(r.labels, dir / "labels");
            }
            csv << format_double(r.evaluation->loss) << ","
                << format_optional(r.evaluation->precision.pos_percent()) << ","
                << format_optional(r.evaluation->precision.neg_percent()) << "," << r.report.iterations
                << "," << (r.report.converged ? "true" : "false") << ",ok\n";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& c : msg) {
                if (c == ',' || c == '\n' || c == '\r') c = ' ';
            }
            csv << ",,,,,error: " << msg << "\n";
        }
    }
    if (!config.out.empty()) {
        const auto dir = output_dir(config);
        std::ofstream file(dir / "sweep.csv", std::ios::binary | std::ios::trunc);
        file << csv.str();
        if (!file) throw DataError("cannot write sweep.csv");
    }
    return csv.str();
}

json cmd_oracle_check(const ExperimentConfig& config) {
    json results = json::array();
    double worst_dev = 0.0;
    double min_agree = 1.0;
    double sum_agree = 0.0;
    int full = 0;

    auto record = [&](const OracleComparison& c, json extra) {
        extra["max_marginal_deviation"] = c.max_marginal_deviation;
        extra["argmax_agreement"] = c.argmax_agreement;
        extra["log_z"] = c.log_z;
        extra["iterations"] = c.report.iterations;
        extra["converged"] = c.report.converged;
        results.push_back(std::move(extra));
        worst_dev = std::max(worst_dev, c.max_marginal_deviation);
        min_agree = std::min(min_agree, c.argmax_agreement);
        sum_agree += c.argmax_agreement;
        full += c.argmax_agreement == 1.0;
    };

    if (!config.unary.empty() || !config.intensity.empty()) {
        const auto intensity = load_scalar_volume(require_path(config.intensity, "intensity"));
        const UnaryField unary(load_label_field(require_path(config.unary, "unary")));
        configuration_count(unary.dims(), unary.num_labels());
        const auto table = build_kernel_table(intensity, config.kernel);
        const auto mu = config.compatibility(unary.num_labels());
        record(compare_with_oracle(unary, table, mu, config.inference), json::object());
    } else {
        configuration_count(config.dims, config.num_labels);
        const auto mu = config.compatibility(config.num_labels);
        for (int k = 0; k < config.instances; ++k) {
            const auto seed = config.seed + static_cast<std::uint64_t>(k);
            const auto inst = make_random_instance(config.dims, config.num_labels, config.kernel, mu,
                                                   config.unary_ratio, seed);
            record(compare_with_oracle(inst.unary, inst.table, mu, config.inference), {{"seed", seed}});
        }
    }
    const auto count = static_cast<double>(results.size());
    return {{"instances", results.size()},
            {"max_marginal_deviation", worst_dev},
            {"min_argmax_agreement", min_agree},
            {"mean_argmax_agreement", sum_agree / count},
            {"full_agreement_instances", full},
            {"results", results}};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Volumetric mean-field CRF refinement"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        std::string config_path;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
        std::vector<std::string> grid;
    };
    const std::vector<std::pair<std::string, std::string>> names = {
        {"synth", "write a synthetic nodule volume, labels and unaries"},
        {"refine", "run mean-field CRF refinement on a unary field"},
        {"filter-labels", "write a Gaussian-filtered label mask"},
        {"evaluate", "score beliefs or labels against ground truth"},
        {"sweep", "run refine + evaluate over a parameter grid"},
        {"oracle-check", "compare mean-field with exact enumeration"},
    };
    std::vector<std::unique_ptr<Sub>> subs;
    for (const auto& [name, help] : names) {
        auto sub = std::make_unique<Sub>();
        sub->app = app.add_subcommand(name, help);
        sub->app->add_option("--config", sub->config_path, "flat key = value config file");
        for (const auto& key : config_keys()) {
            sub->options[key.name] =
                sub->app->add_option("--" + key.name, sub->values[key.name], key.help)
                    ->default_str(key.default_value);
        }
        if (name == "sweep") {
            sub->app->add_option("--grid", sub->grid, "sweep axis name=v1,v2,... (repeatable)");
        }
        subs.push_back(std::move(sub));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfigError;
    }

    try {
        for (const auto& sub : subs) {
            if (!sub->app->parsed()) continue;
            ConfigMap flags;
            for (const auto& [key, opt] : sub->options) {
                if (opt->count() > 0) flags[key] = sub->values[key];
            }
            std::optional<ConfigFile> file;
            if (!sub->config_path.empty()) file = read_config_file(sub->config_path);
            SweepGrid grid = file ? file->grid : SweepGrid{};
            for (const auto& axis : sub->grid) {
                auto [name, values] = parse_grid_axis(axis);
                grid.set(name, std::move(values));
            }
            const auto config =
                parse_experiment_config(layer_config(file ? &file->values : nullptr, flags), grid);

            const std::string name = sub->app->get_name();
            if (name == "sweep") {
                out << cmd_sweep(config);
                return kExitOk;
            }
            json result = name == "synth"           ? cmd_synth(config)
                          : name == "refine"        ? cmd_refine(config)
                          : name == "filter-labels" ? cmd_filter_labels(config)
                          : name == "evaluate"      ? cmd_evaluate(config)
                                                    : cmd_oracle_check(config);
            out << result.dump(2) << "\n";
            return kExitOk;
        }
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const EnumerationRefused& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const IndexError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace voxcrf
