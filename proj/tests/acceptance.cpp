// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "voxcrf/commands.hpp"
#include "voxcrf/gibbs.hpp"
#include "voxcrf/oracle_check.hpp"
#include "voxcrf/random.hpp"
#include "voxcrf/volume_io.hpp"

using namespace voxcrf;
namespace fs = std::filesystem;

namespace {

namespace tol {
constexpr double decoupled_marginals = 1e-9;
constexpr double decoupled_seconds = 5.0;
constexpr double coupled_agreement = 0.95;
constexpr double coupled_seconds = 30.0;
constexpr double normalization = 1e-6;
constexpr double reduction = 1e-12;
constexpr double kernel = 1e-12;
constexpr double separable = 1e-5;
constexpr double constant = 1e-6;
constexpr double kernel_sum = 1e-9;
constexpr double loss_identity = 1e-9;
constexpr double trend_margin = 1.0;
constexpr double trend_seconds = 120.0;
}  // namespace tol

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

ScalarVolume random_volume(const GridDims& d, Rng& rng) {
    ScalarVolume v(d);
    for (auto& s : v.data()) s = static_cast<float>(rng.uniform());
    return v;
}

UnaryField random_unary(const GridDims& d, int L, double scale, Rng& rng) {
    LabelField u(d, L);
    for (auto& v : u.data()) v = rng.uniform(-scale, scale);
    return UnaryField(std::move(u));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------

Outcome decoupled_oracle() {
    Timer t;
    KernelSpec spec;
    const auto mu = CompatibilityMatrix::zeros(2);
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = make_random_instance(GridDims(2, 2, 2), 2, spec, mu, 3.0, seed);
        worst = std::max(worst, compare_with_oracle(inst.unary, inst.table, mu, {}).max_marginal_deviation);
    }
    const double s = t.seconds();
    return {worst < tol::decoupled_marginals && s < tol::decoupled_seconds,
            "50 instances, max deviation " + fmt("%.3g", worst) + ", " + fmt("%.2f", s) + " s"};
}

Outcome coupled_oracle() {
    Timer t;
    KernelSpec spec;
    const auto mu = CompatibilityMatrix::potts(2, 1.0);
    int full = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto inst = make_random_instance(GridDims(2, 2, 2), 2, spec, mu, 3.0, seed);
        const double pairwise = mu.max_abs() * inst.table.max_weighted_edge();
        for (std::size_t i = 0; i < 8; ++i) {
            if (std::abs(inst.unary(i, 0) - inst.unary(i, 1)) < 3.0 * pairwise) {
                return {false, "instance " + std::to_string(seed) + " violates the unary contrast bound"};
            }
        }
        full += compare_with_oracle(inst.unary, inst.table, mu, {}).argmax_agreement == 1.0;
    }
    const double s = t.seconds();
    return {full >= tol::coupled_agreement * 100 && s < tol::coupled_seconds,
            std::to_string(full) + "/100 instances in full argmax agreement, " + fmt("%.2f", s) + " s"};
}

Outcome normalization() {
    Rng rng(16);
    const GridDims d(16, 16, 16);
    KernelSpec spec;
    spec.mode = NeighborhoodMode::TwentySix;
    spec.alpha = 0.5;
    const auto table = build_kernel_table(random_volume(d, rng), spec);
    const auto unary = random_unary(d, 2, 3.0, rng);
    InferenceConfig cfg;
    cfg.max_iters = 10;
    cfg.tol = 0;
    double worst = 0;
    int seen = 0;
    run_inference(unary, table, CompatibilityMatrix::potts(2, 1.0), cfg, [&](int, const BeliefField& q) {
        ++seen;
        worst = std::max(worst, q.max_normalization_error());
    });
    return {seen == 10 && worst < tol::normalization,
            std::to_string(seen) + " iterations observed, max |sum Q - 1| " + fmt("%.3g", worst)};
}

Outcome reductions() {
    Rng rng(5);
    const GridDims d(8, 8, 8);
    const auto volume = random_volume(d, rng);
    const auto unary = random_unary(d, 2, 2.0, rng);
    const auto soft = init_beliefs(unary);
    const auto potts = CompatibilityMatrix::potts(2, 1.5);
    const InferenceConfig cfg;
    auto run = [&](KernelSpec spec, const CompatibilityMatrix& mu) {
        return run_inference(unary, build_kernel_table(volume, spec), mu, cfg).beliefs;
    };

    KernelSpec zero_w;
    zero_w.w1 = zero_w.w2 = 0;
    const double a = max_abs_diff(run(zero_w, potts).data(), soft.data());
    const double b = max_abs_diff(run(KernelSpec{}, CompatibilityMatrix::zeros(2)).data(), soft.data());
    KernelSpec six, e18, e26;
    e18.mode = NeighborhoodMode::Eighteen;
    e26.mode = NeighborhoodMode::TwentySix;
    e18.alpha = e26.alpha = 0;
    const auto ref = run(six, potts);
    const double c = max_abs_diff(run(e18, potts).data(), ref.data());
    const double dd = max_abs_diff(run(e26, potts).data(), ref.data());
    const bool ok = a <= tol::reduction && b <= tol::reduction && c <= tol::reduction && dd <= tol::reduction;
    return {ok, "w=0 " + fmt("%.3g", a) + ", mu=0 " + fmt("%.3g", b) + ", eighteen/a=0 " + fmt("%.3g", c) +
                    ", twenty_six/a=0 " + fmt("%.3g", dd)};
}

Outcome kernel_correctness() {
    Rng rng(6);
    double worst = 0;
    bool symmetric = true;
    for (int n = 0; n < 1000; ++n) {
        KernelSpec spec;
        spec.theta_alpha = rng.uniform(0.2, 5);
        spec.theta_beta = rng.uniform(0.05, 2);
        spec.theta_gamma = rng.uniform(0.2, 5);
        Vec3 dp{static_cast<double>(rng.index(7)) - 3, static_cast<double>(rng.index(7)) - 3,
                static_cast<double>(rng.index(7)) - 3};
        if (dp.squared_norm() == 0) dp.x = 1;
        const double ii = rng.uniform(-2, 2), ij = rng.uniform(-2, 2);
        const auto k = kernel_components(spec, dp, ii, ij);
        const auto back = kernel_components(spec, Vec3{-dp.x, -dp.y, -dp.z}, ij, ii);
        double k1, k2;
        oracle::kernel(dp.x, dp.y, dp.z, ii - ij, spec.theta_alpha, spec.theta_beta, spec.theta_gamma, k1, k2);
        worst = std::max({worst, std::abs(k.appearance - k1), std::abs(k.smoothness - k2)});
        symmetric = symmetric && k.appearance == back.appearance && k.smoothness == back.smoothness;
    }
    return {worst <= tol::kernel && symmetric,
            "1000 tuples, max deviation " + fmt("%.3g", worst) + (symmetric ? ", symmetric" : ", ASYMMETRIC")};
}

Outcome gaussian_filter() {
    Rng rng(7);
    const GridDims d(8, 8, 8);
    const auto v = random_volume(d, rng);
    const auto filtered = filter_volume(v, 1.0, 3);
    const auto brute = oracle::convolve3d(std::vector<double>(v.data().begin(), v.data().end()), d, 1.0, 3);
    double sep = 0;
    for (std::size_t i = 0; i < brute.size(); ++i) sep = std::max(sep, std::abs(filtered[i] - brute[i]));

    double cons = 0;
    const auto flat = filter_volume(ScalarVolume(GridDims(7, 5, 9), 2.5f), 1.7);
    for (float x : flat.data()) cons = std::max(cons, std::abs(static_cast<double>(x) - 2.5));

    double sum_err = 0;
    for (double sigma : {0.1, 0.5, 1.0, 2.0, 3.7}) {
        const auto k = gaussian_kernel_1d(sigma);
        double s = 0;
        for (double w : k.weights) s += w;
        sum_err = std::max(sum_err, std::abs(s - 1));
    }
    return {sep <= tol::separable && cons <= tol::constant && sum_err <= tol::kernel_sum,
            "separable vs direct " + fmt("%.3g", sep) + ", constant " + fmt("%.3g", cons) + ", kernel sum " +
                fmt("%.3g", sum_err)};
}

Outcome mask_semantics() {
    const GridDims d(10, 10, 10);
    LabelVolume isolated(d, 2);
    for (const auto& [x, y, z] : std::vector<std::array<int, 3>>{{1, 1, 1}, {5, 5, 5}, {8, 2, 6}, {2, 8, 8}}) {
        isolated[voxel_index(d, x, y, z)] = 1;
    }
    const auto sharp = make_label_mask(isolated, {0.1, 0.5, std::nullopt});
    bool exact = true;
    for (std::size_t i = 0; i < d.voxels(); ++i) exact = exact && sharp[i] == static_cast<float>(isolated[i]);

    Rng rng(8);
    LabelVolume blob(d, 2);
    for (auto& l : blob.data()) l = rng.uniform() < 0.2;
    bool ones = true;
    int combos = 0;
    for (double sigma : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        for (double floor : {0.0, 0.01, 0.1, 0.5, 0.9}) {
            for (const auto* labels : {&isolated, &blob}) {
                const auto m = make_label_mask(*labels, {sigma, floor, std::nullopt});
                for (std::size_t i = 0; i < d.voxels(); ++i) ones = ones && (!(*labels)[i] || m[i] == 1.0f);
                ++combos;
            }
        }
    }
    return {exact && ones, std::string(exact ? "sharp mask exact" : "sharp mask DIFFERS") + ", labelled voxels = 1 in " +
                               std::to_string(combos) + " (sigma, floor, volume) cases" + (ones ? "" : " FAILED")};
}

Outcome loss_identities() {
    Rng rng(9);
    const GridDims d(6, 7, 8);
    LabelVolume labels(d, 2);
    for (auto& l : labels.data()) l = rng.uniform() < 0.3;
    const auto mask = MaskVolume::from_labels(labels);
    const auto w1 = weighted_label_image(labels, 1.0);

    const double uniform =
        masked_cross_entropy(BeliefField(LabelField(d, 2, 0.5)), make_label_mask(labels, {}), weighted_label_image(labels, 2.5));

    LabelField f(d, 2);
    for (std::size_t i = 0; i < d.voxels(); ++i) {
        const double p = rng.uniform(0.01, 0.99);
        f(i, 0) = 1 - p;
        f(i, 1) = p;
    }
    const BeliefField q(std::move(f));
    const auto sharp = make_label_mask(labels, {0.05, 0.5, std::nullopt});
    const double bce_gap = std::abs(masked_cross_entropy(q, sharp, w1) - binary_cross_entropy(q, labels));

    const auto fcn = init_beliefs(random_unary(d, 2, 2.0, rng));
    const auto w = weighted_label_image(labels, 3.0);
    const bool endpoints = combined_loss(fcn, q, mask, w, 0.0) == masked_cross_entropy(fcn, mask, w) &&
                           combined_loss(fcn, q, mask, w, 1.0) == masked_cross_entropy(q, mask, w);

    const double ln2_gap = std::abs(uniform - std::log(2.0));
    return {ln2_gap <= tol::loss_identity && bce_gap <= tol::loss_identity && endpoints,
            "uniform vs ln 2 " + fmt("%.3g", ln2_gap) + ", sharp mask vs BCE " + fmt("%.3g", bce_gap) +
                (endpoints ? ", endpoints exact" : ", endpoints DIFFER")};
}

// Noisy-sphere benchmark shared by the trend checks.
struct Benchmark {
    fs::path dir;
    ConfigMap inputs;
};

Benchmark make_benchmark(const fs::path& root) {
    Benchmark b{root / "benchmark", {}};
    cmd_synth(parse_experiment_config({{"dims", "16,16,16"},
                                       {"spheres", "7.5,7.5,7.5,4,1"},
                                       {"noise", "0.3"},
                                       {"seed", "2024"},
                                       {"threshold", "0.5"},
                                       {"sharpness", "4"},
                                       {"out", b.dir.string()}}));
    b.inputs = {{"intensity", (b.dir / "intensity").string()},
                {"unary", (b.dir / "unary").string()},
                {"truth", (b.dir / "labels").string()}};
    return b;
}

// Best pos_prec + neg_prec over the rows of a sweep.
double best_score(const ConfigMap& base, const SweepGrid& grid, std::string& best_row) {
    const auto csv = cmd_sweep(parse_experiment_config(base, grid));
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    const std::size_t first_metric = grid.axes().size();
    double best = -1;
    while (std::getline(lines, row)) {
        std::vector<std::string> cells;
        std::stringstream s(row);
        for (std::string c; std::getline(s, c, ',');) cells.push_back(c);
        if (cells.size() < first_metric + 6 || cells.back() != "ok") continue;
        const auto& pos = cells[first_metric + 1];
        const auto& neg = cells[first_metric + 2];
        const double score = (pos.empty() ? 0.0 : std::stod(pos)) + (neg.empty() ? 0.0 : std::stod(neg));
        if (score > best) {
            best = score;
            best_row.clear();
            for (std::size_t a = 0; a < first_metric; ++a) best_row += (a ? " " : "") + cells[a];
        }
    }
    return best;
}

Outcome trend(const Benchmark& bench) {
    Timer t;
    std::string row;
    ConfigMap none = bench.inputs;
    SweepGrid g_none;
    g_none.set("mode", {"none"});
    const double unary = best_score(none, g_none, row);

    SweepGrid g_six;
    g_six.set("mode", {"six"});
    g_six.set("mu", {"potts:0.5", "potts:1", "potts:2"});
    const double six = best_score(bench.inputs, g_six, row);

    SweepGrid g18;
    g18.set("mode", {"eighteen"});
    g18.set("mu", {"potts:0.5", "potts:1", "potts:2"});
    g18.set("alpha", {"0.25", "0.5", "1"});
    const double eighteen = best_score(bench.inputs, g18, row);

    const double s = t.seconds();
    const bool ok = eighteen >= six && six >= unary && eighteen - unary >= tol::trend_margin && s < tol::trend_seconds;
    return {ok, "pos+neg precision: unary " + fmt("%.3f", unary) + ", six " + fmt("%.3f", six) + ", eighteen " +
                    fmt("%.3f", eighteen) + " at " + row + ", " +
                    fmt("%.1f", s) + " s"};
}

Outcome filtered_report(const Benchmark& bench, bool identities_hold) {
    ConfigMap m = bench.inputs;
    m["mode"] = "eighteen";
    m["alpha"] = "0.5";
    m["out"] = (bench.dir / "crf").string();
    cmd_refine(parse_experiment_config(m));
    ConfigMap e = {{"truth", bench.inputs.at("truth")}, {"beliefs", (bench.dir / "crf/beliefs").string()}};
    const double plain = cmd_evaluate(parse_experiment_config(e))["loss"].get<double>();
    e["filtered"] = "true";
    const double filtered = cmd_evaluate(parse_experiment_config(e))["loss"].get<double>();
    const bool ok = identities_hold && std::isfinite(plain) && std::isfinite(filtered);
    return {ok, "eighteen-CRF loss unfiltered " + fmt("%.5f", plain) + ", filtered " + fmt("%.5f", filtered) +
                    " (reported only); loss identities " + (identities_hold ? "hold" : "FAIL")};
}

Outcome determinism(const fs::path& root) {
    struct Run {
        int code;
        std::string out;
        std::map<std::string, std::string> files;
    };
    auto run = [&](std::vector<std::string> args, const fs::path& out_dir) {
        args.insert(args.begin(), "voxcrf");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        Run r{run_cli(static_cast<int>(argv.size()), argv.data(), out, err), out.str(), {}};
        if (fs::exists(out_dir)) {
            for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
                if (entry.is_regular_file()) r.files[entry.path().string()] = slurp(entry.path());
            }
        }
        return r;
    };
    const auto dir = root / "determinism";
    const auto s = (dir / "synth").string();
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"synth", {"synth", "--out", s, "--spheres", "5.5,5.5,5.5,3,1", "--dims", "12,12,12", "--noise", "0.3",
                   "--seed", "42"}},
        {"refine", {"refine", "--intensity", s + "/intensity", "--unary", s + "/unary", "--truth", s + "/labels",
                    "--mode", "eighteen", "--alpha", "0.5", "--out", (dir / "refine").string()}},
        {"filter-labels", {"filter-labels", "--labels", s + "/labels", "--sigma", "1.2", "--out",
                           (dir / "filter").string()}},
        {"evaluate", {"evaluate", "--truth", s + "/labels", "--beliefs", (dir / "refine/beliefs").string(),
                      "--unary", s + "/unary", "--filtered", "true"}},
        {"sweep", {"sweep", "--intensity", s + "/intensity", "--truth", s + "/labels", "--grid",
                   "mode=six,eighteen", "--grid", "mu=potts:1,potts:2", "--out", (dir / "sweep").string()}},
        {"oracle-check", {"oracle-check", "--dims", "2,2,2", "--instances", "5", "--seed", "3"}},
    };
    std::vector<std::string> bad;
    for (const auto& [name, args] : commands) {
        fs::path out_dir;
        for (std::size_t k = 0; k + 1 < args.size(); ++k) {
            if (args[k] == "--out") out_dir = args[k + 1];
        }
        const auto first = run(args, out_dir);
        const auto second = run(args, out_dir);
        if (first.code != 0 || second.code != 0 || first.out != second.out || first.files != second.files) {
            bad.push_back(name);
        }
    }
    std::string detail = std::to_string(commands.size()) + " commands run twice";
    for (const auto& b : bad) detail += ", " + b + " DIFFERS";
    return {bad.empty(), detail};
}

}  // namespace

int main() {
    const auto root = fs::temp_directory_path() / "voxcrf-acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    std::map<int, Outcome> results;
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("exception: ") + e.what()};
        }
    };

    results[2] = guarded(decoupled_oracle);
    results[3] = guarded(coupled_oracle);
    results[4] = guarded(normalization);
    results[5] = guarded(reductions);
    results[6] = guarded(kernel_correctness);
    results[7] = guarded(gaussian_filter);
    results[8] = guarded(mask_semantics);
    results[9] = guarded(loss_identities);
    Benchmark bench;
    results[10] = guarded([&] {
        bench = make_benchmark(root);
        return trend(bench);
    });
    results[11] = guarded([&] { return filtered_report(bench, results[9].pass); });
    results[12] = guarded([&] { return determinism(root); });
    results[1] = {results[10].pass,
                  "absolute benchmark figures need the original scans and trained network; "
                  "the directional claim is checked by criterion 10"};

    int failed = 0;
    for (const auto& [id, r] : results) {
        std::printf("criterion %2d: %s  %s\n", id, r.pass ? "PASS" : "FAIL", r.detail.c_str());
        failed += !r.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    fs::remove_all(root);
    return failed == 0 ? 0 : 1;
}
