#include "voxcrf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "voxcrf/error.hpp"

namespace voxcrf {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
        throw ParameterError("'" + key + "' expects a finite number, got '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ParameterError("'" + key + "' expects an integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const auto t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ParameterError("'" + key + "' expects a boolean, got '" + text + "'");
}

GridDims parse_dims(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw ParameterError("'dims' expects nx,ny,nz");
    std::size_t d[3];
    for (int k = 0; k < 3; ++k) {
        const auto v = parse_int("dims", parts[k]);
        if (v < 1) throw ParameterError("'dims' entries must be >= 1");
        d[k] = static_cast<std::size_t>(v);
    }
    return GridDims(d[0], d[1], d[2]);
}

std::vector<Sphere> parse_spheres(const std::string& text) {
    std::vector<Sphere> out;
    for (const auto& item : split(text, ';')) {
        if (item.empty()) continue;
        const auto f = split(item, ',');
        if (f.size() != 5) throw ParameterError("'spheres' entries are cx,cy,cz,radius,intensity");
        Sphere s;
        s.cx = parse_double("spheres", f[0]);
        s.cy = parse_double("spheres", f[1]);
        s.cz = parse_double("spheres", f[2]);
        s.radius = parse_double("spheres", f[3]);
        s.intensity = parse_double("spheres", f[4]);
        if (!(s.radius > 0)) throw ParameterError("sphere radius must be positive");
        out.push_back(s);
    }
    return out;
}

const std::string& get(const ConfigMap& m, const std::string& key) {
    static const std::string empty;
    const auto it = m.find(key);
    return it == m.end() ? empty : it->second;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"intensity", "", "intensity volume (f32le)"},
        {"unary", "", "unary field (f64le); derived from intensity when empty"},
        {"truth", "", "ground-truth label volume (u8)"},
        {"labels", "", "label volume to filter"},
        {"beliefs", "", "belief field to evaluate"},
        {"prediction", "", "predicted label volume to evaluate"},
        {"mask", "", "precomputed mask volume (f32le)"},
        {"out", "", "output directory"},
        {"dims", "16,16,16", "grid size nx,ny,nz"},
        {"spheres", "", "cx,cy,cz,radius,intensity;..."},
        {"background", "0", "background intensity"},
        {"noise", "0", "std of additive Gaussian noise"},
        {"seed", "0", "random seed"},
        {"threshold", "0.5", "logistic unary threshold"},
        {"sharpness", "4", "logistic unary sharpness"},
        {"w1", "1", "appearance kernel coefficient"},
        {"w2", "1", "smoothness kernel coefficient"},
        {"theta-alpha", "1", "appearance spatial bandwidth"},
        {"theta-beta", "0.5", "appearance intensity bandwidth"},
        {"theta-gamma", "1", "smoothness spatial bandwidth"},
        {"mode", "six", "six | eighteen | twenty_six | none"},
        {"alpha", "1", "scale of non-face neighbours"},
        {"g-sigma", "off", "truncation weight bandwidth or off"},
        {"g-radius", "1", "truncation weight cutoff"},
        {"max-iters", "10", "mean-field iteration cap"},
        {"tol", "1e-5", "convergence tolerance on max |dQ|"},
        {"mu", "potts:1", "potts:<scale> | identity | zero | matrix file"},
        {"sigma", "1", "label mask blur sigma"},
        {"floor", "0.01", "label mask floor"},
        {"filtered", "false", "score against the blurred label mask"},
        {"beta", "1", "weight of labelled voxels in the loss"},
        {"lambda", "0.5", "combined loss mixing coefficient"},
        {"num-labels", "2", "label count for oracle instances"},
        {"instances", "1", "number of seeded oracle instances"},
        {"unary-ratio", "3", "unary contrast over the largest pairwise term"},
        {"max-combinations", "4096", "cap on sweep size"},
    };
    return keys;
}

bool is_config_key(const std::string& name) {
    const auto& keys = config_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == name; });
}

ConfigMap default_config() {
    ConfigMap m;
    for (const auto& k : config_keys()) m[k.name] = k.default_value;
    return m;
}

ConfigMap layer_config(const ConfigMap* file_values, const ConfigMap& overrides) {
    ConfigMap m = default_config();
    if (file_values) {
        for (const auto& [k, v] : *file_values) m[k] = v;
    }
    for (const auto& [k, v] : overrides) {
        if (!is_config_key(k)) throw ParameterError("unknown config key '" + k + "'");
        m[k] = v;
    }
    return m;
}

// SweepGrid

void SweepGrid::set(const std::string& name, std::vector<std::string> values) {
    if (values.empty()) throw ParameterError("sweep axis '" + name + "' has no values");
    if (!is_config_key(name)) throw ParameterError("unknown sweep parameter '" + name + "'");
    for (auto& axis : axes_) {
        if (axis.first == name) {
            axis.second = std::move(values);
            return;
        }
    }
    axes_.emplace_back(name, std::move(values));
}

std::size_t SweepGrid::combinations() const {
    std::size_t n = 1;
    for (const auto& axis : axes_) n *= axis.second.size();
    return n;
}

std::vector<std::string> SweepGrid::combination(std::size_t index) const {
    std::vector<std::string> out(axes_.size());
    for (std::size_t a = axes_.size(); a-- > 0;) {
        const auto& values = axes_[a].second;
        out[a] = values[index % values.size()];
        index /= values.size();
    }
    return out;
}

std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParameterError("grid axis must look like name=v1,v2");
    auto name = trim(text.substr(0, eq));
    auto values = split(text.substr(eq + 1), ',');
    values.erase(std::remove(values.begin(), values.end(), std::string()), values.end());
    if (values.empty()) throw ParameterError("sweep axis '" + name + "' has no values");
    return {name, values};
}

ConfigFile read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    ConfigFile cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParameterError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.rfind("grid.", 0) == 0) {
            auto axis = parse_grid_axis(key.substr(5) + "=" + value);
            cfg.grid.set(axis.first, std::move(axis.second));
        } else if (is_config_key(key)) {
            cfg.values[key] = value;
        } else {
            throw ParameterError(path.string() + ":" + std::to_string(line_no) +
                                 ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

ExperimentConfig parse_experiment_config(const ConfigMap& values, SweepGrid grid) {
    for (const auto& [k, v] : values) {
        if (!is_config_key(k)) throw ParameterError("unknown config key '" + k + "'");
    }
    const ConfigMap m = layer_config(nullptr, values);
    ExperimentConfig c;
    c.source = m;

    c.intensity = get(m, "intensity");
    c.unary = get(m, "unary");
    c.truth = get(m, "truth");
    c.labels = get(m, "labels");
    c.beliefs = get(m, "beliefs");
    c.prediction = get(m, "prediction");
    c.mask = get(m, "mask");
    c.out = get(m, "out");

    c.dims = parse_dims(get(m, "dims"));
    c.spheres = parse_spheres(get(m, "spheres"));
    c.background = parse_double("background", get(m, "background"));
    c.noise = parse_double("noise", get(m, "noise"));
    if (c.noise < 0) throw ParameterError("'noise' must be >= 0");
    const auto seed = parse_int("seed", get(m, "seed"));
    if (seed < 0) throw ParameterError("'seed' must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.threshold = parse_double("threshold", get(m, "threshold"));
    c.sharpness = parse_double("sharpness", get(m, "sharpness"));
    if (!(c.sharpness > 0)) throw ParameterError("'sharpness' must be > 0");

    c.kernel.w1 = parse_double("w1", get(m, "w1"));
    c.kernel.w2 = parse_double("w2", get(m, "w2"));
    c.kernel.theta_alpha = parse_double("theta-alpha", get(m, "theta-alpha"));
    c.kernel.theta_beta = parse_double("theta-beta", get(m, "theta-beta"));
    c.kernel.theta_gamma = parse_double("theta-gamma", get(m, "theta-gamma"));
    const auto& mode = get(m, "mode");
    if (mode == "none") {
        c.crf = false;
    } else {
        c.kernel.mode = parse_neighborhood_mode(mode);
    }
    c.kernel.alpha = parse_double("alpha", get(m, "alpha"));
    const auto& gs = get(m, "g-sigma");
    if (trim(gs) != "off" && !trim(gs).empty()) c.kernel.g_sigma = parse_double("g-sigma", gs);
    c.kernel.g_radius = parse_double("g-radius", get(m, "g-radius"));
    c.kernel.validate();

    const auto iters = parse_int("max-iters", get(m, "max-iters"));
    if (iters < 1 || iters > 1000000) throw ParameterError("'max-iters' must be in [1, 1e6]");
    c.inference.max_iters = static_cast<int>(iters);
    c.inference.tol = parse_double("tol", get(m, "tol"));
    c.inference.validate();

    c.mu_spec = trim(get(m, "mu"));
    if (c.mu_spec.empty()) throw ParameterError("'mu' must not be empty");

    c.mask_params.sigma = parse_double("sigma", get(m, "sigma"));
    if (!(c.mask_params.sigma > 0)) throw ParameterError("'sigma' must be > 0");
    c.mask_params.floor = parse_double("floor", get(m, "floor"));
    if (!(c.mask_params.floor >= 0 && c.mask_params.floor < 1)) {
        throw ParameterError("'floor' must be in [0, 1)");
    }
    c.filtered = parse_bool("filtered", get(m, "filtered"));
    c.beta = parse_double("beta", get(m, "beta"));
    if (!(c.beta > 0)) throw ParameterError("'beta' must be > 0");
    c.lambda = parse_double("lambda", get(m, "lambda"));
    if (!(c.lambda >= 0 && c.lambda <= 1)) throw ParameterError("'lambda' must be in [0, 1]");

    const auto labels = parse_int("num-labels", get(m, "num-labels"));
    if (labels < 2 || labels > 16) throw ParameterError("'num-labels' must be in [2, 16]");
    c.num_labels = static_cast<int>(labels);
    const auto instances = parse_int("instances", get(m, "instances"));
    if (instances < 1 || instances > 100000) throw ParameterError("'instances' must be in [1, 1e5]");
    c.instances = static_cast<int>(instances);
    c.unary_ratio = parse_double("unary-ratio", get(m, "unary-ratio"));
    if (!(c.unary_ratio > 0)) throw ParameterError("'unary-ratio' must be > 0");

    const auto cap = parse_int("max-combinations", get(m, "max-combinations"));
    if (cap < 1) throw ParameterError("'max-combinations' must be >= 1");
    c.max_combinations = static_cast<std::size_t>(cap);
    c.grid = std::move(grid);
    if (c.grid.combinations() > c.max_combinations) {
        throw ParameterError("sweep has " + std::to_string(c.grid.combinations()) +
                             " combinations, above max-combinations");
    }
    return c;
}

CompatibilityMatrix ExperimentConfig::compatibility(int labels) const {
    if (mu_spec.rfind("potts:", 0) == 0) {
        return CompatibilityMatrix::potts(labels, parse_double("mu", mu_spec.substr(6)));
    }
    if (mu_spec == "identity") return CompatibilityMatrix::identity(labels);
    if (mu_spec == "zero") return CompatibilityMatrix::zeros(labels);

    std::ifstream in(mu_spec);
    if (!in) throw ParameterError("'mu' is neither a known form nor a readable matrix file: " + mu_spec);
    std::vector<double> values;
    std::string token;
    while (in >> token) values.push_back(parse_double("mu", token));
    if (values.size() != static_cast<std::size_t>(labels) * labels) {
        throw ParameterError("matrix file " + mu_spec + " does not hold " + std::to_string(labels) +
                             "x" + std::to_string(labels) + " values");
    }
    return CompatibilityMatrix(labels, std::move(values));
}

}  // namespace voxcrf
