#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "voxcrf/gaussian_filter.hpp"
#include "voxcrf/meanfield.hpp"
#include "voxcrf/neighborhood.hpp"
#include "voxcrf/synthetic.hpp"

namespace voxcrf {

// Flat key -> value settings. Keys are the kebab-case flag names.
using ConfigMap = std::map<std::string, std::string>;

struct ConfigKey {
    std::string name;
    std::string default_value;
    std::string help;
};

// Every recognised key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();
bool is_config_key(const std::string& name);
ConfigMap default_config();

// Parameter name -> candidate values, enumerated as a cartesian product with
// the first parameter varying slowest.
class SweepGrid {
public:
    void set(const std::string& name, std::vector<std::string> values);
    bool empty() const { return axes_.empty(); }
    const std::vector<std::pair<std::string, std::vector<std::string>>>& axes() const { return axes_; }

    std::size_t combinations() const;
    // Values for combination `index`, one per axis.
    std::vector<std::string> combination(std::size_t index) const;

private:
    std::vector<std::pair<std::string, std::vector<std::string>>> axes_;
};

// "name=v1,v2,..." -> axis
std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text);

struct ConfigFile {
    ConfigMap values;
    SweepGrid grid;
};

// `key = value` lines; blank lines and `#` comments ignored; `grid.<key> =
// v1,v2` lines define sweep axes. Throws ParameterError on unknown keys or
// malformed lines, DataError when the file cannot be read.
ConfigFile read_config_file(const std::filesystem::path& path);

// Fully parsed and validated experiment settings.
struct ExperimentConfig {
    ConfigMap source;  // merged key-value view this was parsed from

    std::string intensity, unary, truth, labels, beliefs, prediction, mask, out;

    GridDims dims{16, 16, 16};
    std::vector<Sphere> spheres;
    double background = 0.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    double sharpness = 4.0;

    bool crf = true;  // false when mode = none: beliefs are softmax(U)
    KernelSpec kernel;
    InferenceConfig inference;
    std::string mu_spec = "potts:1";

    MaskParams mask_params;
    bool filtered = false;
    double beta = 1.0;
    double lambda = 0.5;

    int num_labels = 2;
    int instances = 1;
    double unary_ratio = 3.0;

    SweepGrid grid;
    std::size_t max_combinations = 4096;

    // Compatibility matrix for the given label count from mu_spec:
    // "potts:<scale>", "identity", "zero", or a path to a whitespace-separated
    // L x L matrix.
    CompatibilityMatrix compatibility(int labels) const;
};

// Throws ParameterError naming the offending key.
ExperimentConfig parse_experiment_config(const ConfigMap& values, SweepGrid grid = {});

// defaults < file < overrides
ConfigMap layer_config(const ConfigMap* file_values, const ConfigMap& overrides);

}  // namespace voxcrf
