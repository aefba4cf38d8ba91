// numpy arrays are (nz, ny, nx) or (nz, ny, nx, L), C order, which matches the
// x-fastest storage of the core types.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "voxcrf/commands.hpp"
#include "voxcrf/error.hpp"
#include "voxcrf/gaussian_filter.hpp"
#include "voxcrf/gibbs.hpp"
#include "voxcrf/meanfield.hpp"
#include "voxcrf/metrics.hpp"
#include "voxcrf/neighborhood.hpp"
#include "voxcrf/synthetic.hpp"

namespace py = pybind11;
using namespace voxcrf;

namespace {

template <class T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

GridDims dims_of(const py::buffer_info& info, int expected_ndim, const char* what) {
    if (info.ndim != expected_ndim) {
        throw ParameterError(std::string(what) + " must have " + std::to_string(expected_ndim) + " dimensions");
    }
    return GridDims(info.shape[2], info.shape[1], info.shape[0]);
}

ScalarVolume to_scalar(const CArray<float>& a) {
    const auto info = a.request();
    const auto* p = static_cast<const float*>(info.ptr);
    return ScalarVolume(dims_of(info, 3, "volume"), std::vector<float>(p, p + info.size));
}

LabelVolume to_labels(const CArray<std::uint8_t>& a, int num_labels) {
    const auto info = a.request();
    const auto* p = static_cast<const std::uint8_t*>(info.ptr);
    return LabelVolume(dims_of(info, 3, "labels"), num_labels, std::vector<std::uint8_t>(p, p + info.size));
}

LabelField to_field(const CArray<double>& a) {
    const auto info = a.request();
    if (info.ndim != 4) throw ParameterError("label field must have shape (nz, ny, nx, L)");
    const auto* p = static_cast<const double*>(info.ptr);
    return LabelField(GridDims(info.shape[2], info.shape[1], info.shape[0]), static_cast<int>(info.shape[3]),
                      std::vector<double>(p, p + info.size));
}

std::vector<py::ssize_t> shape3(const GridDims& d) {
    return {static_cast<py::ssize_t>(d.nz), static_cast<py::ssize_t>(d.ny), static_cast<py::ssize_t>(d.nx)};
}

template <class T>
py::array_t<T> to_numpy(std::vector<py::ssize_t> shape, std::span<const T> data) {
    py::array_t<T> out(shape);
    std::copy(data.begin(), data.end(), out.mutable_data());
    return out;
}

py::array_t<float> from_scalar(const ScalarVolume& v) { return to_numpy(shape3(v.dims()), v.data()); }

py::array_t<std::uint8_t> from_labels(const LabelVolume& v) { return to_numpy(shape3(v.dims()), v.data()); }

py::array_t<double> from_field(const LabelField& f) {
    auto shape = shape3(f.dims());
    shape.push_back(f.num_labels());
    return to_numpy<double>(shape, f.data());
}

CompatibilityMatrix to_compat(const py::object& mu, int labels) {
    if (py::isinstance<py::float_>(mu) || py::isinstance<py::int_>(mu)) {
        return CompatibilityMatrix::potts(labels, mu.cast<double>());
    }
    const auto a = mu.cast<CArray<double>>();
    const auto info = a.request();
    if (info.ndim != 2 || info.shape[0] != labels || info.shape[1] != labels) {
        throw ParameterError("mu must be a scalar Potts scale or an L x L matrix");
    }
    const auto* p = static_cast<const double*>(info.ptr);
    return CompatibilityMatrix(labels, std::vector<double>(p, p + info.size));
}

py::dict report_dict(const ConvergenceReport& r) {
    py::dict d;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["max_delta"] = r.max_delta;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Volumetric mean-field CRF refinement";

    py::register_exception<EnumerationRefused>(m, "EnumerationRefused", PyExc_ValueError);

    py::enum_<NeighborhoodMode>(m, "NeighborhoodMode")
        .value("SIX", NeighborhoodMode::Six)
        .value("EIGHTEEN", NeighborhoodMode::Eighteen)
        .value("TWENTY_SIX", NeighborhoodMode::TwentySix);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init([](double w1, double w2, double theta_alpha, double theta_beta, double theta_gamma,
                         const std::string& mode, double alpha, std::optional<double> g_sigma, double g_radius) {
                 KernelSpec s;
                 s.w1 = w1;
                 s.w2 = w2;
                 s.theta_alpha = theta_alpha;
                 s.theta_beta = theta_beta;
                 s.theta_gamma = theta_gamma;
                 s.mode = parse_neighborhood_mode(mode);
                 s.alpha = alpha;
                 s.g_sigma = g_sigma;
                 s.g_radius = g_radius;
                 s.validate();
                 return s;
             }),
             py::kw_only(), py::arg("w1") = 1.0, py::arg("w2") = 1.0, py::arg("theta_alpha") = 1.0,
             py::arg("theta_beta") = 0.5, py::arg("theta_gamma") = 1.0, py::arg("mode") = "six",
             py::arg("alpha") = 1.0, py::arg("g_sigma") = py::none(), py::arg("g_radius") = 1.0)
        .def_readwrite("w1", &KernelSpec::w1)
        .def_readwrite("w2", &KernelSpec::w2)
        .def_readwrite("theta_alpha", &KernelSpec::theta_alpha)
        .def_readwrite("theta_beta", &KernelSpec::theta_beta)
        .def_readwrite("theta_gamma", &KernelSpec::theta_gamma)
        .def_readwrite("mode", &KernelSpec::mode)
        .def_readwrite("alpha", &KernelSpec::alpha)
        .def_readwrite("g_sigma", &KernelSpec::g_sigma)
        .def_readwrite("g_radius", &KernelSpec::g_radius);

    m.def(
        "neighborhood_offsets",
        [](const std::string& mode, double alpha) {
            std::vector<py::tuple> out;
            for (const auto& o : neighborhood_offsets(parse_neighborhood_mode(mode), alpha)) {
                out.push_back(py::make_tuple(o.dx, o.dy, o.dz, o.ring, o.ring_scale));
            }
            return out;
        },
        py::arg("mode"), py::arg("alpha") = 1.0, "(dx, dy, dz, ring, ring_scale) per offset, in table order");

    m.def(
        "kernel_components",
        [](const KernelSpec& spec, std::array<double, 3> dp, double ii, double ij) {
            const auto k = kernel_components(spec, Vec3{dp[0], dp[1], dp[2]}, ii, ij);
            return py::make_tuple(k.appearance, k.smoothness);
        },
        py::arg("spec"), py::arg("delta_p"), py::arg("intensity_i"), py::arg("intensity_j"));

    m.def(
        "refine",
        [](const CArray<float>& intensity, const CArray<double>& unary, const KernelSpec& spec,
           const py::object& mu, int max_iters, double tol) {
            const auto volume = to_scalar(intensity);
            const UnaryField u(to_field(unary));
            InferenceConfig cfg;
            cfg.max_iters = max_iters;
            cfg.tol = tol;
            cfg.validate();
            const auto compat = to_compat(mu, u.num_labels());
            InferenceResult r;
            {
                py::gil_scoped_release release;
                r = run_inference(u, build_kernel_table(volume, spec), compat, cfg);
            }
            return py::make_tuple(from_field(r.beliefs), report_dict(r.report));
        },
        py::arg("intensity"), py::arg("unary"), py::arg("spec") = KernelSpec{}, py::arg("mu") = 1.0,
        py::arg("max_iters") = 10, py::arg("tol") = 1e-5,
        "Mean-field inference. Returns (beliefs, report).");

    m.def(
        "softmax", [](const CArray<double>& unary) { return from_field(init_beliefs(UnaryField(to_field(unary)))); },
        py::arg("unary"));

    m.def(
        "argmax_labels",
        [](const CArray<double>& beliefs) { return from_labels(argmax_labels(BeliefField(to_field(beliefs)))); },
        py::arg("beliefs"));

    m.def(
        "exact_marginals",
        [](const CArray<float>& intensity, const CArray<double>& unary, const KernelSpec& spec,
           const py::object& mu) {
            const UnaryField u(to_field(unary));
            const auto r = exact_marginals(u, build_kernel_table(to_scalar(intensity), spec),
                                           to_compat(mu, u.num_labels()));
            return py::make_tuple(from_field(r.marginals), r.log_z);
        },
        py::arg("intensity"), py::arg("unary"), py::arg("spec") = KernelSpec{}, py::arg("mu") = 1.0,
        "Exact Gibbs marginals by enumeration. Returns (marginals, log_z).");

    m.def(
        "gaussian_filter",
        [](const CArray<float>& volume, double sigma, std::optional<int> radius) {
            return from_scalar(filter_volume(to_scalar(volume), sigma, radius));
        },
        py::arg("volume"), py::arg("sigma"), py::arg("radius") = py::none());

    m.def(
        "label_mask",
        [](const CArray<std::uint8_t>& labels, double sigma, double floor, std::optional<int> radius) {
            const auto mask = make_label_mask(to_labels(labels, 2), {sigma, floor, radius});
            return from_scalar(mask.to_scalar());
        },
        py::arg("labels"), py::arg("sigma") = 1.0, py::arg("floor") = 0.01, py::arg("radius") = py::none());

    m.def(
        "masked_cross_entropy",
        [](const CArray<double>& beliefs, const CArray<float>& mask, double beta,
           std::optional<CArray<std::uint8_t>> labels) {
            const BeliefField q(to_field(beliefs));
            const auto m = MaskVolume::from_scalar(to_scalar(mask));
            const auto w = labels ? weighted_label_image(to_labels(*labels, 2), beta) : WeightVolume::ones(q.dims());
            return masked_cross_entropy(q, m, w);
        },
        py::arg("beliefs"), py::arg("mask"), py::arg("beta") = 1.0, py::arg("labels") = py::none(),
        "Weighted by beta on labelled voxels when labels are given, uniform otherwise.");

    m.def(
        "precision_metrics",
        [](const CArray<std::uint8_t>& pred, const CArray<std::uint8_t>& truth) {
            const auto r = precision_metrics(to_labels(pred, 2), to_labels(truth, 2));
            py::dict d;
            d["tp"] = r.counts.tp;
            d["fp"] = r.counts.fp;
            d["tn"] = r.counts.tn;
            d["fn"] = r.counts.fn;
            d["pos_prec"] = r.pos_percent();
            d["neg_prec"] = r.neg_percent();
            return d;
        },
        py::arg("pred"), py::arg("truth"), "Precisions in percent, None when undefined.");

    m.def(
        "synthetic_nodule",
        [](std::array<std::size_t, 3> dims, const std::vector<std::array<double, 5>>& spheres, double background,
           double noise, std::uint64_t seed) {
            std::vector<Sphere> s;
            for (const auto& a : spheres) s.push_back({a[0], a[1], a[2], a[3], a[4]});
            const auto scene = make_synthetic_nodule(GridDims(dims[0], dims[1], dims[2]), s, background, noise, seed);
            return py::make_tuple(from_scalar(scene.intensity), from_labels(scene.labels));
        },
        py::arg("dims"), py::arg("spheres"), py::arg("background") = 0.0, py::arg("noise") = 0.0,
        py::arg("seed") = 0, "dims as (nx, ny, nz); spheres as (cx, cy, cz, radius, intensity).");

    m.def(
        "unary_from_intensity",
        [](const CArray<float>& volume, double threshold, double sharpness) {
            return from_field(unary_from_intensity(to_scalar(volume), threshold, sharpness));
        },
        py::arg("volume"), py::arg("threshold") = 0.5, py::arg("sharpness") = 4.0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> all{"voxcrf"};
            all.insert(all.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const auto& a : all) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a CLI subcommand in-process. Returns (exit_code, stdout, stderr).");
}
