#include "voxcrf/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "voxcrf/error.hpp"

namespace voxcrf {

GridDims::GridDims(std::size_t x, std::size_t y, std::size_t z) : nx(x), ny(y), nz(z) {
    if (nx == 0 || ny == 0 || nz == 0) {
        throw ParameterError("grid dims must be positive");
    }
    constexpr auto kMax = std::numeric_limits<std::size_t>::max();
    if (nx > kMax / ny || nx * ny > kMax / nz) {
        throw ParameterError("grid voxel count overflows");
    }
}

bool GridDims::contains(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && static_cast<std::size_t>(x) < nx &&
           static_cast<std::size_t>(y) < ny && static_cast<std::size_t>(z) < nz;
}

std::size_t voxel_index(const GridDims& dims, std::size_t x, std::size_t y, std::size_t z) {
    if (x >= dims.nx || y >= dims.ny || z >= dims.nz) {
        throw IndexError("voxel (" + std::to_string(x) + "," + std::to_string(y) + "," +
                         std::to_string(z) + ") outside grid");
    }
    return x + dims.nx * (y + dims.ny * z);
}

Coord voxel_coord(const GridDims& dims, std::size_t index) {
    if (index >= dims.voxels()) {
        throw IndexError("voxel index " + std::to_string(index) + " outside grid");
    }
    Coord c;
    c.x = index % dims.nx;
    index /= dims.nx;
    c.y = index % dims.ny;
    c.z = index / dims.ny;
    return c;
}

void require_same_dims(const GridDims& a, const GridDims& b, const char* what) {
    if (!(a == b)) {
        throw DimensionError(std::string("dimension mismatch: ") + what);
    }
}

// ScalarVolume

ScalarVolume::ScalarVolume(GridDims dims, float fill) : dims_(dims), data_(dims.voxels(), fill) {}

ScalarVolume::ScalarVolume(GridDims dims, std::vector<float> data)
    : dims_(dims), data_(std::move(data)) {
    if (data_.size() != dims_.voxels()) {
        throw DimensionError("scalar volume data length does not match dims");
    }
}

void ScalarVolume::validate() const {
    for (float v : data_) {
        if (!std::isfinite(v)) throw DataError("scalar volume holds a non-finite sample");
    }
}

// LabelVolume

namespace {

void check_label_count(int num_labels) {
    if (num_labels < 1 || num_labels > 256) {
        throw ParameterError("label count must be in [1, 256]");
    }
}

}  // namespace

LabelVolume::LabelVolume(GridDims dims, int num_labels, std::uint8_t fill)
    : dims_(dims), num_labels_(num_labels), data_(dims.voxels(), fill) {
    check_label_count(num_labels);
    validate();
}

LabelVolume::LabelVolume(GridDims dims, int num_labels, std::vector<std::uint8_t> data)
    : dims_(dims), num_labels_(num_labels), data_(std::move(data)) {
    check_label_count(num_labels);
    if (data_.size() != dims_.voxels()) {
        throw DimensionError("label volume data length does not match dims");
    }
    validate();
}

void LabelVolume::validate() const {
    for (auto v : data_) {
        if (v >= num_labels_) {
            throw DataError("label value " + std::to_string(v) + " >= label count " +
                            std::to_string(num_labels_));
        }
    }
}

bool LabelVolume::is_binary() const {
    for (auto v : data_) {
        if (v > 1) return false;
    }
    return true;
}

std::size_t LabelVolume::count(std::uint8_t label) const {
    std::size_t n = 0;
    for (auto v : data_) n += (v == label);
    return n;
}

// LabelField

LabelField::LabelField(GridDims dims, int num_labels, double fill)
    : dims_(dims), num_labels_(num_labels) {
    if (num_labels < 1) throw ParameterError("label count must be positive");
    data_.assign(dims.voxels() * static_cast<std::size_t>(num_labels), fill);
}

LabelField::LabelField(GridDims dims, int num_labels, std::vector<double> data)
    : dims_(dims), num_labels_(num_labels), data_(std::move(data)) {
    if (num_labels < 1) throw ParameterError("label count must be positive");
    if (data_.size() != dims_.voxels() * static_cast<std::size_t>(num_labels)) {
        throw DimensionError("field data length does not match dims * labels");
    }
}

bool LabelField::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

UnaryField::UnaryField(GridDims dims, int num_labels, std::vector<double> data)
    : UnaryField(LabelField(dims, num_labels, std::move(data))) {}

UnaryField::UnaryField(LabelField field) : LabelField(std::move(field)) {
    if (num_labels() < 2) throw ParameterError("unary field needs at least two labels");
    if (!all_finite()) throw DataError("unary field holds a non-finite value");
}

BeliefField::BeliefField(GridDims dims, int num_labels, std::vector<double> data)
    : BeliefField(LabelField(dims, num_labels, std::move(data))) {}

BeliefField::BeliefField(LabelField field) : LabelField(std::move(field)) {
    for (double q : data()) {
        if (!(q >= 0.0 && q <= 1.0)) throw DataError("belief outside [0, 1]");
    }
    if (max_normalization_error() > kNormTolerance) {
        throw DataError("beliefs are not normalized over labels");
    }
}

double BeliefField::max_normalization_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < voxels(); ++i) {
        double s = 0.0;
        for (double q : voxel(i)) s += q;
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

}  // namespace voxcrf
