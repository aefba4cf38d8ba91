#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace voxcrf {

// Voxel counts per axis. Storage order everywhere is x fastest, then y, then z.
struct GridDims {
    std::size_t nx = 1;
    std::size_t ny = 1;
    std::size_t nz = 1;

    GridDims() = default;
    GridDims(std::size_t x, std::size_t y, std::size_t z);

    std::size_t voxels() const { return nx * ny * nz; }
    bool contains(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) const;

    friend bool operator==(const GridDims&, const GridDims&) = default;
};

struct Coord {
    std::size_t x = 0, y = 0, z = 0;
    friend bool operator==(const Coord&, const Coord&) = default;
};

// Linear index x + nx*(y + ny*z). Throws IndexError when out of range.
std::size_t voxel_index(const GridDims& dims, std::size_t x, std::size_t y, std::size_t z);
Coord voxel_coord(const GridDims& dims, std::size_t index);

// Intensity image, one 32-bit float per voxel.
class ScalarVolume {
public:
    ScalarVolume() = default;
    explicit ScalarVolume(GridDims dims, float fill = 0.0f);
    ScalarVolume(GridDims dims, std::vector<float> data);

    const GridDims& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }

    float operator[](std::size_t i) const { return data_[i]; }
    float& operator[](std::size_t i) { return data_[i]; }
    float at(std::size_t x, std::size_t y, std::size_t z) const {
        return data_[voxel_index(dims_, x, y, z)];
    }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    // Throws DataError if any sample is NaN or infinite.
    void validate() const;

    friend bool operator==(const ScalarVolume&, const ScalarVolume&) = default;

private:
    GridDims dims_;
    std::vector<float> data_;
};

// Integer labels in [0, num_labels).
class LabelVolume {
public:
    LabelVolume() = default;
    LabelVolume(GridDims dims, int num_labels, std::uint8_t fill = 0);
    LabelVolume(GridDims dims, int num_labels, std::vector<std::uint8_t> data);

    const GridDims& dims() const { return dims_; }
    int num_labels() const { return num_labels_; }
    std::size_t size() const { return data_.size(); }

    std::uint8_t operator[](std::size_t i) const { return data_[i]; }
    std::uint8_t& operator[](std::size_t i) { return data_[i]; }
    std::uint8_t at(std::size_t x, std::size_t y, std::size_t z) const {
        return data_[voxel_index(dims_, x, y, z)];
    }

    std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> data() { return data_; }

    void validate() const;
    bool is_binary() const;
    std::size_t count(std::uint8_t label) const;

    friend bool operator==(const LabelVolume&, const LabelVolume&) = default;

private:
    GridDims dims_;
    int num_labels_ = 2;
    std::vector<std::uint8_t> data_;
};

// Per-voxel, per-label values. The label index runs fastest: value(i, l) is
// stored at i * num_labels + l, so all labels of one voxel are contiguous.
class LabelField {
public:
    LabelField() = default;
    LabelField(GridDims dims, int num_labels, double fill = 0.0);
    LabelField(GridDims dims, int num_labels, std::vector<double> data);

    const GridDims& dims() const { return dims_; }
    int num_labels() const { return num_labels_; }
    std::size_t voxels() const { return dims_.voxels(); }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t voxel, int label) const {
        return data_[voxel * static_cast<std::size_t>(num_labels_) + static_cast<std::size_t>(label)];
    }
    double& operator()(std::size_t voxel, int label) {
        return data_[voxel * static_cast<std::size_t>(num_labels_) + static_cast<std::size_t>(label)];
    }

    std::span<const double> voxel(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * num_labels_, num_labels_);
    }
    std::span<double> voxel(std::size_t i) {
        return std::span<double>(data_).subspan(i * num_labels_, num_labels_);
    }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool all_finite() const;
    bool same_shape(const LabelField& other) const {
        return dims_ == other.dims_ && num_labels_ == other.num_labels_;
    }

    friend bool operator==(const LabelField&, const LabelField&) = default;

private:
    GridDims dims_;
    int num_labels_ = 2;
    std::vector<double> data_;
};

// Unary potentials U_i(l); larger means more likely.
class UnaryField : public LabelField {
public:
    UnaryField() = default;
    UnaryField(GridDims dims, int num_labels, std::vector<double> data);
    explicit UnaryField(LabelField field);
};

// Per-voxel label distributions Q_i(l).
class BeliefField : public LabelField {
public:
    static constexpr double kNormTolerance = 1e-6;

    BeliefField() = default;
    BeliefField(GridDims dims, int num_labels, std::vector<double> data);
    explicit BeliefField(LabelField field);

    // Largest |sum_l Q_i(l) - 1| over all voxels.
    double max_normalization_error() const;
};

// Throws DimensionError unless both have the same dims.
void require_same_dims(const GridDims& a, const GridDims& b, const char* what);

}  // namespace voxcrf
