#include "voxcrf/volume_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "voxcrf/error.hpp"

namespace voxcrf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "volume payloads are little-endian; big-endian hosts need byte swapping");

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const void* bytes, std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(static_cast<const char*>(bytes), static_cast<std::streamsize>(n));
    if (!out) throw DataError("write failed for " + path.string());
}

struct Header {
    GridDims dims;
    std::string dtype;
    int num_labels = 0;
};

Header parse_header(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError("ill-formed volume header " + path.string() + ": " + e.what());
    }
    Header h;
    try {
        const auto& d = j.at("dims");
        if (!d.is_array() || d.size() != 3) throw DataError("dims must be [nx,ny,nz]");
        for (const auto& v : d) {
            if (!v.is_number_integer() || v.get<long long>() < 1) {
                throw DataError("dims entries must be positive integers");
            }
        }
        h.dims = GridDims(d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>());
        h.dtype = j.at("dtype").get<std::string>();
        if (j.at("order").get<std::string>() != "x-fastest") {
            throw DataError("unsupported storage order");
        }
        if (h.dtype == "u8" || h.dtype == "f64le") {
            h.num_labels = j.at("num_labels").get<int>();
            if (h.num_labels < 1) throw DataError("num_labels must be positive");
        } else if (h.dtype != "f32le") {
            throw DataError("unsupported dtype '" + h.dtype + "'");
        }
    } catch (const json::exception& e) {
        throw DataError("ill-formed volume header " + path.string() + ": " + e.what());
    } catch (const ParameterError& e) {
        throw DataError("ill-formed volume header " + path.string() + ": " + e.what());
    }
    return h;
}

void write_header(const fs::path& path, const GridDims& dims, const char* dtype, int num_labels) {
    json j;
    j["dims"] = {dims.nx, dims.ny, dims.nz};
    j["dtype"] = dtype;
    j["order"] = "x-fastest";
    if (num_labels > 0) j["num_labels"] = num_labels;
    const std::string text = j.dump() + "\n";
    write_file(path, text.data(), text.size());
}

template <typename T>
std::vector<T> read_payload(const fs::path& path, std::size_t count) {
    const std::string bytes = read_file(path);
    if (bytes.size() != count * sizeof(T)) {
        throw DataError("payload length mismatch in " + path.string() + ": expected " +
                        std::to_string(count * sizeof(T)) + " bytes, found " +
                        std::to_string(bytes.size()));
    }
    std::vector<T> out(count);
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

AnyVolume load_any(const fs::path& path) {
    const auto paths = volume_paths(path);
    const Header h = parse_header(paths.header);
    if (h.dtype == "f32le") {
        ScalarVolume v(h.dims, read_payload<float>(paths.payload, h.dims.voxels()));
        v.validate();
        return v;
    }
    if (h.dtype == "u8") {
        if (h.num_labels > 256) throw DataError("num_labels exceeds u8 range");
        auto data = read_payload<std::uint8_t>(paths.payload, h.dims.voxels());
        return LabelVolume(h.dims, h.num_labels, std::move(data));
    }
    auto data = read_payload<double>(paths.payload,
                                     h.dims.voxels() * static_cast<std::size_t>(h.num_labels));
    LabelField f(h.dims, h.num_labels, std::move(data));
    if (!f.all_finite()) throw DataError("label field holds a non-finite value");
    return f;
}

template <typename T>
T load_as(const fs::path& path, const char* what) {
    auto any = load_any(path);
    if (auto* v = std::get_if<T>(&any)) return std::move(*v);
    throw DataError(path.string() + " is not a " + what);
}

}  // namespace

VolumePaths volume_paths(const fs::path& path) {
    fs::path base = path;
    if (base.extension() == ".json" || base.extension() == ".raw") base.replace_extension();
    fs::path header = base;
    header += ".json";
    fs::path payload = base;
    payload += ".raw";
    return {header, payload};
}

AnyVolume load_volume(const fs::path& path) { return load_any(path); }

ScalarVolume load_scalar_volume(const fs::path& path) {
    return load_as<ScalarVolume>(path, "scalar volume");
}

LabelVolume load_label_volume(const fs::path& path) {
    return load_as<LabelVolume>(path, "label volume");
}

LabelField load_label_field(const fs::path& path) {
    return load_as<LabelField>(path, "label field");
}

void save_volume(const ScalarVolume& volume, const fs::path& path) {
    volume.validate();
    const auto paths = volume_paths(path);
    write_header(paths.header, volume.dims(), "f32le", 0);
    write_file(paths.payload, volume.data().data(), volume.size() * sizeof(float));
}

void save_volume(const LabelVolume& volume, const fs::path& path) {
    volume.validate();
    const auto paths = volume_paths(path);
    write_header(paths.header, volume.dims(), "u8", volume.num_labels());
    write_file(paths.payload, volume.data().data(), volume.size());
}

void save_volume(const LabelField& field, const fs::path& path) {
    if (!field.all_finite()) throw DataError("label field holds a non-finite value");
    const auto paths = volume_paths(path);
    write_header(paths.header, field.dims(), "f64le", field.num_labels());
    write_file(paths.payload, field.data().data(), field.size() * sizeof(double));
}

}  // namespace voxcrf
