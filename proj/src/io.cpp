#include "otgrid/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otgrid {
namespace {

void byteswap_buffer(std::vector<double>& v) {
    for (double& x : v) {
        std::uint64_t u;
        std::memcpy(&u, &x, 8);
        u = __builtin_bswap64(u);
        std::memcpy(&x, &u, 8);
    }
}

std::filesystem::path with_ext(const std::filesystem::path& base, const char* ext) {
    std::filesystem::path p = base;
    if (p.extension() == ".raw" || p.extension() == ".txt") p.replace_extension();
    p += ext;
    return p;
}

}  // namespace

void write_raster(const std::filesystem::path& base, const Raster& r) {
    std::size_t count = 1;
    for (int s : r.shape) count *= static_cast<std::size_t>(s);
    if (count != r.values.size()) throw std::invalid_argument("write_raster: shape/value mismatch");

    std::ofstream raw(with_ext(base, ".raw"), std::ios::binary | std::ios::trunc);
    if (!raw) throw std::runtime_error("write_raster: cannot open " + base.string());
    if constexpr (std::endian::native == std::endian::little) {
        raw.write(reinterpret_cast<const char*>(r.values.data()),
                  static_cast<std::streamsize>(r.values.size() * 8));
    } else {
        std::vector<double> tmp = r.values;
        byteswap_buffer(tmp);
        raw.write(reinterpret_cast<const char*>(tmp.data()),
                  static_cast<std::streamsize>(tmp.size() * 8));
    }
    if (!raw) throw std::runtime_error("write_raster: short write to " + base.string());

    std::ofstream txt(with_ext(base, ".txt"), std::ios::trunc);
    txt << "dims=" << r.shape.size() << "\n";
    txt << "shape=";
    for (std::size_t i = 0; i < r.shape.size(); ++i) txt << (i ? " " : "") << r.shape[i];
    txt << "\norder=row-major\ndtype=float64\n";
    for (const auto& [k, v] : r.extra) txt << k << "=" << v << "\n";
    if (!txt) throw std::runtime_error("write_raster: cannot write descriptor");
}

Raster read_raster(const std::filesystem::path& base) {
    Raster r;
    std::ifstream txt(with_ext(base, ".txt"));
    if (!txt) throw std::runtime_error("read_raster: missing descriptor for " + base.string());
    std::string line;
    std::size_t dims = 0;
    while (std::getline(txt, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.empty()) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "dims") {
            dims = static_cast<std::size_t>(std::stoul(val));
        } else if (key == "shape") {
            std::istringstream ss(val);
            int s;
            while (ss >> s) r.shape.push_back(s);
        } else if (key == "order") {
            if (val != "row-major") throw std::runtime_error("read_raster: unsupported order");
        } else if (key == "dtype") {
            if (val != "float64") throw std::runtime_error("read_raster: unsupported dtype");
        } else {
            r.extra[key] = val;
        }
    }
    if (r.shape.empty() || (dims != 0 && dims != r.shape.size()))
        throw std::runtime_error("read_raster: inconsistent descriptor for " + base.string());

    std::size_t count = 1;
    for (int s : r.shape) {
        if (s <= 0) throw std::runtime_error("read_raster: bad shape entry");
        count *= static_cast<std::size_t>(s);
    }
    std::ifstream raw(with_ext(base, ".raw"), std::ios::binary);
    if (!raw) throw std::runtime_error("read_raster: missing data for " + base.string());
    r.values.resize(count);
    raw.read(reinterpret_cast<char*>(r.values.data()), static_cast<std::streamsize>(count * 8));
    if (raw.gcount() != static_cast<std::streamsize>(count * 8))
        throw std::runtime_error("read_raster: truncated data in " + base.string());
    if constexpr (std::endian::native != std::endian::little) byteswap_buffer(r.values);
    return r;
}

}  // namespace otgrid
