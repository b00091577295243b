#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace otgrid {

/// A dense row-major array of 64-bit little-endian floats on disk, paired
/// with a plain-text descriptor (`key=value` lines: dims, shape, order,
/// dtype, plus free extras such as the snapshot time).
struct Raster {
    std::vector<int> shape;
    std::vector<double> values;
    std::map<std::string, std::string> extra;
};

/// Writes `base`.raw and `base`.txt.
void write_raster(const std::filesystem::path& base, const Raster& r);

/// Reads a raster from `base`(.raw/.txt); throws on malformed files.
Raster read_raster(const std::filesystem::path& base);

}  // namespace otgrid
