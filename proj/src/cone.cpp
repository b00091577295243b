#include "otgrid/cone.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace otgrid {

bool in_soc(double head, std::span<const double> tail, double tol) {
    double s = 0.0;
    for (double t : tail) s += t * t;
    return head + tol >= std::sqrt(s);
}

void project_soc_tuple(std::span<double> y) {
    const double head = y[0];
    double s = 0.0;
    for (std::size_t j = 1; j < y.size(); ++j) s += y[j] * y[j];
    const double norm = std::sqrt(s);
    if (norm <= head) return;
    if (norm <= -head) {
        std::fill(y.begin(), y.end(), 0.0);
        return;
    }
    const double f = 0.5 * (head + norm);
    const double c = f / norm;
    y[0] = f;
    for (std::size_t j = 1; j < y.size(); ++j) y[j] *= c;
}

ConePoint project_soc_point(const ConePoint& y) {
    ConePoint out = y;
    std::vector<double> buf(1 + y.tail.size());
    buf[0] = y.head;
    std::copy(y.tail.begin(), y.tail.end(), buf.begin() + 1);
    project_soc_tuple(buf);
    out.head = buf[0];
    std::copy(buf.begin() + 1, buf.end(), out.tail.begin());
    return out;
}

void project_cone_field_into(const ConeField& y, ConeField& out) {
    require(y.shape_ok(), "project_cone_field: shape mismatch");
    require(out.shape_ok() && out.grid == y.grid, "project_cone_field: output shape mismatch");
    const int nb = y.grid.cone_blocks();
    const std::int64_t np = y.grid.constraint_size();
    // Tuples are short (4D+2); gather into a stack buffer per node.
    constexpr int kMaxBlocks = 64;
    require(nb <= kMaxBlocks, "project_cone_field: dimension too large");
    const double* src[kMaxBlocks];
    double* dst[kMaxBlocks];
    for (int b = 0; b < nb; ++b) {
        src[b] = y.blocks[static_cast<std::size_t>(b)].data();
        dst[b] = out.blocks[static_cast<std::size_t>(b)].data();
    }
    double tup[kMaxBlocks];
    for (std::int64_t i = 0; i < np; ++i) {
        const double head = src[0][i];
        double s = 0.0;
        for (int b = 1; b < nb; ++b) {
            const double v = src[b][i];
            tup[b] = v;
            s += v * v;
        }
        const double norm = std::sqrt(s);
        if (norm <= head) {
            dst[0][i] = head;
            for (int b = 1; b < nb; ++b) dst[b][i] = tup[b];
        } else if (norm <= -head) {
            for (int b = 0; b < nb; ++b) dst[b][i] = 0.0;
        } else {
            const double f = 0.5 * (head + norm);
            const double c = f / norm;
            dst[0][i] = f;
            for (int b = 1; b < nb; ++b) dst[b][i] = c * tup[b];
        }
    }
}

ConeField project_cone_field(const ConeField& y) {
    ConeField out = ConeField::zeros(y.grid);
    project_cone_field_into(y, out);
    return out;
}

bool cone_field_feasible(const ConeField& y, double tol) {
    require(y.shape_ok(), "cone_field_feasible: shape mismatch");
    const int nb = y.grid.cone_blocks();
    const std::int64_t np = y.grid.constraint_size();
    for (std::int64_t i = 0; i < np; ++i) {
        double s = 0.0;
        for (int b = 1; b < nb; ++b) {
            const double v = y.blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
            s += v * v;
        }
        if (y.blocks[0][static_cast<std::size_t>(i)] + tol < std::sqrt(s)) return false;
    }
    return true;
}

std::vector<double> build_weighted_embed_scale(std::span<const double> omega, const GridSpec& g) {
    require(static_cast<std::int64_t>(omega.size()) == g.constraint_size(),
            "build_weighted_embed_scale: weight size mismatch");
    std::vector<double> scale(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!(omega[i] > 0.0))
            throw std::domain_error("build_weighted_embed_scale: weights must be positive");
        scale[i] = std::sqrt(omega[i]);
    }
    return scale;
}

}  // namespace otgrid
