#include "otgrid/operators.hpp"

#include <cmath>
#include <cstring>

namespace otgrid {
namespace {

constexpr double kHalfSqrt2 = 0.70710678118654752440;

struct AxisSweep {
    std::int64_t outer;   // product of extents before the axis
    std::int64_t inner;   // product of extents after the axis (same for both fields)
    int len_centered;     // n_d + 1
    int len_staggered;    // n_d
};

AxisSweep axis_sweep(const GridSpec& g, int axis) {
    AxisSweep s{1, 1, g.segments(axis) + 1, g.segments(axis)};
    for (int j = 0; j < axis; ++j) s.outer *= g.segments(j) + 1;
    for (int j = axis + 1; j < g.axes(); ++j) s.inner *= g.segments(j) + 1;
    return s;
}

// Strides for the pair (constraint lattice, axis-d staggered block). The two
// arrays differ in extent only on axis 0 and axis d.
struct ShiftSweep {
    std::int64_t mid;     // product of extents for axes 1..d-1
    std::int64_t inner;   // product of extents for axes d+1..D
    int nt;               // n_0
    int nd;               // n_d
};

ShiftSweep shift_sweep(const GridSpec& g, int axis) {
    ShiftSweep s{1, 1, g.segments(0), g.segments(axis)};
    for (int j = 1; j < axis; ++j) s.mid *= g.segments(j) + 1;
    for (int j = axis + 1; j < g.axes(); ++j) s.inner *= g.segments(j) + 1;
    return s;
}

// variant -> (time shift into the staggered block, axis-d coordinate shift)
inline void variant_offsets(int variant, int& dt, int& dj) {
    dt = (variant >= 2) ? 1 : 0;
    dj = (variant % 2 == 0) ? -1 : 0;
}

}  // namespace

void gradient_into(const CenteredField& phi, StaggeredField& out) {
    require(phi.shape_ok(), "gradient: centered field shape mismatch");
    require(out.shape_ok() && out.grid == phi.grid, "gradient: output shape mismatch");
    const GridSpec& g = phi.grid;
    for (int d = 0; d < g.axes(); ++d) {
        const AxisSweep s = axis_sweep(g, d);
        const double inv_h = static_cast<double>(g.segments(d));
        const double* src = phi.values.data();
        double* dst = out.blocks[static_cast<std::size_t>(d)].data();
        for (std::int64_t o = 0; o < s.outer; ++o) {
            const double* in_o = src + o * s.len_centered * s.inner;
            double* out_o = dst + o * s.len_staggered * s.inner;
            for (int j = 0; j < s.len_staggered; ++j) {
                const double* lo = in_o + j * s.inner;
                const double* hi = lo + s.inner;
                double* row = out_o + j * s.inner;
                for (std::int64_t i = 0; i < s.inner; ++i)
                    row[i] = (hi[i] - lo[i]) * inv_h;
            }
        }
    }
}

StaggeredField gradient(const CenteredField& phi) {
    StaggeredField out = StaggeredField::zeros(phi.grid);
    gradient_into(phi, out);
    return out;
}

void gradient_adjoint_into(const StaggeredField& q, CenteredField& out) {
    require(q.shape_ok(), "gradient_adjoint: staggered field shape mismatch");
    require(out.shape_ok() && out.grid == q.grid, "gradient_adjoint: output shape mismatch");
    const GridSpec& g = q.grid;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (int d = 0; d < g.axes(); ++d) {
        const AxisSweep s = axis_sweep(g, d);
        const double inv_h = static_cast<double>(g.segments(d));
        const double* src = q.blocks[static_cast<std::size_t>(d)].data();
        double* dst = out.values.data();
        for (std::int64_t o = 0; o < s.outer; ++o) {
            const double* in_o = src + o * s.len_staggered * s.inner;
            double* out_o = dst + o * s.len_centered * s.inner;
            for (int j = 0; j < s.len_staggered; ++j) {
                const double* row = in_o + j * s.inner;
                double* lo = out_o + j * s.inner;
                double* hi = lo + s.inner;
                for (std::int64_t i = 0; i < s.inner; ++i) {
                    const double v = row[i] * inv_h;
                    lo[i] -= v;
                    hi[i] += v;
                }
            }
        }
    }
}

CenteredField gradient_adjoint(const StaggeredField& q) {
    CenteredField out = CenteredField::zeros(q.grid);
    gradient_adjoint_into(q, out);
    return out;
}

void shift_to_constraint(const GridSpec& g, int axis, int variant,
                         std::span<const double> staggered, std::span<double> out) {
    require(axis >= 1 && axis <= g.spatial_dims(), "shift_to_constraint: bad axis");
    require(variant >= 0 && variant < 4, "shift_to_constraint: bad variant");
    require(static_cast<std::int64_t>(staggered.size()) == g.staggered_size(axis),
            "shift_to_constraint: staggered size mismatch");
    require(static_cast<std::int64_t>(out.size()) == g.constraint_size(),
            "shift_to_constraint: output size mismatch");
    const ShiftSweep s = shift_sweep(g, axis);
    int dt, dj;
    variant_offsets(variant, dt, dj);
    const std::int64_t in_t_stride = s.mid * s.nd * s.inner;
    const std::int64_t out_t_stride = s.mid * (s.nd + 1) * s.inner;
    for (int t = 0; t < s.nt; ++t) {
        const double* in_t = staggered.data() + (t + dt) * in_t_stride;
        double* out_t = out.data() + t * out_t_stride;
        for (std::int64_t m = 0; m < s.mid; ++m) {
            const double* in_m = in_t + m * s.nd * s.inner;
            double* out_m = out_t + m * (s.nd + 1) * s.inner;
            for (int j = 0; j <= s.nd; ++j) {
                double* row = out_m + j * s.inner;
                const int jj = j + dj;
                if (jj < 0 || jj >= s.nd) {
                    std::memset(row, 0, sizeof(double) * static_cast<std::size_t>(s.inner));
                    continue;
                }
                const double* src = in_m + jj * s.inner;
                std::memcpy(row, src, sizeof(double) * static_cast<std::size_t>(s.inner));
            }
        }
    }
}

void shift_from_constraint(const GridSpec& g, int axis, int variant,
                           std::span<const double> constraint, std::span<double> out) {
    require(axis >= 1 && axis <= g.spatial_dims(), "shift_from_constraint: bad axis");
    require(variant >= 0 && variant < 4, "shift_from_constraint: bad variant");
    require(static_cast<std::int64_t>(constraint.size()) == g.constraint_size(),
            "shift_from_constraint: input size mismatch");
    require(static_cast<std::int64_t>(out.size()) == g.staggered_size(axis),
            "shift_from_constraint: output size mismatch");
    const ShiftSweep s = shift_sweep(g, axis);
    int dt, dj;
    variant_offsets(variant, dt, dj);
    std::fill(out.begin(), out.end(), 0.0);
    const std::int64_t in_t_stride = s.mid * (s.nd + 1) * s.inner;
    const std::int64_t out_t_stride = s.mid * s.nd * s.inner;
    for (int t = 0; t < s.nt; ++t) {
        const double* in_t = constraint.data() + t * in_t_stride;
        double* out_t = out.data() + (t + dt) * out_t_stride;
        for (std::int64_t m = 0; m < s.mid; ++m) {
            const double* in_m = in_t + m * (s.nd + 1) * s.inner;
            double* out_m = out_t + m * s.nd * s.inner;
            for (int j = 0; j <= s.nd; ++j) {
                const int jj = j + dj;
                if (jj < 0 || jj >= s.nd) continue;
                const double* row = in_m + j * s.inner;
                double* dst = out_m + jj * s.inner;
                std::memcpy(dst, row, sizeof(double) * static_cast<std::size_t>(s.inner));
            }
        }
    }
}

std::vector<double> average_to_constraint(const GridSpec& g,
                                          std::span<const std::vector<double>> spatial_blocks) {
    require(static_cast<int>(spatial_blocks.size()) == g.spatial_dims(),
            "average_to_constraint: expected one block per spatial axis");
    // Space-average adjoint into a centered accumulator, then time average.
    CenteredField acc = CenteredField::zeros(g);
    for (int d = 1; d < g.axes(); ++d) {
        const auto& blk = spatial_blocks[static_cast<std::size_t>(d - 1)];
        require(static_cast<std::int64_t>(blk.size()) == g.staggered_size(d),
                "average_to_constraint: block size mismatch");
        const AxisSweep s = axis_sweep(g, d);
        for (std::int64_t o = 0; o < s.outer; ++o) {
            const double* in_o = blk.data() + o * s.len_staggered * s.inner;
            double* out_o = acc.values.data() + o * s.len_centered * s.inner;
            for (int j = 0; j < s.len_staggered; ++j) {
                const double* row = in_o + j * s.inner;
                double* lo = out_o + j * s.inner;
                double* hi = lo + s.inner;
                for (std::int64_t i = 0; i < s.inner; ++i) {
                    const double v = 0.5 * row[i];
                    lo[i] += v;
                    hi[i] += v;
                }
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(g.constraint_size()));
    const AxisSweep s = axis_sweep(g, 0);
    for (int t = 0; t < s.len_staggered; ++t) {
        const double* lo = acc.values.data() + t * s.inner;
        const double* hi = lo + s.inner;
        double* row = out.data() + t * s.inner;
        for (std::int64_t i = 0; i < s.inner; ++i) row[i] = 0.5 * (lo[i] + hi[i]);
    }
    return out;
}

std::vector<std::vector<double>> average_from_constraint(const GridSpec& g,
                                                         std::span<const double> a) {
    require(static_cast<std::int64_t>(a.size()) == g.constraint_size(),
            "average_from_constraint: input size mismatch");
    // Time-average adjoint into a centered accumulator, then space averages.
    CenteredField acc = CenteredField::zeros(g);
    {
        const AxisSweep s = axis_sweep(g, 0);
        for (int t = 0; t < s.len_staggered; ++t) {
            const double* row = a.data() + t * s.inner;
            double* lo = acc.values.data() + t * s.inner;
            double* hi = lo + s.inner;
            for (std::int64_t i = 0; i < s.inner; ++i) {
                const double v = 0.5 * row[i];
                lo[i] += v;
                hi[i] += v;
            }
        }
    }
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(g.spatial_dims()));
    for (int d = 1; d < g.axes(); ++d) {
        std::vector<double> blk(static_cast<std::size_t>(g.staggered_size(d)));
        const AxisSweep s = axis_sweep(g, d);
        for (std::int64_t o = 0; o < s.outer; ++o) {
            const double* in_o = acc.values.data() + o * s.len_centered * s.inner;
            double* out_o = blk.data() + o * s.len_staggered * s.inner;
            for (int j = 0; j < s.len_staggered; ++j) {
                const double* lo = in_o + j * s.inner;
                const double* hi = lo + s.inner;
                double* row = out_o + j * s.inner;
                for (std::int64_t i = 0; i < s.inner; ++i) row[i] = 0.5 * (lo[i] + hi[i]);
            }
        }
        out.push_back(std::move(blk));
    }
    return out;
}

void cone_embed_into(const StaggeredField& q, ConeField& out, std::span<const double> scale) {
    require(q.shape_ok(), "cone_embed: staggered shape mismatch");
    require(out.shape_ok() && out.grid == q.grid, "cone_embed: output shape mismatch");
    const GridSpec& g = q.grid;
    const std::size_t np = static_cast<std::size_t>(g.constraint_size());
    require(scale.empty() || scale.size() == np, "cone_embed: scale size mismatch");
    const auto& q0 = q.blocks[0];
    auto& first = out.blocks[0];
    auto& last = out.blocks[static_cast<std::size_t>(g.cone_blocks() - 1)];
    for (std::size_t i = 0; i < np; ++i) {
        first[i] = -q0[i];
        last[i] = q0[i];
    }
    for (int d = 1; d < g.axes(); ++d)
        for (int v = 0; v < 4; ++v) {
            auto& blk = out.blocks[static_cast<std::size_t>(1 + 4 * (d - 1) + v)];
            shift_to_constraint(g, d, v, q.blocks[static_cast<std::size_t>(d)], blk);
            if (scale.empty())
                for (std::size_t i = 0; i < np; ++i) blk[i] *= kHalfSqrt2;
            else
                for (std::size_t i = 0; i < np; ++i) blk[i] *= kHalfSqrt2 * scale[i];
        }
}

ConeField cone_embed(const StaggeredField& q, std::span<const double> scale) {
    ConeField out = ConeField::zeros(q.grid);
    cone_embed_into(q, out, scale);
    return out;
}

void cone_embed_adjoint_into(const ConeField& w, StaggeredField& out,
                             std::span<const double> scale) {
    require(w.shape_ok(), "cone_embed_adjoint: cone shape mismatch");
    require(out.shape_ok() && out.grid == w.grid, "cone_embed_adjoint: output shape mismatch");
    const GridSpec& g = w.grid;
    const std::size_t np = static_cast<std::size_t>(g.constraint_size());
    require(scale.empty() || scale.size() == np, "cone_embed_adjoint: scale size mismatch");
    const auto& first = w.blocks[0];
    const auto& last = w.blocks[static_cast<std::size_t>(g.cone_blocks() - 1)];
    auto& q0 = out.blocks[0];
    for (std::size_t i = 0; i < np; ++i) q0[i] = last[i] - first[i];
    std::vector<double> scaled;
    std::vector<double> scratch;
    for (int d = 1; d < g.axes(); ++d) {
        auto& blk = out.blocks[static_cast<std::size_t>(d)];
        std::fill(blk.begin(), blk.end(), 0.0);
        scratch.resize(blk.size());
        for (int v = 0; v < 4; ++v) {
            const auto& src = w.blocks[static_cast<std::size_t>(1 + 4 * (d - 1) + v)];
            std::span<const double> in = src;
            if (!scale.empty()) {
                scaled.resize(np);
                for (std::size_t i = 0; i < np; ++i) scaled[i] = scale[i] * src[i];
                in = scaled;
            }
            shift_from_constraint(g, d, v, in, scratch);
            for (std::size_t i = 0; i < blk.size(); ++i) blk[i] += kHalfSqrt2 * scratch[i];
        }
    }
}

StaggeredField cone_embed_adjoint(const ConeField& w, std::span<const double> scale) {
    StaggeredField out = StaggeredField::zeros(w.grid);
    cone_embed_adjoint_into(w, out, scale);
    return out;
}

StaggeredField cone_gram_diagonal(const GridSpec& g, std::span<const double> omega) {
    StaggeredField out = StaggeredField::zeros(g);
    const std::size_t np = static_cast<std::size_t>(g.constraint_size());
    require(omega.empty() || omega.size() == np, "cone_gram_diagonal: weight size mismatch");
    std::fill(out.blocks[0].begin(), out.blocks[0].end(), 2.0);
    std::vector<double> ones;
    std::span<const double> w = omega;
    if (w.empty()) {
        ones.assign(np, 1.0);
        w = ones;
    }
    std::vector<double> scratch;
    for (int d = 1; d < g.axes(); ++d) {
        auto& blk = out.blocks[static_cast<std::size_t>(d)];
        scratch.resize(blk.size());
        for (int v = 0; v < 4; ++v) {
            shift_from_constraint(g, d, v, w, scratch);
            for (std::size_t i = 0; i < blk.size(); ++i) blk[i] += 0.5 * scratch[i];
        }
    }
    return out;
}

}  // namespace otgrid
