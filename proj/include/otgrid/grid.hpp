#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace otgrid {

/// Uniform space-time mesh on [0,1]^{D+1}. Axis 0 is time, axes 1..D are
/// space. Axis d has n_d segments of width h_d = 1/n_d; time is always the
/// slowest (row-major leading) axis of every field stored on the mesh.
///
/// Two node families live on the mesh: centered nodes (integer coordinates
/// j = 0..n_d on every axis) and staggered nodes (half-offset coordinates
/// j+1/2, stored as integer offsets j = 0..n_d-1) on one designated axis.
class GridSpec {
public:
    /// Placeholder single-cell mesh; lets containers default-construct.
    GridSpec() : n_{1, 1} {}

    explicit GridSpec(std::vector<int> segments) : n_(std::move(segments)) {
        if (n_.size() < 2)
            throw std::invalid_argument("GridSpec: need a time axis and at least one spatial axis");
        for (int nd : n_)
            if (nd < 1) throw std::invalid_argument("GridSpec: segment counts must be >= 1");
    }

    int spatial_dims() const { return static_cast<int>(n_.size()) - 1; }
    int axes() const { return static_cast<int>(n_.size()); }
    int segments(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
    double step(int axis) const { return 1.0 / n_[static_cast<std::size_t>(axis)]; }
    const std::vector<int>& segments() const { return n_; }

    /// Volume of one space-time cell, prod_d h_d.
    double cell_volume() const {
        double v = 1.0;
        for (int nd : n_) v /= nd;
        return v;
    }
    double spatial_cell_volume() const {
        double v = 1.0;
        for (std::size_t d = 1; d < n_.size(); ++d) v /= n_[d];
        return v;
    }

    /// Shape of a field on the centered nodes: n_d+1 along every axis.
    std::vector<int> centered_shape() const {
        std::vector<int> s(n_);
        for (int& e : s) ++e;
        return s;
    }
    /// Shape of a field staggered along `axis`: n_axis there, n_j+1 elsewhere.
    std::vector<int> staggered_shape(int axis) const {
        std::vector<int> s = centered_shape();
        s[static_cast<std::size_t>(axis)] = n_[static_cast<std::size_t>(axis)];
        return s;
    }
    /// Shape of the constraint lattice (staggered in time, centered in space);
    /// the pointwise cone constraints live on these nodes.
    std::vector<int> constraint_shape() const { return staggered_shape(0); }

    std::int64_t centered_size() const {
        std::int64_t s = 1;
        for (int nd : n_) s *= nd + 1;
        return s;
    }
    std::int64_t staggered_size(int axis) const {
        return centered_size() / (n_[static_cast<std::size_t>(axis)] + 1) *
               n_[static_cast<std::size_t>(axis)];
    }
    std::int64_t constraint_size() const { return staggered_size(0); }
    std::int64_t spatial_size() const { return centered_size() / (n_[0] + 1); }

    /// Number of blocks of a cone-lifted field: 4D+2.
    int cone_blocks() const { return 4 * spatial_dims() + 2; }

    bool operator==(const GridSpec&) const = default;

    std::string describe() const {
        std::string s;
        for (std::size_t d = 0; d < n_.size(); ++d) {
            if (d) s += 'x';
            s += std::to_string(n_[d]);
        }
        return s;
    }

private:
    std::vector<int> n_;
};

/// Scalar field on the centered nodes, row-major, time slowest.
struct CenteredField {
    GridSpec grid;
    std::vector<double> values;

    static CenteredField zeros(const GridSpec& g) {
        return {g, std::vector<double>(static_cast<std::size_t>(g.centered_size()), 0.0)};
    }
    bool shape_ok() const {
        return static_cast<std::int64_t>(values.size()) == grid.centered_size();
    }
};

/// D+1 blocks, block d staggered along axis d. Block 0 holds the temporal
/// component, blocks 1..D the spatial components.
struct StaggeredField {
    GridSpec grid;
    std::vector<std::vector<double>> blocks;

    static StaggeredField zeros(const GridSpec& g) {
        StaggeredField f{g, {}};
        f.blocks.reserve(static_cast<std::size_t>(g.axes()));
        for (int d = 0; d < g.axes(); ++d)
            f.blocks.emplace_back(static_cast<std::size_t>(g.staggered_size(d)), 0.0);
        return f;
    }
    bool shape_ok() const {
        if (static_cast<int>(blocks.size()) != grid.axes()) return false;
        for (int d = 0; d < grid.axes(); ++d)
            if (static_cast<std::int64_t>(blocks[static_cast<std::size_t>(d)].size()) !=
                grid.staggered_size(d))
                return false;
        return true;
    }
};

/// 4D+2 equally shaped blocks on the constraint lattice. The tuple
/// (block_0[i], ..., block_{4D+1}[i]) at each node i is a point of
/// R^{4D+2}; feasible fields keep every tuple inside the second-order cone.
struct ConeField {
    GridSpec grid;
    std::vector<std::vector<double>> blocks;

    static ConeField zeros(const GridSpec& g) {
        ConeField f{g, {}};
        f.blocks.reserve(static_cast<std::size_t>(g.cone_blocks()));
        for (int b = 0; b < g.cone_blocks(); ++b)
            f.blocks.emplace_back(static_cast<std::size_t>(g.constraint_size()), 0.0);
        return f;
    }
    bool shape_ok() const {
        if (static_cast<int>(blocks.size()) != grid.cone_blocks()) return false;
        for (const auto& b : blocks)
            if (static_cast<std::int64_t>(b.size()) != grid.constraint_size()) return false;
        return true;
    }
};

inline void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace otgrid
