#include "otgrid/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "otgrid/io.hpp"

namespace otgrid {
namespace {

// Walks the spatial node lattice in row-major order and hands each node's
// coordinates to `fn(flat_index, x)`.
template <typename Fn>
void for_each_spatial_node(const GridSpec& g, Fn&& fn) {
    const int dims = g.spatial_dims();
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<double> x(static_cast<std::size_t>(dims), 0.0);
    const std::int64_t total = g.spatial_size();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        for (int d = 0; d < dims; ++d)
            x[static_cast<std::size_t>(d)] =
                idx[static_cast<std::size_t>(d)] * g.step(d + 1);
        fn(flat, std::span<const double>(x));
        for (int d = dims - 1; d >= 0; --d) {
            if (++idx[static_cast<std::size_t>(d)] <= g.segments(d + 1)) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
    }
}

double sq_dist(std::span<const double> x, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double t = x[d] - c[d];
        s += t * t;
    }
    return s;
}

// Nearest node index along one axis; exact midpoints go to the lower node.
int nearest_node(double x, int n) {
    const int j = static_cast<int>(std::ceil(x * n - 0.5));
    return std::clamp(j, 0, n);
}

std::vector<double> resample_spatial(const Raster& r, const GridSpec& g);

std::vector<double> evaluate_density(const DensitySpec& spec, const GridSpec& g) {
    const std::int64_t total = g.spatial_size();
    std::vector<double> v(static_cast<std::size_t>(total), 0.0);
    switch (spec.kind) {
        case DensityKind::GaussianSum: {
            require(!spec.centers.empty(), "rasterize_density: gaussian sum needs centers");
            require(spec.widths.size() == spec.centers.size(),
                    "rasterize_density: one width per center");
            for (double w : spec.widths)
                if (!(w > 0.0)) throw std::domain_error("rasterize_density: widths must be > 0");
            for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
                double s = 0.0;
                for (std::size_t k = 0; k < spec.centers.size(); ++k)
                    s += std::exp(-sq_dist(x, spec.centers[k]) /
                                  (2.0 * spec.widths[k] * spec.widths[k]));
                v[static_cast<std::size_t>(flat)] = s;
            });
            break;
        }
        case DensityKind::LaplaceExp: {
            require(spec.centers.size() == 1, "rasterize_density: laplace needs one center");
            require(static_cast<int>(spec.exponents.size()) == g.spatial_dims(),
                    "rasterize_density: one exponent per axis");
            for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
                double e = 0.0;
                for (std::size_t d = 0; d < x.size(); ++d)
                    e += spec.exponents[d] * std::abs(x[d] - spec.centers[0][d]);
                v[static_cast<std::size_t>(flat)] = std::exp(-e);
            });
            break;
        }
        case DensityKind::Quartic: {
            require(spec.centers.size() == 1, "rasterize_density: quartic needs one center");
            for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
                double s = 0.0;
                for (std::size_t d = 0; d < x.size(); ++d) {
                    const double t = x[d] - spec.centers[0][d];
                    s += t * t * t * t;
                }
                v[static_cast<std::size_t>(flat)] = s;
            });
            break;
        }
        case DensityKind::IndicatorRegion: {
            require(!spec.regions.empty(), "rasterize_density: indicator needs regions");
            for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
                for (const Region& r : spec.regions)
                    if (r.contains(x)) {
                        v[static_cast<std::size_t>(flat)] = 1.0;
                        return;
                    }
            });
            break;
        }
        case DensityKind::DiracPoints: {
            require(!spec.points.empty(), "rasterize_density: dirac needs points");
            std::vector<std::int64_t> strides(static_cast<std::size_t>(g.spatial_dims()), 1);
            for (int d = g.spatial_dims() - 2; d >= 0; --d)
                strides[static_cast<std::size_t>(d)] =
                    strides[static_cast<std::size_t>(d + 1)] * (g.segments(d + 2) + 1);
            for (const auto& p : spec.points) {
                require(static_cast<int>(p.size()) == g.spatial_dims(),
                        "rasterize_density: dirac point dimension mismatch");
                std::int64_t flat = 0;
                for (int d = 0; d < g.spatial_dims(); ++d) {
                    const double x = p[static_cast<std::size_t>(d)];
                    if (x < 0.0 || x > 1.0)
                        throw std::domain_error("rasterize_density: dirac point outside domain");
                    flat += strides[static_cast<std::size_t>(d)] *
                            nearest_node(x, g.segments(d + 1));
                }
                v[static_cast<std::size_t>(flat)] += 1.0;
            }
            break;
        }
        case DensityKind::RasterFile: {
            require(!spec.raster_path.empty(), "rasterize_density: missing raster path");
            return resample_spatial(read_raster(spec.raster_path), g);
        }
    }
    return v;
}

// Multilinear sampling of node data onto another node lattice; exact when
// the shapes already match.
std::vector<double> resample_spatial(const Raster& r, const GridSpec& g) {
    const int dims = g.spatial_dims();
    require(static_cast<int>(r.shape.size()) == dims, "raster density: dimension mismatch");
    bool same = true;
    for (int d = 0; d < dims; ++d)
        same = same && (r.shape[static_cast<std::size_t>(d)] == g.segments(d + 1) + 1);
    if (same) return r.values;

    std::vector<std::int64_t> src_strides(static_cast<std::size_t>(dims), 1);
    for (int d = dims - 2; d >= 0; --d)
        src_strides[static_cast<std::size_t>(d)] =
            src_strides[static_cast<std::size_t>(d + 1)] * r.shape[static_cast<std::size_t>(d + 1)];

    std::vector<double> out(static_cast<std::size_t>(g.spatial_size()));
    for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
        // Accumulate the 2^dims corner contributions.
        double acc = 0.0;
        const int corners = 1 << dims;
        for (int mask = 0; mask < corners; ++mask) {
            double w = 1.0;
            std::int64_t off = 0;
            for (int d = 0; d < dims; ++d) {
                const int nodes = r.shape[static_cast<std::size_t>(d)];
                const double pos = x[static_cast<std::size_t>(d)] * (nodes - 1);
                int j0 = static_cast<int>(std::floor(pos));
                j0 = std::clamp(j0, 0, nodes - 2);
                const double frac = pos - j0;
                const bool hi = (mask >> d) & 1;
                w *= hi ? frac : 1.0 - frac;
                off += src_strides[static_cast<std::size_t>(d)] * (j0 + (hi ? 1 : 0));
            }
            acc += w * r.values[static_cast<std::size_t>(off)];
        }
        out[static_cast<std::size_t>(flat)] = acc;
    });
    return out;
}

}  // namespace

bool Region::contains(std::span<const double> x) const {
    switch (shape) {
        case Shape::All:
            return true;
        case Shape::Disk:
            return sq_dist(x, center) <= outer_radius * outer_radius;
        case Shape::Annulus: {
            const double d2 = sq_dist(x, center);
            return d2 >= inner_radius * inner_radius && d2 <= outer_radius * outer_radius;
        }
        case Shape::Box:
            for (std::size_t d = 0; d < x.size(); ++d)
                if (x[d] < lo[d] || x[d] > hi[d]) return false;
            return true;
    }
    return false;
}

std::vector<double> rasterize_density(const DensitySpec& spec, const GridSpec& g) {
    std::vector<double> v = evaluate_density(spec, g);
    double sum = 0.0;
    for (double e : v) {
        if (e < 0.0) throw std::domain_error("rasterize_density: negative density value");
        sum += e;
    }
    if (!(sum > 0.0)) throw std::domain_error("rasterize_density: density has no mass");
    // Raster files carry final density values (normalization and any shift
    // were applied when they were written); re-scaling here would break
    // bit-exact round trips through the file interface.
    if (spec.kind == DensityKind::RasterFile) return v;
    const double inv = 1.0 / sum;
    for (double& e : v) e = e * inv + spec.delta;
    return v;
}

CenteredField build_cost_vector(std::span<const double> rho0, std::span<const double> rho1,
                                const GridSpec& g) {
    const std::int64_t spatial = g.spatial_size();
    require(static_cast<std::int64_t>(rho0.size()) == spatial &&
                static_cast<std::int64_t>(rho1.size()) == spatial,
            "build_cost_vector: spatial size mismatch");
    const double h_x = g.spatial_cell_volume();
    double s0 = 0.0, s1 = 0.0;
    for (double v : rho0) {
        if (v < 0.0) throw std::domain_error("build_cost_vector: negative density");
        s0 += v;
    }
    for (double v : rho1) {
        if (v < 0.0) throw std::domain_error("build_cost_vector: negative density");
        s1 += v;
    }
    if (!(s0 > 0.0) || !(s1 > 0.0))
        throw std::domain_error("build_cost_vector: densities must carry positive mass");

    CenteredField c = CenteredField::zeros(g);
    const double a0 = 1.0 / (s0 * h_x);
    const double a1 = -1.0 / (s1 * h_x);
    double* first = c.values.data();
    double* last = c.values.data() + g.segments(0) * spatial;
    for (std::int64_t i = 0; i < spatial; ++i) {
        first[i] = a0 * rho0[static_cast<std::size_t>(i)];
        last[i] = a1 * rho1[static_cast<std::size_t>(i)];
    }
    return c;
}

std::vector<double> build_weights(std::span<const std::uint8_t> obstacle_mask, double omega_min,
                                  const GridSpec& g) {
    if (!(omega_min > 0.0)) throw std::domain_error("build_weights: omega_min must be > 0");
    require(static_cast<std::int64_t>(obstacle_mask.size()) == g.constraint_size(),
            "build_weights: mask size mismatch");
    std::vector<double> w(obstacle_mask.size(), 1.0);
    for (std::size_t i = 0; i < w.size(); ++i)
        if (obstacle_mask[i]) w[i] = omega_min;
    return w;
}

Problem ProblemDef::materialize(const GridSpec& g) const {
    Problem p{g, build_cost_vector(rasterize_density(rho0, g), rasterize_density(rho1, g), g),
              {}, label};
    if (obstacles) {
        const std::int64_t spatial = g.spatial_size();
        std::vector<double> layer;
        if (!obstacles->raster_path.empty()) {
            Raster r = read_raster(obstacles->raster_path);
            require(static_cast<int>(r.shape.size()) == g.spatial_dims(),
                    "obstacle raster: dimension mismatch");
            bool same = true;
            for (int d = 0; d < g.spatial_dims(); ++d)
                same = same && (r.shape[static_cast<std::size_t>(d)] == g.segments(d + 1) + 1);
            if (same) {
                layer = std::move(r.values);
            } else {
                // Nearest-node resampling keeps the weight field two-valued.
                layer.resize(static_cast<std::size_t>(spatial));
                std::vector<std::int64_t> strides(r.shape.size(), 1);
                for (int d = static_cast<int>(r.shape.size()) - 2; d >= 0; --d)
                    strides[static_cast<std::size_t>(d)] =
                        strides[static_cast<std::size_t>(d + 1)] *
                        r.shape[static_cast<std::size_t>(d + 1)];
                for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
                    std::int64_t off = 0;
                    for (std::size_t d = 0; d < x.size(); ++d)
                        off += strides[d] *
                               nearest_node(x[d], r.shape[d] - 1);
                    layer[static_cast<std::size_t>(flat)] = r.values[static_cast<std::size_t>(off)];
                });
            }
            for (double v : layer)
                if (!(v > 0.0)) throw std::domain_error("obstacle raster: weights must be > 0");
        } else {
            layer.assign(static_cast<std::size_t>(spatial), 1.0);
            for_each_spatial_node(g, [&](std::int64_t flat, std::span<const double> x) {
                for (const Region& r : obstacles->walls)
                    if (r.contains(x)) {
                        layer[static_cast<std::size_t>(flat)] = obstacles->omega_min;
                        return;
                    }
            });
        }
        // Static obstacles: replicate the spatial layer across the time axis.
        p.omega.resize(static_cast<std::size_t>(g.constraint_size()));
        for (int t = 0; t < g.segments(0); ++t)
            std::memcpy(p.omega.data() + static_cast<std::size_t>(t) * layer.size(), layer.data(),
                        layer.size() * sizeof(double));
    }
    return p;
}

std::optional<ExampleId> parse_example_id(const std::string& name) {
    if (name.size() == 3 && name.compare(0, 2, "ex") == 0 && name[2] >= '1' && name[2] <= '7')
        return static_cast<ExampleId>(name[2] - '0');
    return std::nullopt;
}

std::string example_name(ExampleId id) { return "ex" + std::to_string(static_cast<int>(id)); }

ProblemDef make_example(ExampleId id, double delta, unsigned seed, int dirac_count) {
    if (delta < 0.0) throw std::domain_error("make_example: delta must be >= 0");
    const double mu1 = 0.25, mu2 = 0.75;
    auto gaussian = [&](std::vector<std::vector<double>> centers, double width) {
        DensitySpec s;
        s.kind = DensityKind::GaussianSum;
        s.centers = std::move(centers);
        s.widths.assign(s.centers.size(), width);
        s.delta = delta;
        return s;
    };
    const std::vector<std::vector<double>> four_corners = {
        {mu1, mu1}, {mu1, mu2}, {mu2, mu1}, {mu2, mu2}};

    ProblemDef def;
    def.label = example_name(id);
    switch (id) {
        case ExampleId::Ex1:
            def.rho0 = gaussian({{mu1, mu2}}, std::sqrt(0.05));
            def.rho1 = gaussian({{mu2, mu1}}, std::sqrt(0.05));
            break;
        case ExampleId::Ex2:
            def.rho0 = gaussian({{mu1, mu1}}, 0.1);
            def.rho1 = gaussian(four_corners, 0.05);
            break;
        case ExampleId::Ex3: {
            DensitySpec s;
            s.kind = DensityKind::LaplaceExp;
            s.centers = {{mu1, mu1}};
            s.exponents = {3.0, 5.0};
            s.delta = delta;
            def.rho0 = std::move(s);
            def.rho1 = gaussian(four_corners, 0.05);
            break;
        }
        case ExampleId::Ex4: {
            DensitySpec s;
            s.kind = DensityKind::Quartic;
            s.centers = {{0.5, 0.5}};
            s.delta = delta;
            def.rho0 = std::move(s);
            def.rho1 = gaussian(four_corners, 0.05);
            break;
        }
        case ExampleId::Ex5: {
            // Stand-in geometry: an annulus spreading into four disks.
            DensitySpec s0;
            s0.kind = DensityKind::IndicatorRegion;
            Region ring;
            ring.shape = Region::Shape::Annulus;
            ring.center = {0.5, 0.5};
            ring.inner_radius = 0.2;
            ring.outer_radius = 0.35;
            s0.regions = {ring};
            s0.delta = delta;
            def.rho0 = std::move(s0);
            DensitySpec s1;
            s1.kind = DensityKind::IndicatorRegion;
            for (const auto& c : four_corners) {
                Region disk;
                disk.shape = Region::Shape::Disk;
                disk.center = c;
                disk.outer_radius = 0.1;
                s1.regions.push_back(std::move(disk));
            }
            s1.delta = delta;
            def.rho1 = std::move(s1);
            break;
        }
        case ExampleId::Ex6: {
            // Stand-in obstacle: a vertical wall with a central gap.
            def.rho0 = gaussian({{0.2, 0.5}}, 0.1);
            def.rho1 = gaussian({{0.8, 0.5}}, 0.1);
            ObstacleSpec obs;
            obs.omega_min = 1e-6;
            Region lower, upper;
            lower.shape = Region::Shape::Box;
            lower.lo = {0.45, 0.0};
            lower.hi = {0.55, 0.40};
            upper.shape = Region::Shape::Box;
            upper.lo = {0.45, 0.60};
            upper.hi = {0.55, 1.0};
            obs.walls = {lower, upper};
            def.obstacles = std::move(obs);
            break;
        }
        case ExampleId::Ex7: {
            if (dirac_count < 1) throw std::domain_error("make_example: dirac_count must be >= 1");
            def.rho0 = gaussian({{0.5, 0.5}}, 0.15);
            DensitySpec s;
            s.kind = DensityKind::DiracPoints;
            std::mt19937_64 rng(seed);
            auto unit = [&rng] {
                // Top 53 bits -> [0,1); independent of library distributions.
                return static_cast<double>(rng() >> 11) * 0x1.0p-53;
            };
            for (int n = 0; n < dirac_count; ++n) {
                const double a = unit(), b = unit();
                s.points.push_back({a, b});
            }
            s.delta = delta;
            def.rho1 = std::move(s);
            break;
        }
        default:
            throw std::invalid_argument("make_example: unknown example id");
    }
    return def;
}

}  // namespace otgrid
