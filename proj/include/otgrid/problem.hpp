#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otgrid/grid.hpp"

namespace otgrid {

/// Primitive spatial shapes, used for indicator densities and obstacle
/// masks. Coordinates live in the unit cube.
struct Region {
    enum class Shape { All, Disk, Annulus, Box };
    Shape shape = Shape::All;
    std::vector<double> center;     // Disk/Annulus
    double inner_radius = 0.0;      // Annulus
    double outer_radius = 0.0;      // Disk/Annulus
    std::vector<double> lo, hi;     // Box corners

    bool contains(std::span<const double> x) const;
};

enum class DensityKind { GaussianSum, LaplaceExp, Quartic, IndicatorRegion, DiracPoints, RasterFile };

/// Recipe for one density: an analytic form (or point set, or file) plus
/// the lower-bound shift delta added after normalization.
struct DensitySpec {
    DensityKind kind = DensityKind::GaussianSum;
    std::vector<std::vector<double>> centers;  // gaussian sum / laplace / quartic center
    std::vector<double> widths;                // gaussian widths, one per center
    std::vector<double> exponents;             // laplace decay rates, one per axis
    std::vector<Region> regions;               // indicator support
    std::vector<std::vector<double>> points;   // dirac locations
    std::string raster_path;                   // raster-file source
    double delta = 0.0;
};

/// Evaluates the spec on the spatial node lattice of `g`, normalizes the
/// result to unit sum, and adds delta. Dirac masses land on the nearest
/// node (ties break toward the lower index). Raster files are taken as-is
/// (they store final density values), resampled multilinearly when the
/// shapes differ.
std::vector<double> rasterize_density(const DensitySpec& spec, const GridSpec& g);

/// Boundary cost field: the rho0 slice (positive) at time index 0 and the
/// rho1 slice (negative) at the last time index, each normalized so the
/// slice sum times the spatial cell volume is exactly +-1.
CenteredField build_cost_vector(std::span<const double> rho0, std::span<const double> rho1,
                                const GridSpec& g);

/// omega_min on masked constraint nodes, 1 elsewhere.
std::vector<double> build_weights(std::span<const std::uint8_t> obstacle_mask, double omega_min,
                                  const GridSpec& g);

/// A fully assembled discrete problem.
struct Problem {
    GridSpec grid;
    CenteredField cost;
    std::vector<double> omega;  // empty = unweighted; else one weight per constraint node
    std::string label;

    bool weighted() const { return !omega.empty(); }
};

/// Obstacle description: either analytic wall regions (evaluated on the
/// spatial lattice of whatever grid the problem is built on) or a spatial
/// raster of weight values.
struct ObstacleSpec {
    std::vector<Region> walls;
    double omega_min = 1e-6;
    std::string raster_path;
};

/// Grid-independent problem recipe; materialize() rebuilds the discrete
/// problem on any grid, which is what the coarse-to-fine schedule needs.
struct ProblemDef {
    DensitySpec rho0, rho1;
    std::optional<ObstacleSpec> obstacles;
    std::string label;

    Problem materialize(const GridSpec& g) const;
};

enum class ExampleId { Ex1 = 1, Ex2, Ex3, Ex4, Ex5, Ex6, Ex7 };

std::optional<ExampleId> parse_example_id(const std::string& name);  // "ex1".."ex7"
std::string example_name(ExampleId id);

/// The benchmark problems. Ex-1..Ex-4 are the analytic density pairs,
/// Ex-5 transports between an annulus and four disks, Ex-6 adds two wall
/// obstacles with a gap (weights omega_min), Ex-7 targets `dirac_count`
/// seeded random point masses. All are two-dimensional in space.
ProblemDef make_example(ExampleId id, double delta, unsigned seed = 0, int dirac_count = 30);

}  // namespace otgrid
