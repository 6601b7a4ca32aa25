#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fpr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance2(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double distance(Vec2 a, Vec2 b);

// Hexagonal multi-cell layout. Cell 0 is the measured central cell, at the
// origin. Hexagons are flat-top with one vertex on the positive x-axis;
// neighboring BS centers are sqrt(3)*radius apart.
struct CellGrid {
    double radius = 1.0;
    int tiers = 0;
    int beta = 1;  // integer pilot reuse factor realized by `colors`
    std::vector<Vec2> centers;
    std::vector<int> axial_u;  // lattice coordinates, kept for coloring
    std::vector<int> axial_v;
    std::vector<int> tier_of;
    std::vector<int> colors;  // empty until assign_reuse_coloring

    int size() const { return static_cast<int>(centers.size()); }
};

// Centers sorted by (tier, angle); 1 + sum_{t<=tiers} 6t cells.
CellGrid build_hex_grid(double radius, int tiers);

// Valid lattice reuse coloring for beta in {1, 3, 4, 7}.
CellGrid assign_reuse_coloring(CellGrid grid, int beta);

// Cells whose edge group shares cell 0's pilot subset (L_0). Always
// contains 0.
std::vector<int> pilot_sharing_set(const CellGrid& grid);

// Point-in-hexagon test, hexagon centered at the origin.
bool inside_hexagon(Vec2 p, double radius);

// Uniform position over (hexagon of `cell`) minus (exclusion disk of radius
// min_dist_fraction * radius around the BS), by rejection from the bounding
// box. `attempts`, when given, receives the number of candidate draws.
Vec2 sample_user_position(const CellGrid& grid, int cell, double min_dist_fraction,
                          std::mt19937_64& rng, std::uint64_t* attempts = nullptr);

// Hash of the geometry (radius, tiers, centers). Coloring excluded: the
// interference moments do not depend on it.
std::uint64_t grid_geometry_hash(const CellGrid& grid);

// One line per cell: index, x, y, tier, color. Debug aid, not a stable format.
std::string debug_dump(const CellGrid& grid);

}  // namespace fpr
