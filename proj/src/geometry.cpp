#include "fpr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "fpr/errors.hpp"
#include "fpr/rng.hpp"

namespace fpr {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

int hex_ring(int u, int v) {
    return std::max({std::abs(u), std::abs(v), std::abs(u + v)});
}

int positive_mod(int x, int m) {
    return ((x % m) + m) % m;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

double distance(Vec2 a, Vec2 b) {
    return std::sqrt(distance2(a, b));
}

bool inside_hexagon(Vec2 p, double radius) {
    const double a = kSqrt3 * 0.5 * radius;  // apothem
    if (std::abs(p.y) > a) return false;
    const double lim = kSqrt3 * radius;
    return std::abs(kSqrt3 * p.x + p.y) <= lim && std::abs(kSqrt3 * p.x - p.y) <= lim;
}

CellGrid build_hex_grid(double radius, int tiers) {
    if (!(radius > 0.0)) throw std::invalid_argument("build_hex_grid: radius must be positive");
    if (tiers < 1) throw std::invalid_argument("build_hex_grid: tiers must be >= 1");

    // Lattice basis: neighbor directions at 30 and 90 degrees, spacing sqrt(3)*r.
    const double e1x = 1.5 * radius, e1y = kSqrt3 * 0.5 * radius;
    const double e2x = 0.0, e2y = kSqrt3 * radius;

    struct Cell {
        int u, v, tier;
        double x, y, angle;
    };
    std::vector<Cell> cells;
    for (int u = -tiers; u <= tiers; ++u) {
        for (int v = -tiers; v <= tiers; ++v) {
            const int t = hex_ring(u, v);
            if (t > tiers) continue;
            const double x = u * e1x + v * e2x;
            const double y = u * e1y + v * e2y;
            double ang = (t == 0) ? 0.0 : std::atan2(y, x);
            if (ang < 0.0) ang += 2.0 * M_PI;
            cells.push_back({u, v, t, x, y, ang});
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.tier != b.tier) return a.tier < b.tier;
        return a.angle < b.angle;
    });

    CellGrid g;
    g.radius = radius;
    g.tiers = tiers;
    for (const Cell& c : cells) {
        g.centers.push_back({c.x, c.y});
        g.axial_u.push_back(c.u);
        g.axial_v.push_back(c.v);
        g.tier_of.push_back(c.tier);
    }
    return g;
}

CellGrid assign_reuse_coloring(CellGrid grid, int beta) {
    grid.colors.resize(grid.centers.size());
    for (int i = 0; i < grid.size(); ++i) {
        const int u = grid.axial_u[i];
        const int v = grid.axial_v[i];
        switch (beta) {
            case 1:
                grid.colors[i] = 0;
                break;
            case 3:
                // shift lattice generated by (1,1): kernel of u + 2v mod 3
                grid.colors[i] = positive_mod(u + 2 * v, 3);
                break;
            case 4:
                // shift lattice generated by (2,0) and (0,2)
                grid.colors[i] = positive_mod(u, 2) + 2 * positive_mod(v, 2);
                break;
            case 7:
                // shift lattice generated by (2,1): kernel of u + 5v mod 7
                grid.colors[i] = positive_mod(u + 5 * v, 7);
                break;
            default:
                throw unsupported_reuse_factor(
                    "assign_reuse_coloring: beta must be one of {1, 3, 4, 7}");
        }
    }
    grid.beta = beta;
    return grid;
}

std::vector<int> pilot_sharing_set(const CellGrid& grid) {
    if (grid.colors.empty()) throw std::invalid_argument("pilot_sharing_set: grid has no coloring");
    std::vector<int> out;
    for (int i = 0; i < grid.size(); ++i) {
        if (grid.colors[i] == grid.colors[0]) out.push_back(i);
    }
    return out;
}

Vec2 sample_user_position(const CellGrid& grid, int cell, double min_dist_fraction,
                          std::mt19937_64& rng, std::uint64_t* attempts) {
    if (min_dist_fraction < 0.0 || min_dist_fraction >= 1.0) {
        throw std::invalid_argument("sample_user_position: min_dist_fraction must be in [0, 1)");
    }
    const double r = grid.radius;
    const double a = kSqrt3 * 0.5 * r;
    const double rmin2 = (min_dist_fraction * r) * (min_dist_fraction * r);
    for (;;) {
        if (attempts) ++*attempts;
        const double x = (2.0 * uniform01(rng) - 1.0) * r;
        const double y = (2.0 * uniform01(rng) - 1.0) * a;
        if (x * x + y * y < rmin2) continue;
        if (!inside_hexagon({x, y}, r)) continue;
        return {grid.centers[cell].x + x, grid.centers[cell].y + y};
    }
}

std::uint64_t grid_geometry_hash(const CellGrid& grid) {
    std::uint64_t h = fnv1a(&grid.radius, sizeof(grid.radius));
    h = fnv1a(&grid.tiers, sizeof(grid.tiers), h);
    for (const Vec2& c : grid.centers) {
        h = fnv1a(&c.x, sizeof(c.x), h);
        h = fnv1a(&c.y, sizeof(c.y), h);
    }
    return h;
}

std::string debug_dump(const CellGrid& grid) {
    std::string out;
    char buf[160];
    for (int i = 0; i < grid.size(); ++i) {
        const int color = grid.colors.empty() ? -1 : grid.colors[i];
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %d %d\n", i, grid.centers[i].x,
                      grid.centers[i].y, grid.tier_of[i], color);
        out += buf;
    }
    return out;
}

}  // namespace fpr
