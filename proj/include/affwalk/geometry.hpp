#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "affwalk/walk.hpp"

namespace affwalk {

// One trajectory step as plotting coordinates: the half-plane position of
// the product and, per context prime, the tree vertex it occupies. The
// coordinates are floats for export; the underlying values stay exact.
struct GeometryRecord {
    long n = 0;
    double x = 1.0;
    double y = 0.0;
    std::map<unsigned long, TreeVertex> vertices;

    long level(unsigned long p) const { return vertices.at(p).level(); }
};

// One record per step of the trajectory (negative times included for
// bilateral paths), built from the orbit embedding of each product.
std::vector<GeometryRecord> trajectory_geometry(const Trajectory& traj,
                                                const PrimeContext& ctx);

// The vertices of the geodesic toward z between the two levels, ascending;
// consecutive vertices are parent and child.
std::vector<TreeVertex> geodesic_to_target(unsigned long p, const Rational& z,
                                           long level_min, long level_max);

// Comma-separated table with header: n, x, y, then per-prime level and
// vertex label columns.
void write_geometry_csv(std::ostream& out,
                        const std::vector<GeometryRecord>& records,
                        const PrimeContext& ctx);

}  // namespace affwalk
