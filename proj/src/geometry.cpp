#include "affwalk/geometry.hpp"

#include <ostream>

#include "affwalk/records.hpp"

namespace affwalk {

std::vector<GeometryRecord> trajectory_geometry(const Trajectory& traj,
                                                const PrimeContext& ctx) {
    std::vector<GeometryRecord> out;
    out.reserve(static_cast<std::size_t>(traj.past_horizon() +
                                         traj.future_horizon() + 1));
    for (long n = -traj.past_horizon(); n <= traj.future_horizon(); ++n) {
        OrbitPoint pt = embed_orbit(traj.product_at(n), ctx);
        GeometryRecord rec;
        rec.n = n;
        rec.x = pt.half_plane.x.get_d();
        rec.y = pt.half_plane.y.get_d();
        rec.vertices = std::move(pt.tree_vertices);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TreeVertex> geodesic_to_target(unsigned long p, const Rational& z,
                                           long level_min, long level_max) {
    if (level_min > level_max) {
        throw ValidationError("empty level range");
    }
    std::vector<TreeVertex> out;
    out.reserve(static_cast<std::size_t>(level_max - level_min + 1));
    for (long k = level_min; k <= level_max; ++k) {
        out.emplace_back(p, k, z);
    }
    return out;
}

void write_geometry_csv(std::ostream& out,
                        const std::vector<GeometryRecord>& records,
                        const PrimeContext& ctx) {
    out << "n,x,y";
    for (unsigned long p : ctx.primes()) {
        out << ",level_" << p << ",vertex_" << p;
    }
    out << "\n";
    for (const GeometryRecord& rec : records) {
        out << rec.n << "," << format_double(rec.x) << ","
            << format_double(rec.y);
        for (unsigned long p : ctx.primes()) {
            const TreeVertex& v = rec.vertices.at(p);
            out << "," << v.level() << "," << v.label();
        }
        out << "\n";
    }
}

}  // namespace affwalk
