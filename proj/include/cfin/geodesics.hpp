#ifndef CFIN_GEODESICS_HPP
#define CFIN_GEODESICS_HPP

#include "cfin/connections.hpp"

namespace cfin {

/// Samples of a numerically integrated complex geodesic z(s) with
/// d^2 z/ds^2 + 2 G(z, dz/ds) = theta^*(z, dz/ds).
struct GeodesicTrace {
    std::vector<double> s;
    std::vector<std::vector<Complex>> z;  // one position per sample
    std::vector<Complex> z0, eta0;
    double step = 0;
    int steps = 0;
    bool truncated = false;   // left the chart domain or hit a singularity
    double max_theta = 0;     // max |theta^*| seen along the trace
};

/// Classical fixed-step RK4 on the first-order system (z, w). The trace is
/// truncated (not an error) when ||z|| reaches the domain radius or an
/// evaluation becomes singular.
GeodesicTrace integrate_geodesic(const ConnectionBundle& conn, std::vector<Complex> z0,
                                 std::vector<Complex> eta0, double step, int steps,
                                 double domain_radius = 0.95);

struct PointsetComparison {
    bool coincide = false;
    double max_deviation = 0;
};

/// Symmetric polyline distance of the two traces as point sets in C^n;
/// parameterizations are not compared. Traces need >= 3 samples.
PointsetComparison pointset_compare(const GeodesicTrace& a, const GeodesicTrace& b, double tol);

/// CSV export: header s,re_z1,im_z1,... and one row per sample, shortest
/// round-trip number formatting (byte-deterministic).
std::string trace_to_csv(const GeodesicTrace& t);

}  // namespace cfin

#endif
