#ifndef CFIN_CATALOG_HPP
#define CFIN_CATALOG_HPP

#include <string>

#include "cfin/metric.hpp"

namespace cfin {

/// Built-in metric families. Sources are generated as grammar text and run
/// through the parser, so every catalog metric exercises the full front end.
///
///   euclidean(n):  sum_k |eta^k|^2
///   bergman(n):    the ball metric with Kaehler potential -log(1 - |z|^2)
///   quartic(n=2):  |eta|^2 + eps (|eta^1|^4 + |eta^2|^4) / |eta|^2
///   conformal(n=2): exp(z1 zb1) |eta|^2
std::string euclidean_source(int n);
std::string bergman_source(int n);
std::string quartic_source(double eps);
std::string conformal_source();

FinslerMetric make_euclidean(int n);
FinslerMetric make_bergman(int n);
FinslerMetric make_quartic(double eps = 0.1);
FinslerMetric make_conformal();

/// Potential of the bergman family: rho = -log(1 - sum z^k zb^k);
/// its spray is G^i = rho_r eta^r eta^i.
Expr bergman_rho(int n);

/// Lookup by catalog name ("euclidean", "bergman", "quartic", "conformal").
/// Throws std::invalid_argument for unknown names or unsupported dimensions.
FinslerMetric catalog_metric(const std::string& name, int n, double eps = 0.1);

}  // namespace cfin

#endif
