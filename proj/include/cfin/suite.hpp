#ifndef CFIN_SUITE_HPP
#define CFIN_SUITE_HPP

#include "cfin/report.hpp"

namespace cfin {

struct SuiteConfig {
    SamplingConfig sampling{24, 1, 0.7, 0.05};  // count, seed, z radius, eta floor
    double tolerance = 1e-8;
    double quartic_eps = 0.1;
};

struct SuiteCheck {
    int criterion;  // acceptance criterion the check belongs to
    std::string name;
    bool pass;
    double value;
    double threshold;
};

struct SuiteResult {
    Json report;
    std::vector<SuiteCheck> checks;
    bool pass = false;
};

/// The full acceptance run over the built-in catalog: validation, oracle
/// agreement, spray pairing, curvature identities, classification with the
/// implication lattice, the potential family, pair relatedness, projective
/// invariance under synthetic changes, and geodesic corroboration. The
/// returned report is byte-deterministic for a fixed config.
SuiteResult run_suite(const SuiteConfig& cfg);

}  // namespace cfin

#endif
