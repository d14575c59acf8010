#ifndef CFIN_CLASSIFICATION_HPP
#define CFIN_CLASSIFICATION_HPP

#include "cfin/paircompare.hpp"

namespace cfin {

/// Per-point residuals of every classification predicate. A predicate holds
/// at the point when its residual is <= tol * (1 + scale).
struct PredicatePoint {
    EvalPoint point;
    double scale = 0;            // max |g|
    double min_eigenvalue = 0;
    double strongly_kahler = 0;
    double kahler = 0;
    double weakly_kahler = 0;
    double purely_hermitian = 0;
    double generalized_berwald = 0;  // |G^i_{j kbar}| + paired eta-probe
    double berwald_l_vertical = 0;   // eta-dependence of L^i_{jk}
    double douglas_invariants = 0;   // max over the three Douglas tensors
    double douglas_theta = 0;        // theta-jet route residual
    double locally_minkowski = 0;    // |dg/dz| + |G|
    double projectively_flat = 0;    // spray-form residual
    double theta_identity = 0;       // closed-form d(theta)/d(eta) diagnostic
    double kf = 0;                   // holomorphic curvature value
};

struct TheoremCheck {
    std::string name;
    bool pass;
    std::string detail;
};

struct ClassificationReport {
    std::string label;
    int n = 0;
    double tolerance = 0;
    std::vector<PredicatePoint> points;

    bool purely_hermitian = false;
    bool strongly_kahler = false;
    bool kahler = false;
    bool weakly_kahler = false;
    bool generalized_berwald = false;
    bool complex_berwald = false;
    bool douglas = false;
    bool douglas_via_berwald_route = false;
    bool locally_minkowski = false;
    bool projectively_flat = false;

    bool has_constant_kf = false;
    double constant_kf = 0;
    double kf_variance = 0;

    std::vector<TheoremCheck> theorem_checks;
    bool lattice_ok = false;
};

/// Aggregate verdicts across the sampled points plus the implication-lattice
/// and theorem-consistency checks. A lattice violation marks the report
/// (it would indicate an engine bug, not a property of the metric).
ClassificationReport classify(const FinslerMetric& m, const std::vector<EvalPoint>& points,
                              double tol);

struct FlatnessReport {
    bool flat = false;
    bool weakly_kahler = false;
    double max_residual = 0;
    /// set when corroboration against the flat metric was requested
    std::optional<Relatedness> pair_verdict;
};

/// Projective flatness via the spray form G^i = (dL/dz^k eta^k) eta^i / (2L)
/// plus the weakly Kaehler gate; optionally corroborated by the pair test
/// against the flat metric of the same dimension.
FlatnessReport projectively_flat_test(const ConnectionBundle& conn,
                                      const std::vector<EvalPoint>& points, double tol,
                                      bool corroborate_with_flat_pair = false);

struct RhoFamilyReport {
    double spray_residual = 0;       // G^i = rho_r eta^r eta^i
    double pde_residual = 0;         // rho_{r hbar k} = rho_r rho_{k hbar} + rho_k rho_{r hbar}
    double connection_residual = 0;  // L^i_{jk} = rho_k d^i_j + rho_j d^i_k
    double kf_residual = 0;          // K_F = -(4/L) rho_{r hbar} eta^r etabar^h
    double hermitian_residual = 0;   // conj(rho_{r hbar}) = rho_{h rbar}
    double min_rho_eigenvalue = 0;   // nondegeneracy diagnostic (not fatal)
    bool kf_constant = false;
    double kf_mean = 0;
    bool pass = false;
};

/// Checks that the metric belongs to the potential family G^i = rho_r eta^r
/// eta^i: the defining spray form, the potential's PDE, the connection and
/// curvature closed forms, and the Hermitian structure of rho_{r hbar}.
/// rho must depend on z (and zbar) only.
RhoFamilyReport rho_family_check(const FinslerMetric& m, Expr rho,
                                 const std::vector<EvalPoint>& points, double tol);

}  // namespace cfin

#endif
