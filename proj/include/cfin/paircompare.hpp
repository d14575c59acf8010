#ifndef CFIN_PAIRCOMPARE_HPP
#define CFIN_PAIRCOMPARE_HPP

#include "cfin/projective.hpp"

namespace cfin {

class HomogeneityError : public std::runtime_error {
public:
    explicit HomogeneityError(const std::string& what) : std::runtime_error(what) {}
};

/// Scalar data of a projective change at one point: the (1,0)-homogeneous
/// part S, the (0,1)-homogeneous part Q and the factor P = S - Q/2,
/// recovered from the traces of the canonical connections and theta-jets.
struct ProjectiveFactor {
    Complex s, q, p;
};

ProjectiveFactor recover_projective_factor(const SprayData& a, const SprayData& b,
                                           EvalContext& ctx);

enum class Relatedness { Related, NotRelated, Inconclusive };

struct RelatednessReport {
    Relatedness verdict = Relatedness::Inconclusive;
    bool paths_agree = false;
    double max_spray_residual = 0;   // projective-change defect of the sprays
    double max_direct_residual = 0;  // independent hhbar-pairing criterion
    double homogeneity_residual = 0; // S/Q bidegree diagnostic
    std::vector<ProjectiveFactor> factors;  // per point
};

/// Decides projective relatedness of two metrics over the sample points.
/// Two independent routes are evaluated (the spray-defect residual and the
/// direct pairing criterion with P eliminated); their verdicts must agree.
/// Ill-posed recovery (S/Q homogeneity broken) yields Inconclusive.
RelatednessReport projective_relatedness_test(const ConnectionBundle& a, const ConnectionBundle& b,
                                              const std::vector<EvalPoint>& points, double tol);

/// Spray data after the projective change G -> G + P eta by a
/// (1,0)-homogeneous factor P (checked numerically at the given points;
/// violations throw HomogeneityError). theta^* picks up Q eta with
/// Q = -2 (dP/d etabar^k) etabar^k, which vanishes for homogeneous P.
struct SyntheticChange {
    SprayData data;
    Expr p;
    Expr q;
};
SyntheticChange synthetic_change(const SprayData& base, Expr p,
                                 const std::vector<EvalPoint>& check_points, double tol);

/// X-tensors of a change factor over the base Berwald connection:
///   X_{kh} = P_{k|h} - P_{h|k},  X_h = P_{|h} - P P_h,  X_{k0} = X_{kj} eta^j
/// with '|' the horizontal covariant derivative of the base BGamma.
struct ChangeDiagnostics {
    FieldTensor x_kh;
    std::vector<Field> x_h;
    std::vector<Field> x_k0;
};
ChangeDiagnostics change_diagnostics(const SprayData& base, Expr p);

/// K^i_{kh} and K^i_{jkh} of the Berwald connection attached to a spray.
FieldTensor berwald_k3(const SprayData& s);
FieldTensor berwald_k4(const SprayData& s);

/// Residual of the curvature change law under a synthetic change:
/// Ktilde^i_{jkh} - K^i_{jkh} - [(d_j X_{kh}) eta^i + X_{kh} d^i_j
///   + (d_j X_h) d^i_k - (d_j X_k) d^i_h], scaled, at the context's point.
double curvature_change_law_residual(const SprayData& base, const SyntheticChange& chg,
                                     EvalContext& ctx);

}  // namespace cfin

#endif
