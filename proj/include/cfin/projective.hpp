#ifndef CFIN_PROJECTIVE_HPP
#define CFIN_PROJECTIVE_HPP

#include <array>

#include "cfin/curvatures.hpp"
#include "cfin/spray.hpp"

namespace cfin {

/// Requested invariant is only defined on a smaller metric class.
class ScopeError : public std::runtime_error {
public:
    explicit ScopeError(const std::string& what) : std::runtime_error(what) {}
};

/// The projective-invariant spray D^i and its three curvature-type
/// companions. Invariant under projective changes of the spray data.
struct DouglasBundle {
    std::vector<Field> d;   // D^i
    FieldTensor d_hv;       // D^i_{jkh}
    FieldTensor d_barvbar;  // D^i_{j kbar hbar}
    FieldTensor d_mixedv;   // D^i_{j kbar h}
};

/// D^i = G^i - tr(N) eta^i/(n+1) - (theta^{*i} - tr(theta')eta^i/n)/2
std::vector<Field> douglas_spray(const SprayData& s);

/// The full literal assembly. With `weakly_kahler_shortcut` the theta-jet
/// blocks are skipped (they vanish on that class); the Ricci blocks are
/// identical either way.
DouglasBundle build_douglas(const SprayData& s, bool weakly_kahler_shortcut = false);

/// Independent assembly of the same three tensors as raw third vertical
/// jets of D^i (engine cross-check; the two paths agree identically).
std::array<FieldTensor, 3> douglas_via_jets(const SprayData& s);

/// Residual tensors of the three theta-jet conditions that characterize
/// Douglas spaces among generalized Berwald ones; all three vanish iff the
/// theta-part of the Douglas invariants vanishes.
std::array<FieldTensor, 3> douglas_theta_conditions(const SprayData& s);

/// Weyl-type projective invariants (n >= 2): W^i_{kh} and W^i_{jkh}.
struct WeylBundle {
    FieldTensor w3;  // W^i_{kh}
    FieldTensor w4;  // W^i_{jkh}
};
WeylBundle build_weyl(const SprayData& s);

/// The hhbar Weyl-type invariant W^i_{j kbar h}, valid only for complex
/// Berwald metrics. The gate checks the Kaehler and eta-independence
/// residuals at the given points and throws ScopeError off the class.
FieldTensor weyl_berwald_invariant(const CurvatureBundle& curv,
                                   const std::vector<EvalPoint>& gate_points, double tol);

/// True when the metric passes the complex-Berwald gate at every point.
bool is_complex_berwald(const CurvatureBundle& curv, const std::vector<EvalPoint>& points,
                        double tol);

/// Pointwise content of the Berwald-class curvature dichotomy: the scalar
/// curvature K_F, max |W^i_{j kbar h}|, and the residual of
/// K_{mbar j kbar h} = (K_F/4)(g_{j kbar} g_{h mbar} + g_{h kbar} g_{j mbar}).
struct BerwaldWeylCheck {
    double kf;
    double w_max;
    double identity_residual;  // scaled
    double scale;
};
BerwaldWeylCheck berwald_weyl_check(const CurvatureBundle& curv, const FieldTensor& w_berwald,
                                    EvalContext& ctx);

}  // namespace cfin

#endif
