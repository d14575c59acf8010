#ifndef CFIN_CONNECTIONS_HPP
#define CFIN_CONNECTIONS_HPP

#include <mutex>
#include <optional>

#include "cfin/metric.hpp"

namespace cfin {

struct KahlerClassReport {
    double strongly = 0;         // max |T^i_{jk}|
    double kahler = 0;           // max |T^i_{jk} eta^j|
    double weakly = 0;           // max |g_{i lbar} T^i_{jk} eta^j etabar^l|
    double purely_hermitian = 0; // max |d g / d eta|
    double scale = 0;            // max |g| at the point
    bool is_strongly = false, is_kahler = false, is_weakly = false, is_purely_hermitian = false;
};

/// Everything first-order attached to the metric: the Chern-Finsler and
/// canonical nonlinear connections, the spray, the Chern-Finsler linear
/// connection (both defining routes), the Berwald-type coefficients and
/// theta^* with an independent second computation path.
class ConnectionBundle {
public:
    explicit ConnectionBundle(const FinslerMetric& m);

    const FinslerMetric& metric() const { return m_; }
    int n() const { return m_.n(); }

    /// N^i_j = g^{mbar i} (d g_{l mbar} / d z^j) eta^l
    const FieldTensor& chern_finsler_n() const { return n_cf_; }
    /// G^i = N^i_j eta^j / 2
    const FieldTensor& spray() const { return spray_; }
    /// canonical nonlinear connection: d G^i / d eta^j
    const FieldTensor& canonical_n() const { return n_can_; }
    /// G^i_{jk} (symmetric in jk) and G^i_{j kbar}
    const FieldTensor& berwald_gamma() const { return g_jk_; }
    const FieldTensor& berwald_gamma_mixed() const { return g_jkbar_; }
    /// L^i_{jk} via g^{lbar i} delta_k g_{j lbar}; the alt route is
    /// d N^i_k / d eta^j. Their agreement is a standing self-test.
    const FieldTensor& chern_l() const { return l_; }
    const FieldTensor& chern_l_alt() const { return l_alt_; }
    const FieldTensor& chern_c() const { return c_; }
    /// torsion T^i_{jk} = L^i_{jk} - L^i_{kj}
    const FieldTensor& torsion() const { return t_; }
    /// theta^{*i} = 2 g^{jbar i} (canonical delta_jbar L); vanishes exactly
    /// on the weakly Kaehler class.
    const FieldTensor& theta_star() const { return theta_; }
    /// same object through N - Ncan: 2 g^{jbar i}(N - Ncan)^{rbar}_{jbar} etabar_r
    const FieldTensor& theta_star_alt() const { return theta_alt_; }

    /// Chern-Finsler horizontal derivatives delta_k, delta_kbar.
    Field delta(const Field& f, int k) const;
    Field delta_bar(const Field& f, int k) const;
    /// Canonical-frame horizontal derivatives.
    Field delta_can(const Field& f, int k) const;
    Field delta_can_bar(const Field& f, int k) const;

    /// Residuals of the four Kaehler-type conditions at the context's point.
    /// A condition holds when its residual is <= tol * (1 + scale).
    KahlerClassReport kahler_class(EvalContext& ctx, double tol) const;

    /// max_k |(d G^i / d etabar^k) eta_i| at the point; vanishes for every
    /// fundamental function (expected <= tol * L numerically).
    double vertical_spray_pairing_residual(EvalContext& ctx) const;

    /// Residual of the closed form for d theta^{*i} / d eta^k against the
    /// directly differentiated theta^*; both sides evaluated independently.
    double theta_derivative_identity_residual(EvalContext& ctx) const;

    ConnectionBundle(const ConnectionBundle& o);
    ConnectionBundle& operator=(const ConnectionBundle&) = delete;

private:
    // (directly differentiated theta jet, closed-form difference)
    const std::pair<FieldTensor, FieldTensor>& theta_identity_pair() const;

    FinslerMetric m_;
    FieldTensor n_cf_, spray_, n_can_, g_jk_, g_jkbar_, l_, l_alt_, c_, t_, theta_, theta_alt_;
    mutable std::mutex mu_;
    mutable std::optional<std::pair<FieldTensor, FieldTensor>> theta_identity_;
};

}  // namespace cfin

#endif
