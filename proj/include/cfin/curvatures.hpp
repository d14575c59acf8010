#ifndef CFIN_CURVATURES_HPP
#define CFIN_CURVATURES_HPP

#include <mutex>
#include <optional>
#include <string>

#include "cfin/connections.hpp"

namespace cfin {

/// Covariant-derivative directions for the Chern-Finsler connection. The
/// connection is of (1,0) type: horizontal plain directions correct plain
/// slots with L^i_{jk}, barred directions correct barred slots with the
/// conjugated coefficients; vertical versions use C^i_{jk}.
enum class CovDirection { HPlain, HBar, VPlain, VBar };

FieldTensor covariant_derivative(const ConnectionBundle& conn, const FieldTensor& t,
                                 CovDirection dir, int k);

struct IdentityResidual {
    std::string name;
    double residual;  // scaled: |lhs-rhs| / (1 + max(|lhs|,|rhs|))
};

/// Curvature tensors of the Berwald-type and Chern-Finsler connections.
/// Everything is assembled lazily and cached; tensors are immutable once
/// built and safe to evaluate from several contexts.
class CurvatureBundle {
public:
    explicit CurvatureBundle(const ConnectionBundle& conn);

    const ConnectionBundle& connections() const { return conn_; }
    int n() const { return conn_.n(); }

    /// K^i_{jk} = delta_k N^i_j - delta_j N^i_k (canonical frame)
    const FieldTensor& k_hh3() const;
    /// Theta^i_{j kbar} = delta_kbar N^i_j
    const FieldTensor& theta_mixed() const;
    /// K^i_{jkh}, K^i_{j kbar hbar}, K^i_{j kbar h}
    const FieldTensor& k_hh() const;
    const FieldTensor& k_barbar() const;
    const FieldTensor& k_mixed() const;
    /// G^i_{jkh}, G^i_{j kbar hbar}, G^i_{j kbar h} (vertical jets)
    const FieldTensor& g_hv() const;
    const FieldTensor& g_barvbar() const;
    const FieldTensor& g_mixedv() const;
    /// Chern-Finsler hhbar curvature R^i_{j kbar h} and the lowered tensors
    const FieldTensor& r_mixed() const;
    const FieldTensor& r_lowered() const;  // R_{rbar j kbar h}
    const FieldTensor& k_lowered() const;  // K_{rbar j kbar h}

    /// Ricci tensors: D_{kh}=G^i_{ikh}, D_{kbar hbar}, D_{kbar h},
    /// K_{kh}=K^i_{ikh}, H_{jk}=K^i_{jki}, K_{kbar h}=K^i_{i kbar h}
    const FieldTensor& ricci_hv() const;
    const FieldTensor& ricci_barvbar() const;
    const FieldTensor& ricci_mixed() const;
    const FieldTensor& ricci_k() const;
    const FieldTensor& ricci_h() const;
    const FieldTensor& ricci_k_mixed() const;

    /// K_F = (2/L^2) R_{rbar j kbar h} etabar^r eta^j etabar^k eta^h
    const Field& holomorphic_curvature() const;
    /// Same contraction through the Berwald K-tensor (valid on the complex
    /// Berwald class, where R and K contract equally against eta).
    const Field& holomorphic_curvature_berwald() const;

    /// K_F at a point; asserts the imaginary part is below 1e-10 * (1+|K_F|).
    double holomorphic_curvature_at(EvalContext& ctx) const;

    /// The displayed curvature symmetries and vertical Bianchi identities,
    /// evaluated at the context's point.
    std::vector<IdentityResidual> identity_residuals(EvalContext& ctx) const;

    struct RicciSuite {
        Eigen::MatrixXcd k;       // K_{kh}
        Eigen::MatrixXcd h;       // H_{jk}
        Eigen::VectorXcd h0k;     // eta^j H_{jk}
        Eigen::VectorXcd hk0;     // H_{kj} eta^j
        Eigen::VectorXcd hk;      // (n H_{0k} + H_{k0}) / (n-1)
        Eigen::MatrixXcd k_mixed; // K_{kbar h}
        double link_residual;     // |H_{kj} - H_{jk} - K_{jk}| scaled
    };
    /// Ricci contractions at a point (H_k needs n >= 2).
    RicciSuite ricci_suite(EvalContext& ctx) const;

private:
    struct IdentityFields {
        FieldTensor k_jet_diff;            // K^i_{jkh} - d K^i_{kh}/d eta^j
        std::vector<FieldTensor> bianchi;  // rank-5 vertical-symmetry differences
    };
    const IdentityFields& identity_fields() const;

    ConnectionBundle conn_;

    mutable std::mutex mu_;
    mutable std::optional<IdentityFields> identity_fields_;
    mutable std::optional<FieldTensor> k_hh3_, theta_mixed_, k_hh_, k_barbar_, k_mixed_;
    mutable std::optional<FieldTensor> g_hv_, g_barvbar_, g_mixedv_;
    mutable std::optional<FieldTensor> r_mixed_, r_lowered_, k_lowered_;
    mutable std::optional<FieldTensor> ricci_hv_, ricci_barvbar_, ricci_mixed_, ricci_k_, ricci_h_,
        ricci_k_mixed_;
    mutable std::optional<Field> kf_, kf_berwald_;
};

}  // namespace cfin

#endif
