#ifndef CFIN_METRIC_HPP
#define CFIN_METRIC_HPP

#include <optional>
#include <string>
#include <vector>

#include "cfin/field.hpp"

namespace cfin {

/// Dense multi-index array of expressions with an index signature; the fully
/// symbolic companion of FieldTensor (used where no metric inverse occurs,
/// e.g. the fundamental tensor itself).
class ExprTensor {
public:
    ExprTensor() = default;
    ExprTensor(int n, std::vector<Slot> slots);

    int n() const { return n_; }
    int rank() const { return int(slots_.size()); }
    const std::vector<Slot>& slots() const { return slots_; }

    Expr& at(std::span<const int> idx);
    const Expr& at(std::span<const int> idx) const;
    Expr& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
    const Expr& at(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }

    /// Conjugate tensor: bar flags flip, entries conjugate.
    ExprTensor conjugate() const;

private:
    size_t flat(std::span<const int> idx) const;
    int n_ = 0;
    std::vector<Slot> slots_;
    std::vector<Expr> e_;
};

/// A complex Finsler fundamental function L(z, eta) on a single chart,
/// together with its dimension and the symbolic fundamental tensor
/// g_{i jbar} = d^2 L / d eta^i d etabar^j.
class FinslerMetric {
public:
    FinslerMetric(int n, Expr L, std::string label);
    static FinslerMetric from_source(const std::string& source, int n, std::string label);

    int n() const { return n_; }
    Expr L() const { return L_; }
    const std::string& label() const { return label_; }
    const HessianPtr& hessian() const { return hessian_; }

    Expr g(int i, int j) const { return Expr(hessian_->entry(i, j)); }
    /// eta_i := dL/d eta^i (the lowered direction covector).
    Expr eta_lowered(int i) const;
    Expr etabar_lowered(int i) const;

    /// g_{i jbar} as a rank-2 symbolic tensor (down-plain, down-barred).
    ExprTensor metric_tensor() const;
    /// C_{j mbar h} := d g_{j mbar} / d eta^h.
    ExprTensor c_tensor() const;

private:
    int n_;
    Expr L_;
    std::string label_;
    HessianPtr hessian_;
};

/// Numeric inverse g^{jbar i} at one point; throws NotPositiveDefiniteError
/// (with the smallest eigenvalue) off the strongly pseudoconvex locus.
Eigen::MatrixXcd inverse_metric(const FinslerMetric& m, const EvalPoint& p);

struct PointValidation {
    EvalPoint point;
    double euler_L_eta = 0;      // |(dL/d eta^k) eta^k - L| / (1+|L|)
    double euler_L_etabar = 0;
    double euler_g_eta = 0;      // max_ij |(dg_ij/d eta^k) eta^k| / (1+|L|)
    double euler_g_etabar = 0;
    double reconstruction = 0;   // |g_ij eta^i etabar^j - L| / (1+|L|)
    double reality = 0;
    double hermitian = 0;        // max |g_ij - conj(g_ji)| / (1+max|g|)
    double c_contraction = 0;    // max |C_{j mbar h} eta^h| / (1+max|g|)
    double min_eigenvalue = 0;
    bool positive_definite = false;
    double max_residual() const;
};

struct ValidationReport {
    std::string label;
    double tolerance = 0;
    std::vector<PointValidation> points;
    bool pass = false;
    double max_residual = 0;
    double min_eigenvalue = 0;
};

/// Residuals of the defining axioms (Euler identities, reality, Hermitian
/// symmetry, strong pseudoconvexity) at the given points. Failures are
/// report entries, not exceptions. A pass is always "pass at N points",
/// never a global certificate.
ValidationReport validate(const FinslerMetric& m, const std::vector<EvalPoint>& points, double tol);

}  // namespace cfin

#endif
