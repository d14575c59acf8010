#include "cfin/metric.hpp"

#include <algorithm>

#include "cfin/parser.hpp"

namespace cfin {

ExprTensor::ExprTensor(int n, std::vector<Slot> slots) : n_(n), slots_(std::move(slots)) {
    size_t count = 1;
    for (size_t r = 0; r < slots_.size(); ++r) count *= size_t(n);
    e_.assign(count, Expr::zero());
}

size_t ExprTensor::flat(std::span<const int> idx) const {
    if (idx.size() != slots_.size()) throw std::logic_error("ExprTensor: rank mismatch");
    size_t f = 0;
    for (size_t k = 0; k < idx.size(); ++k) f = f * n_ + size_t(idx[k] - 1);
    return f;
}

Expr& ExprTensor::at(std::span<const int> idx) { return e_[flat(idx)]; }
const Expr& ExprTensor::at(std::span<const int> idx) const { return e_[flat(idx)]; }

ExprTensor ExprTensor::conjugate() const {
    std::vector<Slot> slots = slots_;
    for (auto& s : slots) s.bar = s.bar == BarType::Plain ? BarType::Barred : BarType::Plain;
    ExprTensor out(n_, std::move(slots));
    out.e_ = e_;
    for (auto& e : out.e_) e = conj(e);
    return out;
}

FinslerMetric::FinslerMetric(int n, Expr L, std::string label)
    : n_(n), L_(L), label_(std::move(label)) {
    if (n < 1) throw std::invalid_argument("FinslerMetric: dimension must be >= 1");
    std::vector<ExprId> g(size_t(n) * n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            g[size_t(i - 1) * n + (j - 1)] = d(d(L, VarKind::Eta, i), VarKind::EtaBar, j).id();
        }
    }
    hessian_ = std::make_shared<MetricHessian>(n, std::move(g), L.id());
}

FinslerMetric FinslerMetric::from_source(const std::string& source, int n, std::string label) {
    return FinslerMetric(n, parse(source, n), std::move(label));
}

Expr FinslerMetric::eta_lowered(int i) const { return d(L_, VarKind::Eta, i); }
Expr FinslerMetric::etabar_lowered(int i) const { return d(L_, VarKind::EtaBar, i); }

ExprTensor FinslerMetric::metric_tensor() const {
    ExprTensor t(n_, {{Variance::Down, BarType::Plain}, {Variance::Down, BarType::Barred}});
    for (int i = 1; i <= n_; ++i) {
        for (int j = 1; j <= n_; ++j) t.at({i, j}) = g(i, j);
    }
    return t;
}

ExprTensor FinslerMetric::c_tensor() const {
    ExprTensor t(n_, {{Variance::Down, BarType::Plain},
                      {Variance::Down, BarType::Barred},
                      {Variance::Down, BarType::Plain}});
    for (int j = 1; j <= n_; ++j) {
        for (int m = 1; m <= n_; ++m) {
            for (int h = 1; h <= n_; ++h) t.at({j, m, h}) = d(g(j, m), VarKind::Eta, h);
        }
    }
    return t;
}

Eigen::MatrixXcd inverse_metric(const FinslerMetric& m, const EvalPoint& p) {
    EvalContext ctx;
    ctx.set_point(p);
    return ctx.inverse(*m.hessian());
}

double PointValidation::max_residual() const {
    return std::max({euler_L_eta, euler_L_etabar, euler_g_eta, euler_g_etabar, reconstruction,
                     reality, hermitian, c_contraction});
}

ValidationReport validate(const FinslerMetric& m, const std::vector<EvalPoint>& points, double tol) {
    if (points.empty()) throw std::invalid_argument("validate: no points");
    const int n = m.n();
    Expr L = m.L();
    Expr Lconj = conj(L);

    // (dL/d eta^k) eta^k - L and the barred version
    Expr euler_eta = -L, euler_etabar = -L;
    for (int k = 1; k <= n; ++k) {
        euler_eta = euler_eta + d(L, VarKind::Eta, k) * Expr::eta(k);
        euler_etabar = euler_etabar + d(L, VarKind::EtaBar, k) * Expr::etabar(k);
    }
    // g_{i jbar} eta^i etabar^j - L
    Expr recon = -L;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) recon = recon + m.g(i, j) * Expr::eta(i) * Expr::etabar(j);
    }

    ValidationReport rep;
    rep.label = m.label();
    rep.tolerance = tol;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();

    EvalContext ctx;
    for (const EvalPoint& p : points) {
        ctx.set_point(p);
        PointValidation pv;
        pv.point = p;
        double absL = std::abs(ctx.value(L));
        double lscale = 1.0 + absL;

        pv.euler_L_eta = std::abs(ctx.value(euler_eta)) / lscale;
        pv.euler_L_etabar = std::abs(ctx.value(euler_etabar)) / lscale;
        pv.reconstruction = std::abs(ctx.value(recon)) / lscale;
        pv.reality = std::abs(ctx.value(Lconj) - ctx.value(L)) / lscale;

        Eigen::MatrixXcd g = ctx.metric_matrix(*m.hessian());
        double gscale = 1.0 + g.cwiseAbs().maxCoeff();
        pv.hermitian = (g - g.adjoint()).cwiseAbs().maxCoeff() / gscale;

        double ge = 0, gb = 0, cc = 0;
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                Complex se(0, 0), sb(0, 0);
                for (int k = 1; k <= n; ++k) {
                    se += ctx.value(d(m.g(i, j), VarKind::Eta, k)) * p.eta[k - 1];
                    sb += ctx.value(d(m.g(i, j), VarKind::EtaBar, k)) * std::conj(p.eta[k - 1]);
                }
                ge = std::max(ge, std::abs(se));
                gb = std::max(gb, std::abs(sb));
                cc = std::max(cc, std::abs(se));  // C_{j mbar h} eta^h is the same contraction
            }
        }
        pv.euler_g_eta = ge / lscale;
        pv.euler_g_etabar = gb / lscale;
        pv.c_contraction = cc / gscale;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
        pv.min_eigenvalue = es.eigenvalues().minCoeff();
        pv.positive_definite = pv.min_eigenvalue > tol * std::abs(g.trace());

        rep.max_residual = std::max(rep.max_residual, pv.max_residual());
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, pv.min_eigenvalue);
        rep.points.push_back(std::move(pv));
    }

    rep.pass = rep.max_residual <= tol;
    for (const auto& pv : rep.points) rep.pass = rep.pass && pv.positive_definite;
    return rep;
}

}  // namespace cfin
