#include "cfin/paircompare.hpp"

namespace cfin {

namespace {
const Slot kUpP{Variance::Up, BarType::Plain};
const Slot kDownP{Variance::Down, BarType::Plain};

Var ve(int k) { return {VarKind::Eta, k}; }
}  // namespace

ProjectiveFactor recover_projective_factor(const SprayData& a, const SprayData& b,
                                           EvalContext& ctx) {
    const int n = a.n();
    Complex tr_n = ctx.value(b.trace_n()) - ctx.value(a.trace_n());
    Complex tr_t = ctx.value(b.theta_trace_jet({})) - ctx.value(a.theta_trace_jet({}));
    ProjectiveFactor f;
    f.s = tr_n / double(n + 1);
    f.q = tr_t / double(n);
    f.p = f.s - 0.5 * f.q;
    return f;
}

RelatednessReport projective_relatedness_test(const ConnectionBundle& a,
                                              const ConnectionBundle& b,
                                              const std::vector<EvalPoint>& points, double tol) {
    if (points.empty()) throw std::invalid_argument("projective_relatedness_test: no points");
    if (a.n() != b.n()) throw std::invalid_argument("projective_relatedness_test: dimension mismatch");
    const int n = a.n();
    SprayData sa = SprayData::of_metric(a);
    SprayData sb = SprayData::of_metric(b);

    // spray route: Gt - G - (tht - th)/2 - (trNt - trN) eta/(n+1)
    //              + (trtht' - trth') eta/(2n)
    std::vector<Field> spray_residual(n);
    {
        Field dn = sb.trace_n() - sa.trace_n();
        Field dt = sb.theta_trace_jet({}) - sa.theta_trace_jet({});
        for (int i = 1; i <= n; ++i) {
            Expr eta_i = Expr::eta(i);
            spray_residual[i - 1] = sb.spray(i) - sa.spray(i) -
                                    (sb.theta(i) - sa.theta(i)) * Expr::constant(0.5) -
                                    dn * (Expr::constant(1.0 / (n + 1)) * eta_i) +
                                    dt * (Expr::constant(1.0 / (2.0 * n)) * eta_i);
        }
    }

    // direct route: the P-eliminated pairing criterion against the second
    // metric, per barred slot r
    Expr Lt = b.metric().L();
    std::vector<Field> lhs(n), p_times(n), b_pair(n);
    {
        // (delta_k Lt) eta^k = dLt/dz^k eta^k - 2 G^j dLt/deta^j
        Field delta_contracted;
        for (int k = 1; k <= n; ++k) {
            delta_contracted += Field::from_expr(d(Lt, VarKind::Z, k) * Expr::eta(k));
        }
        for (int j = 1; j <= n; ++j) {
            delta_contracted -= sa.spray(j) * (Expr::constant(2.0) * d(Lt, VarKind::Eta, j));
        }
        Field p_scalar = delta_contracted;
        for (int i = 1; i <= n; ++i) p_scalar += sa.theta(i) * Expr(d(Lt, VarKind::Eta, i));
        p_scalar = p_scalar / (Expr::constant(2.0) * Lt);

        for (int r = 1; r <= n; ++r) {
            Field acc = d(delta_contracted, VarKind::EtaBar, r);
            for (int l = 1; l <= n; ++l) {
                acc += d(sa.spray(l), VarKind::EtaBar, r) * (Expr::constant(2.0) * d(Lt, VarKind::Eta, l));
            }
            lhs[r - 1] = acc * Expr::constant(0.5);
            p_times[r - 1] = p_scalar * Expr(d(Lt, VarKind::EtaBar, r));
            Field bg;
            for (int i = 1; i <= n; ++i) {
                bg += (sb.theta(i) - sa.theta(i)) *
                      (Expr::constant(0.5) * Expr(b.metric().g(i, r)));
            }
            b_pair[r - 1] = bg;
        }
    }

    RelatednessReport rep;
    EvalContext ctx;
    Rng rng(2026);
    bool spray_ok = true, direct_ok = true;
    for (const EvalPoint& p : points) {
        ctx.set_point(p);
        rep.factors.push_back(recover_projective_factor(sa, sb, ctx));

        double gscale = 0;
        for (int i = 1; i <= n; ++i) {
            gscale = std::max(gscale, std::abs(ctx.value(sa.spray(i))));
            gscale = std::max(gscale, std::abs(ctx.value(sb.spray(i))));
        }
        for (int i = 1; i <= n; ++i) {
            double r = std::abs(ctx.value(spray_residual[i - 1])) / (1.0 + 2.0 * gscale);
            rep.max_spray_residual = std::max(rep.max_spray_residual, r);
            if (r > tol) spray_ok = false;
        }
        for (int r = 1; r <= n; ++r) {
            Complex l = ctx.value(lhs[r - 1]);
            Complex pt = ctx.value(p_times[r - 1]);
            Complex bp = ctx.value(b_pair[r - 1]);
            double scale = 1.0 + std::abs(l) + std::abs(pt) + std::abs(bp);
            double res = std::abs(l - pt - bp) / scale;
            rep.max_direct_residual = std::max(rep.max_direct_residual, res);
            if (res > tol) direct_ok = false;
        }

        // bidegree diagnostic of the recovered parts: S(z,le) = l S,
        // Q(z,le) = conj(l) Q
        Complex lambda(rng.next_range(0.5, 1.5), rng.next_range(-0.8, 0.8));
        EvalPoint q = p;
        for (auto& e : q.eta) e *= lambda;
        ProjectiveFactor f0 = rep.factors.back();
        ctx.set_point(q);
        ProjectiveFactor f1 = recover_projective_factor(sa, sb, ctx);
        double h = std::abs(f1.s - lambda * f0.s) / (1.0 + std::abs(f1.s));
        h = std::max(h, std::abs(f1.q - std::conj(lambda) * f0.q) / (1.0 + std::abs(f1.q)));
        rep.homogeneity_residual = std::max(rep.homogeneity_residual, h);
    }

    if (rep.homogeneity_residual > 1e3 * tol) {
        rep.verdict = Relatedness::Inconclusive;
        rep.paths_agree = true;
        return rep;
    }
    rep.paths_agree = spray_ok == direct_ok;
    rep.verdict = spray_ok ? Relatedness::Related : Relatedness::NotRelated;
    return rep;
}

SyntheticChange synthetic_change(const SprayData& base, Expr p,
                                 const std::vector<EvalPoint>& check_points, double tol) {
    const int n = base.n();
    // (1,0)-homogeneity: P_k eta^k = P
    Expr euler = -p;
    for (int k = 1; k <= n; ++k) euler = euler + d(p, VarKind::Eta, k) * Expr::eta(k);
    EvalContext ctx;
    for (const EvalPoint& q : check_points) {
        ctx.set_point(q);
        double r = std::abs(ctx.value(euler));
        if (r > tol * (1.0 + std::abs(ctx.value(p)))) {
            throw HomogeneityError("projective factor is not (1,0)-homogeneous (residual " +
                                   std::to_string(r) + ")");
        }
    }

    Expr q_part = Expr::zero();
    for (int k = 1; k <= n; ++k) {
        q_part = q_part - 2.0 * d(p, VarKind::EtaBar, k) * Expr::etabar(k);
    }

    std::vector<Field> g, t;
    for (int i = 1; i <= n; ++i) {
        g.push_back(base.spray(i) + Field::from_expr(p * Expr::eta(i)));
        t.push_back(base.theta(i) + Field::from_expr(q_part * Expr::eta(i)));
    }
    return {SprayData(n, std::move(g), std::move(t)), p, q_part};
}

ChangeDiagnostics change_diagnostics(const SprayData& base, Expr p) {
    const int n = base.n();
    Field pf = Field::from_expr(p);
    std::vector<Field> pk(n), pk_cov(n);  // P_k and P_{k|h} per h below
    for (int k = 1; k <= n; ++k) pk[k - 1] = Field::from_expr(d(p, VarKind::Eta, k));

    auto gamma = [&](int i, int j, int k) {
        std::vector<Var> v{ve(j), ve(k)};
        return base.spray_jet(i, v);
    };

    // P_{k|h} = delta_h P_k - P_l G^l_{kh}
    auto cov_pk = [&](int k, int h) {
        Field acc = base.delta_can(pk[k - 1], h);
        for (int l = 1; l <= n; ++l) acc -= pk[l - 1] * gamma(l, k, h);
        return acc;
    };

    ChangeDiagnostics out;
    out.x_kh = FieldTensor(n, {kDownP, kDownP});
    out.x_h.resize(n);
    out.x_k0.resize(n);
    for (int k = 1; k <= n; ++k) {
        out.x_h[k - 1] = base.delta_can(pf, k) - pf * pk[k - 1];
        for (int h = 1; h <= n; ++h) out.x_kh.at({k, h}) = cov_pk(k, h) - cov_pk(h, k);
    }
    for (int k = 1; k <= n; ++k) {
        Field acc;
        for (int j = 1; j <= n; ++j) acc += out.x_kh.at({k, j}) * Expr::eta(j);
        out.x_k0[k - 1] = acc;
    }
    return out;
}

FieldTensor berwald_k3(const SprayData& s) {
    const int n = s.n();
    FieldTensor k3(n, {kUpP, kDownP, kDownP});
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= n; ++k)
            for (int h = 1; h <= n; ++h)
                k3.at({i, k, h}) =
                    s.delta_can(s.canonical_n(i, k), h) - s.delta_can(s.canonical_n(i, h), k);
    return k3;
}

FieldTensor berwald_k4(const SprayData& s) {
    const int n = s.n();
    auto gamma = [&](int i, int j, int k) {
        std::vector<Var> v{ve(j), ve(k)};
        return s.spray_jet(i, v);
    };
    FieldTensor k4(n, {kUpP, kDownP, kDownP, kDownP});
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int h = 1; h <= n; ++h) {
                    Field acc = s.delta_can(gamma(i, j, k), h) - s.delta_can(gamma(i, j, h), k);
                    for (int l = 1; l <= n; ++l) {
                        acc += gamma(l, j, k) * gamma(i, l, h);
                        acc -= gamma(l, j, h) * gamma(i, l, k);
                    }
                    k4.at({i, j, k, h}) = acc;
                }
    return k4;
}

double curvature_change_law_residual(const SprayData& base, const SyntheticChange& chg,
                                     EvalContext& ctx) {
    const int n = base.n();
    FieldTensor k_base = berwald_k4(base);
    FieldTensor k_tilde = berwald_k4(chg.data);
    ChangeDiagnostics x = change_diagnostics(base, chg.p);

    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    double worst = 0;
    const auto& eta = ctx.point().eta;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int h = 1; h <= n; ++h) {
                    Complex lhs = ctx.value(k_tilde.at({i, j, k, h})) - ctx.value(k_base.at({i, j, k, h}));
                    Complex rhs = ctx.value(d(x.x_kh.at({k, h}), VarKind::Eta, j)) * eta[i - 1];
                    rhs += ctx.value(x.x_kh.at({k, h})) * delta(i, j);
                    rhs += ctx.value(d(x.x_h[h - 1], VarKind::Eta, j)) * delta(i, k);
                    rhs -= ctx.value(d(x.x_h[k - 1], VarKind::Eta, j)) * delta(i, h);
                    double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
                    worst = std::max(worst, std::abs(lhs - rhs) / scale);
                }
    return worst;
}

}  // namespace cfin
