#include "cfin/classification.hpp"

#include "cfin/catalog.hpp"

namespace cfin {

namespace {

// companion eta for the paired probe of eta-independence
std::vector<Complex> probe_eta(int n, uint64_t salt) {
    Rng rng(0x9d2c5680u ^ salt);
    std::vector<Complex> eta(n);
    for (int k = 0; k < n; ++k) {
        double rho = rng.next_range(0.15, 1.0);
        double phi = rng.next_range(0.0, 6.283185307179586);
        eta[k] = Complex(rho * std::cos(phi), rho * std::sin(phi));
    }
    return eta;
}

}  // namespace

ClassificationReport classify(const FinslerMetric& m, const std::vector<EvalPoint>& points,
                              double tol) {
    if (points.empty()) throw std::invalid_argument("classify: no points");
    const int n = m.n();
    ConnectionBundle conn(m);
    CurvatureBundle curv(conn);
    SprayData spray = SprayData::of_metric(conn);
    DouglasBundle douglas = build_douglas(spray);
    auto theta_conditions = douglas_theta_conditions(spray);

    // spray-form residual of projective flatness: G^i - (dL/dz^k eta^k) eta^i / (2L)
    std::vector<Field> flat_residual(n);
    {
        Expr pulled = Expr::zero();
        for (int k = 1; k <= n; ++k) pulled = pulled + d(m.L(), VarKind::Z, k) * Expr::eta(k);
        for (int i = 1; i <= n; ++i) {
            flat_residual[i - 1] =
                conn.spray().at({i}) -
                Field::from_expr(pulled * Expr::eta(i) / (Expr::constant(2.0) * m.L()));
        }
    }

    // vertical variation of L^i_{jk}, assembled once
    std::vector<Field> l_vertical;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int r = 1; r <= n; ++r) {
                    l_vertical.push_back(d(conn.chern_l().at({i, j, k}), VarKind::Eta, r));
                    l_vertical.push_back(d(conn.chern_l().at({i, j, k}), VarKind::EtaBar, r));
                }

    ClassificationReport rep;
    rep.label = m.label();
    rep.n = n;
    rep.tolerance = tol;

    bool ph = true, sk = true, ka = true, wk = true, gb = true, lv = true;
    bool dg = true, dt = true, mink = true, flat = true;
    double kf_sum = 0, kf_sq = 0;

    EvalContext ctx;
    EvalContext probe_ctx;
    uint64_t salt = 0;
    for (const EvalPoint& p : points) {
        ctx.set_point(p);
        PredicatePoint pp;
        pp.point = p;

        auto kc = conn.kahler_class(ctx, tol);
        pp.scale = kc.scale;
        pp.strongly_kahler = kc.strongly;
        pp.kahler = kc.kahler;
        pp.weakly_kahler = kc.weakly;
        pp.purely_hermitian = kc.purely_hermitian;
        pp.min_eigenvalue = ctx.min_eigenvalue(*m.hessian());

        double gate = tol * (1.0 + pp.scale);

        // generalized Berwald: the mixed Berwald coefficients plus a direct
        // eta-variation probe of G^i_{jk} at the same z
        pp.generalized_berwald = conn.berwald_gamma_mixed().max_abs(ctx);
        {
            EvalPoint q(p.z, probe_eta(n, salt++));
            probe_ctx.set_point(q);
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    for (int k = 1; k <= n; ++k) {
                        Complex a = ctx.value(conn.berwald_gamma().at({i, j, k}));
                        Complex b = probe_ctx.value(conn.berwald_gamma().at({i, j, k}));
                        pp.generalized_berwald = std::max(pp.generalized_berwald, std::abs(a - b));
                    }
        }

        for (const Field& f : l_vertical) {
            pp.berwald_l_vertical = std::max(pp.berwald_l_vertical, std::abs(ctx.value(f)));
        }

        pp.douglas_invariants = std::max({douglas.d_hv.max_abs(ctx), douglas.d_barvbar.max_abs(ctx),
                                          douglas.d_mixedv.max_abs(ctx)});
        pp.douglas_theta = std::max({theta_conditions[0].max_abs(ctx),
                                     theta_conditions[1].max_abs(ctx),
                                     theta_conditions[2].max_abs(ctx)});

        for (int i = 1; i <= n; ++i) {
            pp.locally_minkowski = std::max(pp.locally_minkowski, std::abs(ctx.value(conn.spray().at({i}))));
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    pp.locally_minkowski = std::max(
                        pp.locally_minkowski, std::abs(ctx.value(d(m.g(i, j), VarKind::Z, k))));
        }

        double gnorm = 0;
        for (int i = 1; i <= n; ++i) gnorm = std::max(gnorm, std::abs(ctx.value(conn.spray().at({i}))));
        for (int i = 1; i <= n; ++i) {
            pp.projectively_flat =
                std::max(pp.projectively_flat,
                         std::abs(ctx.value(flat_residual[i - 1])) / (1.0 + gnorm));
        }

        pp.theta_identity = conn.theta_derivative_identity_residual(ctx);
        pp.kf = curv.holomorphic_curvature_at(ctx);
        kf_sum += pp.kf;
        kf_sq += pp.kf * pp.kf;

        ph &= pp.purely_hermitian <= gate;
        sk &= pp.strongly_kahler <= gate;
        ka &= pp.kahler <= gate;
        wk &= pp.weakly_kahler <= gate;
        gb &= pp.generalized_berwald <= gate;
        lv &= pp.berwald_l_vertical <= gate;
        dg &= pp.douglas_invariants <= gate;
        dt &= pp.douglas_theta <= gate;
        mink &= pp.locally_minkowski <= gate;
        flat &= pp.projectively_flat <= tol;

        rep.points.push_back(std::move(pp));
    }

    rep.purely_hermitian = ph;
    rep.strongly_kahler = sk;
    rep.kahler = ka;
    rep.weakly_kahler = wk;
    rep.generalized_berwald = gb;
    rep.complex_berwald = ka && gb && lv;
    rep.douglas = dg;
    rep.douglas_via_berwald_route = gb && dt;
    rep.locally_minkowski = mink;
    rep.projectively_flat = wk && flat;

    const double npts = double(points.size());
    double mean = kf_sum / npts;
    double var = kf_sq / npts - mean * mean;
    rep.kf_variance = std::max(0.0, var);
    rep.has_constant_kf = rep.kf_variance <= 1e-6 * (1.0 + std::abs(mean));
    rep.constant_kf = mean;

    // implication lattice; violations are engine bugs, not metric properties
    auto implies = [](bool a, bool b) { return !a || b; };
    bool lattice = true;
    lattice &= implies(rep.strongly_kahler, rep.kahler);
    lattice &= implies(rep.kahler, rep.weakly_kahler);
    lattice &= implies(rep.complex_berwald, rep.generalized_berwald && rep.kahler);
    lattice &= implies(rep.complex_berwald, rep.douglas);
    lattice &= implies(rep.weakly_kahler && rep.generalized_berwald, rep.complex_berwald);
    lattice &= implies(rep.weakly_kahler && rep.douglas, rep.complex_berwald);
    rep.lattice_ok = lattice;
    rep.theorem_checks.push_back({"implication_lattice", lattice, ""});

    rep.theorem_checks.push_back(
        {"douglas_dual_route", rep.douglas == rep.douglas_via_berwald_route,
         rep.douglas == rep.douglas_via_berwald_route
             ? ""
             : "invariant route and berwald route disagree"});

    {
        bool pass = true;
        std::string detail;
        if (rep.generalized_berwald && rep.projectively_flat) {
            pass = rep.has_constant_kf;
            if (pass && std::abs(rep.constant_kf) > tol) pass = rep.purely_hermitian;
            if (!pass) detail = "flat generalized Berwald metric without the constancy dichotomy";
        }
        rep.theorem_checks.push_back({"flat_berwald_constant_curvature", pass, detail});
    }

    if (rep.complex_berwald) {
        // Weyl dichotomy: W^i_{j kbar h} = 0 iff the quarter-curvature
        // identity holds, at every sampled point
        FieldTensor w = weyl_berwald_invariant(curv, points, tol);
        bool pass = true;
        for (const EvalPoint& p : points) {
            ctx.set_point(p);
            auto chk = berwald_weyl_check(curv, w, ctx);
            bool w_zero = chk.w_max <= tol * chk.scale;
            bool id_zero = chk.identity_residual <= 10 * tol;
            if (w_zero != id_zero) pass = false;
        }
        rep.theorem_checks.push_back({"berwald_weyl_dichotomy", pass, ""});
    }

    return rep;
}

FlatnessReport projectively_flat_test(const ConnectionBundle& conn,
                                      const std::vector<EvalPoint>& points, double tol,
                                      bool corroborate_with_flat_pair) {
    const FinslerMetric& m = conn.metric();
    const int n = m.n();
    Expr pulled = Expr::zero();
    for (int k = 1; k <= n; ++k) pulled = pulled + d(m.L(), VarKind::Z, k) * Expr::eta(k);

    FlatnessReport rep;
    rep.weakly_kahler = true;
    EvalContext ctx;
    for (const EvalPoint& p : points) {
        ctx.set_point(p);
        auto kc = conn.kahler_class(ctx, tol);
        rep.weakly_kahler &= kc.is_weakly;
        double gnorm = 0;
        for (int i = 1; i <= n; ++i) gnorm = std::max(gnorm, std::abs(ctx.value(conn.spray().at({i}))));
        for (int i = 1; i <= n; ++i) {
            Complex g = ctx.value(conn.spray().at({i}));
            Complex form = ctx.value(pulled) * p.eta[i - 1] / (2.0 * ctx.value(m.L()));
            rep.max_residual = std::max(rep.max_residual, std::abs(g - form) / (1.0 + gnorm));
        }
    }
    rep.flat = rep.weakly_kahler && rep.max_residual <= tol;

    if (corroborate_with_flat_pair) {
        ConnectionBundle flat(make_euclidean(n));
        rep.pair_verdict = projective_relatedness_test(conn, flat, points, tol).verdict;
    }
    return rep;
}

RhoFamilyReport rho_family_check(const FinslerMetric& m, Expr rho,
                                 const std::vector<EvalPoint>& points, double tol) {
    const int n = m.n();
    const uint8_t position_only = var_kind_bit(VarKind::Z) | var_kind_bit(VarKind::ZBar);
    if (!rho.uses_only(position_only)) {
        throw std::invalid_argument("rho_family_check: rho must depend on z only");
    }
    ConnectionBundle conn(m);
    CurvatureBundle curv(conn);

    std::vector<Expr> rho_r(n);
    for (int r = 1; r <= n; ++r) rho_r[r - 1] = d(rho, VarKind::Z, r);
    auto rho_rh = [&](int r, int h) { return d(rho_r[r - 1], VarKind::ZBar, h); };

    Expr rho_eta = Expr::zero();
    for (int r = 1; r <= n; ++r) rho_eta = rho_eta + rho_r[r - 1] * Expr::eta(r);

    RhoFamilyReport rep;
    rep.min_rho_eigenvalue = std::numeric_limits<double>::infinity();
    EvalContext ctx;
    double kf_sum = 0, kf_sq = 0;
    for (const EvalPoint& p : points) {
        ctx.set_point(p);

        double gnorm = 0;
        for (int i = 1; i <= n; ++i) gnorm = std::max(gnorm, std::abs(ctx.value(conn.spray().at({i}))));
        for (int i = 1; i <= n; ++i) {
            Complex g = ctx.value(conn.spray().at({i}));
            Complex form = ctx.value(rho_eta) * p.eta[i - 1];
            rep.spray_residual = std::max(rep.spray_residual, std::abs(g - form) / (1.0 + gnorm));
        }

        Eigen::MatrixXcd rh(n, n);
        for (int r = 1; r <= n; ++r) {
            for (int h = 1; h <= n; ++h) {
                rh(r - 1, h - 1) = ctx.value(rho_rh(r, h));
                for (int k = 1; k <= n; ++k) {
                    Complex lhs = ctx.value(d(rho_rh(r, h), VarKind::Z, k));
                    Complex rhs = ctx.value(rho_r[r - 1]) * ctx.value(rho_rh(k, h)) +
                                  ctx.value(rho_r[k - 1]) * ctx.value(rho_rh(r, h));
                    rep.pde_residual = std::max(rep.pde_residual, std::abs(lhs - rhs));
                }
            }
        }
        rep.hermitian_residual =
            std::max(rep.hermitian_residual, (rh - rh.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rh);
        rep.min_rho_eigenvalue =
            std::min(rep.min_rho_eigenvalue, es.eigenvalues().cwiseAbs().minCoeff());

        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k) {
                    Complex lhs = ctx.value(conn.chern_l().at({i, j, k}));
                    Complex rhs = (i == j ? ctx.value(rho_r[k - 1]) : Complex(0, 0)) +
                                  (i == k ? ctx.value(rho_r[j - 1]) : Complex(0, 0));
                    rep.connection_residual =
                        std::max(rep.connection_residual, std::abs(lhs - rhs));
                }

        double kf = curv.holomorphic_curvature_at(ctx);
        kf_sum += kf;
        kf_sq += kf * kf;
        Complex form(0, 0);
        for (int r = 1; r <= n; ++r)
            for (int h = 1; h <= n; ++h)
                form += rh(r - 1, h - 1) * p.eta[r - 1] * std::conj(p.eta[h - 1]);
        Complex kf_form = -4.0 * form / ctx.value(m.L());
        rep.kf_residual = std::max(rep.kf_residual, std::abs(kf - kf_form) / (1.0 + std::abs(kf)));
    }

    const double npts = double(points.size());
    rep.kf_mean = kf_sum / npts;
    double var = std::max(0.0, kf_sq / npts - rep.kf_mean * rep.kf_mean);
    rep.kf_constant = var <= 1e-6 * (1.0 + std::abs(rep.kf_mean));

    rep.pass = rep.spray_residual <= tol && rep.pde_residual <= tol &&
               rep.connection_residual <= tol && rep.kf_residual <= tol &&
               rep.hermitian_residual <= tol && rep.kf_constant;
    return rep;
}

}  // namespace cfin
