#include "cfin/projective.hpp"

namespace cfin {

namespace {
const Slot kUpP{Variance::Up, BarType::Plain};
const Slot kDownP{Variance::Down, BarType::Plain};
const Slot kDownB{Variance::Down, BarType::Barred};

Var ve(int k) { return {VarKind::Eta, k}; }
Var vb(int k) { return {VarKind::EtaBar, k}; }
}  // namespace

std::vector<Field> douglas_spray(const SprayData& s) {
    const int n = s.n();
    Field tr_n = s.trace_n();
    Field tr_theta = s.theta_trace_jet({});
    std::vector<Field> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) {
        Expr eta_i = Expr::eta(i);
        Field di = s.spray(i) - tr_n * (Expr::constant(1.0 / (n + 1)) * eta_i) -
                   (s.theta(i) - tr_theta * (Expr::constant(1.0 / n) * eta_i)) * Expr::constant(0.5);
        out.push_back(di);
    }
    return out;
}

DouglasBundle build_douglas(const SprayData& s, bool weakly_kahler_shortcut) {
    const int n = s.n();
    const Expr cn1 = Expr::constant(1.0 / (n + 1));
    const Expr cn = Expr::constant(1.0 / n);
    const Expr half = Expr::constant(0.5);

    DouglasBundle b;
    b.d = douglas_spray(s);
    b.d_hv = FieldTensor(n, {kUpP, kDownP, kDownP, kDownP});
    b.d_barvbar = FieldTensor(n, {kUpP, kDownP, kDownB, kDownB});
    b.d_mixedv = FieldTensor(n, {kUpP, kDownP, kDownB, kDownP});

    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

    for (int i = 1; i <= n; ++i) {
        Expr eta_i = Expr::eta(i);
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                for (int h = 1; h <= n; ++h) {
                    // ----- D^i_{jkh}
                    {
                        std::vector<Var> jkh{ve(j), ve(k), ve(h)};
                        std::vector<Var> jh{ve(j), ve(h)}, kj{ve(k), ve(j)}, hk{ve(h), ve(k)};
                        Field val = s.spray_jet(i, jkh);
                        Field ricci = s.spray_trace_jet(jkh) * eta_i;
                        ricci += s.spray_trace_jet(jh) * Expr::constant(delta(i, k));
                        ricci += s.spray_trace_jet(kj) * Expr::constant(delta(i, h));
                        ricci += s.spray_trace_jet(hk) * Expr::constant(delta(i, j));
                        val -= ricci * cn1;
                        if (!weakly_kahler_shortcut) {
                            Field th = s.theta_jet(i, jkh);
                            Field tr = s.theta_trace_jet(jkh) * eta_i;
                            tr += s.theta_trace_jet(jh) * Expr::constant(delta(i, k));
                            tr += s.theta_trace_jet(kj) * Expr::constant(delta(i, h));
                            tr += s.theta_trace_jet(hk) * Expr::constant(delta(i, j));
                            val -= (th - tr * cn) * half;
                        }
                        b.d_hv.at({i, j, k, h}) = val;
                    }
                    // ----- D^i_{j kbar hbar}
                    {
                        std::vector<Var> jkh{ve(j), vb(k), vb(h)};
                        std::vector<Var> kh{vb(k), vb(h)};
                        Field val = s.spray_jet(i, jkh);
                        Field ricci = s.spray_trace_jet(jkh) * eta_i;
                        ricci += s.spray_trace_jet(kh) * Expr::constant(delta(i, j));
                        val -= ricci * cn1;
                        if (!weakly_kahler_shortcut) {
                            Field th = s.theta_jet(i, jkh);
                            Field tr = s.theta_trace_jet(jkh) * eta_i;
                            tr += s.theta_trace_jet(kh) * Expr::constant(delta(i, j));
                            val -= (th - tr * cn) * half;
                        }
                        b.d_barvbar.at({i, j, k, h}) = val;
                    }
                    // ----- D^i_{j kbar h}
                    {
                        std::vector<Var> jkh{ve(j), vb(k), ve(h)};
                        std::vector<Var> kj{vb(k), ve(j)}, kh{vb(k), ve(h)};
                        Field val = s.spray_jet(i, jkh);
                        Field ricci = s.spray_trace_jet(jkh) * eta_i;
                        ricci += s.spray_trace_jet(kj) * Expr::constant(delta(i, h));
                        ricci += s.spray_trace_jet(kh) * Expr::constant(delta(i, j));
                        val -= ricci * cn1;
                        if (!weakly_kahler_shortcut) {
                            Field th = s.theta_jet(i, jkh);
                            Field tr = s.theta_trace_jet(jkh) * eta_i;
                            tr += s.theta_trace_jet(kj) * Expr::constant(delta(i, h));
                            tr += s.theta_trace_jet(kh) * Expr::constant(delta(i, j));
                            val -= (th - tr * cn) * half;
                        }
                        b.d_mixedv.at({i, j, k, h}) = val;
                    }
                }
            }
        }
    }
    return b;
}

std::array<FieldTensor, 3> douglas_via_jets(const SprayData& s) {
    const int n = s.n();
    std::vector<Field> d = douglas_spray(s);
    FieldTensor hv(n, {kUpP, kDownP, kDownP, kDownP});
    FieldTensor bb(n, {kUpP, kDownP, kDownB, kDownB});
    FieldTensor mx(n, {kUpP, kDownP, kDownB, kDownP});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            Field dj = d[i - 1].derivative(ve(j));
            for (int k = 1; k <= n; ++k) {
                Field djk = dj.derivative(ve(k));
                Field djkb = dj.derivative(vb(k));
                for (int h = 1; h <= n; ++h) {
                    hv.at({i, j, k, h}) = djk.derivative(ve(h));
                    bb.at({i, j, k, h}) = djkb.derivative(vb(h));
                    mx.at({i, j, k, h}) = djkb.derivative(ve(h));
                }
            }
        }
    }
    return {std::move(hv), std::move(bb), std::move(mx)};
}

std::array<FieldTensor, 3> douglas_theta_conditions(const SprayData& s) {
    const int n = s.n();
    const Expr cn = Expr::constant(1.0 / n);
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

    FieldTensor hv(n, {kUpP, kDownP, kDownP, kDownP});
    FieldTensor bb(n, {kUpP, kDownP, kDownB, kDownB});
    FieldTensor mx(n, {kUpP, kDownP, kDownB, kDownP});
    for (int i = 1; i <= n; ++i) {
        Expr eta_i = Expr::eta(i);
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                for (int h = 1; h <= n; ++h) {
                    {
                        std::vector<Var> jkh{ve(j), ve(k), ve(h)};
                        std::vector<Var> jh{ve(j), ve(h)}, kj{ve(k), ve(j)}, hk{ve(h), ve(k)};
                        Field rhs = s.theta_trace_jet(jkh) * eta_i;
                        rhs += s.theta_trace_jet(jh) * Expr::constant(delta(i, k));
                        rhs += s.theta_trace_jet(kj) * Expr::constant(delta(i, h));
                        rhs += s.theta_trace_jet(hk) * Expr::constant(delta(i, j));
                        hv.at({i, j, k, h}) = s.theta_jet(i, jkh) - rhs * cn;
                    }
                    {
                        std::vector<Var> jkh{ve(j), vb(k), vb(h)};
                        std::vector<Var> kh{vb(k), vb(h)};
                        Field rhs = s.theta_trace_jet(jkh) * eta_i;
                        rhs += s.theta_trace_jet(kh) * Expr::constant(delta(i, j));
                        bb.at({i, j, k, h}) = s.theta_jet(i, jkh) - rhs * cn;
                    }
                    {
                        std::vector<Var> jkh{ve(j), vb(k), ve(h)};
                        std::vector<Var> kj{vb(k), ve(j)}, kh{vb(k), ve(h)};
                        Field rhs = s.theta_trace_jet(jkh) * eta_i;
                        rhs += s.theta_trace_jet(kj) * Expr::constant(delta(i, h));
                        rhs += s.theta_trace_jet(kh) * Expr::constant(delta(i, j));
                        mx.at({i, j, k, h}) = s.theta_jet(i, jkh) - rhs * cn;
                    }
                }
            }
        }
    }
    return {std::move(hv), std::move(bb), std::move(mx)};
}

WeylBundle build_weyl(const SprayData& s) {
    const int n = s.n();
    if (n < 2) throw ScopeError("Weyl invariants need complex dimension n >= 2");
    const Expr cn1 = Expr::constant(1.0 / (n + 1));
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

    // K^i_{kh} and K^i_{jkh} of the Berwald connection attached to this spray
    FieldTensor k3(n, {kUpP, kDownP, kDownP});
    FieldTensor k4(n, {kUpP, kDownP, kDownP, kDownP});
    for (int i = 1; i <= n; ++i) {
        for (int k = 1; k <= n; ++k) {
            for (int h = 1; h <= n; ++h) {
                k3.at({i, k, h}) =
                    s.delta_can(s.canonical_n(i, k), h) - s.delta_can(s.canonical_n(i, h), k);
            }
        }
    }
    auto gamma = [&](int i, int j, int k) {
        std::vector<Var> v{ve(j), ve(k)};
        return s.spray_jet(i, v);
    };
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

    // Ricci tensors H_{jk} = K^i_{jki}, H_k = (n H_{0k} + H_{k0})/(n-1)
    FieldTensor hm = k4.trace(0, 3);
    std::vector<Field> hvec(n);
    for (int k = 1; k <= n; ++k) {
        Field h0k, hk0;
        for (int j = 1; j <= n; ++j) {
            h0k += hm.at({j, k}) * Expr::eta(j);
            hk0 += hm.at({k, j}) * Expr::eta(j);
        }
        hvec[k - 1] = (h0k * Expr::constant(double(n)) + hk0) * Expr::constant(1.0 / (n - 1));
    }

    WeylBundle w;
    w.w3 = FieldTensor(n, {kUpP, kDownP, kDownP});
    w.w4 = FieldTensor(n, {kUpP, kDownP, kDownP, kDownP});
    for (int i = 1; i <= n; ++i) {
        Expr eta_i = Expr::eta(i);
        for (int k = 1; k <= n; ++k) {
            for (int h = 1; h <= n; ++h) {
                Field hkh_alt = hm.at({k, h}) - hm.at({h, k});
                Field corr = hkh_alt * eta_i;
                corr += hvec[h - 1] * Expr::constant(delta(i, k));
                corr -= hvec[k - 1] * Expr::constant(delta(i, h));
                w.w3.at({i, k, h}) = k3.at({i, k, h}) + corr * cn1;

                for (int j = 1; j <= n; ++j) {
                    Field corr4 = hkh_alt.derivative(ve(j)) * eta_i;
                    corr4 += hkh_alt * Expr::constant(delta(i, j));
                    corr4 += hvec[h - 1].derivative(ve(j)) * Expr::constant(delta(i, k));
                    corr4 -= hvec[k - 1].derivative(ve(j)) * Expr::constant(delta(i, h));
                    w.w4.at({i, j, k, h}) = k4.at({i, j, k, h}) + corr4 * cn1;
                }
            }
        }
    }
    return w;
}

bool is_complex_berwald(const CurvatureBundle& curv, const std::vector<EvalPoint>& points,
                        double tol) {
    const ConnectionBundle& conn = curv.connections();
    // eta-independence of L^i_{jk}, assembled once
    std::vector<Field> l_vertical;
    for (int i = 1; i <= conn.n(); ++i)
        for (int j = 1; j <= conn.n(); ++j)
            for (int k = 1; k <= conn.n(); ++k)
                for (int r = 1; r <= conn.n(); ++r) {
                    l_vertical.push_back(d(conn.chern_l().at({i, j, k}), VarKind::Eta, r));
                    l_vertical.push_back(d(conn.chern_l().at({i, j, k}), VarKind::EtaBar, r));
                }
    EvalContext ctx;
    for (const EvalPoint& p : points) {
        ctx.set_point(p);
        auto kc = conn.kahler_class(ctx, tol);
        double gate = tol * (1.0 + kc.scale);
        if (!kc.is_kahler) return false;
        if (conn.berwald_gamma_mixed().max_abs(ctx) > gate) return false;
        double vert = 0;
        for (const Field& f : l_vertical) vert = std::max(vert, std::abs(ctx.value(f)));
        if (vert > gate) return false;
    }
    return true;
}

FieldTensor weyl_berwald_invariant(const CurvatureBundle& curv,
                                   const std::vector<EvalPoint>& gate_points, double tol) {
    if (!is_complex_berwald(curv, gate_points, tol)) {
        throw ScopeError("the hhbar Weyl invariant is defined only for complex Berwald metrics");
    }
    const int n = curv.n();
    const Expr cn1 = Expr::constant(1.0 / (n + 1));
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

    FieldTensor w(n, {kUpP, kDownP, kDownB, kDownP});
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int h = 1; h <= n; ++h) {
                    Field corr = curv.ricci_k_mixed().at({k, j}) * Expr::constant(delta(i, h));
                    corr += curv.ricci_k_mixed().at({k, h}) * Expr::constant(delta(i, j));
                    w.at({i, j, k, h}) = curv.k_mixed().at({i, j, k, h}) - corr * cn1;
                }
    return w;
}

BerwaldWeylCheck berwald_weyl_check(const CurvatureBundle& curv, const FieldTensor& w_berwald,
                                    EvalContext& ctx) {
    const int n = curv.n();
    const FinslerMetric& m = curv.connections().metric();
    BerwaldWeylCheck out;
    out.kf = ctx.value(curv.holomorphic_curvature()).real();
    out.w_max = w_berwald.max_abs(ctx);
    out.scale = 1.0 + curv.k_lowered().max_abs(ctx);

    double worst = 0;
    for (int mm = 1; mm <= n; ++mm)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int h = 1; h <= n; ++h) {
                    Complex lhs = ctx.value(curv.k_lowered().at({mm, j, k, h}));
                    Complex rhs = (out.kf / 4.0) * (ctx.value(m.g(j, k)) * ctx.value(m.g(h, mm)) +
                                                    ctx.value(m.g(h, k)) * ctx.value(m.g(j, mm)));
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
    out.identity_residual = worst / out.scale;
    return out;
}

}  // namespace cfin
