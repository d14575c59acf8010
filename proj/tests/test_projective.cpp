#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfin/catalog.hpp"
#include "cfin/projective.hpp"

using namespace cfin;

namespace {

std::vector<EvalPoint> pts(int n, int count, uint64_t seed, double radius = 0.5) {
    SamplingConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    cfg.z_radius = radius;
    return sample_points(n, cfg);
}

double max_abs(const std::vector<Field>& v, EvalContext& ctx) {
    double m = 0;
    for (const auto& f : v) m = std::max(m, std::abs(ctx.value(f)));
    return m;
}

}  // namespace

TEST_CASE("projective spray D vanishes on the flat metric and the disc") {
    EvalContext ctx;

    SprayData se = SprayData::of_metric(ConnectionBundle(make_euclidean(2)));
    ctx.set_point(EvalPoint({0.2, -0.1}, {1.0, Complex(0, 1)}));
    CHECK(max_abs(douglas_spray(se), ctx) < 1e-14);

    // disc n=1 at z=0.5: D = G - N/2 eta = 2/3 - (1/2)(4/3) = 0
    SprayData sb = SprayData::of_metric(ConnectionBundle(make_bergman(1)));
    ctx.set_point(EvalPoint({0.5}, {1.0}));
    CHECK(std::abs(ctx.value(sb.spray(1)) - Complex(2.0 / 3.0, 0)) < 1e-13);
    CHECK(max_abs(douglas_spray(sb), ctx) < 1e-13);
}

TEST_CASE("Douglas tensors vanish on the complex Berwald catalog members") {
    for (auto& m : {make_euclidean(2), make_bergman(2), make_quartic(0.1)}) {
        SprayData s = SprayData::of_metric(ConnectionBundle(m));
        DouglasBundle b = build_douglas(s);
        EvalContext ctx;
        for (const auto& p : pts(2, 8, 11, 0.55)) {
            ctx.set_point(p);
            INFO(m.label());
            CHECK(b.d_hv.max_abs(ctx) < 1e-9);
            CHECK(b.d_barvbar.max_abs(ctx) < 1e-9);
            CHECK(b.d_mixedv.max_abs(ctx) < 1e-9);
        }
    }
    // bergman n=1 as well
    SprayData s1 = SprayData::of_metric(ConnectionBundle(make_bergman(1)));
    DouglasBundle b1 = build_douglas(s1);
    EvalContext ctx;
    for (const auto& p : pts(1, 8, 13, 0.7)) {
        ctx.set_point(p);
        CHECK(b1.d_hv.max_abs(ctx) < 1e-10);
        CHECK(b1.d_barvbar.max_abs(ctx) < 1e-10);
        CHECK(b1.d_mixedv.max_abs(ctx) < 1e-10);
    }
}

TEST_CASE("literal assembly equals raw vertical jets of D") {
    for (auto& m : {make_bergman(2), make_conformal()}) {
        SprayData s = SprayData::of_metric(ConnectionBundle(m));
        DouglasBundle b = build_douglas(s);
        auto jets = douglas_via_jets(s);
        EvalContext ctx;
        for (const auto& p : pts(2, 10, 17, 0.5)) {
            ctx.set_point(p);
            const FieldTensor* lit[3] = {&b.d_hv, &b.d_barvbar, &b.d_mixedv};
            for (int t = 0; t < 3; ++t) {
                double scale = 1.0 + lit[t]->max_abs(ctx);
                for (int i = 1; i <= 2; ++i)
                    for (int j = 1; j <= 2; ++j)
                        for (int k = 1; k <= 2; ++k)
                            for (int h = 1; h <= 2; ++h) {
                                Complex a = ctx.value(lit[t]->at({i, j, k, h}));
                                Complex c = ctx.value(jets[t].at({i, j, k, h}));
                                INFO(m.label() << " tensor " << t);
                                CHECK(std::abs(a - c) <= 1e-9 * scale);
                            }
            }
        }
    }
}

TEST_CASE("conformal metric: Douglas without weak Kaehler") {
    // purely Hermitian metrics are always Douglas (eta-linear connection,
    // (1,1)-bilinear theta^*), yet the conformal one is not weakly Kaehler;
    // it separates the two classes.
    ConnectionBundle conn(make_conformal());
    SprayData s = SprayData::of_metric(conn);
    DouglasBundle b = build_douglas(s);
    EvalContext ctx;
    ctx.set_point(EvalPoint({0.5, 0.0}, {1.0, 1.0}));
    double total = b.d_hv.max_abs(ctx) + b.d_barvbar.max_abs(ctx) + b.d_mixedv.max_abs(ctx);
    CHECK(total < 1e-12);
    CHECK(conn.theta_star().max_abs(ctx) > 0.1);
}

TEST_CASE("weakly Kaehler shortcut agrees where it applies") {
    SprayData s = SprayData::of_metric(ConnectionBundle(make_bergman(2)));
    DouglasBundle full = build_douglas(s, false);
    DouglasBundle fast = build_douglas(s, true);
    EvalContext ctx;
    for (const auto& p : pts(2, 6, 23, 0.55)) {
        ctx.set_point(p);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (int k = 1; k <= 2; ++k)
                    for (int h = 1; h <= 2; ++h) {
                        CHECK(std::abs(ctx.value(full.d_hv.at({i, j, k, h})) -
                                       ctx.value(fast.d_hv.at({i, j, k, h}))) < 1e-10);
                        CHECK(std::abs(ctx.value(full.d_mixedv.at({i, j, k, h})) -
                                       ctx.value(fast.d_mixedv.at({i, j, k, h}))) < 1e-10);
                    }
    }
}

TEST_CASE("D is (2,0)-homogeneous exactly on the weakly Kaehler class") {
    EvalContext ctx;
    Rng rng(29);

    // weakly Kaehler: homogeneity holds
    SprayData sb = SprayData::of_metric(ConnectionBundle(make_bergman(2)));
    auto db = douglas_spray(sb);
    for (const auto& p : pts(2, 5, 31, 0.55)) {
        Complex lambda(rng.next_range(0.4, 1.6), rng.next_range(-1.0, 1.0));
        EvalPoint q = p;
        for (auto& e : q.eta) e *= lambda;
        for (int i = 0; i < 2; ++i) {
            ctx.set_point(p);
            Complex v = ctx.value(db[i]);
            ctx.set_point(q);
            Complex vl = ctx.value(db[i]);
            CHECK(std::abs(vl - lambda * lambda * v) <= 1e-10 * (1.0 + std::abs(vl)));
        }
    }

    // conformal (not weakly Kaehler): homogeneity must fail at the witness
    SprayData sc = SprayData::of_metric(ConnectionBundle(make_conformal()));
    auto dc = douglas_spray(sc);
    EvalPoint p({0.5, 0.0}, {1.0, 1.0});
    Complex lambda(0.7, 0.4);
    EvalPoint q = p;
    for (auto& e : q.eta) e *= lambda;
    double dev = 0;
    for (int i = 0; i < 2; ++i) {
        ctx.set_point(p);
        Complex v = ctx.value(dc[i]);
        ctx.set_point(q);
        dev = std::max(dev, std::abs(ctx.value(dc[i]) - lambda * lambda * v));
    }
    CHECK(dev > 1e-3);
}

TEST_CASE("vanishing of one Douglas Ricci trace forces the other two") {
    // Lemma-level consistency on the generalized Berwald members: all three
    // trace tensors stand or fall together.
    for (auto& m : {make_bergman(2), make_quartic(0.1), make_conformal()}) {
        SprayData s = SprayData::of_metric(ConnectionBundle(m));
        EvalContext ctx;
        double d1 = 0, d2 = 0, d3 = 0;
        for (const auto& p : pts(2, 8, 37, 0.5)) {
            ctx.set_point(p);
            for (int k = 1; k <= 2; ++k)
                for (int h = 1; h <= 2; ++h) {
                    std::vector<Var> kh{Var{VarKind::Eta, k}, Var{VarKind::Eta, h}};
                    std::vector<Var> bb{Var{VarKind::EtaBar, k}, Var{VarKind::EtaBar, h}};
                    std::vector<Var> mx{Var{VarKind::EtaBar, k}, Var{VarKind::Eta, h}};
                    d1 = std::max(d1, std::abs(ctx.value(s.spray_trace_jet(kh))));
                    d2 = std::max(d2, std::abs(ctx.value(s.spray_trace_jet(bb))));
                    d3 = std::max(d3, std::abs(ctx.value(s.spray_trace_jet(mx))));
                }
        }
        const double tol = 1e-9;
        bool any_zero = d1 <= tol || d2 <= tol || d3 <= tol;
        bool all_zero = d1 <= tol && d2 <= tol && d3 <= tol;
        INFO(m.label() << " traces: " << d1 << " " << d2 << " " << d3);
        CHECK(any_zero == all_zero);
    }
}

TEST_CASE("Weyl invariants vanish on the Kaehler class") {
    for (auto& m : {make_euclidean(2), make_bergman(2), make_quartic(0.1)}) {
        SprayData s = SprayData::of_metric(ConnectionBundle(m));
        WeylBundle w = build_weyl(s);
        EvalContext ctx;
        for (const auto& p : pts(2, 6, 41, 0.55)) {
            ctx.set_point(p);
            INFO(m.label());
            CHECK(w.w4.max_abs(ctx) < 1e-9);
        }
    }
}

TEST_CASE("W^i_{jkh} = 0 iff W^i_{kh} = 0 at sampled points") {
    for (auto& m : {make_euclidean(2), make_bergman(2), make_quartic(0.1), make_conformal()}) {
        SprayData s = SprayData::of_metric(ConnectionBundle(m));
        WeylBundle w = build_weyl(s);
        EvalContext ctx;
        const double tol = 1e-9;
        for (const auto& p : pts(2, 6, 43, 0.5)) {
            ctx.set_point(p);
            bool w4_zero = w.w4.max_abs(ctx) <= tol;
            bool w3_zero = w.w3.max_abs(ctx) <= tol;
            INFO(m.label());
            CHECK(w4_zero == w3_zero);
        }
    }
}

TEST_CASE("hhbar Weyl invariant: values and scope gate") {
    auto gate_pts = pts(2, 6, 47, 0.55);

    // ball metric: W = 0 and the quarter-curvature identity holds with K_F=-4
    {
        CurvatureBundle c{ConnectionBundle(make_bergman(2))};
        FieldTensor w = weyl_berwald_invariant(c, gate_pts, 1e-8);
        EvalContext ctx;
        for (const auto& p : gate_pts) {
            ctx.set_point(p);
            auto chk = berwald_weyl_check(c, w, ctx);
            CHECK(chk.w_max < 1e-8 * chk.scale);
            CHECK(chk.identity_residual < 1e-7);
            CHECK(std::abs(chk.kf - (-4.0)) < 1e-8);
        }
    }
    // quartic: everything zero, K_F = 0 (the non purely Hermitian branch)
    {
        CurvatureBundle c{ConnectionBundle(make_quartic(0.1))};
        FieldTensor w = weyl_berwald_invariant(c, gate_pts, 1e-8);
        EvalContext ctx;
        ctx.set_point(gate_pts[0]);
        auto chk = berwald_weyl_check(c, w, ctx);
        CHECK(chk.w_max < 1e-12);
        CHECK(std::abs(chk.kf) < 1e-12);
        CHECK(chk.identity_residual < 1e-12);
    }
    // conformal metric is not complex Berwald: the operation refuses
    {
        CurvatureBundle c{ConnectionBundle(make_conformal())};
        CHECK_THROWS_AS(weyl_berwald_invariant(c, gate_pts, 1e-8), ScopeError);
    }
}

TEST_CASE("disc n=1 contraction of the hhbar Weyl combination vanishes") {
    // K^1_{1 1bar 1} - (1/2)(K_{1bar 1} + K_{1bar 1}) = 0 at z=0.5
    CurvatureBundle c{ConnectionBundle(make_bergman(1))};
    EvalContext ctx;
    ctx.set_point(EvalPoint({0.5}, {1.0}));
    Complex k4 = ctx.value(c.k_mixed().at({1, 1, 1, 1}));
    Complex ricci = ctx.value(c.ricci_k_mixed().at({1, 1}));
    CHECK(std::abs(k4 - ricci) < 1e-12);  // K^1_{111} = K_{11} when n=1
    CHECK(std::abs(k4 - 0.5 * (2.0 * ricci)) < 1e-12);
}

TEST_CASE("theta-jet Douglas conditions hold exactly on Berwald members") {
    for (auto& m : {make_bergman(2), make_quartic(0.1)}) {
        SprayData s = SprayData::of_metric(ConnectionBundle(m));
        auto conds = douglas_theta_conditions(s);
        EvalContext ctx;
        for (const auto& p : pts(2, 5, 53, 0.5)) {
            ctx.set_point(p);
            for (const auto& t : conds) CHECK(t.max_abs(ctx) < 1e-10);
        }
    }
}
