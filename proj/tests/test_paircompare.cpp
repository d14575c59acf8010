#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfin/catalog.hpp"
#include "cfin/paircompare.hpp"
#include "cfin/parser.hpp"

using namespace cfin;

namespace {

std::vector<EvalPoint> pts(int n, int count, uint64_t seed, double radius = 0.6) {
    SamplingConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    cfg.z_radius = radius;
    return sample_points(n, cfg);
}

}  // namespace

TEST_CASE("identity change recovers zero factor") {
    ConnectionBundle b(make_bergman(2));
    auto rep = projective_relatedness_test(b, b, pts(2, 10, 3), 1e-8);
    CHECK(rep.verdict == Relatedness::Related);
    CHECK(rep.paths_agree);
    CHECK(rep.max_spray_residual < 1e-12);
    for (const auto& f : rep.factors) {
        CHECK(std::abs(f.p) < 1e-12);
        CHECK(std::abs(f.s) < 1e-12);
        CHECK(std::abs(f.q) < 1e-12);
    }
}

TEST_CASE("flat and disc metrics are projectively related") {
    ConnectionBundle be(make_euclidean(1));
    ConnectionBundle bb(make_bergman(1));

    // pointwise factor at z=0.5, eta=1: P = S = (1/2)(4/3) = 2/3 = rho_1 eta
    SprayData sa = SprayData::of_metric(be), sb = SprayData::of_metric(bb);
    EvalContext ctx;
    ctx.set_point(EvalPoint({0.5}, {1.0}));
    auto f = recover_projective_factor(sa, sb, ctx);
    CHECK(std::abs(f.s - Complex(2.0 / 3.0, 0)) < 1e-13);
    CHECK(std::abs(f.q) < 1e-13);
    CHECK(std::abs(f.p - Complex(2.0 / 3.0, 0)) < 1e-13);

    auto points = pts(1, 20, 7, 0.8);
    auto rep = projective_relatedness_test(be, bb, points, 1e-8);
    CHECK(rep.verdict == Relatedness::Related);
    CHECK(rep.paths_agree);
    CHECK(rep.max_spray_residual <= 1e-8);

    // recovered P matches rho_r eta^r at every sample point
    Expr rho = bergman_rho(1);
    Expr rho_eta = d(rho, VarKind::Z, 1) * Expr::eta(1);
    for (size_t i = 0; i < points.size(); ++i) {
        ctx.set_point(points[i]);
        CHECK(std::abs(rep.factors[i].p - ctx.value(rho_eta)) < 1e-8);
    }
}

TEST_CASE("ball metric n=2 is projectively related to the flat metric") {
    ConnectionBundle be(make_euclidean(2));
    ConnectionBundle bb(make_bergman(2));
    auto points = pts(2, 12, 11, 0.6);
    auto rep = projective_relatedness_test(be, bb, points, 1e-8);
    CHECK(rep.verdict == Relatedness::Related);
    CHECK(rep.paths_agree);

    Expr rho = bergman_rho(2);
    Expr rho_eta = d(rho, VarKind::Z, 1) * Expr::eta(1) + d(rho, VarKind::Z, 2) * Expr::eta(2);
    EvalContext ctx;
    for (size_t i = 0; i < points.size(); ++i) {
        ctx.set_point(points[i]);
        CHECK(std::abs(rep.factors[i].p - ctx.value(rho_eta)) < 1e-8);
    }
}

TEST_CASE("constant scaling leaves the spray unchanged") {
    FinslerMetric m = make_bergman(1);
    FinslerMetric scaled(1, Expr::constant(3.0) * m.L(), "scaled");
    ConnectionBundle ba(m), bs(scaled);
    auto rep = projective_relatedness_test(ba, bs, pts(1, 10, 13, 0.7), 1e-8);
    CHECK(rep.verdict == Relatedness::Related);
    for (const auto& f : rep.factors) CHECK(std::abs(f.p) < 1e-10);
}

TEST_CASE("flat vs conformal: not related, both routes agree") {
    ConnectionBundle be(make_euclidean(2));
    ConnectionBundle bc(make_conformal());
    auto rep = projective_relatedness_test(be, bc, pts(2, 12, 17, 0.6), 1e-8);
    CHECK(rep.verdict == Relatedness::NotRelated);
    CHECK(rep.paths_agree);
    CHECK(rep.max_spray_residual > 1e-3);
}

TEST_CASE("synthetic change reproduces the disc spray data from the flat one") {
    SprayData flat = SprayData::of_metric(ConnectionBundle(make_euclidean(1)));
    Expr p = parse("zb1*e1/(1 - z1*zb1)", 1);
    auto chg = synthetic_change(flat, p, pts(1, 6, 19, 0.7), 1e-9);

    EvalContext ctx;
    ctx.set_point(EvalPoint({0.5}, {1.0}));
    CHECK(std::abs(ctx.value(chg.data.spray(1)) - Complex(2.0 / 3.0, 0)) < 1e-13);
    CHECK(std::abs(ctx.value(chg.data.canonical_n(1, 1)) - Complex(4.0 / 3.0, 0)) < 1e-13);
    // theta stays zero: Q = 0 for homogeneous P
    CHECK(std::abs(ctx.value(chg.data.theta(1))) < 1e-13);

    // matches the honest disc metric spray data
    SprayData disc = SprayData::of_metric(ConnectionBundle(make_bergman(1)));
    for (const auto& q : pts(1, 8, 23, 0.7)) {
        ctx.set_point(q);
        CHECK(std::abs(ctx.value(chg.data.spray(1)) - ctx.value(disc.spray(1))) < 1e-12);
    }
}

TEST_CASE("zero factor leaves the data unchanged; bad factors are rejected") {
    SprayData base = SprayData::of_metric(ConnectionBundle(make_bergman(2)));
    auto points = pts(2, 5, 29, 0.5);

    auto chg = synthetic_change(base, Expr::zero(), points, 1e-9);
    EvalContext ctx;
    for (const auto& q : points) {
        ctx.set_point(q);
        for (int i = 1; i <= 2; ++i)
            CHECK(std::abs(ctx.value(chg.data.spray(i)) - ctx.value(base.spray(i))) < 1e-15);
    }

    CHECK_THROWS_AS(synthetic_change(base, parse("e1*e1", 2), points, 1e-9), HomogeneityError);
}

TEST_CASE("first jet of the change matches the recovered S") {
    ConnectionBundle be(make_euclidean(2));
    ConnectionBundle bb(make_bergman(2));
    SprayData sa = SprayData::of_metric(be), sb = SprayData::of_metric(bb);

    Field s_field = (sb.trace_n() - sa.trace_n()) * Expr::constant(1.0 / 3.0);
    EvalContext ctx;
    for (const auto& p : pts(2, 8, 31, 0.6)) {
        ctx.set_point(p);
        Complex s = ctx.value(s_field);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                Complex lhs = ctx.value(sb.canonical_n(i, j)) - ctx.value(sa.canonical_n(i, j));
                Complex rhs = ctx.value(d(s_field, VarKind::Eta, j)) * p.eta[i - 1] +
                              (i == j ? s : Complex(0, 0));
                CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
            }
    }
}

TEST_CASE("X-tensor homogeneity properties") {
    SprayData base = SprayData::of_metric(ConnectionBundle(make_bergman(2)));
    Expr p = parse("zb1*e1 + zb2*e2", 2);
    auto x = change_diagnostics(base, p);
    EvalContext ctx;
    for (const auto& q : pts(2, 6, 37, 0.6)) {
        ctx.set_point(q);
        for (int h = 1; h <= 2; ++h) {
            // (d_j X_h) eta^j = X_h
            Complex acc(0, 0);
            for (int j = 1; j <= 2; ++j)
                acc += ctx.value(d(x.x_h[h - 1], VarKind::Eta, j)) * q.eta[j - 1];
            Complex xh = ctx.value(x.x_h[h - 1]);
            CHECK(std::abs(acc - xh) < 1e-10 * (1.0 + std::abs(xh)));
            // (d_j X_{kh}) eta^j = 0 and X_{kj} eta^j = X_{k0}
            for (int k = 1; k <= 2; ++k) {
                Complex acc2(0, 0);
                for (int j = 1; j <= 2; ++j)
                    acc2 += ctx.value(d(x.x_kh.at({k, h}), VarKind::Eta, j)) * q.eta[j - 1];
                CHECK(std::abs(acc2) < 1e-10);
            }
        }
        for (int k = 1; k <= 2; ++k) {
            Complex acc(0, 0);
            for (int j = 1; j <= 2; ++j) acc += ctx.value(x.x_kh.at({k, j})) * q.eta[j - 1];
            CHECK(std::abs(acc - ctx.value(x.x_k0[k - 1])) < 1e-12 * (1.0 + std::abs(acc)));
        }
    }
}

TEST_CASE("curvature change law under synthetic changes") {
    auto points2 = pts(2, 5, 41, 0.5);
    {
        SprayData base = SprayData::of_metric(ConnectionBundle(make_euclidean(2)));
        auto chg = synthetic_change(base, parse("zb1*e1/(1 - z1*zb1 - z2*zb2)", 2), points2, 1e-9);
        EvalContext ctx;
        for (const auto& q : points2) {
            ctx.set_point(q);
            CHECK(curvature_change_law_residual(base, chg, ctx) < 1e-9);
        }
    }
    {
        SprayData base = SprayData::of_metric(ConnectionBundle(make_bergman(2)));
        auto chg = synthetic_change(base, parse("zb2*e2 + 0.5*z1*e1", 2), points2, 1e-9);
        EvalContext ctx;
        for (const auto& q : points2) {
            ctx.set_point(q);
            CHECK(curvature_change_law_residual(base, chg, ctx) < 1e-9);
        }
    }
}

TEST_CASE("X_{kh} is recovered from the Ricci difference of the change") {
    SprayData base = SprayData::of_metric(ConnectionBundle(make_bergman(2)));
    Expr p = parse("zb1*e1 + 0.3*z2*e2", 2);
    auto points = pts(2, 5, 43, 0.5);
    auto chg = synthetic_change(base, p, points, 1e-9);
    auto x = change_diagnostics(base, p);

    FieldTensor k_base = berwald_k4(base).trace(0, 1);   // K_{kh}
    FieldTensor k_tilde = berwald_k4(chg.data).trace(0, 1);
    EvalContext ctx;
    for (const auto& q : points) {
        ctx.set_point(q);
        for (int k = 1; k <= 2; ++k)
            for (int h = 1; h <= 2; ++h) {
                Complex diff = (ctx.value(k_tilde.at({k, h})) - ctx.value(k_base.at({k, h}))) / 3.0;
                Complex xkh = ctx.value(x.x_kh.at({k, h}));
                CHECK(std::abs(diff - xkh) < 1e-9 * (1.0 + std::abs(xkh)));
            }
    }
}

TEST_CASE("Douglas data is invariant under synthetic projective changes") {
    struct Case {
        FinslerMetric m;
        std::string p;
    };
    Case cases[] = {
        {make_euclidean(2), "zb1*e1/(1 - z1*zb1 - z2*zb2)"},
        {make_euclidean(2), "e1*eb1*e2/(e1*eb1 + e2*eb2)"},
        {make_bergman(2), "zb1*e1 + zb2*e2"},
        {make_conformal(), "z2*e2 + 0.25*zb1*e1"},
    };
    for (const auto& c : cases) {
        auto points = pts(2, 20, 47, 0.55);
        SprayData base = SprayData::of_metric(ConnectionBundle(c.m));
        auto chg = synthetic_change(base, parse(c.p, 2), points, 1e-8);

        auto d0 = build_douglas(base);
        auto d1 = build_douglas(chg.data);
        EvalContext ctx;
        for (const auto& q : points) {
            ctx.set_point(q);
            for (int i = 0; i < 2; ++i) {
                Complex a = ctx.value(d0.d[i]);
                Complex b = ctx.value(d1.d[i]);
                INFO(c.m.label() << " with P = " << c.p);
                CHECK(std::abs(a - b) <= 1e-7 * (1.0 + std::abs(a)));
            }
            const FieldTensor* t0[3] = {&d0.d_hv, &d0.d_barvbar, &d0.d_mixedv};
            const FieldTensor* t1[3] = {&d1.d_hv, &d1.d_barvbar, &d1.d_mixedv};
            for (int t = 0; t < 3; ++t) {
                double scale = 1.0 + t0[t]->max_abs(ctx);
                for (int i = 1; i <= 2; ++i)
                    for (int j = 1; j <= 2; ++j)
                        for (int k = 1; k <= 2; ++k)
                            for (int h = 1; h <= 2; ++h) {
                                Complex a = ctx.value(t0[t]->at({i, j, k, h}));
                                Complex b = ctx.value(t1[t]->at({i, j, k, h}));
                                INFO(c.m.label() << " tensor " << t);
                                CHECK(std::abs(a - b) <= 1e-7 * scale);
                            }
            }
        }
    }
}

TEST_CASE("Weyl invariants survive synthetic changes on weakly Kaehler metrics") {
    for (auto& m : {make_euclidean(2), make_bergman(2)}) {
        auto points = pts(2, 10, 53, 0.5);
        SprayData base = SprayData::of_metric(ConnectionBundle(m));
        auto chg = synthetic_change(base, parse("zb1*e1 + 0.5*zb2*e2", 2), points, 1e-8);

        WeylBundle w0 = build_weyl(base);
        WeylBundle w1 = build_weyl(chg.data);
        EvalContext ctx;
        for (const auto& q : points) {
            ctx.set_point(q);
            double s3 = 1.0 + w0.w3.max_abs(ctx);
            double s4 = 1.0 + w0.w4.max_abs(ctx);
            for (int i = 1; i <= 2; ++i)
                for (int k = 1; k <= 2; ++k)
                    for (int h = 1; h <= 2; ++h) {
                        CHECK(std::abs(ctx.value(w0.w3.at({i, k, h})) -
                                       ctx.value(w1.w3.at({i, k, h}))) <= 1e-7 * s3);
                        for (int j = 1; j <= 2; ++j)
                            CHECK(std::abs(ctx.value(w0.w4.at({i, j, k, h})) -
                                           ctx.value(w1.w4.at({i, j, k, h}))) <= 1e-7 * s4);
                    }
        }
    }
}
