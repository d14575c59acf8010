#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfin/catalog.hpp"
#include "cfin/curvatures.hpp"

using namespace cfin;

namespace {

FinslerMetric make_blend() {
    return FinslerMetric::from_source(
        "e1*eb1 + e2*eb2 + 0.3*z1*zb1*((e1*eb1)^2 + (e2*eb2)^2)/(e1*eb1 + e2*eb2)", 2, "blend");
}

std::vector<EvalPoint> pts(int n, int count, uint64_t seed, double radius = 0.5) {
    SamplingConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    cfg.z_radius = radius;
    return sample_points(n, cfg);
}

}  // namespace

TEST_CASE("flat metric: every curvature vanishes") {
    CurvatureBundle c{ConnectionBundle(make_euclidean(2))};
    EvalContext ctx;
    ctx.set_point(EvalPoint({0.3, Complex(0, 0.1)}, {1.0, Complex(0.2, 0.7)}));
    CHECK(c.k_hh3().max_abs(ctx) == 0.0);
    CHECK(c.k_hh().max_abs(ctx) == 0.0);
    CHECK(c.k_mixed().max_abs(ctx) == 0.0);
    CHECK(c.r_mixed().max_abs(ctx) == 0.0);
    CHECK(c.g_hv().max_abs(ctx) == 0.0);
    CHECK(std::abs(c.holomorphic_curvature_at(ctx)) == 0.0);
}

TEST_CASE("disc metric curvatures at z=0.5") {
    CurvatureBundle c{ConnectionBundle(make_bergman(1))};
    EvalContext ctx;
    ctx.set_point(EvalPoint({0.5}, {1.0}));

    // Theta^1_{1 1bar} = d(2 rho_1 eta)/d zbar = 2 rho_{1 1bar} eta = 32/9
    CHECK(std::abs(ctx.value(c.theta_mixed().at({1, 1, 1})) - Complex(32.0 / 9.0, 0)) < 1e-12);
    // K^1_{1 1bar 1} = -2 rho_{1 1bar} = -32/9
    CHECK(std::abs(ctx.value(c.k_mixed().at({1, 1, 1, 1})) - Complex(-32.0 / 9.0, 0)) < 1e-12);
    // purely Hermitian: C = 0, so R = K
    CHECK(std::abs(ctx.value(c.r_mixed().at({1, 1, 1, 1})) - Complex(-32.0 / 9.0, 0)) < 1e-12);
    // n=1 forces the barbar antisymmetry to zero exactly
    CHECK(c.k_barbar().max_abs(ctx) < 1e-14);

    CHECK(std::abs(c.holomorphic_curvature_at(ctx) - (-4.0)) < 1e-12);
}

TEST_CASE("quartic metric is locally Minkowski: zero curvature, zero K_F") {
    CurvatureBundle c{ConnectionBundle(make_quartic(0.1))};
    EvalContext ctx;
    ctx.set_point(EvalPoint({0.2, -0.3}, {1.0, Complex(0.4, 0.8)}));
    CHECK(c.k_hh().max_abs(ctx) < 1e-15);
    CHECK(c.k_mixed().max_abs(ctx) < 1e-15);
    CHECK(c.r_mixed().max_abs(ctx) < 1e-15);
    CHECK(std::abs(c.holomorphic_curvature_at(ctx)) < 1e-15);
}

TEST_CASE("ball metric has constant holomorphic curvature -4") {
    CurvatureBundle c{ConnectionBundle(make_bergman(2))};
    EvalContext ctx;
    for (const auto& p : pts(2, 12, 5, 0.6)) {
        ctx.set_point(p);
        CHECK(std::abs(c.holomorphic_curvature_at(ctx) - (-4.0)) < 1e-9);
    }
}

TEST_CASE("K_F is homogeneous of degree zero in eta") {
    CurvatureBundle c{ConnectionBundle(make_bergman(2))};
    EvalContext ctx;
    Rng rng(3);
    for (const auto& p : pts(2, 6, 9, 0.6)) {
        ctx.set_point(p);
        double kf = c.holomorphic_curvature_at(ctx);
        Complex lambda(rng.next_range(0.3, 2.0), rng.next_range(-1.5, 1.5));
        EvalPoint q = p;
        for (auto& e : q.eta) e *= lambda;
        ctx.set_point(q);
        CHECK(std::abs(c.holomorphic_curvature_at(ctx) - kf) < 1e-9 * (1.0 + std::abs(kf)));
    }
}

TEST_CASE("curvature identity suite on the catalog") {
    for (auto& m : {make_euclidean(2), make_bergman(2), make_quartic(0.1), make_conformal(),
                    make_blend()}) {
        CurvatureBundle c{ConnectionBundle(m)};
        EvalContext ctx;
        for (const auto& p : pts(2, 5, 21, 0.5)) {
            ctx.set_point(p);
            for (const auto& ir : c.identity_residuals(ctx)) {
                INFO(m.label() << ": " << ir.name);
                CHECK(ir.residual <= 1e-8);
            }
        }
    }
}

TEST_CASE("disc metric n=1 identity suite") {
    CurvatureBundle c{ConnectionBundle(make_bergman(1))};
    EvalContext ctx;
    for (const auto& p : pts(1, 5, 33, 0.7)) {
        ctx.set_point(p);
        for (const auto& ir : c.identity_residuals(ctx)) {
            INFO(ir.name);
            CHECK(ir.residual <= 1e-10);
        }
    }
}

TEST_CASE("generalized Berwald metrics: K-tensors are vertical constants") {
    // when G^i_{j kbar} = 0 the K-tensors lose all vertical dependence
    for (auto& m : {make_bergman(2), make_conformal(), make_quartic(0.1)}) {
        CurvatureBundle c{ConnectionBundle(m)};
        EvalContext ctx;
        for (const auto& p : pts(2, 4, 41, 0.5)) {
            ctx.set_point(p);
            REQUIRE(c.connections().berwald_gamma_mixed().max_abs(ctx) < 1e-12);
            double r = 0;
            for (int i = 1; i <= 2; ++i)
                for (int j = 1; j <= 2; ++j)
                    for (int k = 1; k <= 2; ++k)
                        for (int h = 1; h <= 2; ++h)
                            for (int rr = 1; rr <= 2; ++rr) {
                                r = std::max(r, std::abs(ctx.value(d(c.k_hh().at({i, j, k, h}), VarKind::Eta, rr))));
                                r = std::max(r, std::abs(ctx.value(d(c.k_hh().at({i, j, k, h}), VarKind::EtaBar, rr))));
                                r = std::max(r, std::abs(ctx.value(d(c.k_mixed().at({i, j, k, h}), VarKind::Eta, rr))));
                                r = std::max(r, std::abs(ctx.value(d(c.k_mixed().at({i, j, k, h}), VarKind::EtaBar, rr))));
                            }
            CHECK(r <= 1e-9);
        }
    }
}

TEST_CASE("lowered hhbar curvature has the Hermitian reality structure") {
    // R_{rbar j kbar h} = conj(R_{jbar r hbar k})
    for (auto& m : {make_bergman(2), make_conformal(), make_blend()}) {
        CurvatureBundle c{ConnectionBundle(m)};
        EvalContext ctx;
        for (const auto& p : pts(2, 4, 55, 0.45)) {
            ctx.set_point(p);
            double scale = 1.0 + c.r_lowered().max_abs(ctx);
            for (int r = 1; r <= 2; ++r)
                for (int j = 1; j <= 2; ++j)
                    for (int k = 1; k <= 2; ++k)
                        for (int h = 1; h <= 2; ++h) {
                            Complex a = ctx.value(c.r_lowered().at({r, j, k, h}));
                            Complex b = ctx.value(c.r_lowered().at({j, r, h, k}));
                            INFO(m.label());
                            CHECK(std::abs(a - std::conj(b)) <= 1e-10 * scale);
                        }
        }
    }
}

TEST_CASE("Ricci suite on the ball metric") {
    CurvatureBundle c{ConnectionBundle(make_bergman(2))};
    EvalContext ctx;

    // at the center: K_{kbar h} = -(n+1) rho_{h kbar} = -3 delta
    ctx.set_point(EvalPoint({0.0, 0.0}, {1.0, Complex(0.3, 0.4)}));
    auto s0 = c.ricci_suite(ctx);
    CHECK(std::abs(s0.k_mixed(0, 0) - Complex(-3, 0)) < 1e-12);
    CHECK(std::abs(s0.k_mixed(1, 1) - Complex(-3, 0)) < 1e-12);
    CHECK(std::abs(s0.k_mixed(0, 1)) < 1e-12);

    // link identity H_{kj} - H_{jk} = K_{jk} everywhere
    for (const auto& p : pts(2, 8, 61, 0.6)) {
        ctx.set_point(p);
        CHECK(c.ricci_suite(ctx).link_residual <= 1e-10);
    }
}

TEST_CASE("Ricci link identity on non-Kaehler metrics") {
    for (auto& m : {make_conformal(), make_blend()}) {
        CurvatureBundle c{ConnectionBundle(m)};
        EvalContext ctx;
        for (const auto& p : pts(2, 8, 67, 0.5)) {
            ctx.set_point(p);
            CHECK(c.ricci_suite(ctx).link_residual <= 1e-8);
        }
    }
}

TEST_CASE("covariant derivative: metric compatibility and scalar rules") {
    FinslerMetric m = make_bergman(2);
    ConnectionBundle conn(m);
    EvalContext ctx;

    // g_{i jbar | k} = 0 identically (definition of L makes this exact)
    FieldTensor g(2, {Slot{Variance::Down, BarType::Plain}, Slot{Variance::Down, BarType::Barred}});
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) g.at({i, j}) = Field::from_expr(m.g(i, j));
    for (const auto& p : pts(2, 5, 71, 0.6)) {
        ctx.set_point(p);
        for (int k = 1; k <= 2; ++k) {
            CHECK(covariant_derivative(conn, g, CovDirection::HPlain, k).max_abs(ctx) < 1e-11);
            CHECK(covariant_derivative(conn, g, CovDirection::HBar, k).max_abs(ctx) < 1e-11);
        }
    }

    // scalars: L_{|k} = delta_k L, identically zero for the Chern-Finsler frame
    FieldTensor L(2, {});
    L.at(std::initializer_list<int>{}) = Field::from_expr(m.L());
    for (const auto& p : pts(2, 5, 73, 0.6)) {
        ctx.set_point(p);
        for (int k = 1; k <= 2; ++k) {
            Complex v = ctx.value(covariant_derivative(conn, L, CovDirection::HPlain, k)
                                      .at(std::initializer_list<int>{}));
            CHECK(std::abs(v) < 1e-11);
        }
    }
}

TEST_CASE("horizontal Bianchi identity for the complex Berwald class") {
    // K^i_{j rbar k | hbar} = K^i_{j hbar k | rbar} on the ball metric
    FinslerMetric m = make_bergman(2);
    ConnectionBundle conn(m);
    CurvatureBundle c(conn);
    EvalContext ctx;

    std::vector<FieldTensor> cov(3);
    for (int h = 1; h <= 2; ++h) {
        cov[h] = covariant_derivative(conn, c.k_mixed(), CovDirection::HBar, h);
    }
    for (const auto& p : pts(2, 10, 83, 0.6)) {
        ctx.set_point(p);
        double scale = 1.0 + c.k_mixed().max_abs(ctx);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (int k = 1; k <= 2; ++k)
                    for (int r = 1; r <= 2; ++r)
                        for (int h = 1; h <= 2; ++h) {
                            // slots of k_mixed: (i, j, kbar, h); the barred
                            // middle index plays the rbar role
                            Complex a = ctx.value(cov[h].at({i, j, r, k}));
                            Complex b = ctx.value(cov[r].at({i, j, h, k}));
                            CHECK(std::abs(a - b) <= 1e-7 * scale);
                        }
    }
}
