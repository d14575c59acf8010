#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfin/catalog.hpp"
#include "cfin/field.hpp"
#include "cfin/metric.hpp"
#include "cfin/parser.hpp"

using namespace cfin;

namespace {
EvalPoint pt1(Complex z, Complex eta) { return EvalPoint({z}, {eta}); }
}

TEST_CASE("metric tensor of the flat metric is the identity") {
    FinslerMetric m = make_euclidean(2);
    CHECK(m.g(1, 1) == Expr::one());
    CHECK(m.g(2, 2) == Expr::one());
    CHECK(m.g(1, 2) == Expr::zero());
    CHECK(m.g(2, 1) == Expr::zero());
}

TEST_CASE("disc metric value and inverse") {
    FinslerMetric m = make_bergman(1);
    EvalContext ctx;
    ctx.set_point(pt1(0.5, 1.0));
    CHECK(std::abs(ctx.value(m.g(1, 1)) - Complex(16.0 / 9.0, 0)) < 1e-14);

    Eigen::MatrixXcd inv = inverse_metric(m, pt1(0.5, 1.0));
    CHECK(std::abs(inv(0, 0) - Complex(0.5625, 0)) < 1e-14);
}

TEST_CASE("quartic metric depends on eta; cross-checked against fd") {
    FinslerMetric m = make_quartic(0.1);
    EvalPoint p({0.0, 0.0}, {1.0, 1.0});
    EvalContext ctx;
    ctx.set_point(p);
    // not purely Hermitian: some eta-derivative of g is nonzero
    double cmax = 0;
    for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k)
            for (int h = 1; h <= 2; ++h)
                cmax = std::max(cmax, std::abs(ctx.value(d(m.g(j, k), VarKind::Eta, h))));
    CHECK(cmax > 1e-3);

    // g against second finite differences of L
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            Expr dL = d(m.L(), VarKind::Eta, i);
            Complex fd = fd_wirtinger(dL, {VarKind::EtaBar, j}, p, 1e-5);
            CHECK(std::abs(ctx.value(m.g(i, j)) - fd) < 1e-7);
        }
    }
}

TEST_CASE("inverse_metric reports near-degeneracy with the smallest eigenvalue") {
    // quartic family without the Hermitian part: g degenerates on the axes
    FinslerMetric m = FinslerMetric::from_source(
        "sqrt((e1*eb1)^2 + (e2*eb2)^2)", 2, "degenerate-quartic");
    EvalPoint p({0.0, 0.0}, {1.0, 0.0});
    bool threw = false;
    try {
        inverse_metric(m, p);
    } catch (const NotPositiveDefiniteError& e) {
        threw = true;
        CHECK(std::abs(e.min_eigenvalue) < 1e-6);
    }
    CHECK(threw);
}

TEST_CASE("validate passes the catalog and fails a non-homogeneous L") {
    SamplingConfig cfg;
    cfg.count = 100;
    cfg.seed = 42;
    auto pts2 = sample_points(2, cfg);

    auto euc = validate(make_euclidean(2), pts2, 1e-10);
    CHECK(euc.pass);
    CHECK(euc.max_residual < 1e-14);

    cfg.count = 32;
    auto rep_b = validate(make_bergman(2), pts2, 1e-9);
    CHECK(rep_b.pass);
    auto rep_q = validate(make_quartic(0.1), pts2, 1e-9);
    CHECK(rep_q.pass);
    auto rep_c = validate(make_conformal(), pts2, 1e-9);
    CHECK(rep_c.pass);

    // disc metric sampled close to the boundary
    SamplingConfig near_edge;
    near_edge.count = 32;
    near_edge.seed = 99;
    near_edge.z_radius = 0.9;
    auto rep_edge = validate(make_bergman(1), sample_points(1, near_edge), 1e-9);
    CHECK(rep_edge.pass);

    cfg.count = 8;
    auto pts1 = sample_points(1, cfg);
    auto bad = validate(FinslerMetric::from_source("e1*e1", 1, "bad"), pts1, 1e-9);
    CHECK(!bad.pass);
    // Euler contraction gives 2L, so the scaled residual is order |L|/(1+|L|)
    CHECK(bad.points[0].euler_L_eta > 1e-3);
}

TEST_CASE("purely Hermitian metrics have vanishing eta-derivatives of g as expressions") {
    for (auto& m : {make_euclidean(2), make_bergman(2), make_conformal()}) {
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (int k = 1; k <= 2; ++k) {
                    CHECK(d(m.g(i, j), VarKind::Eta, k) == Expr::zero());
                    CHECK(d(m.g(i, j), VarKind::EtaBar, k) == Expr::zero());
                }
    }
}

TEST_CASE("conjugate tensor flips bars") {
    FinslerMetric m = make_bergman(2);
    ExprTensor g = m.metric_tensor();
    ExprTensor gc = g.conjugate();
    CHECK(gc.slots()[0].bar == BarType::Barred);
    CHECK(gc.slots()[1].bar == BarType::Plain);
    // Hermitian symmetry as expressions: conj(g_{i jbar}) == g_{j ibar}
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) CHECK(gc.at({i, j}) == g.at({j, i}));
}

TEST_CASE("field layer: inverse-metric entries differentiate exactly") {
    FinslerMetric m = make_bergman(2);
    HessianPtr h = m.hessian();

    SamplingConfig cfg;
    cfg.count = 6;
    cfg.seed = 17;
    auto pts = sample_points(2, cfg);

    EvalContext ctx;
    const double fd_h = 1e-6;
    for (const auto& p : pts) {
        for (int a = 1; a <= 2; ++a) {
            for (int b = 1; b <= 2; ++b) {
                Field inv = Field::inverse_entry(h, a, b);
                for (Var v : {Var{VarKind::Z, 1}, Var{VarKind::Z, 2}, Var{VarKind::ZBar, 1},
                              Var{VarKind::Eta, 1}, Var{VarKind::EtaBar, 2}}) {
                    Field dinv = inv.derivative(v);
                    ctx.set_point(p);
                    Complex sym = ctx.value(dinv);

                    // central differences of the numeric inverse entry
                    bool is_eta = v.kind == VarKind::Eta || v.kind == VarKind::EtaBar;
                    bool barred = v.kind == VarKind::ZBar || v.kind == VarKind::EtaBar;
                    auto at = [&](Complex delta) {
                        EvalPoint q = p;
                        (is_eta ? q.eta[v.index - 1] : q.z[v.index - 1]) += delta;
                        EvalContext c2;
                        c2.set_point(q);
                        return c2.inverse(*h)(a - 1, b - 1);
                    };
                    Complex dre = (at(Complex(fd_h, 0)) - at(Complex(-fd_h, 0))) / (2 * fd_h);
                    Complex dim = (at(Complex(0, fd_h)) - at(Complex(0, -fd_h))) / (2 * fd_h);
                    Complex iu(0, 1);
                    Complex fd = barred ? 0.5 * (dre + iu * dim) : 0.5 * (dre - iu * dim);
                    CHECK(std::abs(sym - fd) < 5e-6 * (1.0 + std::abs(sym)));
                }
            }
        }
    }
}

TEST_CASE("field algebra: conjugation and expr flattening") {
    FinslerMetric m = make_bergman(2);
    HessianPtr h = m.hessian();
    Field f = Field::inverse_entry(h, 1, 2) * Expr::eta(1) + Field::from_expr(Expr::z(1));
    Field fc = f.conjugate();

    EvalContext ctx;
    EvalPoint p({Complex(0.2, 0.1), Complex(-0.1, 0.3)}, {Complex(1, 0.5), Complex(0.2, -1)});
    ctx.set_point(p);
    CHECK(std::abs(ctx.value(fc) - std::conj(ctx.value(f))) < 1e-14);
    CHECK(conj(conj(f)).terms().size() == f.terms().size());

    Field pure = Field::from_expr(Expr::z(1)) * Expr::eta(1);
    CHECK(pure.is_pure_expr());
    CHECK(pure.as_expr() == Expr::z(1) * Expr::eta(1));
    CHECK(!f.is_pure_expr());
}
