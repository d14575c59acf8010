#include "cfin/suite.hpp"

#include "cfin/catalog.hpp"
#include "cfin/paircompare.hpp"
#include "cfin/parser.hpp"

namespace cfin {

namespace {

struct SuiteRunner {
    const SuiteConfig& cfg;
    SuiteResult out;

    void check(int criterion, const std::string& name, double value, double threshold) {
        out.checks.push_back({criterion, name, value <= threshold, value, threshold});
    }
    void check_flag(int criterion, const std::string& name, bool pass) {
        out.checks.push_back({criterion, name, pass, pass ? 0.0 : 1.0, 0.5});
    }

    std::vector<EvalPoint> points(int n, int count, uint64_t seed_offset = 0) const {
        SamplingConfig sc = cfg.sampling;
        sc.count = count;
        sc.seed = cfg.sampling.seed + seed_offset;
        return sample_points(n, sc);
    }

    // ----- acceptance criterion 1: symbolic vs finite-difference oracle
    void oracle_block(const FinslerMetric& m, Json& node) {
        const int n = m.n();
        auto pts = points(n, std::max(50, cfg.sampling.count), 101);
        std::vector<Var> vars;
        for (int k = 1; k <= n; ++k) {
            for (VarKind kind : {VarKind::Z, VarKind::ZBar, VarKind::Eta, VarKind::EtaBar}) {
                vars.push_back({kind, k});
            }
        }
        std::vector<Expr> exprs{m.L()};
        for (Var v : vars) exprs.push_back(d(m.L(), v));

        double worst = 0;
        ExprEvaluator ev;
        for (const Expr& e : exprs) {
            for (Var v : vars) {
                Expr de = d(e, v);
                for (const EvalPoint& p : pts) {
                    ev.set_point(p);
                    Complex sym = ev.value(de);
                    Complex fd = fd_wirtinger(e, v, p, 1e-5);
                    worst = std::max(worst, std::abs(sym - fd) / std::max(1.0, std::abs(sym)));
                }
            }
        }
        node["oracle_max_relative_error"] = worst;
        check(1, "oracle/" + m.label(), worst, 1e-6);
    }

    // ----- criteria 2 and 3: Euler suite and the spray pairing identity
    void validate_block(const FinslerMetric& m, ConnectionBundle& conn, Json& node) {
        auto pts = points(m.n(), std::max(cfg.sampling.count, 32), 7);
        ValidationReport rep = validate(m, pts, 1e-10);
        node["validate"] = to_json(rep);
        check(2, "euler/" + m.label(), rep.max_residual, 1e-10);
        check_flag(2, "positive_definite/" + m.label(), rep.pass);

        auto pts50 = points(m.n(), std::max(50, cfg.sampling.count), 11);
        EvalContext ctx;
        double worst = 0;
        for (const EvalPoint& p : pts50) {
            ctx.set_point(p);
            double L = std::abs(ctx.value(m.L()));
            worst = std::max(worst, conn.vertical_spray_pairing_residual(ctx) / L);
        }
        node["spray_pairing_residual"] = worst;
        check(3, "spray_pairing/" + m.label(), worst, 1e-9);
    }

    // ----- criterion 4: curvature identity suite
    void identity_block(const FinslerMetric& m, CurvatureBundle& curv, Json& node) {
        auto pts = points(m.n(), std::min(cfg.sampling.count, 8), 13);
        EvalContext ctx;
        Json ids;
        std::map<std::string, double> worst;
        for (const EvalPoint& p : pts) {
            ctx.set_point(p);
            for (const auto& ir : curv.identity_residuals(ctx)) {
                worst[ir.name] = std::max(worst[ir.name], ir.residual);
            }
        }
        for (const auto& [name, value] : worst) {
            ids[name] = value;
            check(4, "curvature_identity/" + m.label() + "/" + name, value, 1e-8);
        }
        node["curvature_identities"] = ids;
    }

    // ----- criterion 9 rides on classify: lattice + theorem consistency
    void classify_block(const FinslerMetric& m, Json& node) {
        auto pts = points(m.n(), cfg.sampling.count, 17);
        ClassificationReport rep = classify(m, pts, cfg.tolerance);
        node["classification"] = to_json(rep);
        check_flag(9, "lattice/" + m.label(), rep.lattice_ok);
        for (const auto& tc : rep.theorem_checks) {
            check_flag(9, "theorem/" + m.label() + "/" + tc.name, tc.pass);
        }
        node["classification"]["points_used"] = pts.size();
    }

    // ----- criterion 5: the potential family
    void potential_block(int n, Json& root) {
        FinslerMetric m = make_bergman(n);
        auto pts = points(n, cfg.sampling.count, 23);
        RhoFamilyReport rep = rho_family_check(m, bergman_rho(n), pts, 1e-9);
        std::string label = m.label();
        root[label] = to_json(rep);
        check(5, "potential_pde/" + label, rep.pde_residual, 1e-9);
        check(5, "potential_kf/" + label, std::abs(rep.kf_mean + 4.0), 1e-8);
        check_flag(5, "potential_kf_constant/" + label, rep.kf_constant);
        check(5, "potential_spray/" + label, rep.spray_residual, 1e-9);
        check(5, "potential_connection/" + label, rep.connection_residual, 1e-8);

        ClassificationReport cls = classify(m, pts, cfg.tolerance);
        check_flag(5, "family_purely_hermitian/" + label, cls.purely_hermitian);
        check_flag(5, "family_kahler/" + label, cls.kahler);
        check_flag(5, "family_complex_berwald/" + label, cls.complex_berwald);
        check_flag(5, "family_douglas/" + label, cls.douglas);
        check_flag(5, "family_projectively_flat/" + label, cls.projectively_flat);

        {
            ConnectionBundle conn(m);
            CurvatureBundle curv(conn);
            FieldTensor w = weyl_berwald_invariant(curv, pts, cfg.tolerance);
            EvalContext ctx;
            double w_res = 0, id_res = 0;
            for (const EvalPoint& p : pts) {
                ctx.set_point(p);
                auto chk = berwald_weyl_check(curv, w, ctx);
                w_res = std::max(w_res, chk.w_max / chk.scale);
                id_res = std::max(id_res, chk.identity_residual);
            }
            root[label]["weyl_berwald_max"] = w_res;
            root[label]["quarter_curvature_identity"] = id_res;
            check(5, "weyl_berwald/" + label, w_res, 1e-8);
            check(5, "quarter_curvature/" + label, id_res, 1e-7);
        }
    }

    // ----- criterion 7: pair relatedness
    void pair_block(const FinslerMetric& a, const FinslerMetric& b, bool expect_related,
                    bool check_factor, Json& root) {
        ConnectionBundle ca(a), cb(b);
        auto pts = points(a.n(), std::min(cfg.sampling.count, 20), 29);
        RelatednessReport rep = projective_relatedness_test(ca, cb, pts, 1e-8);
        std::string key = a.label() + "|" + b.label();
        root[key] = to_json(rep);
        check_flag(7, "paths_agree/" + key, rep.paths_agree);
        if (expect_related) {
            check_flag(7, "related/" + key, rep.verdict == Relatedness::Related);
            check(7, "spray_residual/" + key, rep.max_spray_residual, 1e-8);
        } else {
            check_flag(7, "not_related/" + key, rep.verdict == Relatedness::NotRelated);
        }
        if (check_factor) {
            // recovered P against the potential derivative rho_r eta^r
            Expr rho = bergman_rho(a.n());
            Expr rho_eta = Expr::zero();
            for (int r = 1; r <= a.n(); ++r) {
                rho_eta = rho_eta + d(rho, VarKind::Z, r) * Expr::eta(r);
            }
            EvalContext ctx;
            double worst = 0;
            for (size_t i = 0; i < pts.size(); ++i) {
                ctx.set_point(pts[i]);
                worst = std::max(worst, std::abs(rep.factors[i].p - ctx.value(rho_eta)));
            }
            root[key]["factor_vs_potential"] = worst;
            check(7, "factor/" + key, worst, 1e-8);
        }
    }

    // ----- criterion 6: projective invariance under synthetic changes
    void invariance_block(Json& root) {
        struct Case {
            FinslerMetric m;
            std::string p;
            bool weakly_kahler;
        };
        std::vector<Case> cases;
        cases.push_back({make_euclidean(2), "zb1*e1/(1 - z1*zb1 - z2*zb2)", true});
        cases.push_back({make_euclidean(2), "e1*eb1*e2/(e1*eb1 + e2*eb2)", true});
        cases.push_back({make_bergman(2), "zb1*e1 + zb2*e2", true});
        cases.push_back({make_conformal(), "z2*e2 + 0.25*zb1*e1", false});

        auto pts = points(2, 20, 31);
        for (const auto& c : cases) {
            SprayData base = SprayData::of_metric(ConnectionBundle(c.m));
            SyntheticChange chg = synthetic_change(base, parse(c.p, 2), pts, 1e-8);
            DouglasBundle d0 = build_douglas(base);
            DouglasBundle d1 = build_douglas(chg.data);

            EvalContext ctx;
            double worst_d = 0, worst_t = 0, worst_w = 0;
            WeylBundle w0, w1;
            if (c.weakly_kahler) {
                w0 = build_weyl(base);
                w1 = build_weyl(chg.data);
            }
            for (const EvalPoint& p : pts) {
                ctx.set_point(p);
                for (int i = 0; i < 2; ++i) {
                    Complex x = ctx.value(d0.d[i]), y = ctx.value(d1.d[i]);
                    worst_d = std::max(worst_d, std::abs(x - y) / (1.0 + std::abs(x)));
                }
                const FieldTensor* t0[3] = {&d0.d_hv, &d0.d_barvbar, &d0.d_mixedv};
                const FieldTensor* t1[3] = {&d1.d_hv, &d1.d_barvbar, &d1.d_mixedv};
                for (int t = 0; t < 3; ++t) {
                    double scale = 1.0 + t0[t]->max_abs(ctx);
                    for (size_t e = 0; e < t0[t]->entries().size(); ++e) {
                        Complex x = ctx.value(t0[t]->entries()[e]);
                        Complex y = ctx.value(t1[t]->entries()[e]);
                        worst_t = std::max(worst_t, std::abs(x - y) / scale);
                    }
                }
                if (c.weakly_kahler) {
                    double s3 = 1.0 + w0.w3.max_abs(ctx), s4 = 1.0 + w0.w4.max_abs(ctx);
                    for (size_t e = 0; e < w0.w3.entries().size(); ++e) {
                        worst_w = std::max(worst_w, std::abs(ctx.value(w0.w3.entries()[e]) -
                                                             ctx.value(w1.w3.entries()[e])) / s3);
                    }
                    for (size_t e = 0; e < w0.w4.entries().size(); ++e) {
                        worst_w = std::max(worst_w, std::abs(ctx.value(w0.w4.entries()[e]) -
                                                             ctx.value(w1.w4.entries()[e])) / s4);
                    }
                }
            }
            std::string key = c.m.label() + "|" + c.p;
            Json node;
            node["douglas_spray_deviation"] = worst_d;
            node["douglas_tensor_deviation"] = worst_t;
            check(6, "douglas_invariance/" + key, std::max(worst_d, worst_t), 1e-7);
            if (c.weakly_kahler) {
                node["weyl_deviation"] = worst_w;
                check(6, "weyl_invariance/" + key, worst_w, 1e-7);
            }
            root[key] = node;
        }
    }

    // ----- criterion 8: geodesics
    void geodesic_block(Json& root) {
        ConnectionBundle flat1(make_euclidean(1));
        ConnectionBundle disc1(make_bergman(1));

        // straight lines under the flat metric
        auto straight = integrate_geodesic(flat1, {0.0}, {Complex(0.6, 0.3)}, 0.01, 100, 10.0);
        double line_res = 0;
        for (size_t i = 0; i < straight.z.size(); ++i) {
            line_res = std::max(line_res,
                                std::abs(straight.z[i][0] - straight.s[i] * Complex(0.6, 0.3)));
        }
        root["straight_line_residual"] = line_res;
        check(8, "straight_lines", line_res, 1e-12);

        // fourth-order convergence under step halving
        auto ref = integrate_geodesic(disc1, {0.0}, {1.0}, 1.0 / 400.0, 400);
        auto coarse = integrate_geodesic(disc1, {0.0}, {1.0}, 1.0 / 25.0, 25);
        auto fine = integrate_geodesic(disc1, {0.0}, {1.0}, 1.0 / 50.0, 50);
        double ratio = std::abs(coarse.z.back()[0] - ref.z.back()[0]) /
                       std::abs(fine.z.back()[0] - ref.z.back()[0]);
        root["rk4_halving_ratio"] = ratio;
        check_flag(8, "rk4_order", ratio >= 12.0 && ratio <= 20.0);

        // point-set coincidence for the related pair on three initial
        // conditions (center and radial data share straight chords)
        struct Probe {
            Complex z0, eta0;
            double flat_step;
        };
        Probe probes[] = {{0.0, 1.0, 0.007}, {0.0, Complex(0.5, 0.5), 0.01}, {0.3, 1.0, 0.004}};
        Json sets = Json::array();
        int idx = 0;
        for (const Probe& pr : probes) {
            auto a = integrate_geodesic(flat1, {pr.z0}, {pr.eta0}, pr.flat_step, 100);
            auto b = integrate_geodesic(disc1, {pr.z0}, {pr.eta0}, 0.01, 100);
            auto cmp = pointset_compare(a, b, 1e-5);
            Json node;
            node["deviation"] = cmp.max_deviation;
            node["coincide"] = cmp.coincide;
            sets.push_back(node);
            check_flag(8, "pointset_coincide/" + std::to_string(idx++), cmp.coincide);
        }
        root["related_pair_pointsets"] = sets;

        // soundness witness: the unrelated pair must split on some probe
        ConnectionBundle flat2(make_euclidean(2));
        ConnectionBundle conf(make_conformal());
        bool any_split = false;
        auto a = integrate_geodesic(flat2, {0.3, 0.1}, {Complex(0, 1), 1.0}, 0.005, 80);
        auto b = integrate_geodesic(conf, {0.3, 0.1}, {Complex(0, 1), 1.0}, 0.005, 80);
        any_split = !pointset_compare(a, b, 1e-5).coincide;
        root["unrelated_pair_splits"] = any_split;
        check_flag(8, "pointset_split_witness", any_split);

        // theta^* along weakly Kaehler traces
        auto tr = integrate_geodesic(disc1, {0.3}, {1.0}, 0.01, 60);
        root["weakly_kahler_max_theta"] = tr.max_theta;
        check(8, "theta_along_traces", tr.max_theta, 1e-10);
    }


    void run() {
        Json& rep = out.report;
        rep["schema"] = kReportSchema;
        rep["version"] = kToolVersion;
        Json cfg_echo;
        cfg_echo["tolerance"] = cfg.tolerance;
        cfg_echo["sampling"] = Json{{"count", cfg.sampling.count},
                                    {"seed", cfg.sampling.seed},
                                    {"z_radius", cfg.sampling.z_radius},
                                    {"eta_floor", cfg.sampling.eta_floor}};
        cfg_echo["quartic_eps"] = cfg.quartic_eps;
        rep["config"] = cfg_echo;

        Json metrics;
        std::vector<FinslerMetric> catalog{make_euclidean(1), make_bergman(1), make_euclidean(2),
                                           make_bergman(2), make_quartic(cfg.quartic_eps),
                                           make_conformal()};
        for (FinslerMetric& m : catalog) {
            Json node;
            node["n"] = m.n();
            node["L"] = print(m.L());
            ConnectionBundle conn(m);
            CurvatureBundle curv(conn);
            oracle_block(m, node);
            validate_block(m, conn, node);
            identity_block(m, curv, node);
            classify_block(m, node);
            metrics[m.label()] = std::move(node);
        }
        rep["metrics"] = std::move(metrics);

        Json family;
        potential_block(1, family);
        potential_block(2, family);
        rep["potential_family"] = std::move(family);

        Json pairs;
        pair_block(make_euclidean(1), make_bergman(1), true, true, pairs);
        pair_block(make_euclidean(2), make_bergman(2), true, true, pairs);
        pair_block(make_euclidean(2), make_conformal(), false, false, pairs);
        rep["pairs"] = std::move(pairs);

        Json invariance;
        invariance_block(invariance);
        rep["projective_invariance"] = std::move(invariance);

        Json geo;
        geodesic_block(geo);
        rep["geodesics"] = std::move(geo);

        Json checks = Json::array();
        out.pass = true;
        for (const auto& c : out.checks) {
            out.pass = out.pass && c.pass;
            checks.push_back(Json{{"criterion", c.criterion},
                                  {"name", c.name},
                                  {"pass", c.pass},
                                  {"value", c.value},
                                  {"threshold", c.threshold}});
        }
        rep["checks"] = std::move(checks);
        rep["pass"] = out.pass;
    }
};

}  // namespace

SuiteResult run_suite(const SuiteConfig& cfg) {
    SuiteRunner runner{cfg, {}};
    runner.run();
    return std::move(runner.out);
}

}  // namespace cfin
