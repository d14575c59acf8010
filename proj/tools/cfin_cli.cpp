#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "cfin/catalog.hpp"
#include "cfin/parser.hpp"
#include "cfin/suite.hpp"

using namespace cfin;

namespace {

struct CommonOpts {
    std::string metric = "euclidean";
    std::string metric_file;
    int n = 1;
    double eps = 0.1;
    SamplingConfig sampling{32, 1, 0.7, 0.05};
    double tol = 1e-8;
    std::string out;
};

void add_sampling_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--count", o.sampling.count, "sample point count");
    cmd->add_option("--seed", o.sampling.seed, "sampling seed");
    cmd->add_option("--z-radius", o.sampling.z_radius, "radius of the z ball");
    cmd->add_option("--eta-floor", o.sampling.eta_floor, "per-component |eta| floor");
    cmd->add_option("--tol", o.tol, "residual tolerance");
    cmd->add_option("--out", o.out, "write the JSON report to this file");
}

void add_metric_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--metric", o.metric, "catalog metric: euclidean|bergman|quartic|conformal");
    cmd->add_option("--n", o.n, "complex dimension");
    cmd->add_option("--epsilon", o.eps, "quartic perturbation strength");
    cmd->add_option("--metric-file", o.metric_file,
                    "JSON metric definition {label, n, L, sampling}");
    add_sampling_opts(cmd, o);
}

FinslerMetric load_metric(CommonOpts& o) {
    if (!o.metric_file.empty()) {
        std::ifstream in(o.metric_file);
        if (!in) throw std::invalid_argument("cannot open metric file " + o.metric_file);
        Json doc = Json::parse(in);
        o.n = doc.at("n").get<int>();
        std::string label = doc.value("label", o.metric_file);
        if (doc.contains("sampling")) {
            const Json& s = doc["sampling"];
            o.sampling.count = s.value("count", o.sampling.count);
            o.sampling.seed = s.value("seed", o.sampling.seed);
            o.sampling.z_radius = s.value("z_radius", o.sampling.z_radius);
            o.sampling.eta_floor = s.value("eta_floor", o.sampling.eta_floor);
        }
        return FinslerMetric::from_source(doc.at("L").get<std::string>(), o.n, label);
    }
    return catalog_metric(o.metric, o.n, o.eps);
}

std::vector<Complex> parse_complex_list(const std::string& text, int n) {
    std::vector<Complex> out;
    size_t pos = 0;
    ExprEvaluator ev;
    ev.set_point(EvalPoint({Complex(0, 0)}, {Complex(1, 0)}));
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string part = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!part.empty()) out.push_back(ev.value(parse(part, 0)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (int(out.size()) != n) {
        throw std::invalid_argument("expected " + std::to_string(n) + " comma-separated components");
    }
    return out;
}

int emit_report(const Json& doc, const std::string& out_path, bool pass) {
    std::string text = dump_deterministic(doc);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
    }
    return pass ? 0 : 1;
}

Json config_echo(const CommonOpts& o) {
    Json j;
    j["tolerance"] = o.tol;
    j["sampling"] = Json{{"count", o.sampling.count},
                         {"seed", o.sampling.seed},
                         {"z_radius", o.sampling.z_radius},
                         {"eta_floor", o.sampling.eta_floor}};
    return j;
}

int cmd_validate(CommonOpts& o) {
    FinslerMetric m = load_metric(o);
    auto pts = sample_points(m.n(), o.sampling);
    ValidationReport rep = validate(m, pts, o.tol);
    Json doc;
    doc["schema"] = kReportSchema;
    doc["version"] = kToolVersion;
    doc["config"] = config_echo(o);
    doc["validate"] = to_json(rep);
    return emit_report(doc, o.out, rep.pass);
}

int cmd_classify(CommonOpts& o) {
    FinslerMetric m = load_metric(o);
    auto pts = sample_points(m.n(), o.sampling);
    ClassificationReport rep = classify(m, pts, o.tol);
    Json doc;
    doc["schema"] = kReportSchema;
    doc["version"] = kToolVersion;
    doc["config"] = config_echo(o);
    doc["classification"] = to_json(rep);
    bool ok = rep.lattice_ok;
    for (const auto& tc : rep.theorem_checks) ok = ok && tc.pass;
    return emit_report(doc, o.out, ok);
}

int cmd_tensors(CommonOpts& o, int points) {
    FinslerMetric m = load_metric(o);
    SamplingConfig sc = o.sampling;
    sc.count = points;
    auto pts = sample_points(m.n(), sc);
    ConnectionBundle conn(m);
    CurvatureBundle curv(conn);

    Json doc;
    doc["schema"] = kReportSchema;
    doc["version"] = kToolVersion;
    doc["config"] = config_echo(o);
    doc["label"] = m.label();
    doc["L"] = print(m.L());

    auto tensor_values = [&](const FieldTensor& t, EvalContext& ctx) {
        Json arr = Json::array();
        for (const Field& f : t.entries()) {
            Complex v = ctx.value(f);
            arr.push_back(Json::array({v.real(), v.imag()}));
        }
        return arr;
    };

    Json samples = Json::array();
    EvalContext ctx;
    for (const EvalPoint& p : pts) {
        ctx.set_point(p);
        Json node;
        Json zj = Json::array(), ej = Json::array();
        for (Complex c : p.z) zj.push_back(Json::array({c.real(), c.imag()}));
        for (Complex c : p.eta) ej.push_back(Json::array({c.real(), c.imag()}));
        node["z"] = zj;
        node["eta"] = ej;
        Complex L = ctx.value(m.L());
        node["L"] = Json::array({L.real(), L.imag()});

        Json g = Json::array(), ginv = Json::array();
        Eigen::MatrixXcd gm = ctx.metric_matrix(*m.hessian());
        Eigen::MatrixXcd gi = ctx.inverse(*m.hessian());
        for (int i = 0; i < m.n(); ++i)
            for (int j = 0; j < m.n(); ++j) {
                g.push_back(Json::array({gm(i, j).real(), gm(i, j).imag()}));
                ginv.push_back(Json::array({gi(i, j).real(), gi(i, j).imag()}));
            }
        node["g"] = g;
        node["g_inverse"] = ginv;
        node["chern_finsler_n"] = tensor_values(conn.chern_finsler_n(), ctx);
        node["canonical_n"] = tensor_values(conn.canonical_n(), ctx);
        node["spray"] = tensor_values(conn.spray(), ctx);
        node["chern_l"] = tensor_values(conn.chern_l(), ctx);
        node["chern_c"] = tensor_values(conn.chern_c(), ctx);
        node["torsion"] = tensor_values(conn.torsion(), ctx);
        node["theta_star"] = tensor_values(conn.theta_star(), ctx);
        node["berwald_gamma"] = tensor_values(conn.berwald_gamma(), ctx);
        node["berwald_gamma_mixed"] = tensor_values(conn.berwald_gamma_mixed(), ctx);
        node["holomorphic_curvature"] = curv.holomorphic_curvature_at(ctx);
        samples.push_back(std::move(node));
    }
    doc["samples"] = std::move(samples);
    return emit_report(doc, o.out, true);
}

int cmd_compare(CommonOpts& o, const std::string& a_name, const std::string& b_name) {
    FinslerMetric a = catalog_metric(a_name, o.n, o.eps);
    FinslerMetric b = catalog_metric(b_name, o.n, o.eps);
    ConnectionBundle ca(a), cb(b);
    auto pts = sample_points(o.n, o.sampling);
    RelatednessReport rep = projective_relatedness_test(ca, cb, pts, o.tol);
    Json doc;
    doc["schema"] = kReportSchema;
    doc["version"] = kToolVersion;
    doc["config"] = config_echo(o);
    doc["pair"] = a.label() + "|" + b.label();
    doc["result"] = to_json(rep);
    return emit_report(doc, o.out, rep.paths_agree);
}

int cmd_geodesic(CommonOpts& o, const std::string& z0_text, const std::string& eta0_text,
                 double step, int steps, const std::string& csv_path) {
    FinslerMetric m = load_metric(o);
    ConnectionBundle conn(m);
    auto z0 = parse_complex_list(z0_text, m.n());
    auto eta0 = parse_complex_list(eta0_text, m.n());
    GeodesicTrace tr = integrate_geodesic(conn, z0, eta0, step, steps);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::binary);
        out << trace_to_csv(tr);
    }
    Json doc;
    doc["schema"] = kReportSchema;
    doc["version"] = kToolVersion;
    doc["config"] = config_echo(o);
    doc["trace"] = to_json(tr);
    return emit_report(doc, o.out, true);
}

int cmd_suite(CommonOpts& o) {
    SuiteConfig sc;
    sc.sampling = o.sampling;
    sc.tolerance = o.tol;
    sc.quartic_eps = o.eps;
    SuiteResult res = run_suite(sc);
    int failed = 0;
    for (const auto& c : res.checks) failed += c.pass ? 0 : 1;
    std::cerr << "suite: " << res.checks.size() - failed << "/" << res.checks.size()
              << " checks passed\n";
    return emit_report(res.report, o.out, res.pass);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex Finsler metric toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    o.sampling.count = 32;

    auto* validate_cmd = app.add_subcommand("validate", "check the defining axioms at sample points");
    add_metric_opts(validate_cmd, o);

    auto* classify_cmd = app.add_subcommand("classify", "classify the metric at sample points");
    add_metric_opts(classify_cmd, o);

    int tensor_points = 3;
    auto* tensors_cmd = app.add_subcommand("tensors", "dump tensor values at sample points");
    add_metric_opts(tensors_cmd, o);
    tensors_cmd->add_option("--points", tensor_points, "number of sample points");

    std::string pair_a = "euclidean", pair_b = "bergman";
    auto* compare_cmd = app.add_subcommand("compare", "test projective relatedness of two metrics");
    compare_cmd->add_option("a", pair_a, "first catalog metric")->required();
    compare_cmd->add_option("b", pair_b, "second catalog metric")->required();
    compare_cmd->add_option("--n", o.n, "complex dimension");
    compare_cmd->add_option("--epsilon", o.eps, "quartic perturbation strength");
    add_sampling_opts(compare_cmd, o);

    std::string z0_text = "0", eta0_text = "1", csv_path;
    double step = 0.01;
    int steps = 100;
    auto* geo_cmd = app.add_subcommand("geodesic", "integrate a complex geodesic");
    add_metric_opts(geo_cmd, o);
    geo_cmd->add_option("--z0", z0_text, "initial position, comma-separated complex components");
    geo_cmd->add_option("--eta0", eta0_text, "initial direction");
    geo_cmd->add_option("--step", step, "integration step");
    geo_cmd->add_option("--steps", steps, "number of steps");
    geo_cmd->add_option("--csv", csv_path, "write the trace as CSV to this file");

    auto* suite_cmd = app.add_subcommand("suite", "full catalog acceptance run");
    suite_cmd->add_option("--epsilon", o.eps, "quartic perturbation strength");
    add_sampling_opts(suite_cmd, o);
    bool suite_default_count = true;
    suite_cmd->callback([&] { suite_default_count = !suite_cmd->count("--count"); });

    std::string config_path;
    app.add_option("--config", config_path, "JSON config mirroring the run options");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config " + config_path);
            Json doc = Json::parse(in);
            o.tol = doc.value("tolerance", o.tol);
            if (doc.contains("sampling")) {
                const Json& s = doc["sampling"];
                o.sampling.count = s.value("count", o.sampling.count);
                o.sampling.seed = s.value("seed", o.sampling.seed);
                o.sampling.z_radius = s.value("z_radius", o.sampling.z_radius);
                o.sampling.eta_floor = s.value("eta_floor", o.sampling.eta_floor);
            }
        }

        if (validate_cmd->parsed()) return cmd_validate(o);
        if (classify_cmd->parsed()) return cmd_classify(o);
        if (tensors_cmd->parsed()) return cmd_tensors(o, tensor_points);
        if (compare_cmd->parsed()) return cmd_compare(o, pair_a, pair_b);
        if (geo_cmd->parsed()) return cmd_geodesic(o, z0_text, eta0_text, step, steps, csv_path);
        if (suite_cmd->parsed()) {
            if (suite_default_count) o.sampling.count = 24;
            return cmd_suite(o);
        }
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 3;
    } catch (const NotPositiveDefiniteError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
