#include "cfin/report.hpp"

#include <cmath>
#include <cstdio>

namespace cfin {

namespace {

std::string format_17g(double x) {
    if (std::isnan(x)) return "null";
    if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emit(const Json& v, std::string& out, int indent, int depth) {
    std::string pad(size_t(indent) * depth, ' ');
    std::string pad_in(size_t(indent) * (depth + 1), ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            size_t i = 0;
            for (auto it = v.begin(); it != v.end(); ++it, ++i) {
                out += pad_in;
                out += Json(it.key()).dump();
                out += ": ";
                emit(it.value(), out, indent, depth + 1);
                if (i + 1 < v.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < v.size(); ++i) {
                out += pad_in;
                emit(v[i], out, indent, depth + 1);
                if (i + 1 < v.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_17g(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

Json point_json(const EvalPoint& p) {
    Json z = Json::array(), eta = Json::array();
    for (Complex c : p.z) z.push_back(Json::array({c.real(), c.imag()}));
    for (Complex c : p.eta) eta.push_back(Json::array({c.real(), c.imag()}));
    return Json{{"z", z}, {"eta", eta}};
}

}  // namespace

std::string dump_deterministic(const Json& doc, int indent) {
    std::string out;
    emit(doc, out, indent, 0);
    out += '\n';
    return out;
}

Json to_json(const ValidationReport& rep) {
    Json j;
    j["label"] = rep.label;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    j["points"] = rep.points.size();
    j["max_residual"] = rep.max_residual;
    j["min_eigenvalue"] = rep.min_eigenvalue;
    double euler = 0, reality = 0, hermitian = 0, c_contraction = 0;
    for (const auto& p : rep.points) {
        euler = std::max({euler, p.euler_L_eta, p.euler_L_etabar, p.euler_g_eta, p.euler_g_etabar,
                          p.reconstruction});
        reality = std::max(reality, p.reality);
        hermitian = std::max(hermitian, p.hermitian);
        c_contraction = std::max(c_contraction, p.c_contraction);
    }
    j["max_euler_residual"] = euler;
    j["max_reality_residual"] = reality;
    j["max_hermitian_residual"] = hermitian;
    j["max_c_contraction_residual"] = c_contraction;
    return j;
}

Json to_json(const ClassificationReport& rep) {
    Json j;
    j["label"] = rep.label;
    j["n"] = rep.n;
    j["tolerance"] = rep.tolerance;
    j["points"] = rep.points.size();
    Json verdicts;
    verdicts["purely_hermitian"] = rep.purely_hermitian;
    verdicts["strongly_kahler"] = rep.strongly_kahler;
    verdicts["kahler"] = rep.kahler;
    verdicts["weakly_kahler"] = rep.weakly_kahler;
    verdicts["generalized_berwald"] = rep.generalized_berwald;
    verdicts["complex_berwald"] = rep.complex_berwald;
    verdicts["douglas"] = rep.douglas;
    verdicts["locally_minkowski"] = rep.locally_minkowski;
    verdicts["projectively_flat"] = rep.projectively_flat;
    j["verdicts"] = verdicts;
    if (rep.has_constant_kf) {
        j["constant_kf"] = rep.constant_kf;
    } else {
        j["constant_kf"] = nullptr;
    }
    j["kf_variance"] = rep.kf_variance;
    Json residuals;
    auto max_of = [&](auto field) {
        double m = 0;
        for (const auto& p : rep.points) m = std::max(m, p.*field);
        return m;
    };
    residuals["strongly_kahler"] = max_of(&PredicatePoint::strongly_kahler);
    residuals["kahler"] = max_of(&PredicatePoint::kahler);
    residuals["weakly_kahler"] = max_of(&PredicatePoint::weakly_kahler);
    residuals["purely_hermitian"] = max_of(&PredicatePoint::purely_hermitian);
    residuals["generalized_berwald"] = max_of(&PredicatePoint::generalized_berwald);
    residuals["berwald_l_vertical"] = max_of(&PredicatePoint::berwald_l_vertical);
    residuals["douglas_invariants"] = max_of(&PredicatePoint::douglas_invariants);
    residuals["douglas_theta"] = max_of(&PredicatePoint::douglas_theta);
    residuals["locally_minkowski"] = max_of(&PredicatePoint::locally_minkowski);
    residuals["projectively_flat"] = max_of(&PredicatePoint::projectively_flat);
    residuals["theta_identity"] = max_of(&PredicatePoint::theta_identity);
    j["max_residuals"] = residuals;
    Json checks = Json::array();
    for (const auto& tc : rep.theorem_checks) {
        checks.push_back(Json{{"name", tc.name}, {"pass", tc.pass}, {"detail", tc.detail}});
    }
    j["theorem_checks"] = checks;
    j["lattice_ok"] = rep.lattice_ok;
    // flatness is judged against the flat Hermitian metric as the locally
    // Minkowski representative, and only at the sampled points
    j["flat_reference"] = "euclidean";
    return j;
}

Json to_json(const RelatednessReport& rep) {
    Json j;
    switch (rep.verdict) {
        case Relatedness::Related: j["verdict"] = "related"; break;
        case Relatedness::NotRelated: j["verdict"] = "not_related"; break;
        case Relatedness::Inconclusive: j["verdict"] = "inconclusive"; break;
    }
    j["paths_agree"] = rep.paths_agree;
    j["max_spray_residual"] = rep.max_spray_residual;
    j["max_direct_residual"] = rep.max_direct_residual;
    j["homogeneity_residual"] = rep.homogeneity_residual;
    Json factors = Json::array();
    for (const auto& f : rep.factors) {
        factors.push_back(Json{{"s", Json::array({f.s.real(), f.s.imag()})},
                               {"q", Json::array({f.q.real(), f.q.imag()})},
                               {"p", Json::array({f.p.real(), f.p.imag()})}});
    }
    j["factors"] = factors;
    return j;
}

Json to_json(const RhoFamilyReport& rep) {
    Json j;
    j["pass"] = rep.pass;
    j["spray_residual"] = rep.spray_residual;
    j["pde_residual"] = rep.pde_residual;
    j["connection_residual"] = rep.connection_residual;
    j["kf_residual"] = rep.kf_residual;
    j["hermitian_residual"] = rep.hermitian_residual;
    j["min_rho_eigenvalue"] = rep.min_rho_eigenvalue;
    j["kf_constant"] = rep.kf_constant;
    j["kf_mean"] = rep.kf_mean;
    return j;
}

Json to_json(const GeodesicTrace& tr) {
    Json j;
    j["step"] = tr.step;
    j["steps"] = tr.steps;
    j["samples"] = tr.s.size();
    j["truncated"] = tr.truncated;
    j["max_theta"] = tr.max_theta;
    j["initial"] = point_json(EvalPoint(tr.z0, tr.eta0));
    if (!tr.z.empty()) {
        Json last = Json::array();
        for (Complex c : tr.z.back()) last.push_back(Json::array({c.real(), c.imag()}));
        j["endpoint"] = last;
    }
    return j;
}

}  // namespace cfin
