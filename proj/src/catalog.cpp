#include "cfin/catalog.hpp"

#include "cfin/parser.hpp"

namespace cfin {

namespace {

std::string hermitian_norm(int n) {
    std::string s;
    for (int k = 1; k <= n; ++k) {
        if (k > 1) s += " + ";
        s += "e" + std::to_string(k) + "*eb" + std::to_string(k);
    }
    return s;
}

std::string one_minus_zz(int n) {
    std::string s = "1";
    for (int k = 1; k <= n; ++k) s += " - z" + std::to_string(k) + "*zb" + std::to_string(k);
    return s;
}

}  // namespace

std::string euclidean_source(int n) { return hermitian_norm(n); }

std::string bergman_source(int n) {
    if (n == 1) return "e1*eb1/(" + one_minus_zz(1) + ")^2";
    // ((1-|z|^2)|eta|^2 + (zb.eta)(z.etabar)) / (1-|z|^2)^2
    std::string zbeta, zetab;
    for (int k = 1; k <= n; ++k) {
        if (k > 1) {
            zbeta += " + ";
            zetab += " + ";
        }
        zbeta += "zb" + std::to_string(k) + "*e" + std::to_string(k);
        zetab += "z" + std::to_string(k) + "*eb" + std::to_string(k);
    }
    std::string u = one_minus_zz(n);
    return "((" + u + ")*(" + hermitian_norm(n) + ") + (" + zbeta + ")*(" + zetab + "))/(" + u + ")^2";
}

std::string quartic_source(double eps) {
    std::string h = hermitian_norm(2);
    return h + " + " + format_double(eps) + "*((e1*eb1)^2 + (e2*eb2)^2)/(" + h + ")";
}

std::string conformal_source() { return "exp(z1*zb1)*(" + hermitian_norm(2) + ")"; }

FinslerMetric make_euclidean(int n) {
    return FinslerMetric::from_source(euclidean_source(n), n, "euclidean(" + std::to_string(n) + ")");
}

FinslerMetric make_bergman(int n) {
    return FinslerMetric::from_source(bergman_source(n), n, "bergman(" + std::to_string(n) + ")");
}

FinslerMetric make_quartic(double eps) {
    return FinslerMetric::from_source(quartic_source(eps), 2, "quartic(2)");
}

FinslerMetric make_conformal() {
    return FinslerMetric::from_source(conformal_source(), 2, "conformal(2)");
}

Expr bergman_rho(int n) { return parse("-log(" + one_minus_zz(n) + ")", n); }

FinslerMetric catalog_metric(const std::string& name, int n, double eps) {
    if (name == "euclidean") return make_euclidean(n);
    if (name == "bergman") return make_bergman(n);
    if (name == "quartic") {
        if (n != 2) throw std::invalid_argument("quartic is defined for n=2");
        return make_quartic(eps);
    }
    if (name == "conformal") {
        if (n != 2) throw std::invalid_argument("conformal is defined for n=2");
        return make_conformal();
    }
    throw std::invalid_argument("unknown catalog metric '" + name + "'");
}

}  // namespace cfin
