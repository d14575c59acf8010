#include "cfin/geodesics.hpp"

#include <cmath>

#include "cfin/parser.hpp"

namespace cfin {

namespace {

struct State {
    std::vector<Complex> z, w;
};

State axpy(const State& y, double h, const State& k) {
    State out = y;
    for (size_t i = 0; i < out.z.size(); ++i) {
        out.z[i] += h * k.z[i];
        out.w[i] += h * k.w[i];
    }
    return out;
}

double norm2(const std::vector<Complex>& v) {
    double s = 0;
    for (Complex c : v) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace

GeodesicTrace integrate_geodesic(const ConnectionBundle& conn, std::vector<Complex> z0,
                                 std::vector<Complex> eta0, double step, int steps,
                                 double domain_radius) {
    const int n = conn.n();
    if (int(z0.size()) != n || int(eta0.size()) != n) {
        throw std::invalid_argument("integrate_geodesic: dimension mismatch");
    }
    if (norm2(eta0) == 0.0) throw std::invalid_argument("integrate_geodesic: eta0 must be nonzero");

    GeodesicTrace tr;
    tr.z0 = z0;
    tr.eta0 = eta0;
    tr.step = step;
    tr.steps = steps;

    EvalContext ctx;
    auto rhs = [&](const State& y, State& out) {
        ctx.set_point(EvalPoint(y.z, y.w));
        out.z = y.w;
        out.w.resize(n);
        for (int i = 1; i <= n; ++i) {
            Complex theta = ctx.value(conn.theta_star().at({i}));
            tr.max_theta = std::max(tr.max_theta, std::abs(theta));
            out.w[i - 1] = theta - 2.0 * ctx.value(conn.spray().at({i}));
        }
    };

    State y{z0, eta0};
    tr.s.push_back(0.0);
    tr.z.push_back(y.z);
    State k1, k2, k3, k4;
    for (int it = 1; it <= steps; ++it) {
        try {
            rhs(y, k1);
            rhs(axpy(y, 0.5 * step, k1), k2);
            rhs(axpy(y, 0.5 * step, k2), k3);
            rhs(axpy(y, step, k3), k4);
        } catch (const std::exception&) {
            tr.truncated = true;
            break;
        }
        for (int i = 0; i < n; ++i) {
            y.z[i] += step / 6.0 * (k1.z[i] + 2.0 * k2.z[i] + 2.0 * k3.z[i] + k4.z[i]);
            y.w[i] += step / 6.0 * (k1.w[i] + 2.0 * k2.w[i] + 2.0 * k3.w[i] + k4.w[i]);
        }
        if (norm2(y.z) >= domain_radius) {
            tr.truncated = true;
            break;
        }
        tr.s.push_back(it * step);
        tr.z.push_back(y.z);
    }
    return tr;
}

namespace {

double point_segment_distance(const std::vector<Complex>& p, const std::vector<Complex>& a,
                              const std::vector<Complex>& b) {
    // treat C^n as R^{2n}
    double ab2 = 0, ap_ab = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        Complex ab = b[i] - a[i];
        Complex ap = p[i] - a[i];
        ab2 += std::norm(ab);
        ap_ab += ap.real() * ab.real() + ap.imag() * ab.imag();
    }
    double t = ab2 > 0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        Complex c = a[i] + t * (b[i] - a[i]);
        d2 += std::norm(p[i] - c);
    }
    return std::sqrt(d2);
}

double directed_deviation(const GeodesicTrace& from, const GeodesicTrace& to) {
    double worst = 0;
    for (const auto& p : from.z) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t s = 0; s + 1 < to.z.size(); ++s) {
            best = std::min(best, point_segment_distance(p, to.z[s], to.z[s + 1]));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

PointsetComparison pointset_compare(const GeodesicTrace& a, const GeodesicTrace& b, double tol) {
    if (a.z.size() < 3 || b.z.size() < 3) {
        throw std::invalid_argument("pointset_compare: traces need at least 3 samples");
    }
    PointsetComparison out;
    double ab = directed_deviation(a, b);
    double ba = directed_deviation(b, a);
    out.max_deviation = std::max(ab, ba);
    // Same parameter range covers different arc lengths for different
    // metrics, so coincidence is containment of one sampled set in the
    // other's polyline, not the symmetric distance (which is reported).
    out.coincide = std::min(ab, ba) <= tol;
    return out;
}

std::string trace_to_csv(const GeodesicTrace& t) {
    std::string out = "s";
    for (size_t k = 1; k <= t.z0.size(); ++k) {
        out += ",re_z" + std::to_string(k) + ",im_z" + std::to_string(k);
    }
    out += "\n";
    for (size_t i = 0; i < t.s.size(); ++i) {
        out += format_double(t.s[i]);
        for (const Complex& c : t.z[i]) {
            out += "," + format_double(c.real()) + "," + format_double(c.imag());
        }
        out += "\n";
    }
    return out;
}

}  // namespace cfin
