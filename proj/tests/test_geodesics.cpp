#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfin/catalog.hpp"
#include "cfin/geodesics.hpp"

using namespace cfin;

TEST_CASE("flat geodesics are straight lines") {
    ConnectionBundle conn(make_euclidean(1));
    auto tr = integrate_geodesic(conn, {0.0}, {Complex(0.6, 0.3)}, 0.01, 100, 10.0);
    REQUIRE(tr.z.size() == 101);
    for (size_t i = 0; i < tr.z.size(); ++i) {
        Complex expect = tr.s[i] * Complex(0.6, 0.3);
        CHECK(std::abs(tr.z[i][0] - expect) < 1e-12);
    }
    CHECK(tr.max_theta < 1e-14);
}

TEST_CASE("disc geodesic through the center stays on the diameter") {
    ConnectionBundle conn(make_bergman(1));
    auto tr = integrate_geodesic(conn, {0.0}, {1.0}, 0.01, 100);
    REQUIRE(!tr.z.empty());
    for (const auto& z : tr.z) CHECK(std::abs(z[0].imag()) < 1e-9);
    // closed form z = tanh(s) for this normalization
    for (size_t i = 0; i < tr.z.size(); ++i) {
        CHECK(std::abs(tr.z[i][0].real() - std::tanh(tr.s[i])) < 1e-8);
    }
    CHECK(tr.max_theta < 1e-12);  // weakly Kaehler: the defect vanishes
}

TEST_CASE("step halving shows fourth-order convergence") {
    ConnectionBundle conn(make_bergman(1));
    auto ref = integrate_geodesic(conn, {0.0}, {1.0}, 1.0 / 400.0, 400);
    auto coarse = integrate_geodesic(conn, {0.0}, {1.0}, 1.0 / 25.0, 25);
    auto fine = integrate_geodesic(conn, {0.0}, {1.0}, 1.0 / 50.0, 50);
    Complex zref = ref.z.back()[0];
    double e_coarse = std::abs(coarse.z.back()[0] - zref);
    double e_fine = std::abs(fine.z.back()[0] - zref);
    double ratio = e_coarse / e_fine;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("point-set comparison basics") {
    ConnectionBundle conn(make_bergman(1));
    auto a = integrate_geodesic(conn, {0.0}, {1.0}, 0.01, 80);
    auto same = pointset_compare(a, a, 1e-12);
    CHECK(same.coincide);
    CHECK(same.max_deviation == 0.0);

    GeodesicTrace tiny;
    tiny.z0 = {0.0};
    tiny.z = {{Complex(0, 0)}, {Complex(0.1, 0)}};
    tiny.s = {0, 0.1};
    CHECK_THROWS_AS(pointset_compare(a, tiny, 1e-6), std::invalid_argument);
}

TEST_CASE("related metrics share the diameter as a point set") {
    ConnectionBundle flat(make_euclidean(1));
    ConnectionBundle disc(make_bergman(1));
    // the flat trace covers [0, 0.7]; the disc trace covers [0, tanh(1)]
    auto a = integrate_geodesic(flat, {0.0}, {1.0}, 0.007, 100);
    auto b = integrate_geodesic(disc, {0.0}, {1.0}, 0.01, 100);
    auto cmp = pointset_compare(a, b, 1e-6);
    CHECK(cmp.coincide);

    // radial initial data: also a shared straight chord
    auto a2 = integrate_geodesic(flat, {0.3}, {1.0}, 0.004, 100);
    auto b2 = integrate_geodesic(disc, {0.3}, {1.0}, 0.01, 100);
    auto cmp2 = pointset_compare(a2, b2, 1e-5);
    CHECK(cmp2.coincide);

    // complex direction through the center
    Complex dir(0.5, 0.5);
    auto a3 = integrate_geodesic(flat, {0.0}, {dir}, 0.01, 100);
    auto b3 = integrate_geodesic(disc, {0.0}, {dir}, 0.014, 100);
    auto cmp3 = pointset_compare(a3, b3, 1e-5);
    CHECK(cmp3.coincide);
}

TEST_CASE("generic off-radial data leaves the chord") {
    // the disc trace through (0.3, i) follows the metric's own geodesic arc,
    // not the flat vertical line, so the point sets split
    ConnectionBundle flat(make_euclidean(1));
    ConnectionBundle disc(make_bergman(1));
    auto a = integrate_geodesic(flat, {0.3}, {Complex(0, 1)}, 0.005, 100);
    auto b = integrate_geodesic(disc, {0.3}, {Complex(0, 1)}, 0.01, 100);
    auto cmp = pointset_compare(a, b, 1e-5);
    CHECK(!cmp.coincide);
    CHECK(cmp.max_deviation > 1e-3);
}

TEST_CASE("unrelated pair: probes split") {
    ConnectionBundle flat(make_euclidean(2));
    ConnectionBundle conf(make_conformal());
    bool any_split = false;
    std::vector<std::pair<std::vector<Complex>, std::vector<Complex>>> probes = {
        {{0.3, 0.1}, {Complex(0, 1), 1.0}},
        {{0.2, -0.2}, {1.0, Complex(0.5, 0.5)}},
        {{-0.3, 0.2}, {Complex(1, 0.2), Complex(0, 1)}},
    };
    for (const auto& [z0, eta0] : probes) {
        auto a = integrate_geodesic(flat, z0, eta0, 0.005, 80);
        auto b = integrate_geodesic(conf, z0, eta0, 0.005, 80);
        auto cmp = pointset_compare(a, b, 1e-5);
        if (!cmp.coincide) any_split = true;
    }
    CHECK(any_split);
}

TEST_CASE("domain exit truncates the trace with a flag") {
    ConnectionBundle conn(make_bergman(1));
    auto tr = integrate_geodesic(conn, {0.9}, {1.0}, 0.05, 100, 0.95);
    CHECK(tr.truncated);
    CHECK(tr.z.size() < 101);
    for (const auto& z : tr.z) CHECK(std::abs(z[0]) < 0.95);
}

TEST_CASE("csv export is stable and well-formed") {
    ConnectionBundle conn(make_euclidean(2));
    auto tr = integrate_geodesic(conn, {0.1, 0.2}, {1.0, Complex(0, 1)}, 0.1, 3, 10.0);
    std::string csv = trace_to_csv(tr);
    CHECK(csv.substr(0, 26) == "s,re_z1,im_z1,re_z2,im_z2\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv == trace_to_csv(tr));
}
