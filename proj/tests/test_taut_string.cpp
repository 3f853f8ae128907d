#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tdn/ecg.hpp"
#include "tdn/rng.hpp"

using namespace tdn;

namespace {

double diff_norm2(const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) s += (y[i + 1] - y[i]) * (y[i + 1] - y[i]);
    return s;  // squared l2 norm of D(y)
}

bool in_tube(const std::vector<double>& x, const std::vector<double>& y, double eps,
             double slack = 1e-12) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - y[i]) > eps + slack) return false;
    return true;
}

// Projected Gauss-Seidel for min sum (y_{i+1}-y_i)^2 with box constraints;
// slow but independent of the funnel sweep.
std::vector<double> qp_oracle(const std::vector<double>& x, double eps, int iters) {
    const std::size_t n = x.size();
    std::vector<double> y = x;
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double target;
            if (i == 0)
                target = y[1];
            else if (i == n - 1)
                target = y[n - 2];
            else
                target = 0.5 * (y[i - 1] + y[i + 1]);
            y[i] = std::clamp(target, x[i] - eps, x[i] + eps);
        }
    }
    return y;
}

std::vector<double> random_signal(Rng& rng, std::size_t n, int kind) {
    std::vector<double> x(n);
    switch (kind % 3) {
        case 0:
            for (double& v : x) v = rng.normal();
            break;
        case 1: {
            double acc = 0.0;
            for (double& v : x) {
                acc += 0.3 * rng.normal();
                v = acc;
            }
            break;
        }
        default:
            for (std::size_t i = 0; i < n; ++i)
                x[i] = std::sin(0.21 * static_cast<double>(i)) + 0.2 * rng.normal();
            break;
    }
    return x;
}

}  // namespace

TEST_CASE("taut string: zero epsilon is the identity") {
    std::vector<double> x{0.3, -1.2, 0.7, 0.7, 2.0};
    TautStringResult ts = taut_string(x, 0.0);
    CHECK(ts.approx == x);
}

TEST_CASE("taut string: constant signals are fixed points") {
    std::vector<double> x(40, 1.25);
    for (double eps : {0.0, 0.1, 3.0}) {
        TautStringResult ts = taut_string(x, eps);
        for (double v : ts.approx) CHECK(v == doctest::Approx(1.25).epsilon(1e-15));
        CHECK(ts.knots.empty());
    }
}

TEST_CASE("taut string: the [0,1,0] tent flattens at eps = 0.5") {
    TautStringResult ts = taut_string({0.0, 1.0, 0.0}, 0.5);
    REQUIRE(ts.approx.size() == 3);
    for (double v : ts.approx) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ts.knots.empty());
}

TEST_CASE("taut string input validation") {
    CHECK_THROWS_AS(taut_string({1.0, 2.0}, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(taut_string({1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("taut string: tube constraint and total-variation reduction on random signals") {
    Rng rng(101);
    for (int c = 0; c < 1000; ++c) {
        std::size_t n = rng.uniform_int(2, 200);
        std::vector<double> x = random_signal(rng, n, c);
        double eps = rng.uniform() * 1.5;
        TautStringResult ts = taut_string(x, eps);
        CHECK(in_tube(x, ts.approx, eps));
        CHECK(diff_norm2(ts.approx) <= diff_norm2(x) + 1e-10);
    }
}

TEST_CASE("taut string: no random tube-feasible competitor does better") {
    Rng rng(102);
    for (int c = 0; c < 120; ++c) {
        std::size_t n = rng.uniform_int(3, 60);
        std::vector<double> x = random_signal(rng, n, c);
        double eps = 0.05 + rng.uniform();
        TautStringResult ts = taut_string(x, eps);
        double best = diff_norm2(ts.approx);
        for (int z = 0; z < 100; ++z) {
            std::vector<double> comp(n);
            for (std::size_t i = 0; i < n; ++i) {
                double delta = (2.0 * rng.uniform() - 1.0) * eps;
                comp[i] = x[i] + delta;
            }
            CHECK(best <= diff_norm2(comp) + 1e-9);
        }
    }
}

TEST_CASE("taut string agrees with the projected Gauss-Seidel oracle") {
    Rng rng(103);
    for (int c = 0; c < 40; ++c) {
        std::size_t n = rng.uniform_int(3, 24);
        std::vector<double> x = random_signal(rng, n, c);
        double eps = 0.05 + 0.8 * rng.uniform();
        TautStringResult ts = taut_string(x, eps);
        std::vector<double> yq = qp_oracle(x, eps, 30000);
        CHECK(in_tube(x, ts.approx, eps));
        // the funnel solution must not lose to the iterative optimum
        CHECK(diff_norm2(ts.approx) <= diff_norm2(yq) + 1e-7);
    }
}

TEST_CASE("taut string: knots mark genuine slope changes") {
    // tube narrow enough that the string must bend around the step
    std::vector<double> x;
    for (int i = 0; i < 20; ++i) x.push_back(0.0);
    for (int i = 0; i < 20; ++i) x.push_back(5.0);
    TautStringResult ts = taut_string(x, 0.25);
    CHECK(!ts.knots.empty());
    for (std::size_t k : ts.knots) {
        CHECK(k > 0);
        CHECK(k < x.size() - 1);
    }
    CHECK(in_tube(x, ts.approx, 0.25));
}

TEST_CASE("extract_features: constant signal and exact approximations") {
    std::vector<double> x(50, 2.0);
    TautStringResult ts = taut_string(x, 0.3);
    auto f = extract_features(x, ts);
    CHECK(f[0] == 1.0);  // one segment
    for (int i = 1; i < 6; ++i) CHECK(f[i] == doctest::Approx(0.0).epsilon(1e-14));

    Rng rng(104);
    std::vector<double> noisy = random_signal(rng, 60, 0);
    TautStringResult exact = taut_string(noisy, 0.0);
    auto g = extract_features(noisy, exact);
    CHECK(g[3] == doctest::Approx(0.0).epsilon(1e-14));  // zero residual RMS
}

TEST_CASE("extract_features: linear ramp reduces to one segment with the ramp slope") {
    std::vector<double> x(100);
    const double slope = 0.03;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = slope * static_cast<double>(i);
    TautStringResult ts = taut_string(x, 1e-7);
    auto f = extract_features(x, ts);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == doctest::Approx(slope).epsilon(1e-4));
    CHECK(f[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f[5] == doctest::Approx(slope).epsilon(1e-4));
}

TEST_CASE("extract_features: scaling signal and epsilon scales the slope features") {
    Rng rng(105);
    std::vector<double> x = random_signal(rng, 120, 1);
    const double eps = 0.4, c = 3.0;
    std::vector<double> cx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) cx[i] = c * x[i];

    auto f1 = extract_features(x, taut_string(x, eps));
    auto f2 = extract_features(cx, taut_string(cx, c * eps));
    CHECK(f2[0] == f1[0]);                                         // segment count unchanged
    CHECK(f2[1] == doctest::Approx(c * f1[1]).epsilon(1e-9));      // mean |slope|
    CHECK(f2[2] == doctest::Approx(c * c * f1[2]).epsilon(1e-9));  // slope variance
    CHECK(f2[3] == doctest::Approx(c * f1[3]).epsilon(1e-9));      // residual RMS
    CHECK(f2[4] == doctest::Approx(c * f1[4]).epsilon(1e-9));      // total variation
    CHECK(f2[5] == doctest::Approx(c * f1[5]).epsilon(1e-9));      // max |slope|
}
