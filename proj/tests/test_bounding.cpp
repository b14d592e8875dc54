#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tdnc/bounding.hpp"

using namespace tdnc;

namespace {

// independent grid-search oracle for the pairwise conv
double brute_conv2(const bounding_fn& f, const bounding_fn& h, const grid_spec& g, double x) {
    double best = 2.0;
    for (double y = 0.0; y <= x + 1e-12; y += g.step) best = std::min(best, f.eval(y) + h.eval(x - y));
    return std::min(1.0, best);
}

}  // namespace

TEST_CASE("clamp_one") {
    CHECK(clamp_one(0.3) == 0.3);
    CHECK(clamp_one(7.0) == 1.0);
    CHECK(clamp_one(1.0) == 1.0);
    CHECK_THROWS_AS(clamp_one(-0.1), std::invalid_argument);
}

TEST_CASE("ccdf_min_plus_conv: exponential pair") {
    grid_spec g(0.25, 32.0);
    bounding_fn f = bounding_fn::exponential(1.0, 1.0);
    bounding_fn c = ccdf_min_plus_conv({f, f}, g);
    CHECK(c.eval(0.0) == 1.0);  // clamp at origin
    for (int i = 0; i < g.npoints(); ++i) {
        double x = g.x(i);
        CHECK(c.eval(x) == doctest::Approx(brute_conv2(f, f, g, x)).epsilon(1e-12));
        // optimal split y = x/2; exact when that split lies on the grid
        double closed = std::min(1.0, 2.0 * std::exp(-x / 2.0));
        CHECK(c.eval(x) >= closed - 1e-12);
        if (i % 2 == 0) CHECK(c.eval(x) == doctest::Approx(closed).epsilon(1e-9));
    }
    // decreasing, in [0,1]
    for (int i = 1; i < g.npoints(); ++i) {
        CHECK(c.eval(g.x(i)) <= c.eval(g.x(i - 1)));
        CHECK(c.eval(g.x(i)) >= 0.0);
        CHECK(c.eval(g.x(i)) <= 1.0);
    }
}

TEST_CASE("ccdf_min_plus_conv: indicator is the identity") {
    grid_spec g(0.5, 16.0);
    bounding_fn h = bounding_fn::exponential(0.7, 2.0);
    bounding_fn c = ccdf_min_plus_conv({bounding_fn::indicator(), h}, g);
    CHECK(c.rep() == bounding_fn::kind::exponential);  // passed through unchanged
    for (double x = 0.0; x <= 16.0; x += 0.1) CHECK(c.eval(x) == h.eval(x));
    bounding_fn ind = ccdf_min_plus_conv({bounding_fn::indicator(), bounding_fn::indicator()}, g);
    CHECK(ind.eval(0.0) == 0.0);
    CHECK(ind.eval(-0.5) == 1.0);
    CHECK_THROWS_AS(ccdf_min_plus_conv({}, g), std::invalid_argument);
}

TEST_CASE("sum of dependent variables: exact CCDF never exceeds the conv of marginals") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> nv(2, 3), sup(2, 4);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int m = nv(rng);
        std::vector<int> s(m);
        int total = 1;
        for (int i = 0; i < m; ++i) {
            s[i] = sup(rng);
            total *= s[i];
        }
        // random joint pmf over the product space (dependence allowed)
        std::vector<double> joint(total);
        double z = 0.0;
        for (auto& p : joint) {
            p = u(rng);
            z += p;
        }
        for (auto& p : joint) p /= z;
        int maxsum = 0;
        for (int i = 0; i < m; ++i) maxsum += s[i] - 1;
        grid_spec g(1.0, static_cast<double>(maxsum + 2));
        // marginal CCDFs and the exact sum CCDF by enumeration
        std::vector<std::vector<double>> marg(m);
        for (int i = 0; i < m; ++i) marg[i].assign(g.npoints(), 0.0);
        std::vector<double> sumccdf(g.npoints(), 0.0);
        for (int idx = 0; idx < total; ++idx) {
            int rest = idx, sumv = 0;
            std::vector<int> vals(m);
            for (int i = 0; i < m; ++i) {
                vals[i] = rest % s[i];
                rest /= s[i];
                sumv += vals[i];
            }
            for (int j = 0; j < g.npoints(); ++j) {
                if (sumv > j) sumccdf[j] += joint[idx];
                for (int i = 0; i < m; ++i)
                    if (vals[i] > j) marg[i][j] += joint[idx];
            }
        }
        std::vector<bounding_fn> fs;
        for (int i = 0; i < m; ++i) {
            for (int j = 1; j < g.npoints(); ++j) marg[i][j] = std::min(marg[i][j], marg[i][j - 1]);
            fs.push_back(bounding_fn::tabulated(g, marg[i]));
        }
        bounding_fn conv = ccdf_min_plus_conv(fs, g);
        for (int j = 0; j < g.npoints(); ++j) CHECK(sumccdf[j] <= conv.eval(g.x(j)) + 1e-12);
    }
}

TEST_CASE("tail_integral: exponential and indicator") {
    bounding_fn h = bounding_fn::exponential(1.0, 1.0);
    for (double x : {0.0, 0.5, 2.0, 7.0})
        CHECK(h.tail_integral(x).value() == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    bounding_fn h2 = bounding_fn::exponential(0.5, 2.0);
    for (double x : {0.0, 1.0, 3.0})
        CHECK(h2.tail_integral(x).value() == doctest::Approx(0.25 * std::exp(-2.0 * x)).epsilon(1e-12));
    // clamped region of a > 1 handled analytically
    bounding_fn h3 = bounding_fn::exponential(std::exp(2.0), 1.0);
    CHECK(h3.tail_integral(0.0).value() == doctest::Approx(2.0 + 1.0).epsilon(1e-12));
    CHECK(bounding_fn::indicator().tail_integral(3.0).value() == 0.0);
    // decreasing in x
    double prev = h.tail_integral(0.0).value();
    for (double x = 0.25; x < 5.0; x += 0.25) {
        double v = h.tail_integral(x).value();
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("tail_integral: geometric table matches the closed-form series") {
    grid_spec g(0.5, 9.5);
    std::vector<double> v(20);
    for (int k = 0; k < 20; ++k) v[k] = std::pow(0.5, k);
    bounding_fn t = bounding_fn::tabulated_fit_tail(g, v);
    CHECK(t.tail_mode() == bounding_fn::tail::geometric);
    CHECK(t.tail_ratio() == doctest::Approx(0.5).epsilon(1e-12));
    // sum of cell rectangles: step * sum_{k>=0} 0.5^k = 1
    CHECK(t.tail_integral(0.0).value() == doctest::Approx(1.0).epsilon(1e-9));
    // from cell 2 onward: step * sum_{k>=2} 0.5^k = 0.25
    CHECK(t.tail_integral(1.0).value() == doctest::Approx(0.25).epsilon(1e-9));
    // constant tail with positive floor diverges
    bounding_fn c = bounding_fn::tabulated(g, std::vector<double>(20, 0.25));
    CHECK(c.tail_integral(0.0).is_unbounded());
    CHECK(!c.f_class());
    CHECK(t.f_class());
}

TEST_CASE("erlang_gap_tail: single-gap closed form") {
    for (double x = 0.0; x <= 1.5; x += 0.05) {
        double expect = x >= 1.0 ? 0.0 : 1.0 - std::exp(-(1.0 - x));
        CHECK(erlang_gap_tail(1.0, 1, x) == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(erlang_gap_tail(2.0, 3, 1.5) == 0.0);  // x >= k/rho
    CHECK_THROWS_AS(erlang_gap_tail(-1.0, 1, 0.0), std::invalid_argument);
}

TEST_CASE("erlang_gap_tail: two-gap value against Monte Carlo") {
    std::mt19937_64 rng(77);
    std::exponential_distribution<double> ed(1.0);
    int n = 1000000, hits = 0;
    double x = 0.5;
    for (int i = 0; i < n; ++i)
        if (2.0 - (ed(rng) + ed(rng)) > x) ++hits;
    double phat = static_cast<double>(hits) / n;
    double p = erlang_gap_tail(1.0, 2, x);
    double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(phat - p) <= 3.0 * sigma);
}

TEST_CASE("md1_wait_ccdf: atom at zero and simulation certification") {
    double mu = 1.0, D = 0.5;
    CHECK(md1_wait_ccdf(mu, D, 0.0) == doctest::Approx(mu * D).epsilon(1e-12));
    CHECK_THROWS_AS(md1_wait_ccdf(1.0, 1.0, 0.0), std::invalid_argument);

    // independent Lindley recursion oracle
    std::mt19937_64 rng(4242);
    std::exponential_distribution<double> ia(mu);
    const int n = 1000000;
    std::vector<double> checks{0.25, 0.5, 1.0, 2.0};
    std::vector<int> hits(checks.size(), 0);
    double w = 0.0;
    for (int i = 0; i < n; ++i) {
        w = std::max(0.0, w + D - ia(rng));
        for (std::size_t j = 0; j < checks.size(); ++j)
            if (w > checks[j]) ++hits[j];
    }
    for (std::size_t j = 0; j < checks.size(); ++j) {
        double phat = static_cast<double>(hits[j]) / n;
        double p = md1_wait_ccdf(mu, D, checks[j]);
        double sigma = std::sqrt(std::max(p * (1 - p) / n, 1e-12));
        // the stationary distribution itself, not merely a bound
        CHECK(std::fabs(phat - p) <= 5.0 * sigma + 2e-4);
    }

    // far in the tail the bound object (series plus fitted decay) is negligible
    double meanw = mu * D * D / (2.0 * (1.0 - mu * D));
    bounding_fn hb = md1_vsd_bound(mu, D, grid_spec(0.25, 24.0));
    CHECK(hb.eval(20.0 * meanw) <= 1e-6 * 3);
    CHECK(hb.eval(80.0 * meanw) <= 1e-9);
    // vanishing work
    CHECK(md1_wait_ccdf(1.0, 1e-4, 0.5) <= 1e-9);
}

TEST_CASE("md1_vsd_bound: tabulated, decreasing, F-class") {
    grid_spec g(0.25, 24.0);
    bounding_fn h = md1_vsd_bound(1.0, 0.5, g);
    CHECK(h.f_class());
    CHECK(h.eval(0.0) == doctest::Approx(0.5).epsilon(1e-9));
    double prev = 1.0;
    for (double x = 0.0; x <= 30.0; x += 0.25) {
        CHECK(h.eval(x) <= prev + 1e-15);
        prev = h.eval(x);
    }
    CHECK(h.tail_integral(0.0).is_finite());
}

TEST_CASE("negbin_service_tail: closed forms") {
    // n = 1: geometric tail
    for (long s = 1; s <= 12; ++s)
        CHECK(negbin_service_tail(0.5, 1, s) == doctest::Approx(std::pow(0.5, s)).epsilon(1e-12));
    // fewer slots than packets
    CHECK(negbin_service_tail(0.3, 5, 4) == 1.0);
    // n=2, Pe=0.5: pmf(2)=0.25, pmf(3)=0.25, tail(3)=0.5
    double pmf2 = negbin_service_tail(0.5, 2, 1) - negbin_service_tail(0.5, 2, 2);
    double pmf3 = negbin_service_tail(0.5, 2, 2) - negbin_service_tail(0.5, 2, 3);
    CHECK(pmf2 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pmf3 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(negbin_service_tail(0.5, 2, 3) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(negbin_service_tail(1.0, 1, 5), std::invalid_argument);
}

TEST_CASE("negbin_service_tail: pmf sums to one") {
    for (double pe : {0.1, 0.5}) {
        for (int n : {1, 2, 5}) {
            long N = n + static_cast<long>(50.0 * n / (1.0 - pe));
            CHECK(negbin_service_tail(pe, n, N) <= 1e-9);
        }
    }
}

TEST_CASE("negbin_service_tail: Monte Carlo total variation") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double pe = 0.3;
    int n = 2, samples = 100000;
    long maxi = 60;
    std::vector<double> emp(maxi + 2, 0.0);
    for (int s = 0; s < samples; ++s) {
        long total = 0;
        for (int k = 0; k < n; ++k)
            total += 1 + static_cast<long>(std::floor(std::log(u(rng)) / std::log(pe)));
        emp[std::min(total, maxi + 1)] += 1.0 / samples;
    }
    double tv = 0.0;
    for (long i = n; i <= maxi; ++i) {
        double p = negbin_service_tail(pe, n, i - 1) - negbin_service_tail(pe, n, i);
        tv += std::fabs(p - emp[i]);
    }
    CHECK(tv / 2.0 < 0.01);
}
