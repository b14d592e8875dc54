#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tdnc/curve.hpp"

using namespace tdnc;

TEST_CASE("eval: affine and boundaries") {
    curve c = curve::affine(2.0, 1.0);  // rho=1, sigma=2
    CHECK(c.eval(3.0) == 5.0);
    CHECK(c.eval(0.0) == 2.0);
    CHECK_THROWS_AS(c.eval(-0.5), std::domain_error);
}

TEST_CASE("eval: staircase risers against dense tabulation") {
    // jump at x=1 from 0 to 1, flat elsewhere
    curve c = curve::from_breakpoints({{0, 0}, {1, 0}, {1, 1}}, 0.0, jump_side::right);
    CHECK(c.eval(0.5) == 0.0);
    CHECK(c.eval(1.0) == 1.0);  // right-continuous at the jump
    CHECK(c.eval_left(1.0) == 0.0);
    CHECK(c.with_side(jump_side::left).eval(1.0) == 0.0);
    // dense tabulation: mid-riser has no width, values match a fine scan
    for (double x = 0.0; x <= 3.0; x += 1.0 / 64) {
        double expect = (x >= 1.0) ? 1.0 : 0.0;
        CHECK(c.eval(x) == expect);
    }
}

TEST_CASE("max_plus_conv: linear curves") {
    grid_spec g(1.0, 16.0);
    curve lin = curve::affine(0.0, 2.0);  // T=2
    curve r = max_plus_conv(lin, lin, g);
    for (int i = 0; i < g.npoints(); ++i) CHECK(r.eval(g.x(i)) == 2.0 * g.x(i));
}

TEST_CASE("max_plus_conv: 2n and n give 2n") {
    grid_spec g(1.0, 16.0);
    curve a = curve::affine(0.0, 2.0), b = curve::affine(0.0, 1.0);
    curve r = max_plus_conv(a, b, g);
    for (int i = 0; i < g.npoints(); ++i) {
        CHECK(r.eval(g.x(i)) == 2.0 * g.x(i));
        CHECK(r.eval(g.x(i)) == oracle::brute_max_plus_conv(a, b, g, i));
    }
}

TEST_CASE("max_plus_conv: clipped-affine pair matches brute force exactly") {
    grid_spec g(1.0, 16.0);
    // (2n - 3)+ : 0 until 1.5, then slope 2
    curve c = curve::from_breakpoints({{0, 0}, {1.5, 0}}, 2.0);
    curve r = max_plus_conv(c, c, g);
    for (int i = 0; i < g.npoints(); ++i)
        CHECK(r.eval(g.x(i)) == oracle::brute_max_plus_conv(c, c, g, i));
    CHECK(r.eval(6.0) == oracle::brute_max_plus_conv(c, c, g, 6));
}

TEST_CASE("max_plus_deconv: identity pair and constant offset") {
    grid_spec g(1.0, 16.0);
    curve a = curve::affine(0.0, 1.0);
    CHECK(max_plus_deconv(a, a, g).c.eval(0.0) == 0.0);
    curve b = curve::affine(2.0, 1.0);  // n + 2
    auto r = max_plus_deconv(b, a, g);
    CHECK(!r.diverged);
    CHECK(r.c.eval(0.0) == 2.0);
}

TEST_CASE("max_plus_deconv: divergence flags and clamps") {
    grid_spec g(1.0, 8.0);
    auto r = max_plus_deconv(curve::affine(0.0, 1.0), curve::affine(0.0, 2.0), g);
    CHECK(r.diverged);
    CHECK(r.c.eval(3.0) == 0.0);
}

TEST_CASE("min_plus_conv: examples") {
    grid_spec g(1.0, 16.0);
    curve a = curve::affine(0.0, 2.0);
    curve b = curve::affine(3.0, 1.0);  // x + 3
    curve r = min_plus_conv(a, b, g);
    for (int i = 0; i < g.npoints(); ++i) {
        CHECK(r.eval(g.x(i)) == g.x(i) + 3.0);
        CHECK(r.eval(g.x(i)) == oracle::brute_min_plus_conv(a, b, g, i));
    }
    // g2 == 0 everywhere: result is g1(0)
    curve zero;
    curve incr = curve::affine(1.0, 0.5);
    curve r2 = min_plus_conv(incr, zero, g);
    for (int i = 0; i < g.npoints(); ++i) CHECK(r2.eval(g.x(i)) == 1.0);
}

TEST_CASE("min_plus_deconv: stability boundary") {
    grid_spec g(1.0, 16.0);
    curve n = curve::affine(0.0, 1.0);
    auto same = min_plus_deconv(n, n, g);
    CHECK(!same.unbounded);
    CHECK(same.c.eval(0.0) == 0.0);
    auto bad = min_plus_deconv(curve::affine(0.0, 1.2), n, g);
    CHECK(bad.unbounded);
}

TEST_CASE("algebra: random PWL pairs equal brute force on the grid") {
    grid_spec g(1.0, 64.0);
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        curve a = oracle::random_grid_curve(rng, 64);
        curve b = oracle::random_grid_curve(rng, 64);
        curve mp = max_plus_conv(a, b, g);
        curve mc = min_plus_conv(a, b, g);
        auto md = max_plus_deconv(a, b, g);
        auto pd = min_plus_deconv(a, b, g);
        for (int i = 0; i < g.npoints(); ++i) {
            CHECK(mp.eval(g.x(i)) == oracle::brute_max_plus_conv(a, b, g, i));
            CHECK(mc.eval(g.x(i)) == oracle::brute_min_plus_conv(a, b, g, i));
            if (!md.diverged)
                CHECK(md.c.eval(g.x(i)) == oracle::brute_max_plus_deconv(a, b, g, i));
            if (!pd.unbounded)
                CHECK(pd.c.eval(g.x(i)) == oracle::brute_min_plus_deconv(a, b, g, i));
        }
        // monotonicity preservation: outputs stay in class G on the grid
        for (int i = 1; i < g.npoints(); ++i) {
            CHECK(mp.eval(g.x(i)) >= mp.eval(g.x(i - 1)));
            CHECK(mc.eval(g.x(i)) >= mc.eval(g.x(i - 1)));
        }
    }
}

TEST_CASE("lower_pseudo_inverse: affine closed form") {
    // alpha = rho t + sigma -> lambda(n) = (n - sigma)+ / rho
    for (double rho : {0.5, 1.0, 2.0}) {
        for (double sigma : {0.0, 2.0, 5.0}) {
            curve alpha = curve::affine(sigma, rho);
            curve lam = lower_pseudo_inverse(alpha);
            for (int n = 0; n <= 100; ++n) {
                double expect = std::max(0.0, (n - sigma)) / rho;
                CHECK(lam.eval(n) == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("pseudo-inverses: identity and linear") {
    curve id = curve::affine(0.0, 1.0);
    CHECK(lower_pseudo_inverse(id).eval(7.0) == 7.0);
    CHECK(upper_pseudo_inverse(id).eval(7.0) == 7.0);
    curve two = curve::affine(0.0, 2.0);  // lambda(n)=2n
    curve al = upper_pseudo_inverse(two);
    CHECK(al.eval(7.0) == 3.5);  // t/2
}

TEST_CASE("upper_pseudo_inverse: clipped affine") {
    // lambda(n) = (n-2)+ -> alpha(t) = t + 2
    curve lam = curve::from_breakpoints({{0, 0}, {2, 0}}, 1.0);
    curve al = upper_pseudo_inverse(lam);
    for (double t = 0.0; t <= 20.0; t += 0.5) CHECK(al.eval(t) == t + 2.0);
}

TEST_CASE("lower_pseudo_inverse: staircase against dense scan") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        curve alpha = oracle::random_integer_staircase(rng, 16);
        curve lam = lower_pseudo_inverse(alpha);
        double supv = alpha.last_value();
        for (double n = 0.0; n <= supv; n += 1.0) {
            double expect = oracle::scan_lower_pseudo_inverse(alpha, n, 20.0, 1.0 / 256);
            CHECK(lam.eval(n) == doctest::Approx(expect).epsilon(1e-9));
        }
        CHECK(lam.eval_ext(supv + 1.0).is_unbounded());
    }
}

TEST_CASE("pseudo-inverse round trip on integer staircases") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        curve alpha = oracle::random_integer_staircase(rng, 20);
        curve back = upper_pseudo_inverse(lower_pseudo_inverse(alpha));
        for (int t = 0; t <= 20; ++t) CHECK(back.eval(t) == alpha.eval(t));
    }
}

TEST_CASE("galois property on random staircases") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        curve alpha = oracle::random_integer_staircase(rng, 12);
        curve lam = lower_pseudo_inverse(alpha);
        for (int t = 0; t <= 12; ++t) {
            for (int n = 0; n <= (int)alpha.last_value(); ++n) {
                bool lhs = lam.eval(n) <= t;
                bool rhs = alpha.eval(t) >= n;
                CHECK(lhs == rhs);
            }
        }
    }
}

TEST_CASE("sup_forward_gap: affine closed form and monotonicity") {
    grid_spec g(1.0, 64.0);
    for (double rho : {0.5, 1.0, 2.0}) {
        curve lam = lower_pseudo_inverse(curve::affine(2.0, rho));  // (n-2)+/rho
        for (double x : {0.0, 1.0, 3.0, 10.0}) {
            auto y = sup_forward_gap(lam, x, g);
            CHECK(y.is_finite());
            CHECK(y.value() == doctest::Approx(x / rho).epsilon(1e-12));
        }
    }
    // wide-sense increasing in x
    std::mt19937_64 rng(3);
    curve lam = oracle::random_grid_curve(rng, 16);
    double prev = 0.0;
    for (double x = 0.0; x <= 8.0; x += 1.0) {
        double v = sup_forward_gap(lam, x, g).value();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("sup_forward_gap: concave PWL matches brute force") {
    grid_spec g(1.0, 64.0);
    curve lam = curve::from_breakpoints({{0, 0}, {4, 6}}, 0.5);  // steep then slow
    for (double x : {1.0, 2.0, 5.0}) {
        CHECK(sup_forward_gap(lam, x, g).value() ==
              doctest::Approx(oracle::brute_forward_gap(lam, x, 200)).epsilon(1e-12));
    }
}

TEST_CASE("sup_growth_gap: affine and boundary") {
    grid_spec g(1.0, 64.0);
    curve alpha = curve::affine(2.0, 1.0);
    CHECK(sup_growth_gap(alpha, 2.0, g).value() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sup_growth_gap(alpha, 0.0, g).value() == 1.0);
    // increasing in y
    double prev = 0.0;
    for (double y = 0.0; y <= 6.0; y += 0.5) {
        double v = sup_growth_gap(alpha, y, g).value();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("sup_growth_gap: staircase at least brute force, equal on aligned shifts") {
    grid_spec g(1.0, 32.0);
    std::mt19937_64 rng(5);
    curve alpha = oracle::random_integer_staircase(rng, 12);
    curve alpha2 = curve::from_breakpoints(alpha.breakpoints(), 1.0);  // add a tail
    for (double y : {1.0, 2.0, 3.0}) {
        double mine = sup_growth_gap(alpha2, y, g).value();
        double brute = oracle::brute_growth_gap(alpha2, y, 40.0, 1.0);
        CHECK(mine >= brute);
        double dense = oracle::brute_growth_gap(alpha2, y, 40.0, 1.0 / 64);
        CHECK(mine == doctest::Approx(dense).epsilon(1e-9));
    }
}

TEST_CASE("horizontal_deviation: examples") {
    grid_spec g(1.0, 64.0);
    curve lam = curve::affine(0.0, 1.0);
    curve gam = curve::affine(2.0, 1.0);  // n + 2
    auto h = horizontal_deviation(lam, gam, 0.0, g);
    CHECK(h.value() == 2.0);
    CHECK(h.value() == oracle::brute_horizontal_deviation(lam, gam, 0.0, 100));

    // gamma + x <= lambda pointwise -> 0
    curve below = curve::affine(0.0, 0.5);
    CHECK(horizontal_deviation(lam, below, 0.0, g).value() == 0.0);

    // diverging slopes -> unbounded
    CHECK(horizontal_deviation(lam, curve::affine(0.0, 1.1), 0.0, g).is_unbounded());
}

TEST_CASE("horizontal_deviation: integer ceiling for identical linear curves") {
    grid_spec g(1.0, 64.0);
    curve lin = curve::affine(0.0, 1.0);
    for (double x : {0.5, 1.0, 2.5, 4.0}) {
        double h = horizontal_deviation(lin, lin, x, g).value();
        CHECK(h == std::ceil(x));
        CHECK(h == oracle::brute_horizontal_deviation(lin, lin, x, 100));
    }
}

TEST_CASE("monotone_nonneg_envelope") {
    // lambda(n) = n, eta = 2: raw n - 2n sinks, envelope is zero
    CHECK(monotone_nonneg_envelope({{0, 0}}, -1.0).eval(5.0) == 0.0);
    // raw dips negative then recovers
    curve env = monotone_nonneg_envelope({{0.0, 0.0}, {2.0, -2.0}, {4.0, -2.0}}, 1.5);
    CHECK(env.eval(0.0) == 0.0);
    CHECK(env.eval(3.0) == 0.0);
    CHECK(env.eval(6.0) == doctest::Approx(1.0));  // -2 + 1.5*(6-4)
    for (double x = 0; x < 10.0; x += 0.25) CHECK(env.eval(x + 0.25) >= env.eval(x));
}

TEST_CASE("sum and plus_linear") {
    curve a = curve::affine(1.0, 1.0);
    curve b = curve::from_breakpoints({{0, 0}, {2, 1}}, 0.5);
    curve s = a.sum(b);
    for (double x = 0.0; x <= 8.0; x += 0.5)
        CHECK(s.eval(x) == doctest::Approx(a.eval(x) + b.eval(x)).epsilon(1e-12));
    curve p = b.plus_linear(0.25);
    for (double x = 0.0; x <= 8.0; x += 0.5)
        CHECK(p.eval(x) == doctest::Approx(b.eval(x) + 0.25 * x).epsilon(1e-12));
}

TEST_CASE("sample roundings bracket the curve") {
    grid_spec g(0.5, 8.0);
    curve c = curve::from_breakpoints({{0, 0}, {1.25, 2}, {3, 2.5}}, 0.75);
    curve dn = c.sample(g, curve::rounding::down);
    curve up = c.sample(g, curve::rounding::up);
    for (double x = 0.0; x <= 8.0; x += 0.125) {
        CHECK(dn.eval(x) <= c.eval(x) + 1e-12);
        CHECK(up.eval(x) >= c.eval(x) - 1e-12);
    }
}
