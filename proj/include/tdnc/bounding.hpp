#pragma once

#include <vector>

#include "tdnc/extended.hpp"
#include "tdnc/grid.hpp"

namespace tdnc {

// [x]_1
double clamp_one(double v);

/*
 * Bounding function: wide-sense decreasing tail probability on x >= 0 with
 * values in [0,1], and value 1 for x < 0.
 *
 * Three representations:
 *   - indicator: 1 for x < 0, 0 for x >= 0 (deterministic models)
 *   - exponential: min(1, a * exp(-b x))
 *   - table: staircase on a uniform grid, value v_i on [x_i, x_{i+1});
 *     past the table either constant (last value) or geometric decay with a
 *     per-cell ratio. The staircase never understates a decreasing function
 *     sampled at the cell left edges, which keeps derived bounds sound.
 */
class bounding_fn {
public:
    enum class kind { indicator, exponential, table };
    enum class tail { constant, geometric };

    bounding_fn();  // indicator

    static bounding_fn indicator();
    static bounding_fn exponential(double a, double b);
    static bounding_fn tabulated(const grid_spec& g, std::vector<double> values,
                                 tail mode = tail::constant, double ratio = 0.0);
    // tabulate with a geometric tail fitted from the last decaying cells
    static bounding_fn tabulated_fit_tail(const grid_spec& g, std::vector<double> values);

    double eval(double x) const;
    double limit_value() const;  // value as x -> infinity

    // integral_x^inf of the representation; "unbounded" when it diverges
    extended_value tail_integral(double x) const;
    // F-class certificate: finite tail integrals of all orders
    bool f_class() const;

    kind rep() const { return kind_; }
    double param_a() const { return a_; }
    double param_b() const { return b_; }
    const grid_spec& table_grid() const { return grid_; }
    const std::vector<double>& table_values() const { return values_; }
    tail tail_mode() const { return tail_; }
    double tail_ratio() const { return ratio_; }

private:
    kind kind_;
    double a_ = 0.0, b_ = 0.0;     // exponential
    grid_spec grid_;               // table
    std::vector<double> values_;   // table
    tail tail_ = tail::constant;   // table extension
    double ratio_ = 0.0;           // geometric per-cell ratio

    void validate() const;
};

// Worst-case-dependence min-plus convolution of tail bounds, pointwise on the grid
// and clamped to [0,1]. Indicators are convolution identities and are
// filtered out, so a lone parametric input passes through unchanged.
bounding_fn ccdf_min_plus_conv(const std::vector<bounding_fn>& fs, const grid_spec& g);

// P{ (n-m)/rho - [a(n)-a(m)] > x } for exponential(rho) inter-arrivals:
// the lower tail of an Erlang(k, rho) below k/rho - x.
double erlang_gap_tail(double rho, int n_minus_m, double x);
bounding_fn erlang_iat_bound(double rho, int n_minus_m, const grid_spec& g);

// Stationary M/D/1 waiting-time CCDF (Poisson rate mu, service time D),
// evaluated with the Benes series; NaN where the series is numerically
// unreliable (callers switch to the fitted geometric tail there).
double md1_wait_ccdf(double mu, double D, double x);
bounding_fn md1_vsd_bound(double mu, double D, const grid_spec& g);

// P{ sum_{k=1..n} Delta(k) > slots } with Delta geometric on {1,2,...},
// success probability 1-Pe.
double negbin_service_tail(double Pe, int n, long slots);

// regularized lower incomplete gamma P(a, x)
double gammp(double a, double x);

}  // namespace tdnc
