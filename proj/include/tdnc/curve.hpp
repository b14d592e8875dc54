#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdnc/extended.hpp"
#include "tdnc/grid.hpp"

namespace tdnc {

/*
 * Piecewise-linear wide-sense increasing curve on [0, inf) with an affine
 * tail. This is the function class used for arrival curves lambda(n),
 * service curves gamma(n) and space-domain envelopes alpha(t).
 *
 * Jumps are stored as two breakpoints sharing the same x (lower value
 * first). The jump_side tag picks which of the two values eval() returns
 * exactly at the jump abscissa: alpha-type staircases are right-continuous,
 * lower pseudo-inverses come out left-continuous.
 *
 * A curve may have a finite domain_end (e.g. the pseudo-inverse of a curve
 * with a flat tail); evaluation past it is "unbounded".
 */

enum class jump_side { left, right };

struct breakpoint {
    double x;
    double v;
};

class curve {
public:
    curve();  // the zero curve

    static curve affine(double v0, double slope);
    static curve from_breakpoints(std::vector<breakpoint> pts, double tail_slope,
                                  jump_side side = jump_side::right);

    double eval(double x) const;        // throws domain_error for x < 0 or past domain_end
    double eval_left(double x) const;   // limit from below (at 0 returns the value at 0)
    double eval_right(double x) const;  // limit from above
    extended_value eval_ext(double x) const;

    const std::vector<breakpoint>& breakpoints() const { return pts_; }
    double tail_slope() const { return tail_slope_; }
    jump_side side() const { return side_; }
    const std::optional<double>& domain_end() const { return domain_end_; }

    double last_x() const { return pts_.back().x; }
    double last_value() const { return pts_.back().v; }
    bool is_affine() const { return pts_.size() == 1; }

    curve with_side(jump_side s) const;
    curve with_domain_end(std::optional<double> de) const;

    curve plus_constant(double dv) const;   // c(x) + dv
    curve plus_linear(double slope) const;  // c(x) + slope * x, slope >= 0
    curve sum(const curve& o) const;        // pointwise sum

    enum class rounding { exact, down, up };
    // Staircase resampling onto the grid. "down" never overstates, "up"
    // never understates; "exact" keeps linear interpolation through the
    // sampled points.
    curve sample(const grid_spec& g, rounding r) const;

    bool equal_on_grid(const curve& o, const grid_spec& g, double tol = 0.0) const;

private:
    std::vector<breakpoint> pts_;
    double tail_slope_;
    jump_side side_;
    std::optional<double> domain_end_;

    void validate() const;
    // index of the segment containing x; helpers for eval
    double value_right_of(std::size_t i) const;
};

// max(0, pointwise) of a raw piecewise-linear graph followed by its greatest
// wide-sense increasing minorant. Restores class-G membership after
// subtracting a linear term (e.g. lambda(n) - eta*n).
curve monotone_nonneg_envelope(std::vector<breakpoint> raw, double raw_tail_slope);

// ---------------------------------------------------------------------------
// The four max-plus / min-plus operations. Splits run over the grid points
// (packet indices are integral with the default unit step) with analytic
// handling of the affine tails.
// ---------------------------------------------------------------------------

// (g1 (+)bar g2)(x) = sup_{0<=y<=x} { g1(y) + g2(x-y) }, tail slope = max.
curve max_plus_conv(const curve& g1, const curve& g2, const grid_spec& g);

// (g1 (x) g2)(x) = inf_{0<=y<=x} { g1(y) + g2(x-y) }, tail slope = min.
curve min_plus_conv(const curve& g1, const curve& g2, const grid_spec& g);

struct max_plus_deconv_result {
    curve c;
    // true when slope(g1) < slope(g2): the tail infimum diverges to -inf and
    // values were clamped to 0.
    bool diverged = false;
};
// (g1 (/)bar g2)(x) = inf_{y>=0} { g1(x+y) - g2(y) }, clamped to 0.
max_plus_deconv_result max_plus_deconv(const curve& g1, const curve& g2, const grid_spec& g);

struct min_plus_deconv_result {
    // unbounded when slope(g1) > slope(g2): the supremum diverges for every x
    // (an unstable pairing).
    bool unbounded = false;
    curve c;
};
// (g1 (/) g2)(x) = sup_{y>=0} { g1(x+y) - g2(y) }.
min_plus_deconv_result min_plus_deconv(const curve& g1, const curve& g2, const grid_spec& g);

// ---------------------------------------------------------------------------
// Pseudo-inverses, exact for piecewise-linear input.
// ---------------------------------------------------------------------------

// lambda(n) = inf { tau : alpha(tau) >= n }. Left-continuous output. If
// alpha has a flat tail the result has domain_end = sup alpha.
curve lower_pseudo_inverse(const curve& alpha);

// alpha(t) = sup { k : lambda(k) <= t }. Right-continuous output.
curve upper_pseudo_inverse(const curve& lambda);

// ---------------------------------------------------------------------------
// Gap suprema and the horizontal deviation.
// ---------------------------------------------------------------------------

// sup_{k>=0} [ lambda(k) - lambda(k-x) ] over integer packet indices k, with
// lambda(k) = 0 for k < 0 and the affine-tail limit slope*x included.
extended_value sup_forward_gap(const curve& lambda, double x, const grid_spec& g);

// sup_{tau>=0} [ alpha(tau+y) - alpha(tau) + 1 ] over continuous tau
// (evaluated at all kinks, their left limits, the grid points and the tail).
extended_value sup_growth_gap(const curve& alpha, double y, const grid_spec& g);

// H(lambda, gamma + x) = sup_n inf { k >= 0 : gamma(n-k) + x <= lambda(n) }
// over integer packet indices; k = n+1 (all packets cleared) is always
// feasible. Unbounded when slope(gamma) > slope(lambda).
extended_value horizontal_deviation(const curve& lambda, const curve& gamma, double x,
                                    const grid_spec& g);

}  // namespace tdnc
