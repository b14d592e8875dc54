#include "tdnc/curve.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace tdnc {

namespace {

// Interpolation that is exact at both endpoints and monotone in between.
double lerp_seg(double x1, double v1, double x2, double v2, double x) {
    if (x2 == x1) return v2;
    double f = (x - x1) / (x2 - x1);
    return v1 + (v2 - v1) * f;
}

std::vector<breakpoint> canonical(std::vector<breakpoint> pts) {
    // merge runs that share an x into (x, first_v), (x, last_v)
    std::vector<breakpoint> out;
    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t j = i;
        while (j + 1 < pts.size() && pts[j + 1].x == pts[i].x) ++j;
        out.push_back(pts[i]);
        if (j > i && pts[j].v != pts[i].v) out.push_back(pts[j]);
        i = j + 1;
    }
    // drop interior points that repeat the previous value and x direction
    std::vector<breakpoint> out2;
    for (const auto& p : out) {
        if (!out2.empty() && out2.back().x == p.x && out2.back().v == p.v) continue;
        out2.push_back(p);
    }
    return out2;
}

}  // namespace

curve::curve() : pts_{{0.0, 0.0}}, tail_slope_(0.0), side_(jump_side::right) {}

curve curve::affine(double v0, double slope) {
    return from_breakpoints({{0.0, v0}}, slope);
}

curve curve::from_breakpoints(std::vector<breakpoint> pts, double tail_slope, jump_side side) {
    curve c;
    c.pts_ = canonical(std::move(pts));
    c.tail_slope_ = tail_slope;
    c.side_ = side;
    c.validate();
    return c;
}

void curve::validate() const {
    if (pts_.empty()) throw std::invalid_argument("curve: no breakpoints");
    if (pts_.front().x != 0.0) throw std::invalid_argument("curve: first breakpoint must be at x=0");
    if (!(tail_slope_ >= 0.0)) throw std::invalid_argument("curve: tail_slope must be >= 0");
    int same_x = 1;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        const auto& p = pts_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.v))
            throw std::invalid_argument("curve: non-finite breakpoint");
        if (p.x < 0.0 || p.v < 0.0) throw std::invalid_argument("curve: negative breakpoint");
        if (i > 0) {
            if (p.x < pts_[i - 1].x) throw std::invalid_argument("curve: breakpoints out of order");
            if (p.v < pts_[i - 1].v) throw std::invalid_argument("curve: values must be nondecreasing");
            same_x = (p.x == pts_[i - 1].x) ? same_x + 1 : 1;
            if (same_x > 2) throw std::invalid_argument("curve: more than two breakpoints share an x");
        }
    }
    if (domain_end_ && *domain_end_ < pts_.back().x)
        throw std::invalid_argument("curve: domain_end before last breakpoint");
}

double curve::eval(double x) const {
    if (x < 0.0) throw std::domain_error("curve: eval at negative x");
    if (domain_end_ && x > *domain_end_) throw std::domain_error("curve: eval past domain end");
    if (x >= pts_.back().x) {
        if (x == pts_.back().x) {
            // possibly a jump at the very end
            std::size_t n = pts_.size();
            if (n >= 2 && pts_[n - 2].x == x)
                return side_ == jump_side::left ? pts_[n - 2].v : pts_[n - 1].v;
            return pts_.back().v;
        }
        return pts_.back().v + tail_slope_ * (x - pts_.back().x);
    }
    auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                               [](double xx, const breakpoint& b) { return xx < b.x; });
    std::size_t j = static_cast<std::size_t>(it - pts_.begin());  // first index with pts_[j].x > x
    std::size_t i = j - 1;                                        // last index with pts_[i].x <= x
    if (pts_[i].x == x) {
        if (i > 0 && pts_[i - 1].x == x)
            return side_ == jump_side::left ? pts_[i - 1].v : pts_[i].v;
        return pts_[i].v;
    }
    return lerp_seg(pts_[i].x, pts_[i].v, pts_[j].x, pts_[j].v, x);
}

double curve::eval_left(double x) const {
    if (x < 0.0) throw std::domain_error("curve: eval_left at negative x");
    for (std::size_t i = 0; i < pts_.size(); ++i)
        if (pts_[i].x == x) return pts_[i].v;  // first value at x = limit from below
    if (domain_end_ && x > *domain_end_) throw std::domain_error("curve: eval past domain end");
    if (x > pts_.back().x) return pts_.back().v + tail_slope_ * (x - pts_.back().x);
    return eval(x);
}

double curve::eval_right(double x) const {
    if (x < 0.0) throw std::domain_error("curve: eval_right at negative x");
    for (std::size_t i = pts_.size(); i-- > 0;)
        if (pts_[i].x == x) return pts_[i].v;  // last value at x = limit from above
    if (domain_end_ && x > *domain_end_) throw std::domain_error("curve: eval past domain end");
    if (x > pts_.back().x) return pts_.back().v + tail_slope_ * (x - pts_.back().x);
    return eval(x);
}

extended_value curve::eval_ext(double x) const {
    if (domain_end_ && x > *domain_end_) return extended_value::unbounded();
    return extended_value::finite(eval(x));
}

curve curve::with_side(jump_side s) const {
    curve c = *this;
    c.side_ = s;
    return c;
}

curve curve::with_domain_end(std::optional<double> de) const {
    curve c = *this;
    c.domain_end_ = de;
    c.validate();
    return c;
}

curve curve::plus_constant(double dv) const {
    curve c = *this;
    for (auto& p : c.pts_) p.v += dv;
    c.validate();
    return c;
}

curve curve::plus_linear(double slope) const {
    if (slope < 0.0) throw std::invalid_argument("plus_linear: slope must be >= 0");
    curve c = *this;
    for (auto& p : c.pts_) p.v += slope * p.x;
    c.tail_slope_ += slope;
    c.validate();
    return c;
}

curve curve::sum(const curve& o) const {
    std::vector<double> xs;
    for (const auto& p : pts_) xs.push_back(p.x);
    for (const auto& p : o.pts_) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<breakpoint> pts;
    for (double x : xs) {
        double lo = eval_left(x) + o.eval_left(x);
        double hi = eval_right(x) + o.eval_right(x);
        pts.push_back({x, lo});
        if (hi != lo) pts.push_back({x, hi});
    }
    std::optional<double> de;
    if (domain_end_ || o.domain_end_)
        de = std::min(domain_end_.value_or(std::numeric_limits<double>::infinity()),
                      o.domain_end_.value_or(std::numeric_limits<double>::infinity()));
    return from_breakpoints(std::move(pts), tail_slope_ + o.tail_slope_, side_).with_domain_end(de);
}

curve curve::sample(const grid_spec& g, rounding r) const {
    int n = g.npoints();
    std::vector<breakpoint> pts;
    if (r == rounding::exact) {
        for (int i = 0; i < n; ++i) pts.push_back({g.x(i), eval(g.x(i))});
        return from_breakpoints(std::move(pts), tail_slope_, side_);
    }
    if (r == rounding::down) {
        // constant on [x_i, x_{i+1}), right-continuous jumps at grid points
        for (int i = 0; i < n; ++i) {
            double v = eval(g.x(i));
            pts.push_back({g.x(i), v});
            if (i + 1 < n) pts.push_back({g.x(i + 1), v});
        }
        return from_breakpoints(std::move(pts), tail_slope_, jump_side::right);
    }
    // up: constant eval(x_{i+1}) on (x_i, x_{i+1}], left-continuous jumps
    pts.push_back({0.0, eval(0.0)});
    for (int i = 0; i + 1 < n; ++i) {
        double v = eval(g.x(i + 1));
        pts.push_back({g.x(i), v});
        pts.push_back({g.x(i + 1), v});
    }
    return from_breakpoints(std::move(pts), tail_slope_, jump_side::left);
}

bool curve::equal_on_grid(const curve& o, const grid_spec& g, double tol) const {
    for (int i = 0; i < g.npoints(); ++i)
        if (std::fabs(eval(g.x(i)) - o.eval(g.x(i))) > tol) return false;
    return true;
}

curve monotone_nonneg_envelope(std::vector<breakpoint> raw, double raw_tail_slope) {
    if (raw.empty()) throw std::invalid_argument("monotone_nonneg_envelope: empty");
    if (raw.front().x != 0.0) throw std::invalid_argument("monotone_nonneg_envelope: must start at 0");
    if (raw_tail_slope < 0.0) return curve();  // sinks below every level eventually
    // clamp at 0, inserting zero crossings
    std::vector<breakpoint> cl;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i > 0) {
            const auto& a = raw[i - 1];
            const auto& b = raw[i];
            if (a.x < b.x && ((a.v < 0.0) != (b.v < 0.0))) {
                double t = a.x + (b.x - a.x) * (0.0 - a.v) / (b.v - a.v);
                cl.push_back({t, 0.0});
            }
        }
        cl.push_back({raw[i].x, std::max(0.0, raw[i].v)});
    }
    // a clamped tail that starts negative stays at 0 until the raw tail crosses
    if (raw.back().v < 0.0 && raw_tail_slope > 0.0) {
        double x0 = raw.back().x + (0.0 - raw.back().v) / raw_tail_slope;
        cl.push_back({x0, 0.0});
    }
    // greatest nondecreasing minorant: suffix minima right to left
    std::vector<breakpoint> out(cl.size());
    double m = cl.back().v;  // tail is nondecreasing, so its inf is the last value
    for (std::size_t i = cl.size(); i-- > 0;) {
        m = std::min(m, cl[i].v);
        out[i] = {cl[i].x, m};
    }
    double ts = (raw.back().v < 0.0 && raw_tail_slope == 0.0) ? 0.0 : raw_tail_slope;
    return curve::from_breakpoints(std::move(out), ts);
}

// ---------------------------------------------------------------------------
// algebra operations
// ---------------------------------------------------------------------------

namespace {

double checked_eval(const curve& c, double x) {
    extended_value e = c.eval_ext(x);
    if (e.is_unbounded()) throw std::domain_error("curve operation reaches past a finite domain");
    return e.value();
}

}  // namespace

curve max_plus_conv(const curve& g1, const curve& g2, const grid_spec& g) {
    double ts = std::max(g1.tail_slope(), g2.tail_slope());
    if (g1.is_affine() && g2.is_affine() && !g1.domain_end() && !g2.domain_end())
        return curve::affine(g1.breakpoints()[0].v + g2.breakpoints()[0].v, ts);
    int n = g.npoints();
    std::vector<breakpoint> pts(n);
    for (int i = 0; i < n; ++i) {
        double best = -1.0;
        for (int j = 0; j <= i; ++j)
            best = std::max(best, checked_eval(g1, g.x(j)) + checked_eval(g2, g.x(i - j)));
        pts[i] = {g.x(i), best};
    }
    return curve::from_breakpoints(std::move(pts), ts);
}

curve min_plus_conv(const curve& g1, const curve& g2, const grid_spec& g) {
    double ts = std::min(g1.tail_slope(), g2.tail_slope());
    if (g1.is_affine() && g2.is_affine() && !g1.domain_end() && !g2.domain_end())
        return curve::affine(g1.breakpoints()[0].v + g2.breakpoints()[0].v, ts);
    int n = g.npoints();
    std::vector<breakpoint> pts(n);
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= i; ++j)
            best = std::min(best, checked_eval(g1, g.x(j)) + checked_eval(g2, g.x(i - j)));
        pts[i] = {g.x(i), best};
    }
    return curve::from_breakpoints(std::move(pts), ts);
}

max_plus_deconv_result max_plus_deconv(const curve& g1, const curve& g2, const grid_spec& g) {
    max_plus_deconv_result res;
    double s1 = g1.tail_slope(), s2 = g2.tail_slope();
    if (s1 < s2) {
        // the tail infimum diverges to -inf for every x
        res.c = curve::affine(0.0, 0.0);
        res.diverged = true;
        return res;
    }
    int n = g.npoints();
    bool tail_const = (s1 == s2);
    double c1 = g1.last_value() - s1 * g1.last_x();
    double c2 = g2.last_value() - s2 * g2.last_x();
    std::vector<breakpoint> pts(n);
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            best = std::min(best, checked_eval(g1, g.x(i) + g.x(j)) - checked_eval(g2, g.x(j)));
        if (tail_const) best = std::min(best, c1 - c2 + s1 * g.x(i));
        pts[i] = {g.x(i), std::max(0.0, best)};
    }
    // values are nondecreasing in x; keep them so under fp noise
    for (int i = 1; i < n; ++i) pts[i].v = std::max(pts[i].v, pts[i - 1].v);
    res.c = curve::from_breakpoints(std::move(pts), s1);
    return res;
}

min_plus_deconv_result min_plus_deconv(const curve& g1, const curve& g2, const grid_spec& g) {
    min_plus_deconv_result res;
    double s1 = g1.tail_slope(), s2 = g2.tail_slope();
    if (s1 > s2) {
        res.unbounded = true;
        res.c = curve::affine(0.0, 0.0);
        return res;
    }
    int n = g.npoints();
    bool tail_const = (s1 == s2);
    double c1 = g1.last_value() - s1 * g1.last_x();
    double c2 = g2.last_value() - s2 * g2.last_x();
    std::vector<breakpoint> pts(n);
    for (int i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            best = std::max(best, checked_eval(g1, g.x(i) + g.x(j)) - checked_eval(g2, g.x(j)));
        if (tail_const) best = std::max(best, c1 - c2 + s1 * g.x(i));
        pts[i] = {g.x(i), std::max(0.0, best)};
    }
    for (int i = 1; i < n; ++i) pts[i].v = std::max(pts[i].v, pts[i - 1].v);
    res.c = curve::from_breakpoints(std::move(pts), s1);
    return res;
}

// ---------------------------------------------------------------------------
// pseudo-inverses
// ---------------------------------------------------------------------------

namespace {

struct path {
    std::vector<breakpoint> vertices;  // monotone polyline, duplicates encode jumps
    double tail_slope = 0.0;
    std::optional<double> domain_end;
};

path swap_axes(const path& p) {
    path q;
    for (const auto& v : p.vertices) q.vertices.push_back({v.v, v.x});
    if (!q.vertices.empty() && q.vertices.front().x > 0.0)
        q.vertices.insert(q.vertices.begin(), {0.0, 0.0});
    if (p.tail_slope > 0.0) {
        q.tail_slope = 1.0 / p.tail_slope;
    } else {
        // flat tail: inverse diverges past the supremum of the input
        q.tail_slope = 0.0;
        q.domain_end = p.vertices.back().v;
    }
    if (p.domain_end) {
        // input diverges at domain_end: inverse saturates there
        if (*p.domain_end > p.vertices.back().x) {
            // affine stretch up to the divergence point
            double xe = *p.domain_end;
            double ve = p.vertices.back().v + p.tail_slope * (xe - p.vertices.back().x);
            q.vertices.push_back({ve, xe});
        }
        q.tail_slope = 0.0;
        q.domain_end.reset();
    }
    return q;
}

}  // namespace

curve lower_pseudo_inverse(const curve& alpha) {
    path p{alpha.breakpoints(), alpha.tail_slope(), alpha.domain_end()};
    path q = swap_axes(p);
    curve out = curve::from_breakpoints(q.vertices, q.tail_slope, jump_side::left);
    return out.with_domain_end(q.domain_end);
}

curve upper_pseudo_inverse(const curve& lambda) {
    path p{lambda.breakpoints(), lambda.tail_slope(), lambda.domain_end()};
    path q = swap_axes(p);
    curve out = curve::from_breakpoints(q.vertices, q.tail_slope, jump_side::right);
    return out.with_domain_end(q.domain_end);
}

// ---------------------------------------------------------------------------
// gap suprema and horizontal deviation
// ---------------------------------------------------------------------------

namespace {

// lambda(k) with the convention lambda(k) = 0 for k < 0
extended_value eval0(const curve& c, double k) {
    if (k < 0.0) return extended_value::finite(0.0);
    return c.eval_ext(k);
}

}  // namespace

extended_value sup_forward_gap(const curve& lambda, double x, const grid_spec& g) {
    if (x < 0.0) throw std::invalid_argument("sup_forward_gap: x must be >= 0");
    if (x == 0.0) return extended_value::finite(0.0);
    long kmax = std::max<long>(g.npoints() - 1,
                               static_cast<long>(std::ceil(lambda.last_x() + x)) + 2);
    double best = 0.0;
    for (long k = 0; k <= kmax; ++k) {
        extended_value a = eval0(lambda, static_cast<double>(k));
        if (a.is_unbounded()) return extended_value::unbounded();
        extended_value b = eval0(lambda, static_cast<double>(k) - x);
        if (b.is_unbounded()) continue;
        best = std::max(best, a.value() - b.value());
    }
    best = std::max(best, lambda.tail_slope() * x);
    return extended_value::finite(best);
}

extended_value sup_growth_gap(const curve& alpha, double y, const grid_spec& g) {
    if (y < 0.0) throw std::invalid_argument("sup_growth_gap: y must be >= 0");
    if (y == 0.0) return extended_value::finite(1.0);
    if (alpha.domain_end()) return extended_value::unbounded();
    std::vector<double> cand{0.0};
    for (const auto& p : alpha.breakpoints()) {
        cand.push_back(p.x);
        if (p.x - y >= 0.0) cand.push_back(p.x - y);
    }
    for (int i = 0; i < g.npoints(); ++i) cand.push_back(g.x(i));
    double best = alpha.tail_slope() * y + 1.0;
    for (double tau : cand) {
        best = std::max(best, alpha.eval(tau + y) - alpha.eval(tau) + 1.0);
        best = std::max(best, alpha.eval_left(tau + y) - alpha.eval_left(tau) + 1.0);
        best = std::max(best, alpha.eval_right(tau + y) - alpha.eval_right(tau) + 1.0);
    }
    return extended_value::finite(best);
}

extended_value horizontal_deviation(const curve& lambda, const curve& gamma, double x,
                                    const grid_spec& g) {
    if (x < 0.0) throw std::invalid_argument("horizontal_deviation: x must be >= 0");
    double sl = lambda.tail_slope(), sg = gamma.tail_slope();
    if (sg > sl) return extended_value::unbounded();
    if (sg == sl && sg == 0.0 && gamma.last_value() + x > lambda.last_value())
        return extended_value::unbounded();

    long ncap = std::max<long>(g.npoints() - 1,
                               8 * (static_cast<long>(std::ceil(std::max(lambda.last_x(), gamma.last_x()))) + 8));
    ncap = std::min<long>(ncap, 200000);

    double best = 0.0;
    for (long n = 0; n <= ncap; ++n) {
        double ln = checked_eval(lambda, static_cast<double>(n));
        long k = 0;
        bool found = false;
        for (; k <= n; ++k) {
            if (checked_eval(gamma, static_cast<double>(n - k)) + x <= ln) {
                found = true;
                break;
            }
        }
        if (!found) k = n + 1;  // all packets cleared
        best = std::max(best, static_cast<double>(k));
    }
    if (sg == sl && sg > 0.0) {
        // limit of the inner infimum as n grows, both curves on their tails
        double num = (gamma.last_value() - sg * gamma.last_x()) -
                     (lambda.last_value() - sl * lambda.last_x()) + x;
        double kinf = std::ceil(num / sg);
        if (kinf > 0.0) best = std::max(best, kinf);
    }
    return extended_value::finite(best);
}

}  // namespace tdnc
