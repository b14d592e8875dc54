#include "tdnc/bounding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdnc {

double clamp_one(double v) {
    if (v < 0.0) throw std::invalid_argument("clamp_one: negative argument");
    return std::min(1.0, v);
}

bounding_fn::bounding_fn() : kind_(kind::indicator) {}

bounding_fn bounding_fn::indicator() { return bounding_fn(); }

bounding_fn bounding_fn::exponential(double a, double b) {
    bounding_fn f;
    f.kind_ = kind::exponential;
    f.a_ = a;
    f.b_ = b;
    f.validate();
    return f;
}

bounding_fn bounding_fn::tabulated(const grid_spec& g, std::vector<double> values, tail mode,
                                   double ratio) {
    bounding_fn f;
    f.kind_ = kind::table;
    f.grid_ = g;
    f.values_ = std::move(values);
    f.tail_ = mode;
    f.ratio_ = ratio;
    f.validate();
    return f;
}

bounding_fn bounding_fn::tabulated_fit_tail(const grid_spec& g, std::vector<double> values) {
    // per-cell decay ratio from the last two positive cells
    double ratio = 0.0;
    tail mode = tail::constant;
    if (values.size() >= 2) {
        double last = values.back();
        double prev = values[values.size() - 2];
        if (last == 0.0) {
            mode = tail::geometric;  // finite support
            ratio = 0.0;
        } else if (prev > 0.0 && last < prev) {
            mode = tail::geometric;
            ratio = last / prev;
        }
    }
    return tabulated(g, std::move(values), mode, ratio);
}

void bounding_fn::validate() const {
    switch (kind_) {
        case kind::indicator:
            return;
        case kind::exponential:
            if (!(a_ >= 0.0) || !(b_ >= 0.0))
                throw std::invalid_argument("bounding_fn: exponential needs a,b >= 0");
            return;
        case kind::table: {
            grid_.validate();
            if (values_.empty()) throw std::invalid_argument("bounding_fn: empty table");
            for (std::size_t i = 0; i < values_.size(); ++i) {
                double v = values_[i];
                if (!(v >= 0.0 && v <= 1.0))
                    throw std::invalid_argument("bounding_fn: table value outside [0,1]");
                if (i > 0 && v > values_[i - 1] + 1e-15)
                    throw std::invalid_argument("bounding_fn: table must be nonincreasing");
            }
            if (tail_ == tail::geometric && !(ratio_ >= 0.0 && ratio_ < 1.0))
                throw std::invalid_argument("bounding_fn: geometric ratio must be in [0,1)");
            return;
        }
    }
}

namespace {

// cell index of x on a uniform grid, robust to x computed as k*step
long cell_index(double x, double step) {
    long i = static_cast<long>(std::floor(x / step));
    while ((i + 1) * step <= x) ++i;
    while (i > 0 && i * step > x) --i;
    return i;
}

}  // namespace

double bounding_fn::eval(double x) const {
    if (x < 0.0) return 1.0;
    switch (kind_) {
        case kind::indicator:
            return 0.0;
        case kind::exponential:
            return std::min(1.0, a_ * std::exp(-b_ * x));
        case kind::table: {
            long i = cell_index(x, grid_.step);
            long n = static_cast<long>(values_.size());
            if (i < n) return values_[i];
            if (tail_ == tail::constant) return values_.back();
            if (ratio_ == 0.0) return 0.0;
            return values_.back() * std::pow(ratio_, static_cast<double>(i - (n - 1)));
        }
    }
    return 0.0;
}

double bounding_fn::limit_value() const {
    switch (kind_) {
        case kind::indicator:
            return 0.0;
        case kind::exponential:
            return b_ > 0.0 ? 0.0 : std::min(1.0, a_);
        case kind::table:
            if (tail_ == tail::constant) return values_.back();
            return 0.0;
    }
    return 0.0;
}

extended_value bounding_fn::tail_integral(double x) const {
    if (x < 0.0) throw std::invalid_argument("tail_integral: x must be >= 0");
    switch (kind_) {
        case kind::indicator:
            return extended_value::finite(0.0);
        case kind::exponential: {
            if (a_ == 0.0) return extended_value::finite(0.0);
            if (b_ == 0.0) return extended_value::unbounded();
            double x0 = a_ > 1.0 ? std::log(a_) / b_ : 0.0;  // clamp boundary
            if (x >= x0) return extended_value::finite(a_ / b_ * std::exp(-b_ * x));
            return extended_value::finite((x0 - x) + 1.0 / b_);
        }
        case kind::table: {
            if (tail_ == tail::constant && values_.back() > 0.0) return extended_value::unbounded();
            long n = static_cast<long>(values_.size());
            long i = cell_index(x, grid_.step);
            double acc = 0.0;
            if (i < n) {
                // remainder of cell i
                acc += values_[i] * ((i + 1) * grid_.step - x);
                for (long j = i + 1; j < n; ++j) acc += values_[j] * grid_.step;
                if (tail_ == tail::geometric && ratio_ > 0.0) {
                    // cells n, n+1, ... carry v_last * r^k for k = 1, 2, ...
                    acc += values_.back() * grid_.step * ratio_ / (1.0 - ratio_);
                }
                return extended_value::finite(acc);
            }
            if (tail_ == tail::constant) return extended_value::finite(0.0);  // last value 0
            if (ratio_ == 0.0) return extended_value::finite(0.0);
            // inside the geometric extension
            double vi = values_.back() * std::pow(ratio_, static_cast<double>(i - (n - 1)));
            acc += vi * ((i + 1) * grid_.step - x);
            acc += vi * ratio_ * grid_.step / (1.0 - ratio_);
            return extended_value::finite(acc);
        }
    }
    return extended_value::finite(0.0);
}

bool bounding_fn::f_class() const {
    switch (kind_) {
        case kind::indicator:
            return true;
        case kind::exponential:
            return b_ > 0.0 || a_ == 0.0;
        case kind::table:
            if (tail_ == tail::geometric) return true;
            return values_.back() == 0.0;
    }
    return false;
}

bounding_fn ccdf_min_plus_conv(const std::vector<bounding_fn>& fs, const grid_spec& g) {
    if (fs.empty()) throw std::invalid_argument("ccdf_min_plus_conv: empty list");
    // indicators are identities on x >= 0
    std::vector<bounding_fn> work;
    for (const auto& f : fs)
        if (f.rep() != bounding_fn::kind::indicator) work.push_back(f);
    if (work.empty()) return bounding_fn::indicator();
    if (work.size() == 1) return work[0];

    int n = g.npoints();
    std::vector<double> acc(n);
    for (int i = 0; i < n; ++i) acc[i] = work[0].eval(g.x(i));
    for (std::size_t k = 1; k < work.size(); ++k) {
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) {
            double best = acc[0] + work[k].eval(g.x(i));  // split y = 0
            for (int j = 1; j <= i; ++j)
                best = std::min(best, acc[j] + work[k].eval(g.x(i) - g.x(j)));
            next[i] = clamp_one(best);
        }
        acc = std::move(next);
    }
    for (int i = 0; i < n; ++i) acc[i] = clamp_one(acc[i]);
    for (int i = 1; i < n; ++i) acc[i] = std::min(acc[i], acc[i - 1]);
    return bounding_fn::tabulated_fit_tail(g, std::move(acc));
}

// ---------------------------------------------------------------------------
// incomplete gamma
// ---------------------------------------------------------------------------

namespace {

double gser_impl(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gcf_impl(double a, double x) {
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gammp(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gser_impl(a, x);
    return 1.0 - gcf_impl(a, x);
}

// ---------------------------------------------------------------------------
// example bounds
// ---------------------------------------------------------------------------

double erlang_gap_tail(double rho, int n_minus_m, double x) {
    if (!(rho > 0.0)) throw std::invalid_argument("erlang_gap_tail: rho must be > 0");
    if (n_minus_m < 1) throw std::invalid_argument("erlang_gap_tail: n-m must be >= 1");
    double y = static_cast<double>(n_minus_m) / rho - x;
    if (y <= 0.0) return 0.0;
    return clamp_one(gammp(static_cast<double>(n_minus_m), rho * y));
}

bounding_fn erlang_iat_bound(double rho, int n_minus_m, const grid_spec& g) {
    std::vector<double> v(g.npoints());
    for (int i = 0; i < g.npoints(); ++i) v[i] = erlang_gap_tail(rho, n_minus_m, g.x(i));
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::min(v[i], v[i - 1]);
    return bounding_fn::tabulated_fit_tail(g, std::move(v));
}

double md1_wait_ccdf(double mu, double D, double x) {
    double rho = mu * D;
    if (!(mu > 0.0) || !(D > 0.0)) throw std::invalid_argument("md1_wait_ccdf: mu,D must be > 0");
    if (!(rho < 1.0)) throw std::invalid_argument("md1_wait_ccdf: unstable (mu*D >= 1)");
    if (x < 0.0) return 1.0;
    // Benes: P{W <= x} = (1-rho) sum_{k=0}^{floor(x/D)} (mu(kD-x))^k e^{-mu(kD-x)} / k!
    long K = static_cast<long>(std::floor(x / D + 1e-12));
    double sum = 0.0, maxterm = 0.0;
    for (long k = 0; k <= K; ++k) {
        double y = mu * (static_cast<double>(k) * D - x);
        double term;
        if (k == 0) {
            term = std::exp(-y);
        } else if (y == 0.0) {
            term = 0.0;
        } else {
            double lm = static_cast<double>(k) * std::log(std::fabs(y)) -
                        std::lgamma(static_cast<double>(k) + 1.0) - y;
            if (lm > 690.0) return std::numeric_limits<double>::quiet_NaN();
            term = std::exp(lm);
            if ((k % 2 == 1) && y < 0.0) term = -term;
        }
        sum += term;
        maxterm = std::max(maxterm, std::fabs(term));
    }
    double F = (1.0 - rho) * sum;
    double ccdf = 1.0 - F;
    // alternating terms: below the cancellation noise floor the series is junk
    double noise = maxterm * 1e-12;
    if (ccdf < noise) {
        if (noise <= 1e-9) return noise;  // certified tiny, still an upper bound
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::min(1.0, std::max(0.0, ccdf));
}

bounding_fn md1_vsd_bound(double mu, double D, const grid_spec& g) {
    std::vector<double> v;
    v.reserve(g.npoints());
    double prev = 1.0;
    for (int i = 0; i < g.npoints(); ++i) {
        double c = md1_wait_ccdf(mu, D, g.x(i));
        if (std::isnan(c) || c < 1e-14) break;
        c = std::min(c, prev);
        v.push_back(c);
        prev = c;
    }
    // trailing plateaus block the geometric fit
    while (v.size() >= 2 && v.back() == v[v.size() - 2]) v.pop_back();
    if (v.empty()) v.push_back(mu * D);
    return bounding_fn::tabulated_fit_tail(g, std::move(v));
}

double negbin_service_tail(double Pe, int n, long slots) {
    if (!(Pe >= 0.0 && Pe < 1.0))
        throw std::invalid_argument("negbin_service_tail: Pe must be in [0,1)");
    if (n < 1) throw std::invalid_argument("negbin_service_tail: n must be >= 1");
    if (slots < n) return 1.0;
    if (Pe == 0.0) return 0.0;  // exactly n slots always
    double logq = std::log(1.0 - Pe), logp = std::log(Pe);
    auto log_pmf = [&](long i) {
        return std::lgamma(static_cast<double>(i)) - std::lgamma(static_cast<double>(n)) -
               std::lgamma(static_cast<double>(i - n) + 1.0) + n * logq + (i - n) * logp;
    };
    // accumulate the smaller side
    double cdf = 0.0;
    for (long i = n; i <= slots; ++i) cdf += std::exp(log_pmf(i));
    if (cdf < 0.5) return std::min(1.0, std::max(0.0, 1.0 - cdf));
    double tailsum = 0.0;
    for (long i = slots + 1;; ++i) {
        double t = std::exp(log_pmf(i));
        tailsum += t;
        if (t < tailsum * 1e-17 && i > slots + 4) break;
        if (i > slots + 100000) break;
    }
    return std::min(1.0, tailsum);
}

}  // namespace tdnc
