#include "tdnc/models.hpp"

#include <algorithm>
#include <cmath>

namespace tdnc {

traffic_model gcra_arrival(double T, double tau) {
    if (!(T > 0.0)) throw std::invalid_argument("gcra_arrival: T must be > 0");
    if (tau < 0.0) throw std::invalid_argument("gcra_arrival: tau must be >= 0");
    curve lam = tau == 0.0 ? curve::affine(0.0, T)
                           : curve::from_breakpoints({{0.0, 0.0}, {tau / T, 0.0}}, T);
    return {traffic_kind::det, lam, bounding_fn::indicator()};
}

traffic_model deterministic_arrival(const curve& lambda) {
    return {traffic_kind::det, lambda, bounding_fn::indicator()};
}

traffic_model poisson_iat_arrival(double rho, const grid_spec& g) {
    if (!(rho > 0.0)) throw std::invalid_argument("poisson_iat_arrival: rho must be > 0");
    curve lam = curve::affine(0.0, 1.0 / rho);
    int np = g.npoints();
    int kmax = std::max(1, np - 1);  // gaps covered by the analysis grid
    std::vector<double> v(np, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        // gaps larger than k/rho contribute nothing beyond that x
        for (int i = 0; i < np; ++i) {
            double x = g.x(i);
            if (x >= static_cast<double>(k) / rho) break;
            v[i] = std::max(v[i], erlang_gap_tail(rho, k, x));
        }
    }
    for (int i = 1; i < np; ++i) v[i] = std::min(v[i], v[i - 1]);
    return {traffic_kind::iat, lam, bounding_fn::tabulated_fit_tail(g, std::move(v))};
}

traffic_model md1_vsd_arrival(double mu, double D, const grid_spec& g) {
    bounding_fn h = md1_vsd_bound(mu, D, g);  // validates mu*D < 1
    return {traffic_kind::vsd, curve::affine(0.0, D), h};
}

traffic_model msd_arrival(const curve& lambda, const bounding_fn& h) {
    return {traffic_kind::msd, lambda, h};
}

traffic_model vbc_arrival(const curve& alpha, const bounding_fn& f) {
    return {traffic_kind::vbc, alpha, f};
}

server_model constant_server(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("constant_server: T must be > 0");
    return {server_kind::det, curve::affine(T, T), bounding_fn::indicator()};
}

server_model wireless_id_server(double delta, double Pe, const grid_spec& g) {
    if (!(delta > 0.0)) throw std::invalid_argument("wireless_id_server: delta must be > 0");
    if (!(Pe >= 0.0 && Pe < 1.0))
        throw std::invalid_argument("wireless_id_server: Pe must be in [0,1)");
    double mean = delta / (1.0 - Pe);
    curve gamma = curve::affine(mean, mean);  // gamma(k) = delta (k+1) / (1-Pe)
    if (Pe == 0.0) return {server_kind::id, gamma, bounding_fn::indicator()};

    int np = g.npoints();
    int kmax = np;  // packet counts covered by the analysis grid
    std::vector<double> v(np, 0.0);
    for (int k = 0; k < kmax; ++k) {
        int pkts = k + 1;
        double base = static_cast<double>(pkts) / (1.0 - Pe);
        // tail table for pkts packets up to the largest slot count queried
        long smax = static_cast<long>(std::floor(base + g.horizon / delta)) + 2;
        for (int i = 0; i < np; ++i) {
            long slots = static_cast<long>(std::floor(base + g.x(i) / delta - 1e-9));
            if (slots > smax) break;
            v[i] = std::max(v[i], negbin_service_tail(Pe, pkts, slots));
        }
    }
    for (int i = 1; i < np; ++i) v[i] = std::min(v[i], v[i - 1]);
    return {server_kind::id, gamma, bounding_fn::tabulated_fit_tail(g, std::move(v))};
}

// ---------------------------------------------------------------------------
// conversions
// ---------------------------------------------------------------------------

traffic_model vsd_to_iat(const traffic_model& m) {
    if (m.kind != traffic_kind::vsd) throw std::invalid_argument("vsd_to_iat: wrong kind");
    return {traffic_kind::iat, m.c, m.bound};
}

traffic_model det_to_vsd(const traffic_model& m) {
    if (m.kind != traffic_kind::det) throw std::invalid_argument("det_to_vsd: wrong kind");
    return {traffic_kind::vsd, m.c, bounding_fn::indicator()};
}

server_model cs_to_id(const server_model& m) {
    if (m.kind != server_kind::cs) throw std::invalid_argument("cs_to_id: wrong kind");
    return {server_kind::id, m.c, m.bound};
}

server_model det_to_id(const server_model& m) {
    if (m.kind != server_kind::det) throw std::invalid_argument("det_to_id: wrong kind");
    return {server_kind::id, m.c, bounding_fn::indicator()};
}

namespace {

// [h(x) + (1/eta) int_x^inf h]_1, exact for subcritical exponentials
bounding_fn eta_bound(const bounding_fn& h, double eta, const grid_spec& g) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta conversion: eta must be > 0");
    if (!h.f_class())
        throw certificate_error("eta conversion: bounding function lacks a finite tail integral");
    if (h.rep() == bounding_fn::kind::indicator) return bounding_fn::indicator();
    if (h.rep() == bounding_fn::kind::exponential && h.param_a() <= 1.0 && h.param_b() > 0.0) {
        double a2 = h.param_a() * (1.0 + 1.0 / (eta * h.param_b()));
        return bounding_fn::exponential(a2, h.param_b());
    }
    std::vector<double> v(g.npoints());
    for (int i = 0; i < g.npoints(); ++i)
        v[i] = clamp_one(h.eval(g.x(i)) + h.tail_integral(g.x(i)).value() / eta);
    for (int i = 1; i < g.npoints(); ++i) v[i] = std::min(v[i], v[i - 1]);
    return bounding_fn::tabulated_fit_tail(g, std::move(v));
}

}  // namespace

traffic_model iat_to_vsd(const traffic_model& m, double eta, const grid_spec& g) {
    if (m.kind != traffic_kind::iat) throw std::invalid_argument("iat_to_vsd: wrong kind");
    bounding_fn hb = eta_bound(m.bound, eta, g);
    std::vector<breakpoint> raw = m.c.breakpoints();
    for (auto& p : raw) p.v -= eta * p.x;
    curve lam = monotone_nonneg_envelope(std::move(raw), m.c.tail_slope() - eta);
    return {traffic_kind::vsd, lam, hb};
}

server_model id_to_cs(const server_model& m, double eta, const grid_spec& g) {
    if (m.kind != server_kind::id) throw std::invalid_argument("id_to_cs: wrong kind");
    bounding_fn jb = eta_bound(m.bound, eta, g);
    return {server_kind::cs, m.c.plus_linear(eta), jb};
}

namespace {

double bound_at(const bounding_fn& f, const extended_value& x) {
    return x.is_unbounded() ? f.limit_value() : f.eval(x.value());
}

}  // namespace

traffic_model vbc_to_vsd(const traffic_model& m, const grid_spec& g) {
    if (m.kind != traffic_kind::vbc) throw std::invalid_argument("vbc_to_vsd: wrong kind");
    curve lam = lower_pseudo_inverse(m.c);
    // forward-gap map y(x) on a fine backlog grid, then invert:
    // h(y) = f( sup{ x : y(x) <= y } ), undershooting x keeps h an upper bound
    double fine = g.step / 4.0;
    double xmax = std::max(4.0, m.c.eval_ext(g.horizon).value_or(m.c.last_value()) + 1.0);
    int nf = static_cast<int>(std::ceil(xmax / fine)) + 1;
    std::vector<extended_value> ymap(nf);
    for (int i = 0; i < nf; ++i) ymap[i] = sup_forward_gap(lam, fine * i, g);
    std::vector<double> hv(g.npoints());
    for (int i = 0; i < g.npoints(); ++i) {
        double y = g.x(i);
        double xstar = 0.0;
        for (int j = 0; j < nf; ++j) {
            if (ymap[j].is_unbounded() || ymap[j].value() > y) break;
            xstar = fine * j;
        }
        hv[i] = bound_at(m.bound, extended_value::finite(xstar));
    }
    for (int i = 1; i < g.npoints(); ++i) hv[i] = std::min(hv[i], hv[i - 1]);
    return {traffic_kind::vsd, lam, bounding_fn::tabulated_fit_tail(g, std::move(hv))};
}

traffic_model vsd_to_vbc(const traffic_model& m, const grid_spec& g) {
    if (m.kind != traffic_kind::vsd) throw std::invalid_argument("vsd_to_vbc: wrong kind");
    curve alpha = upper_pseudo_inverse(m.c);
    // growth-gap map x(y) on a fine delay grid, then invert:
    // f(x) = h( sup{ y : x(y) <= x } ); below x(0) = 1 nothing can be claimed
    double fine = g.step / 4.0;
    int nf = 4 * (g.npoints() - 1) + 1;
    std::vector<extended_value> xmap(nf);
    for (int i = 0; i < nf; ++i) xmap[i] = sup_growth_gap(alpha, fine * i, g);
    std::vector<double> fv(g.npoints());
    for (int i = 0; i < g.npoints(); ++i) {
        double x = g.x(i);
        bool any = false;
        double ystar = 0.0;
        for (int j = 0; j < nf; ++j) {
            if (xmap[j].is_unbounded() || xmap[j].value() > x) break;
            ystar = fine * j;
            any = true;
        }
        fv[i] = any ? bound_at(m.bound, extended_value::finite(ystar)) : 1.0;
    }
    for (int i = 1; i < g.npoints(); ++i) fv[i] = std::min(fv[i], fv[i - 1]);
    return {traffic_kind::vbc, alpha, bounding_fn::tabulated_fit_tail(g, std::move(fv))};
}

}  // namespace tdnc
