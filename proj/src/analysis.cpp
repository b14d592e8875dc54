#include "tdnc/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace tdnc {

stability_report stability_check(const curve& lambda, const curve& gamma) {
    stability_report r;
    r.lambda_rate = lambda.tail_slope();
    r.gamma_rate = gamma.tail_slope();
    r.stable = r.gamma_rate <= r.lambda_rate + 1e-12;
    return r;
}

grid_spec packet_grid(const grid_spec& g) {
    return grid_spec(1.0, std::max<double>(1.0, static_cast<double>(g.npoints() - 1)));
}

namespace {

void require_kinds(const traffic_model& t, const server_model& s) {
    if (t.kind != traffic_kind::vsd)
        throw std::invalid_argument("analysis: traffic model must be v.s.d (convert first)");
    if (s.kind != server_kind::id)
        throw std::invalid_argument("analysis: server model must be i.d (convert first)");
}

stability_report require_stable(const traffic_model& t, const server_model& s) {
    stability_report r = stability_check(t.c, s.c);
    if (!r.stable) throw stability_error(r);
    return r;
}

}  // namespace

delay_bound_result delay_bound(const traffic_model& traffic, const server_model& server,
                               const grid_spec& g) {
    require_kinds(traffic, server);
    delay_bound_result res;
    res.stability = require_stable(traffic, server);
    grid_spec pg = packet_grid(g);
    auto dec = min_plus_deconv(server.c, traffic.c, pg);
    // gamma (/) lambda (0) = sup_k [gamma(k) - lambda(k)], clamped at 0
    res.offset = dec.unbounded ? 0.0 : std::max(0.0, dec.c.eval(0.0));
    if (dec.unbounded) throw stability_error(res.stability);
    bounding_fn conv = ccdf_min_plus_conv({server.bound, traffic.bound}, g);
    std::vector<double> v(g.npoints());
    for (int i = 0; i < g.npoints(); ++i) v[i] = conv.eval(g.x(i) - res.offset);
    for (int i = 1; i < g.npoints(); ++i) v[i] = std::min(v[i], v[i - 1]);
    res.fn = bounding_fn::tabulated_fit_tail(g, std::move(v));
    return res;
}

backlog_bound_result backlog_bound(const traffic_model& traffic, const server_model& server,
                                   const grid_spec& g) {
    require_kinds(traffic, server);
    backlog_bound_result res;
    res.stability = require_stable(traffic, server);
    grid_spec pg = packet_grid(g);
    bounding_fn conv = ccdf_min_plus_conv({server.bound, traffic.bound}, g);
    for (int i = 0; i < g.npoints(); ++i) {
        double x = g.x(i);
        extended_value h = horizontal_deviation(traffic.c, server.c, x, pg);
        if (h.is_unbounded()) throw stability_error(res.stability);
        res.points.push_back({x, h.value(), conv.eval(x)});
    }
    return res;
}

traffic_model output_characterization(const traffic_model& traffic, const server_model& server,
                                      const grid_spec& g) {
    require_kinds(traffic, server);
    require_stable(traffic, server);
    grid_spec pg = packet_grid(g);
    auto dec = max_plus_deconv(traffic.c, server.c, pg);
    bounding_fn conv = ccdf_min_plus_conv({server.bound, traffic.bound}, g);
    return {traffic_kind::iat, dec.c, conv};
}

server_model concatenate(const std::vector<server_model>& servers, const grid_spec& g) {
    if (servers.empty()) throw std::invalid_argument("concatenate: empty server list");
    for (const auto& s : servers)
        if (s.kind != server_kind::cs)
            throw std::invalid_argument("concatenate: all servers must be c.s (convert first)");
    if (servers.size() == 1) return servers[0];
    grid_spec pg = packet_grid(g);
    curve gamma = servers[0].c;
    std::vector<bounding_fn> bounds{servers[0].bound};
    for (std::size_t k = 1; k < servers.size(); ++k) {
        gamma = max_plus_conv(gamma, servers[k].c, pg);
        bounds.push_back(servers[k].bound);
    }
    return {server_kind::cs, gamma, ccdf_min_plus_conv(bounds, g)};
}

traffic_model superpose(const std::vector<traffic_model>& flows, const grid_spec& g) {
    if (flows.empty()) throw std::invalid_argument("superpose: empty flow list");
    std::vector<traffic_model> vbc;
    for (const auto& f : flows) {
        if (f.kind != traffic_kind::vsd)
            throw std::invalid_argument("superpose: all flows must be v.s.d (convert first)");
        vbc.push_back(vsd_to_vbc(f, g));
    }
    curve alpha = vbc[0].c;
    std::vector<bounding_fn> fs{vbc[0].bound};
    for (std::size_t i = 1; i < vbc.size(); ++i) {
        alpha = alpha.sum(vbc[i].c);
        fs.push_back(vbc[i].bound);
    }
    traffic_model agg{traffic_kind::vbc, alpha, ccdf_min_plus_conv(fs, g)};
    return vbc_to_vsd(agg, g);
}

server_model leftover_service_trace(const server_model& server, const traffic_model& cross,
                                    const packet_trace& tagged_arrivals) {
    if (server.kind != server_kind::id)
        throw std::invalid_argument("leftover_service_trace: server must be i.d");
    if (cross.kind != traffic_kind::det)
        throw std::invalid_argument("leftover_service_trace: cross flow must be deterministic");
    curve inv2 = upper_pseudo_inverse(cross.c);
    int n = tagged_arrivals.n();
    std::vector<breakpoint> pts;
    pts.reserve(n + 1);
    double prev = -1.0;
    for (int i = 0; i <= n; ++i) {
        double a1 = tagged_arrivals.a[i];
        extended_value mbar = inv2.eval_ext(a1);
        if (mbar.is_unbounded())
            throw hypothesis_error("leftover_service_trace: cross curve saturates");
        double v = server.c.eval(static_cast<double>(i) + mbar.value());
        if (v < prev - 1e-12)
            throw hypothesis_error("leftover_service_trace: resulting curve leaves class G");
        v = std::max(v, prev);
        pts.push_back({static_cast<double>(i), v});
        prev = v;
    }
    double tail = server.c.tail_slope();
    if (pts.size() >= 2) tail = std::max(tail, pts.back().v - pts[pts.size() - 2].v);
    return {server_kind::id, curve::from_breakpoints(std::move(pts), tail), server.bound};
}

double bound_quantile(const bounding_fn& fn, double eps, const grid_spec& g) {
    for (int i = 0; i < g.npoints(); ++i)
        if (fn.eval(g.x(i)) <= eps) return g.x(i);
    return std::numeric_limits<double>::infinity();
}

std::vector<double> default_eta_grid() { return {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}; }

}  // namespace tdnc
