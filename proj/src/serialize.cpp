#include "tdnc/serialize.hpp"

#include <iomanip>

namespace tdnc {

using nlohmann::json;

json curve_to_json(const curve& c) {
    json j;
    json bps = json::array();
    for (const auto& p : c.breakpoints()) bps.push_back({p.x, p.v});
    j["breakpoints"] = bps;
    j["tail_slope"] = c.tail_slope();
    if (c.side() == jump_side::left) j["jump_side"] = "left";
    if (c.domain_end()) j["domain_end"] = *c.domain_end();
    return j;
}

curve curve_from_json(const json& j) {
    std::vector<breakpoint> pts;
    for (const auto& p : j.at("breakpoints")) pts.push_back({p.at(0), p.at(1)});
    jump_side side = jump_side::right;
    if (j.contains("jump_side") && j["jump_side"] == "left") side = jump_side::left;
    curve c = curve::from_breakpoints(std::move(pts), j.at("tail_slope"), side);
    if (j.contains("domain_end")) c = c.with_domain_end(j["domain_end"].get<double>());
    return c;
}

json bound_to_json(const bounding_fn& f) {
    json j;
    switch (f.rep()) {
        case bounding_fn::kind::indicator:
            j["kind"] = "indicator";
            break;
        case bounding_fn::kind::exponential:
            j["kind"] = "exponential";
            j["a"] = f.param_a();
            j["b"] = f.param_b();
            break;
        case bounding_fn::kind::table:
            j["kind"] = "table";
            j["step"] = f.table_grid().step;
            j["values"] = f.table_values();
            j["tail"] = f.tail_mode() == bounding_fn::tail::geometric ? "geometric" : "constant";
            if (f.tail_mode() == bounding_fn::tail::geometric) j["ratio"] = f.tail_ratio();
            break;
    }
    return j;
}

bounding_fn bound_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "indicator") return bounding_fn::indicator();
    if (kind == "exponential") return bounding_fn::exponential(j.at("a"), j.at("b"));
    if (kind == "table") {
        std::vector<double> v = j.at("values").get<std::vector<double>>();
        double step = j.at("step");
        grid_spec g(step, step * std::max<std::size_t>(1, v.size() - 1));
        bounding_fn::tail mode = bounding_fn::tail::constant;
        double ratio = 0.0;
        if (j.contains("tail") && j["tail"] == "geometric") {
            mode = bounding_fn::tail::geometric;
            ratio = j.value("ratio", 0.0);
        }
        return bounding_fn::tabulated(g, std::move(v), mode, ratio);
    }
    throw std::invalid_argument("bound_from_json: unknown kind " + kind);
}

namespace {

const char* traffic_kind_name(traffic_kind k) {
    switch (k) {
        case traffic_kind::det: return "det";
        case traffic_kind::iat: return "iat";
        case traffic_kind::vsd: return "vsd";
        case traffic_kind::msd: return "msd";
        case traffic_kind::vbc: return "vbc";
    }
    return "?";
}

const char* server_kind_name(server_kind k) {
    switch (k) {
        case server_kind::det: return "det";
        case server_kind::id: return "id";
        case server_kind::cs: return "cs";
    }
    return "?";
}

}  // namespace

json traffic_to_json(const traffic_model& m) {
    return {{"kind", traffic_kind_name(m.kind)},
            {"curve", curve_to_json(m.c)},
            {"bound", bound_to_json(m.bound)}};
}

traffic_model traffic_from_json(const json& j) {
    std::string k = j.at("kind");
    traffic_kind kind;
    if (k == "det") kind = traffic_kind::det;
    else if (k == "iat") kind = traffic_kind::iat;
    else if (k == "vsd") kind = traffic_kind::vsd;
    else if (k == "msd") kind = traffic_kind::msd;
    else if (k == "vbc") kind = traffic_kind::vbc;
    else throw std::invalid_argument("traffic_from_json: unknown kind " + k);
    return {kind, curve_from_json(j.at("curve")), bound_from_json(j.at("bound"))};
}

json server_to_json(const server_model& m) {
    return {{"kind", server_kind_name(m.kind)},
            {"curve", curve_to_json(m.c)},
            {"bound", bound_to_json(m.bound)}};
}

server_model server_from_json(const json& j) {
    std::string k = j.at("kind");
    server_kind kind;
    if (k == "det") kind = server_kind::det;
    else if (k == "id") kind = server_kind::id;
    else if (k == "cs") kind = server_kind::cs;
    else throw std::invalid_argument("server_from_json: unknown kind " + k);
    return {kind, curve_from_json(j.at("curve")), bound_from_json(j.at("bound"))};
}

void write_curve_csv(std::ostream& os, const curve& c, const grid_spec& g) {
    os << "x,value\n" << std::setprecision(17);
    for (int i = 0; i < g.npoints(); ++i) os << g.x(i) << "," << c.eval(g.x(i)) << "\n";
}

void write_bound_csv(std::ostream& os, const bounding_fn& f, const grid_spec& g) {
    os << "x,prob\n" << std::setprecision(17);
    for (int i = 0; i < g.npoints(); ++i) os << g.x(i) << "," << f.eval(g.x(i)) << "\n";
}

void write_trace_csv(std::ostream& os, const packet_trace& t) {
    os << "n,flow_id,arrival,departure\n" << std::setprecision(17);
    for (int i = 1; i <= t.n(); ++i)
        os << i << "," << t.flow[i] << "," << t.a[i] << ","
           << (t.has_departures() ? t.d[i] : 0.0) << "\n";
}

void write_ccdf_csv(std::ostream& os, const empirical_ccdf& c) {
    os << "x,freq,samples\n" << std::setprecision(17);
    for (int i = 0; i < c.grid().npoints(); ++i)
        os << c.grid().x(i) << "," << c.freq(i) << "," << c.samples() << "\n";
}

}  // namespace tdnc
