#include "tdnc/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

namespace tdnc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

source_spec source_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "deterministic") return source_spec::deterministic(j.at("period"));
    if (kind == "poisson") return source_spec::poisson(j.at("rate"));
    if (kind == "gcra_shaped")
        return source_spec::gcra_shaped(j.at("T"), j.at("tau"), source_from_json(j.at("inner")));
    throw validation_error("source: unknown kind '" + kind + "'");
}

json source_to_json(const source_spec& s) {
    switch (s.k) {
        case source_spec::kind::deterministic:
            return {{"kind", "deterministic"}, {"period", s.period}};
        case source_spec::kind::poisson:
            return {{"kind", "poisson"}, {"rate", s.rate}};
        case source_spec::kind::gcra_shaped:
            return {{"kind", "gcra_shaped"}, {"T", s.T}, {"tau", s.tau},
                    {"inner", source_to_json(*s.inner)}};
    }
    return {};
}

server_spec serverspec_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "constant") return server_spec::constant(j.at("T"));
    if (kind == "slotted_wireless")
        return server_spec::slotted_wireless(j.at("delta"), j.at("Pe"));
    throw validation_error("server: unknown kind '" + kind + "'");
}

json serverspec_to_json(const server_spec& s) {
    if (s.k == server_spec::kind::constant) return {{"kind", "constant"}, {"T", s.T}};
    return {{"kind", "slotted_wireless"}, {"delta", s.delta}, {"Pe", s.Pe}};
}

model_decl model_from_json(const json& j) {
    model_decl m;
    if (j.is_null()) return m;
    std::string kind = j.at("kind");
    if (kind == "auto") {
        m.k = model_decl::kind::automatic;
    } else if (kind == "gcra") {
        m.k = model_decl::kind::gcra;
        m.T = j.at("T");
        m.tau = j.at("tau");
    } else if (kind == "poisson_iat") {
        m.k = model_decl::kind::poisson_iat;
    } else if (kind == "md1_vsd") {
        m.k = model_decl::kind::md1_vsd;
        m.D = j.at("D");
    } else if (kind == "explicit") {
        m.k = model_decl::kind::explicit_model;
        m.explicit_json = j.at("model");
    } else {
        throw validation_error("model: unknown kind '" + kind + "'");
    }
    return m;
}

json model_to_json(const model_decl& m) {
    switch (m.k) {
        case model_decl::kind::automatic:
            return {{"kind", "auto"}};
        case model_decl::kind::gcra:
            return {{"kind", "gcra"}, {"T", m.T}, {"tau", m.tau}};
        case model_decl::kind::poisson_iat:
            return {{"kind", "poisson_iat"}};
        case model_decl::kind::md1_vsd:
            return {{"kind", "md1_vsd"}, {"D", m.D}};
        case model_decl::kind::explicit_model:
            return {{"kind", "explicit"}, {"model", *m.explicit_json}};
    }
    return {};
}

analysis_decl analysis_from_json(const json& j) {
    analysis_decl a;
    std::string kind = j.at("kind");
    if (kind == "delay") a.k = analysis_decl::kind::delay;
    else if (kind == "backlog") a.k = analysis_decl::kind::backlog;
    else if (kind == "output") a.k = analysis_decl::kind::output;
    else if (kind == "concatenation") a.k = analysis_decl::kind::concatenation;
    else if (kind == "superposition") a.k = analysis_decl::kind::superposition;
    else if (kind == "leftover") a.k = analysis_decl::kind::leftover;
    else throw validation_error("analysis: unknown kind '" + kind + "'");
    if (a.k == analysis_decl::kind::superposition)
        a.flows = j.at("flows").get<std::vector<std::string>>();
    else
        a.flow = j.at("flow");
    return a;
}

json analysis_to_json(const analysis_decl& a) {
    const char* names[] = {"delay", "backlog", "output", "concatenation", "superposition",
                           "leftover"};
    json j{{"kind", names[static_cast<int>(a.k)]}};
    if (a.k == analysis_decl::kind::superposition) j["flows"] = a.flows;
    else j["flow"] = a.flow;
    return j;
}

void validate(const scenario& s) {
    std::set<std::string> flow_names, node_names;
    for (const auto& n : s.nodes)
        if (n.name.empty() || !node_names.insert(n.name).second)
            throw validation_error("nodes: missing or duplicate name '" + n.name + "'");
    for (const auto& f : s.flows) {
        if (f.name.empty() || !flow_names.insert(f.name).second)
            throw validation_error("flows: missing or duplicate name '" + f.name + "'");
        std::set<std::string> seen;
        for (const auto& p : f.path) {
            if (!node_names.count(p))
                throw validation_error("flow '" + f.name + "': unresolved node reference '" + p + "'");
            if (!seen.insert(p).second)
                throw validation_error("flow '" + f.name + "': path revisits node '" + p + "'");
        }
        if (f.source.k == source_spec::kind::poisson && f.model.k == model_decl::kind::automatic)
            throw validation_error("flow '" + f.name +
                                   "': a poisson source needs an explicit traffic model");
    }
    for (const auto& a : s.aggregates) {
        if (!node_names.count(a.node))
            throw validation_error("aggregate: unresolved node reference '" + a.node + "'");
        if (!flow_names.count(a.tagged) || !flow_names.count(a.cross))
            throw validation_error("aggregate: unresolved flow reference");
        if (a.tagged == a.cross) throw validation_error("aggregate: tagged and cross must differ");
    }
    for (const auto& a : s.analysis) {
        if (a.k == analysis_decl::kind::superposition) {
            if (a.flows.empty()) throw validation_error("superposition: needs at least one flow");
            for (const auto& f : a.flows)
                if (!flow_names.count(f))
                    throw validation_error("superposition: unresolved flow reference '" + f + "'");
        } else {
            if (!flow_names.count(a.flow))
                throw validation_error("analysis: unresolved flow reference '" + a.flow + "'");
        }
        if (a.k == analysis_decl::kind::leftover) {
            bool found = false;
            for (const auto& ag : s.aggregates)
                if (ag.tagged == a.flow) found = true;
            if (!found)
                throw validation_error("leftover: flow '" + a.flow +
                                       "' has no aggregate declaration");
        }
    }
    if (s.simulation.packets < 2) throw validation_error("simulation: packets must be >= 2");
    if (s.simulation.replications < 1)
        throw validation_error("simulation: replications must be >= 1");
    if (static_cast<double>(s.simulation.packets) * s.simulation.replications > 2e8)
        throw validation_error("simulation: packets x replications exceeds the 2e8 cap");
}

}  // namespace

scenario scenario_from_json(const json& j) {
    scenario s;
    try {
        s.grid = grid_spec(j.at("grid").at("step"), j.at("grid").at("horizon"));
        if (j.contains("eta")) {
            if (j["eta"].is_string() && j["eta"] == "auto") {
                s.eta_auto = true;
            } else {
                s.eta_auto = false;
                s.eta = j["eta"].get<double>();
                if (!(s.eta > 0.0)) throw validation_error("eta must be > 0");
            }
        }
        for (const auto& jf : j.value("flows", json::array())) {
            flow_decl f;
            f.name = jf.at("name");
            f.source = source_from_json(jf.at("source"));
            f.model = model_from_json(jf.value("model", json()));
            f.path = jf.value("path", std::vector<std::string>{});
            s.flows.push_back(std::move(f));
        }
        for (const auto& jn : j.value("nodes", json::array()))
            s.nodes.push_back({jn.at("name"), serverspec_from_json(jn.at("server"))});
        for (const auto& ja : j.value("aggregates", json::array()))
            s.aggregates.push_back({ja.at("node"), ja.at("tagged"), ja.at("cross")});
        for (const auto& ja : j.value("analysis", json::array()))
            s.analysis.push_back(analysis_from_json(ja));
        if (j.contains("simulation")) {
            const auto& js = j["simulation"];
            s.simulation.packets = js.value("packets", 10000L);
            s.simulation.replications = js.value("replications", 1);
            s.simulation.seed = js.value("seed", 1UL);
        }
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception& e) {
        throw validation_error(std::string("scenario parse error: ") + e.what());
    }
    validate(s);
    return s;
}

json scenario_to_json(const scenario& s) {
    json j;
    j["grid"] = {{"step", s.grid.step}, {"horizon", s.grid.horizon}};
    if (s.eta_auto) j["eta"] = "auto";
    else j["eta"] = s.eta;
    j["flows"] = json::array();
    for (const auto& f : s.flows)
        j["flows"].push_back({{"name", f.name},
                              {"source", source_to_json(f.source)},
                              {"model", model_to_json(f.model)},
                              {"path", f.path}});
    j["nodes"] = json::array();
    for (const auto& n : s.nodes)
        j["nodes"].push_back({{"name", n.name}, {"server", serverspec_to_json(n.server)}});
    j["aggregates"] = json::array();
    for (const auto& a : s.aggregates)
        j["aggregates"].push_back({{"node", a.node}, {"tagged", a.tagged}, {"cross", a.cross}});
    j["analysis"] = json::array();
    for (const auto& a : s.analysis) j["analysis"].push_back(analysis_to_json(a));
    j["simulation"] = {{"packets", s.simulation.packets},
                       {"replications", s.simulation.replications},
                       {"seed", s.simulation.seed}};
    return j;
}

scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error(std::string("scenario parse error in ") + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// model building
// ---------------------------------------------------------------------------

namespace {

traffic_model build_traffic(const flow_decl& f, const grid_spec& g) {
    switch (f.model.k) {
        case model_decl::kind::automatic:
            switch (f.source.k) {
                case source_spec::kind::deterministic:
                    return deterministic_arrival(curve::affine(0.0, f.source.period));
                case source_spec::kind::gcra_shaped:
                    return gcra_arrival(f.source.T, f.source.tau);
                case source_spec::kind::poisson:
                    throw validation_error("poisson source needs an explicit model");
            }
            break;
        case model_decl::kind::gcra:
            return gcra_arrival(f.model.T, f.model.tau);
        case model_decl::kind::poisson_iat:
            if (f.source.k != source_spec::kind::poisson)
                throw validation_error("flow '" + f.name + "': poisson_iat needs a poisson source");
            return poisson_iat_arrival(f.source.rate, g);
        case model_decl::kind::md1_vsd:
            if (f.source.k != source_spec::kind::poisson)
                throw validation_error("flow '" + f.name + "': md1_vsd needs a poisson source");
            return md1_vsd_arrival(f.source.rate, f.model.D, g);
        case model_decl::kind::explicit_model:
            return traffic_from_json(*f.model.explicit_json);
    }
    throw validation_error("flow '" + f.name + "': cannot build a traffic model");
}

server_model build_server(const node_decl& n, const grid_spec& g) {
    if (n.server.k == server_spec::kind::constant) return constant_server(n.server.T);
    return wireless_id_server(n.server.delta, n.server.Pe, g);
}

traffic_model traffic_as_vsd(const traffic_model& m, double eta, const grid_spec& g) {
    switch (m.kind) {
        case traffic_kind::vsd: return m;
        case traffic_kind::det: return det_to_vsd(m);
        case traffic_kind::iat: return iat_to_vsd(m, eta, g);
        case traffic_kind::vbc: return vbc_to_vsd(m, g);
        case traffic_kind::msd:
            throw validation_error("m.s.d models participate through their trace check only");
    }
    throw validation_error("unknown traffic kind");
}

server_model server_as_cs(const server_model& m, double eta, const grid_spec& g) {
    switch (m.kind) {
        case server_kind::cs: return m;
        case server_kind::det: return {server_kind::cs, m.c, m.bound};
        case server_kind::id: return id_to_cs(m, eta, g);
    }
    throw validation_error("unknown server kind");
}

struct chain_result {
    server_model id;      // end-to-end i.d model
    bool used_eta = false;
};

chain_result chain_to_id(const std::vector<server_model>& nodes, double eta, const grid_spec& g) {
    if (nodes.empty()) throw validation_error("flow has no path to analyze");
    chain_result r;
    if (nodes.size() == 1) {
        const server_model& m = nodes[0];
        r.id = m.kind == server_kind::det ? det_to_id(m)
             : m.kind == server_kind::cs  ? cs_to_id(m)
                                          : m;
        return r;
    }
    std::vector<server_model> cs;
    for (const auto& m : nodes) {
        if (m.kind == server_kind::id) r.used_eta = true;
        cs.push_back(server_as_cs(m, eta, g));
    }
    r.id = cs_to_id(concatenate(cs, g));
    return r;
}

// ---------------------------------------------------------------------------
// simulation helpers
// ---------------------------------------------------------------------------

template <typename T, typename F>
std::vector<T> parallel_reps(int reps, F&& fn) {
    std::vector<std::optional<T>> slots(reps);
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned nthreads = std::min<unsigned>(hw, static_cast<unsigned>(reps));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&, t]() {
            for (int r = static_cast<int>(t); r < reps; r += static_cast<int>(nthreads))
                slots[static_cast<std::size_t>(r)].emplace(fn(r));
        });
    for (auto& th : pool) th.join();
    std::vector<T> out;
    out.reserve(reps);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<server_spec> path_specs(const scenario& s, const flow_decl& f) {
    std::vector<server_spec> specs;
    for (const auto& p : f.path)
        for (const auto& n : s.nodes)
            if (n.name == p) specs.push_back(n.server);
    return specs;
}

int flow_index(const scenario& s, const std::string& name) {
    for (std::size_t i = 0; i < s.flows.size(); ++i)
        if (s.flows[i].name == name) return static_cast<int>(i);
    throw validation_error("unresolved flow reference '" + name + "'");
}

// dominance with replication-aware slack: 2 max(binomial sigma,
// between-replication sigma of the merged estimator)
struct dominance_result {
    bool pass = true;
    json points = json::array();
};

dominance_result check_dominance(const std::vector<std::vector<std::uint64_t>>& rep_counts,
                                 const std::vector<std::uint64_t>& rep_samples,
                                 const std::vector<double>& xs, const std::vector<double>& bounds,
                                 double mass = 1e-3) {
    dominance_result res;
    int reps = static_cast<int>(rep_counts.size());
    std::uint64_t total = 0;
    for (auto s : rep_samples) total += s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::uint64_t above = 0;
        for (const auto& rc : rep_counts) above += rc[i];
        double p = total ? static_cast<double>(above) / static_cast<double>(total) : 0.0;
        if (p < mass) continue;
        double sig_bin = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
        double sig_rep = 0.0;
        if (reps > 1) {
            double mean = 0.0;
            std::vector<double> fr(reps);
            for (int r = 0; r < reps; ++r) {
                fr[r] = rep_samples[r]
                            ? static_cast<double>(rep_counts[r][i]) / static_cast<double>(rep_samples[r])
                            : 0.0;
                mean += fr[r];
            }
            mean /= reps;
            double var = 0.0;
            for (int r = 0; r < reps; ++r) var += (fr[r] - mean) * (fr[r] - mean);
            var /= (reps - 1);
            sig_rep = std::sqrt(var / reps);
        }
        double slack = 2.0 * std::max(sig_bin, sig_rep);
        bool ok = p <= bounds[i] + slack;
        if (!ok) res.pass = false;
        res.points.push_back({{"x", xs[i]},
                              {"empirical", p},
                              {"bound", bounds[i]},
                              {"slack", slack},
                              {"pass", ok}});
    }
    return res;
}

struct out_file {
    std::string name;
    std::string content;
};

std::string csv_string(const std::function<void(std::ostream&)>& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

double trace_duration(const packet_trace& t) {
    double end = t.a[t.n()];
    if (t.has_departures()) end = std::max(end, t.d[t.n()]);
    return end;
}

grid_spec backlog_time_grid(const grid_spec& g, double duration) {
    double h = std::max(g.step, std::ceil(duration / g.step) * g.step);
    return grid_spec(g.step, h);
}

}  // namespace

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

report run(const scenario& s, run_mode mode, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    report rep;
    json entries = json::array();
    std::vector<out_file> files;
    const grid_spec& g = s.grid;
    bool simulate = mode == run_mode::simulate || mode == run_mode::verify;
    bool analyze = mode == run_mode::analyze || mode == run_mode::verify;
    const int R = s.simulation.replications;
    const long N = s.simulation.packets;
    const std::uint64_t seed = s.simulation.seed;

    std::vector<double> gx(g.npoints());
    for (int i = 0; i < g.npoints(); ++i) gx[i] = g.x(i);

    if (mode == run_mode::curves) {
        for (const auto& f : s.flows) {
            traffic_model m = build_traffic(f, g);
            files.push_back({f.name + "_lambda.csv",
                             csv_string([&](std::ostream& os) { write_curve_csv(os, m.c, g); })});
            files.push_back({f.name + "_bound.csv",
                             csv_string([&](std::ostream& os) { write_bound_csv(os, m.bound, g); })});
        }
        for (const auto& n : s.nodes) {
            server_model m = build_server(n, g);
            files.push_back({n.name + "_gamma.csv",
                             csv_string([&](std::ostream& os) { write_curve_csv(os, m.c, g); })});
            files.push_back({n.name + "_bound.csv",
                             csv_string([&](std::ostream& os) { write_bound_csv(os, m.bound, g); })});
        }
    }

    // eta selection for one flow's end-to-end chain
    auto select_eta = [&](const flow_decl& f, json& meta) -> double {
        traffic_model raw = build_traffic(f, g);
        std::vector<server_model> nodes;
        for (const auto& p : f.path)
            for (const auto& n : s.nodes)
                if (n.name == p) nodes.push_back(build_server(n, g));
        bool needs = raw.kind == traffic_kind::iat;
        if (nodes.size() > 1)
            for (const auto& n : nodes)
                if (n.kind == server_kind::id) needs = true;
        if (!needs) {
            meta["eta"] = nullptr;
            return s.eta;
        }
        if (!s.eta_auto) {
            meta["eta"] = s.eta;
            return s.eta;
        }
        double best_eta = default_eta_grid().front();
        double best_q = std::numeric_limits<double>::infinity();
        for (double cand : default_eta_grid()) {
            try {
                traffic_model t = traffic_as_vsd(raw, cand, g);
                chain_result ch = chain_to_id(nodes, cand, g);
                delay_bound_result db = delay_bound(t, ch.id, g);
                double q = bound_quantile(db.fn, 1e-3, g);
                if (q < best_q) {
                    best_q = q;
                    best_eta = cand;
                }
            } catch (const stability_error&) {
                continue;  // candidate pushes the chain unstable
            }
        }
        meta["eta"] = best_eta;
        meta["eta_mode"] = "auto";
        return best_eta;
    };

    auto simulate_tandem = [&](const flow_decl& f, int fidx) {
        std::vector<server_spec> specs = path_specs(s, f);
        return parallel_reps<packet_trace>(R, [&](int r) {
            packet_trace a = generate_arrivals(f.source, static_cast<int>(N), seed, fidx, r);
            if (specs.empty()) return a;
            return run_tandem(a, specs, seed, r).final;
        });
    };

    for (const auto& a : s.analysis) {
        json meta;
        const char* names[] = {"delay", "backlog", "output", "concatenation", "superposition",
                               "leftover"};
        meta["kind"] = names[static_cast<int>(a.k)];

        switch (a.k) {
            case analysis_decl::kind::delay:
            case analysis_decl::kind::backlog:
            case analysis_decl::kind::concatenation: {
                meta["flow"] = a.flow;
                const flow_decl& f = s.flows[flow_index(s, a.flow)];
                double eta = select_eta(f, meta);
                traffic_model t = traffic_as_vsd(build_traffic(f, g), eta, g);
                std::vector<server_model> nodes;
                for (const auto& p : f.path)
                    for (const auto& n : s.nodes)
                        if (n.name == p) nodes.push_back(build_server(n, g));
                chain_result ch = chain_to_id(nodes, eta, g);

                if (a.k == analysis_decl::kind::backlog) {
                    backlog_bound_result bb = backlog_bound(t, ch.id, g);
                    meta["stability"] = {{"lambda_rate", bb.stability.lambda_rate},
                                         {"gamma_rate", bb.stability.gamma_rate},
                                         {"stable", bb.stability.stable}};
                    if (analyze) {
                        files.push_back({"backlog_" + a.flow + "_bound.csv",
                                         csv_string([&](std::ostream& os) {
                                             os << "x,level,prob\n" << std::setprecision(17);
                                             for (const auto& p : bb.points)
                                                 os << p.x << "," << p.level << ","
                                                    << p.probability << "\n";
                                         })});
                    }
                    if (simulate) {
                        auto finals = simulate_tandem(f, flow_index(s, a.flow));
                        std::vector<std::vector<std::uint64_t>> counts(R);
                        std::vector<std::uint64_t> samples(R);
                        std::vector<double> xs, bounds;
                        for (const auto& p : bb.points) {
                            xs.push_back(p.level);
                            bounds.push_back(p.probability);
                        }
                        for (int r = 0; r < R; ++r) {
                            empirical_ccdf e =
                                empirical_backlog(finals[r], backlog_time_grid(g, trace_duration(finals[r])));
                            samples[r] = e.samples();
                            for (const auto& p : bb.points) counts[r].push_back(e.count_above(p.level));
                        }
                        files.push_back({"backlog_" + a.flow + "_empirical.csv",
                                         csv_string([&](std::ostream& os) {
                                             os << "x,level,freq\n" << std::setprecision(17);
                                             std::uint64_t tot = 0;
                                             for (auto v : samples) tot += v;
                                             for (std::size_t i = 0; i < bb.points.size(); ++i) {
                                                 std::uint64_t ab = 0;
                                                 for (int r = 0; r < R; ++r) ab += counts[r][i];
                                                 os << bb.points[i].x << "," << bb.points[i].level
                                                    << ","
                                                    << static_cast<double>(ab) /
                                                           static_cast<double>(tot)
                                                    << "\n";
                                             }
                                         })});
                        if (mode == run_mode::verify) {
                            std::vector<double> levels;
                            for (const auto& p : bb.points) levels.push_back(p.level);
                            dominance_result dr =
                                check_dominance(counts, samples, levels, bounds);
                            meta["verdict"] = dr.pass ? "pass" : "fail";
                            meta["comparison"] = dr.points;
                            if (!dr.pass) rep.all_pass = false;
                        }
                    }
                } else {
                    delay_bound_result db = delay_bound(t, ch.id, g);
                    meta["offset"] = db.offset;
                    meta["stability"] = {{"lambda_rate", db.stability.lambda_rate},
                                         {"gamma_rate", db.stability.gamma_rate},
                                         {"stable", db.stability.stable}};
                    std::string prefix =
                        (a.k == analysis_decl::kind::concatenation ? "concat_" : "delay_") + a.flow;
                    if (analyze) {
                        files.push_back({prefix + "_bound.csv",
                                         csv_string([&](std::ostream& os) {
                                             write_bound_csv(os, db.fn, g);
                                         })});
                        if (a.k == analysis_decl::kind::concatenation)
                            files.push_back({prefix + "_gamma.csv",
                                             csv_string([&](std::ostream& os) {
                                                 write_curve_csv(os, ch.id.c, g);
                                             })});
                    }
                    if (simulate) {
                        auto finals = simulate_tandem(f, flow_index(s, a.flow));
                        std::vector<std::vector<std::uint64_t>> counts(R);
                        std::vector<std::uint64_t> samples(R);
                        for (int r = 0; r < R; ++r) {
                            empirical_ccdf e = delay_ccdf(finals[r], g);
                            samples[r] = e.samples();
                            for (int i = 0; i < g.npoints(); ++i)
                                counts[r].push_back(e.count_above(gx[i]));
                        }
                        files.push_back({prefix + "_trace.csv",
                                         csv_string([&](std::ostream& os) {
                                             write_trace_csv(os, finals[0]);
                                         })});
                        files.push_back({prefix + "_empirical.csv",
                                         csv_string([&](std::ostream& os) {
                                             os << "x,freq\n" << std::setprecision(17);
                                             std::uint64_t tot = 0;
                                             for (auto v : samples) tot += v;
                                             for (int i = 0; i < g.npoints(); ++i) {
                                                 std::uint64_t ab = 0;
                                                 for (int r = 0; r < R; ++r) ab += counts[r][i];
                                                 os << gx[i] << ","
                                                    << static_cast<double>(ab) /
                                                           static_cast<double>(tot)
                                                    << "\n";
                                             }
                                         })});
                        if (mode == run_mode::verify) {
                            std::vector<double> bounds(g.npoints());
                            for (int i = 0; i < g.npoints(); ++i) bounds[i] = db.fn.eval(gx[i]);
                            dominance_result dr = check_dominance(counts, samples, gx, bounds);
                            meta["verdict"] = dr.pass ? "pass" : "fail";
                            meta["comparison"] = dr.points;
                            if (!dr.pass) rep.all_pass = false;
                        }
                    }
                }
                break;
            }
            case analysis_decl::kind::output: {
                meta["flow"] = a.flow;
                const flow_decl& f = s.flows[flow_index(s, a.flow)];
                double eta = select_eta(f, meta);
                traffic_model t = traffic_as_vsd(build_traffic(f, g), eta, g);
                std::vector<server_model> nodes;
                for (const auto& p : f.path)
                    for (const auto& n : s.nodes)
                        if (n.name == p) nodes.push_back(build_server(n, g));
                chain_result ch = chain_to_id(nodes, eta, g);
                traffic_model out = output_characterization(t, ch.id, g);
                if (analyze) {
                    files.push_back({"output_" + a.flow + "_curve.csv",
                                     csv_string([&](std::ostream& os) {
                                         write_curve_csv(os, out.c, g);
                                     })});
                    files.push_back({"output_" + a.flow + "_bound.csv",
                                     csv_string([&](std::ostream& os) {
                                         write_bound_csv(os, out.bound, g);
                                     })});
                }
                if (simulate) {
                    auto finals = simulate_tandem(f, flow_index(s, a.flow));
                    std::vector<std::vector<std::uint64_t>> counts(R);
                    std::vector<std::uint64_t> samples(R);
                    for (int r = 0; r < R; ++r) {
                        packet_trace dep;
                        dep.a = finals[r].d;
                        dep.flow = finals[r].flow;
                        empirical_ccdf e = trace_statistics(dep, out, g);
                        samples[r] = e.samples();
                        for (int i = 0; i < g.npoints(); ++i)
                            counts[r].push_back(e.count_above(gx[i]));
                    }
                    files.push_back({"output_" + a.flow + "_empirical.csv",
                                     csv_string([&](std::ostream& os) {
                                         os << "x,freq\n" << std::setprecision(17);
                                         std::uint64_t tot = 0;
                                         for (auto v : samples) tot += v;
                                         for (int i = 0; i < g.npoints(); ++i) {
                                             std::uint64_t ab = 0;
                                             for (int r = 0; r < R; ++r) ab += counts[r][i];
                                             os << gx[i] << ","
                                                << static_cast<double>(ab) / static_cast<double>(tot)
                                                << "\n";
                                         }
                                     })});
                    if (mode == run_mode::verify) {
                        std::vector<double> bounds(g.npoints());
                        for (int i = 0; i < g.npoints(); ++i) bounds[i] = out.bound.eval(gx[i]);
                        dominance_result dr = check_dominance(counts, samples, gx, bounds);
                        meta["verdict"] = dr.pass ? "pass" : "fail";
                        meta["comparison"] = dr.points;
                        if (!dr.pass) rep.all_pass = false;
                    }
                }
                break;
            }
            case analysis_decl::kind::superposition: {
                meta["flows"] = a.flows;
                std::vector<traffic_model> parts;
                for (const auto& fname : a.flows) {
                    const flow_decl& f = s.flows[flow_index(s, fname)];
                    double eta = s.eta;
                    parts.push_back(traffic_as_vsd(build_traffic(f, g), eta, g));
                }
                traffic_model agg = superpose(parts, g);
                if (analyze) {
                    files.push_back({"superpose_lambda.csv",
                                     csv_string([&](std::ostream& os) {
                                         write_curve_csv(os, agg.c, g);
                                     })});
                    files.push_back({"superpose_bound.csv",
                                     csv_string([&](std::ostream& os) {
                                         write_bound_csv(os, agg.bound, g);
                                     })});
                }
                if (simulate) {
                    std::vector<int> idx;
                    for (const auto& fname : a.flows) idx.push_back(flow_index(s, fname));
                    auto stats = parallel_reps<empirical_ccdf>(R, [&](int r) {
                        std::vector<packet_trace> traces;
                        for (int fi : idx)
                            traces.push_back(generate_arrivals(s.flows[fi].source,
                                                               static_cast<int>(N), seed, fi, r));
                        packet_trace m = aggregate_fifo(traces, seed, r);
                        return trace_statistics(m, agg, g);
                    });
                    std::vector<std::vector<std::uint64_t>> counts(R);
                    std::vector<std::uint64_t> samples(R);
                    for (int r = 0; r < R; ++r) {
                        samples[r] = stats[r].samples();
                        for (int i = 0; i < g.npoints(); ++i)
                            counts[r].push_back(stats[r].count_above(gx[i]));
                    }
                    files.push_back({"superpose_empirical.csv",
                                     csv_string([&](std::ostream& os) {
                                         os << "x,freq\n" << std::setprecision(17);
                                         std::uint64_t tot = 0;
                                         for (auto v : samples) tot += v;
                                         for (int i = 0; i < g.npoints(); ++i) {
                                             std::uint64_t ab = 0;
                                             for (int r = 0; r < R; ++r) ab += counts[r][i];
                                             os << gx[i] << ","
                                                << static_cast<double>(ab) / static_cast<double>(tot)
                                                << "\n";
                                         }
                                     })});
                    if (mode == run_mode::verify) {
                        std::vector<double> bounds(g.npoints());
                        for (int i = 0; i < g.npoints(); ++i) bounds[i] = agg.bound.eval(gx[i]);
                        dominance_result dr = check_dominance(counts, samples, gx, bounds);
                        meta["verdict"] = dr.pass ? "pass" : "fail";
                        meta["comparison"] = dr.points;
                        if (!dr.pass) rep.all_pass = false;
                    }
                }
                break;
            }
            case analysis_decl::kind::leftover: {
                meta["flow"] = a.flow;
                const aggregate_decl* agd = nullptr;
                for (const auto& ag : s.aggregates)
                    if (ag.tagged == a.flow) agd = &ag;
                const flow_decl& tagged = s.flows[flow_index(s, agd->tagged)];
                const flow_decl& crossf = s.flows[flow_index(s, agd->cross)];
                traffic_model cross = build_traffic(crossf, g);
                if (cross.kind != traffic_kind::det)
                    throw validation_error("leftover: cross flow must have a deterministic model");
                server_model srv;
                for (const auto& n : s.nodes)
                    if (n.name == agd->node) srv = build_server(n, g);
                if (srv.kind == server_kind::det) srv = det_to_id(srv);
                if (analyze)
                    files.push_back({"leftover_" + a.flow + "_bound.csv",
                                     csv_string([&](std::ostream& os) {
                                         write_bound_csv(os, srv.bound, g);
                                     })});
                if (simulate) {
                    int ti = flow_index(s, agd->tagged), ci = flow_index(s, agd->cross);
                    server_spec nodespec = server_spec::constant(1.0);
                    for (const auto& n : s.nodes)
                        if (n.name == agd->node) nodespec = n.server;
                    auto stats = parallel_reps<empirical_ccdf>(R, [&](int r) {
                        packet_trace ta =
                            generate_arrivals(tagged.source, static_cast<int>(N), seed, ti, r);
                        packet_trace ca =
                            generate_arrivals(crossf.source, static_cast<int>(N), seed, ci, r);
                        // tag flow ids for extraction
                        for (int i = 1; i <= ta.n(); ++i) ta.flow[i] = 1;
                        for (int i = 1; i <= ca.n(); ++i) ca.flow[i] = 2;
                        packet_trace m = aggregate_fifo({ta, ca}, seed, r);
                        packet_trace d = serve_fifo(m, nodespec, seed, 0, r);
                        packet_trace f1;
                        for (int i = 1; i <= d.n(); ++i) {
                            if (d.flow[i] != 1) continue;
                            f1.a.push_back(d.a[i]);
                            f1.d.push_back(d.d[i]);
                            f1.flow.push_back(1);
                        }
                        f1.d.insert(f1.d.begin(), 0.0);
                        return leftover_statistics(f1, srv, cross, g);
                    });
                    std::vector<std::vector<std::uint64_t>> counts(R);
                    std::vector<std::uint64_t> samples(R);
                    for (int r = 0; r < R; ++r) {
                        samples[r] = stats[r].samples();
                        for (int i = 0; i < g.npoints(); ++i)
                            counts[r].push_back(stats[r].count_above(gx[i]));
                    }
                    files.push_back({"leftover_" + a.flow + "_empirical.csv",
                                     csv_string([&](std::ostream& os) {
                                         os << "x,freq\n" << std::setprecision(17);
                                         std::uint64_t tot = 0;
                                         for (auto v : samples) tot += v;
                                         for (int i = 0; i < g.npoints(); ++i) {
                                             std::uint64_t ab = 0;
                                             for (int r = 0; r < R; ++r) ab += counts[r][i];
                                             os << gx[i] << ","
                                                << static_cast<double>(ab) / static_cast<double>(tot)
                                                << "\n";
                                         }
                                     })});
                    if (mode == run_mode::verify) {
                        std::vector<double> bounds(g.npoints());
                        for (int i = 0; i < g.npoints(); ++i) bounds[i] = srv.bound.eval(gx[i]);
                        dominance_result dr = check_dominance(counts, samples, gx, bounds);
                        meta["verdict"] = dr.pass ? "pass" : "fail";
                        meta["comparison"] = dr.points;
                        if (!dr.pass) rep.all_pass = false;
                    }
                }
                break;
            }
        }
        entries.push_back(meta);
    }

    // single-coordinator writes, after all computation
    std::filesystem::create_directories(out_dir);
    for (const auto& f : files) {
        std::ofstream os(out_dir + "/" + f.name);
        os << f.content;
    }
    rep.summary["grid"] = {{"step", g.step}, {"horizon", g.horizon}};
    rep.summary["seed"] = seed;
    rep.summary["mode"] = mode == run_mode::analyze    ? "analyze"
                          : mode == run_mode::simulate ? "simulate"
                          : mode == run_mode::verify   ? "verify"
                                                       : "curves";
    rep.summary["entries"] = entries;
    rep.summary["pass"] = rep.all_pass;
    rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                         .count();
    {
        json full = rep.summary;
        full["runtime_ms"] = rep.runtime_ms;
        std::ofstream os(out_dir + "/report.json");
        os << full.dump(2) << "\n";
    }
    rep.exit_code = (mode == run_mode::verify && !rep.all_pass) ? 4 : 0;
    return rep;
}

}  // namespace tdnc
