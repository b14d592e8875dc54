#include "tdnc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace tdnc {

// ---------------------------------------------------------------------------
// empirical ccdf
// ---------------------------------------------------------------------------

empirical_ccdf::empirical_ccdf(const grid_spec& g) : g_(g), hist_(g.npoints() + 1, 0) {}

void empirical_ccdf::add(double v) {
    long npts = g_.npoints();
    long k = static_cast<long>(std::ceil(v / g_.step));
    if (k < 0) k = 0;
    if (k > npts) k = npts;
    while (k > 0 && (k - 1) * g_.step >= v) --k;
    while (k < npts && k * g_.step < v) ++k;
    ++hist_[static_cast<std::size_t>(k)];
    ++samples_;
}

void empirical_ccdf::merge(const empirical_ccdf& o) {
    if (o.hist_.size() != hist_.size() || o.g_.step != g_.step)
        throw std::invalid_argument("empirical_ccdf: merge grids differ");
    for (std::size_t i = 0; i < hist_.size(); ++i) hist_[i] += o.hist_[i];
    samples_ += o.samples_;
}

std::uint64_t empirical_ccdf::count_above(double x) const {
    // bin k holds samples in ((k-1) step, k step]; count bins wholly above x
    std::uint64_t c = 0;
    for (std::size_t k = 0; k < hist_.size(); ++k)
        if (static_cast<double>(k) * g_.step > x) c += hist_[k];
    return c;
}

double empirical_ccdf::freq(int i) const {
    if (samples_ == 0) return 0.0;
    return static_cast<double>(count_above(g_.x(i))) / static_cast<double>(samples_);
}

double empirical_ccdf::freq_above(double x) const {
    if (samples_ == 0) return 0.0;
    return static_cast<double>(count_above(x)) / static_cast<double>(samples_);
}

// ---------------------------------------------------------------------------
// specs
// ---------------------------------------------------------------------------

source_spec source_spec::deterministic(double period) {
    if (!(period > 0.0)) throw std::invalid_argument("source: period must be > 0");
    source_spec s;
    s.k = kind::deterministic;
    s.period = period;
    return s;
}

source_spec source_spec::poisson(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("source: rate must be > 0");
    source_spec s;
    s.k = kind::poisson;
    s.rate = rate;
    return s;
}

source_spec source_spec::gcra_shaped(double T, double tau, source_spec inner) {
    if (!(T > 0.0) || tau < 0.0) throw std::invalid_argument("source: bad gcra parameters");
    source_spec s;
    s.k = kind::gcra_shaped;
    s.T = T;
    s.tau = tau;
    s.inner = std::make_shared<source_spec>(std::move(inner));
    return s;
}

server_spec server_spec::constant(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("server: T must be > 0");
    server_spec s;
    s.k = kind::constant;
    s.T = T;
    return s;
}

server_spec server_spec::slotted_wireless(double delta, double Pe) {
    if (!(delta > 0.0)) throw std::invalid_argument("server: delta must be > 0");
    if (!(Pe >= 0.0 && Pe < 1.0)) throw std::invalid_argument("server: Pe must be in [0,1)");
    server_spec s;
    s.k = kind::slotted_wireless;
    s.delta = delta;
    s.Pe = Pe;
    return s;
}

// ---------------------------------------------------------------------------
// generation and service
// ---------------------------------------------------------------------------

packet_trace generate_arrivals(const source_spec& spec, int n_packets, std::uint64_t seed,
                               int flow_id, std::uint64_t replication) {
    if (n_packets < 1) throw std::invalid_argument("generate_arrivals: n_packets must be >= 1");
    packet_trace t;
    t.a.resize(n_packets + 1);
    t.flow.assign(n_packets + 1, flow_id);
    t.a[0] = 0.0;
    switch (spec.k) {
        case source_spec::kind::deterministic:
            for (int i = 1; i <= n_packets; ++i) t.a[i] = spec.period * i;
            break;
        case source_spec::kind::poisson: {
            rng_stream rs = make_stream(seed, stream_component::source,
                                        static_cast<std::uint64_t>(flow_id), replication);
            double cur = 0.0;
            for (int i = 1; i <= n_packets; ++i) {
                cur += rs.exponential(spec.rate);
                t.a[i] = cur;
            }
            break;
        }
        case source_spec::kind::gcra_shaped: {
            packet_trace inner = generate_arrivals(*spec.inner, n_packets, seed, flow_id, replication);
            // delay minimally: a(n) = max(inner, a(n-1), max_m [a(m) - T m] + T n - tau)
            double prefmax = 0.0;  // m = 0 sentinel
            for (int i = 1; i <= n_packets; ++i) {
                double v = std::max(inner.a[i], t.a[i - 1]);
                v = std::max(v, prefmax + spec.T * i - spec.tau);
                t.a[i] = v;
                prefmax = std::max(prefmax, v - spec.T * i);
            }
            break;
        }
    }
    return t;
}

namespace {

double ceil_slot(double t, double delta) {
    long q = static_cast<long>(std::ceil(t / delta));
    while ((q - 1) * delta >= t) --q;
    while (q * delta < t) ++q;
    return q * delta;
}

}  // namespace

packet_trace serve_fifo(const packet_trace& arrivals, const server_spec& spec, std::uint64_t seed,
                        int node_id, std::uint64_t replication) {
    packet_trace t = arrivals;
    int n = t.n();
    t.d.assign(n + 1, 0.0);
    switch (spec.k) {
        case server_spec::kind::constant:
            for (int i = 1; i <= n; ++i) t.d[i] = std::max(t.a[i], t.d[i - 1]) + spec.T;
            break;
        case server_spec::kind::slotted_wireless: {
            rng_stream rs = make_stream(seed, stream_component::server,
                                        static_cast<std::uint64_t>(node_id), replication);
            for (int i = 1; i <= n; ++i) {
                double start = std::max(ceil_slot(t.a[i], spec.delta), t.d[i - 1]);
                long slots = rs.geometric_trials(spec.Pe);
                t.d[i] = start + spec.delta * static_cast<double>(slots);
            }
            break;
        }
    }
    return t;
}

packet_trace aggregate_fifo(const std::vector<packet_trace>& traces, std::uint64_t seed,
                            std::uint64_t replication) {
    struct item {
        double a;
        int flow;
        int idx;  // original index within the flow, for stability
    };
    std::vector<item> items;
    for (const auto& tr : traces)
        for (int i = 1; i <= tr.n(); ++i) items.push_back({tr.a[i], tr.flow[i], i});
    std::stable_sort(items.begin(), items.end(), [](const item& x, const item& y) {
        if (x.a != y.a) return x.a < y.a;
        return false;  // keep ties in input order, shuffled below
    });
    // shuffle runs of exact ties with the aggregate stream
    rng_stream rs = make_stream(seed, stream_component::aggregate, 0, replication);
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j + 1 < items.size() && items[j + 1].a == items[i].a) ++j;
        for (std::size_t k = j; k > i; --k) {
            std::size_t pick = i + static_cast<std::size_t>(rs.next_u64() % (k - i + 1));
            std::swap(items[k], items[pick]);
        }
        i = j + 1;
    }
    packet_trace out;
    out.a.reserve(items.size() + 1);
    out.flow.reserve(items.size() + 1);
    for (const auto& it : items) {
        out.a.push_back(it.a);
        out.flow.push_back(it.flow);
    }
    return out;
}

tandem_result run_tandem(const packet_trace& arrivals, const std::vector<server_spec>& servers,
                         std::uint64_t seed, std::uint64_t replication) {
    tandem_result r;
    packet_trace cur = arrivals;
    for (std::size_t k = 0; k < servers.size(); ++k) {
        cur = serve_fifo(cur, servers[k], seed, static_cast<int>(k), replication);
        r.stages.push_back(cur);
        if (k + 1 < servers.size()) {
            // departures of node k are the arrivals of node k+1
            packet_trace next;
            next.a = cur.d;
            next.flow = cur.flow;
            cur = next;
        }
    }
    r.final = r.stages.empty() ? arrivals : r.stages.back();
    return r;
}

// ---------------------------------------------------------------------------
// statistics
// ---------------------------------------------------------------------------

std::vector<double> max_plus_conv_with_trace(const std::vector<double>& a, const curve& c,
                                             stat_mode mode) {
    int n = static_cast<int>(a.size()) - 1;
    std::vector<double> out(n + 1);
    if (mode == stat_mode::brute_force) {
        for (int i = 0; i <= n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int m = 0; m <= i; ++m) best = std::max(best, a[m] + c.eval(i - m));
            out[i] = best;
        }
        return out;
    }
    // affine segments of c over integer arguments
    struct segment {
        long k1;
        long k2;  // inclusive; -1 means unbounded
        double slope;
        std::deque<long> q;  // candidate m values, keys nonincreasing
    };
    std::vector<long> bounds{0};
    for (const auto& bp : c.breakpoints()) {
        long b = static_cast<long>(std::ceil(bp.x));
        if (b > 0) bounds.push_back(b);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    std::vector<segment> segs;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        segment s;
        s.k1 = bounds[i];
        s.k2 = (i + 1 < bounds.size()) ? bounds[i + 1] - 1 : -1;
        if (s.k2 != -1 && s.k2 < s.k1) continue;
        s.slope = c.eval(static_cast<double>(s.k1 + 1)) - c.eval(static_cast<double>(s.k1));
        segs.push_back(std::move(s));
    }
    auto key = [&](const segment& s, long m) { return a[m] - s.slope * static_cast<double>(m); };
    for (long i = 0; i <= n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (auto& s : segs) {
            long enter = i - s.k1;
            if (enter >= 0) {
                double ke = key(s, enter);
                while (!s.q.empty() && key(s, s.q.back()) <= ke) s.q.pop_back();
                s.q.push_back(enter);
            }
            if (s.k2 != -1)
                while (!s.q.empty() && s.q.front() < i - s.k2) s.q.pop_front();
            if (!s.q.empty()) {
                long m = s.q.front();
                best = std::max(best, a[m] + c.eval(static_cast<double>(i - m)));
            }
        }
        out[i] = best;
    }
    return out;
}

empirical_ccdf trace_statistics(const packet_trace& t, const traffic_model& m, const grid_spec& g,
                                stat_mode mode) {
    empirical_ccdf out(g);
    int n = t.n();
    if (n < 2) throw std::invalid_argument("trace_statistics: need at least 2 packets");
    switch (m.kind) {
        case traffic_kind::iat: {
            long cap = g.npoints() - 1;  // gaps covered by the analysis grid
            for (int i = 1; i <= n; ++i) {
                int m0 = std::max(0, static_cast<int>(i - cap));
                for (int j = m0; j < i; ++j)
                    out.add(m.c.eval(i - j) - (t.a[i] - t.a[j]));
            }
            break;
        }
        case traffic_kind::det:
        case traffic_kind::vsd:
        case traffic_kind::msd: {
            std::vector<double> conv = max_plus_conv_with_trace(t.a, m.c, mode);
            double run = -std::numeric_limits<double>::infinity();
            for (int i = 1; i <= n; ++i) {
                double s = conv[i] - t.a[i];
                if (m.kind == traffic_kind::msd) {
                    run = std::max(run, s);
                    out.add(run);
                } else {
                    out.add(s);
                }
            }
            break;
        }
        case traffic_kind::vbc: {
            // A(t) at grid instants, then sup over grid windows
            int np = g.npoints();
            std::vector<long> counts(np, 0);
            {
                int i = 1;
                long c = 0;
                for (int j = 0; j < np; ++j) {
                    while (i <= n && t.a[i] <= g.x(j)) {
                        ++c;
                        ++i;
                    }
                    counts[j] = c;
                }
            }
            std::vector<double> alpha_at(np);
            for (int j = 0; j < np; ++j) alpha_at[j] = m.c.eval(g.x(j));
            for (int j = 0; j < np; ++j) {
                double best = -std::numeric_limits<double>::infinity();
                for (int s = 0; s <= j; ++s)
                    best = std::max(best, static_cast<double>(counts[j] - counts[s]) - alpha_at[j - s]);
                out.add(best);
            }
            break;
        }
    }
    return out;
}

empirical_ccdf trace_statistics(const packet_trace& t, const server_model& m, const grid_spec& g,
                                stat_mode mode) {
    if (!t.has_departures()) throw std::invalid_argument("trace_statistics: trace has no departures");
    int n = t.n();
    if (n < 2) throw std::invalid_argument("trace_statistics: need at least 2 packets");
    empirical_ccdf out(g);
    std::vector<double> conv = max_plus_conv_with_trace(t.a, m.c, mode);
    double run = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        double s = t.d[i] - conv[i];
        if (m.kind == server_kind::cs) {
            run = std::max(run, s);
            out.add(run);
        } else {
            out.add(s);
        }
    }
    return out;
}

empirical_ccdf leftover_statistics(const packet_trace& tagged, const server_model& base,
                                   const traffic_model& cross, const grid_spec& g) {
    if (!tagged.has_departures())
        throw std::invalid_argument("leftover_statistics: trace has no departures");
    if (cross.kind != traffic_kind::det)
        throw std::invalid_argument("leftover_statistics: cross flow must be deterministic");
    curve inv2 = upper_pseudo_inverse(cross.c);
    empirical_ccdf out(g);
    int n = tagged.n();
    for (int i = 1; i <= n; ++i) {
        double mbar = inv2.eval(tagged.a[i]);
        double best = -std::numeric_limits<double>::infinity();
        for (int m = 0; m <= i; ++m)
            best = std::max(best, tagged.a[m] + base.c.eval(static_cast<double>(i - m) + mbar));
        out.add(tagged.d[i] - best);
    }
    return out;
}

empirical_ccdf empirical_backlog(const packet_trace& t, const grid_spec& time_grid) {
    if (!t.has_departures()) throw std::invalid_argument("empirical_backlog: no departures");
    int n = t.n();
    std::vector<double> dep(t.d.begin() + 1, t.d.end());
    std::sort(dep.begin(), dep.end());
    std::vector<long> b(time_grid.npoints());
    long maxb = 1;
    {
        int ia = 1;
        std::size_t id = 0;
        for (int j = 0; j < time_grid.npoints(); ++j) {
            double x = time_grid.x(j);
            while (ia <= n && t.a[ia] <= x) ++ia;
            while (id < dep.size() && dep[id] <= x) ++id;
            b[j] = (ia - 1) - static_cast<long>(id);
            maxb = std::max(maxb, b[j]);
        }
    }
    empirical_ccdf out(grid_spec(1.0, static_cast<double>(maxb + 1)));
    for (long v : b) out.add(static_cast<double>(v));
    return out;
}

empirical_ccdf delay_ccdf(const packet_trace& t, const grid_spec& g) {
    if (!t.has_departures()) throw std::invalid_argument("delay_ccdf: no departures");
    empirical_ccdf out(g);
    for (int i = 1; i <= t.n(); ++i) out.add(t.d[i] - t.a[i]);
    return out;
}

}  // namespace tdnc
