#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tdnc/grid.hpp"
#include "tdnc/models.hpp"
#include "tdnc/rng.hpp"

namespace tdnc {

// Packet trace with sentinel index 0 carrying
// a(0) = d(0) = 0 and packets are numbered 1..n().
struct packet_trace {
    std::vector<double> a;    // arrival instants, a[0] = 0
    std::vector<double> d;    // departure instants (empty if arrivals only)
    std::vector<int> flow;    // flow id per packet, flow[0] unused

    packet_trace() : a{0.0}, flow{0} {}
    int n() const { return static_cast<int>(a.size()) - 1; }
    bool has_departures() const { return d.size() == a.size(); }
};

// Tail-frequency estimate on a value grid; counts are mergeable across
// replications.
class empirical_ccdf {
public:
    explicit empirical_ccdf(const grid_spec& g);

    void add(double v);
    void merge(const empirical_ccdf& o);

    const grid_spec& grid() const { return g_; }
    std::uint64_t samples() const { return samples_; }
    std::uint64_t count_above(double x) const;  // exact for arbitrary x
    double freq(int i) const;                   // tail frequency at grid point i
    double freq_above(double x) const;

private:
    grid_spec g_;
    std::vector<std::uint64_t> hist_;  // hist_[k]: samples with k grid points below
    std::uint64_t samples_ = 0;
};

struct source_spec {
    enum class kind { deterministic, poisson, gcra_shaped };
    kind k = kind::deterministic;
    double period = 1.0;  // deterministic
    double rate = 1.0;    // poisson
    double T = 1.0;       // gcra_shaped
    double tau = 0.0;     // gcra_shaped
    std::shared_ptr<source_spec> inner;  // gcra_shaped wraps another source

    static source_spec deterministic(double period);
    static source_spec poisson(double rate);
    static source_spec gcra_shaped(double T, double tau, source_spec inner);
};

struct server_spec {
    enum class kind { constant, slotted_wireless };
    kind k = kind::constant;
    double T = 1.0;      // constant
    double delta = 1.0;  // slot length
    double Pe = 0.0;     // packet error rate

    static server_spec constant(double T);
    static server_spec slotted_wireless(double delta, double Pe);
};

// Reproducible arrival generation; one stream per (seed, flow, replication).
// The deterministic source emits its first packet at t = period so the
// a(0) = 0 sentinel stays distinct. The GCRA shaper delays each inner
// arrival minimally so a(n) - a(m) >= (T(n-m) - tau)+ holds pairwise.
packet_trace generate_arrivals(const source_spec& spec, int n_packets, std::uint64_t seed,
                               int flow_id = 0, std::uint64_t replication = 0);

// FIFO service: d(n) = max(a(n), d(n-1)) + s(n). The slotted-wireless server
// starts a packet only at a slot boundary and retries each slot with success
// probability 1 - Pe.
packet_trace serve_fifo(const packet_trace& arrivals, const server_spec& spec, std::uint64_t seed,
                        int node_id = 0, std::uint64_t replication = 0);

// FIFO merge of several arrival traces; exact ties are ordered by a seeded
// random shuffle. Flow ids are retained.
packet_trace aggregate_fifo(const std::vector<packet_trace>& traces, std::uint64_t seed,
                            std::uint64_t replication = 0);

struct tandem_result {
    packet_trace final;
    std::vector<packet_trace> stages;  // departures of each node
};

tandem_result run_tandem(const packet_trace& arrivals, const std::vector<server_spec>& servers,
                         std::uint64_t seed, std::uint64_t replication = 0);

enum class stat_mode { incremental, brute_force };

// The model-kind's defining statistic per packet (or per time-grid instant
// for v.b.c), as an empirical CCDF on the grid:
//   iat:  lambda(n-m) - [a(n) - a(m)] over pairs with gaps covered by the grid
//   vsd:  a (x)bar lambda (n) - a(n)
//   msd:  running max of the vsd statistic
//   vbc:  sup_{s<=t} [ A(s,t) - alpha(t-s) ] on the time grid
// The incremental mode uses per-segment sliding-window maxima; brute force
// exists for validation.
empirical_ccdf trace_statistics(const packet_trace& t, const traffic_model& m, const grid_spec& g,
                                stat_mode mode = stat_mode::incremental);

//   id:   d(n) - a (x)bar gamma (n)
//   cs:   running max of the id statistic
empirical_ccdf trace_statistics(const packet_trace& t, const server_model& m, const grid_spec& g,
                                stat_mode mode = stat_mode::incremental);

// Leftover-service check. The leftover argument fixes the cross-packet count
// shift per analyzed packet: for packet n the service envelope is gamma
// displaced by mbar(n) = sup { q : lambda_2(q) <= a_1(n) }, so
//   stat(n) = d_1(n) - max_{m<=n} [ a_1(m) + gamma(n - m + mbar(n)) ].
// A single shifted curve gamma(k + mbar(k)) would understate the envelope
// inside the convolution and fails the oracle.
empirical_ccdf leftover_statistics(const packet_trace& tagged, const server_model& base,
                                   const traffic_model& cross, const grid_spec& g);

// B(t) = A(t) - A*(t) sampled at the time-grid instants; the ccdf is over
// integer backlog values (value grid step 1).
empirical_ccdf empirical_backlog(const packet_trace& t, const grid_spec& time_grid);

// D(n) = d(n) - a(n)
empirical_ccdf delay_ccdf(const packet_trace& t, const grid_spec& g);

// max_{0<=m<=n} [ a(m) + c(n-m) ] for every n, the workhorse behind the
// vsd/id statistics; exposed for tests
std::vector<double> max_plus_conv_with_trace(const std::vector<double>& a, const curve& c,
                                             stat_mode mode);

}  // namespace tdnc
