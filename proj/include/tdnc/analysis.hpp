#pragma once

#include <vector>

#include "tdnc/models.hpp"
#include "tdnc/simulator.hpp"

namespace tdnc {

struct stability_report {
    double lambda_rate = 0.0;  // tail slope of the arrival curve
    double gamma_rate = 0.0;   // tail slope of the service curve
    bool stable = false;       // gamma_rate <= lambda_rate
};

struct stability_error : std::runtime_error {
    stability_report report;
    explicit stability_error(const stability_report& r)
        : std::runtime_error("unstable pairing: service-time rate exceeds inter-arrival rate"),
          report(r) {}
};

// long-run rate comparison per the delay-bound proof; equality is admitted
stability_report stability_check(const curve& lambda, const curve& gamma);

// packet-index grid companion of a time grid: unit step, same point count
grid_spec packet_grid(const grid_spec& g);

// P{D(n) > x} <= (j (x) h)(x - gamma (/) lambda (0)). The returned function
// already includes the offset shift and equals 1 below it.
struct delay_bound_result {
    bounding_fn fn;
    double offset = 0.0;
    stability_report stability;
};
delay_bound_result delay_bound(const traffic_model& traffic, const server_model& server,
                               const grid_spec& g);

// P{B(t) > H(lambda, gamma + x)} <= (j (x) h)(x), one pair per grid x
struct backlog_point {
    double x;
    double level;  // H(lambda, gamma + x), in packets
    double probability;
};
struct backlog_bound_result {
    std::vector<backlog_point> points;
    stability_report stability;
};
backlog_bound_result backlog_bound(const traffic_model& traffic, const server_model& server,
                                   const grid_spec& g);

// departures carry an i.a.t curve lambda (/)bar gamma with bound j (x) h
traffic_model output_characterization(const traffic_model& traffic, const server_model& server,
                                      const grid_spec& g);

// tandem of c.s servers: max-plus convolution of the curves, min-plus
// convolution of the bounds
server_model concatenate(const std::vector<server_model>& servers, const grid_spec& g);

// aggregate of v.s.d flows via the space domain: convert each flow, sum the
// alpha curves, convolve the bounding functions, convert back
traffic_model superpose(const std::vector<traffic_model>& flows, const grid_spec& g);

// Leftover i.d service of the tagged flow under FIFO aggregation with a
// deterministically constrained cross flow: gamma_1(n) = gamma(n + m(n))
// with m(n) = sup { q : lambda_2(q) <= a_1(n) }; the bound is unchanged.
// Throws hypothesis_error if the resulting curve leaves class G.
server_model leftover_service_trace(const server_model& server, const traffic_model& cross,
                                    const packet_trace& tagged_arrivals);

// smallest grid x with fn(x) <= eps; +inf when the bound never drops there
double bound_quantile(const bounding_fn& fn, double eps, const grid_spec& g);

// log-spaced eta candidates for the conversions that need one
std::vector<double> default_eta_grid();

}  // namespace tdnc
