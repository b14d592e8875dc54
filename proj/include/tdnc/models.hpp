#pragma once

#include <stdexcept>

#include "tdnc/bounding.hpp"
#include "tdnc/curve.hpp"

namespace tdnc {

// conversion requires a finite tail integral (F-class bounding function)
struct certificate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a hypothesis of an analysis step failed (e.g. leftover curve not monotone)
struct hypothesis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class traffic_kind { det, iat, vsd, msd, vbc };
enum class server_kind { det, id, cs };

// Time-domain traffic model: curve is lambda (packet index -> time) except
// for VBC where it is alpha (time -> packet count). Deterministic models
// carry the indicator bound so every kind flows through one code path.
struct traffic_model {
    traffic_kind kind;
    curve c;
    bounding_fn bound;
};

// Server model: curve is gamma (packet index -> cumulative service time).
struct server_model {
    server_kind kind;
    curve c;
    bounding_fn bound;
};

// ---------------------------------------------------------------------------
// constructors (the model zoo)
// ---------------------------------------------------------------------------

// GCRA(T, tau): lambda(n) = (T n - tau)+
traffic_model gcra_arrival(double T, double tau);

// deterministic arrival with an explicit curve
traffic_model deterministic_arrival(const curve& lambda);

// Poisson(rho) flow as an i.a.t model: lambda(n) = n / rho, h = pointwise
// max of the Erlang gap tails over the gaps covered by the grid
traffic_model poisson_iat_arrival(double rho, const grid_spec& g);

// Poisson(mu) flow as a v.s.d model: lambda(n) = D n with the stationary
// M/D/1 waiting-time CCDF; requires mu * D < 1
traffic_model md1_vsd_arrival(double mu, double D, const grid_spec& g);

// m.s.d model from an explicit pair (no conversion into m.s.d exists;
// it participates through its defining trace statistic only)
traffic_model msd_arrival(const curve& lambda, const bounding_fn& h);

// v.b.c model from an explicit pair
traffic_model vbc_arrival(const curve& alpha, const bounding_fn& f);

// Constant per-packet service time T. The Lindley recursion sums n-m+1
// service times between packets m and n, so gamma(k) = (k+1) T.
server_model constant_server(double T);

// Slotted wireless link: slot length delta, packet error rate Pe. The
// deterministic envelope is the mean cumulative slot count for k+1 packets,
// gamma(k) = delta (k+1) / (1 - Pe), and all randomness goes into j via the
// negative-binomial tail of the centered slot sums.
server_model wireless_id_server(double delta, double Pe, const grid_spec& g);

// ---------------------------------------------------------------------------
// conversions between model kinds
// ---------------------------------------------------------------------------

// weakenings within a hierarchy
traffic_model vsd_to_iat(const traffic_model& m);
traffic_model det_to_vsd(const traffic_model& m);
server_model cs_to_id(const server_model& m);
server_model det_to_id(const server_model& m);

// i.a.t -> v.s.d: curve (lambda(n) - eta n) restored to class G, bound
// h^eta = [h + (1/eta) int h]_1; requires h in F-class
traffic_model iat_to_vsd(const traffic_model& m, double eta, const grid_spec& g);

// i.d -> c.s: curve gamma(n) + eta n, bound j^eta as above
server_model id_to_cs(const server_model& m, double eta, const grid_spec& g);

// v.b.c -> v.s.d: lambda = lower pseudo-inverse of alpha; h(y) = f(x*(y))
// where x*(y) is the largest backlog excess whose forward-gap image stays
// below y (the sound inversion of the forward-gap map)
traffic_model vbc_to_vsd(const traffic_model& m, const grid_spec& g);

// v.s.d -> v.b.c: alpha = upper pseudo-inverse of lambda; f(x) = h(y*(x))
// where y*(x) is the largest delay excess whose growth-gap image stays
// below x (the sound inversion of the growth-gap map)
traffic_model vsd_to_vbc(const traffic_model& m, const grid_spec& g);

}  // namespace tdnc
