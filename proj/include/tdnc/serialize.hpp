#pragma once

#include <json.hpp>
#include <ostream>

#include "tdnc/models.hpp"
#include "tdnc/simulator.hpp"

namespace tdnc {

// curve <-> {"breakpoints": [[x, v], ...], "tail_slope": s, ...}
nlohmann::json curve_to_json(const curve& c);
curve curve_from_json(const nlohmann::json& j);

// bounding_fn <-> {"kind": ..., params | table}
nlohmann::json bound_to_json(const bounding_fn& f);
bounding_fn bound_from_json(const nlohmann::json& j);

nlohmann::json traffic_to_json(const traffic_model& m);
traffic_model traffic_from_json(const nlohmann::json& j);

nlohmann::json server_to_json(const server_model& m);
server_model server_from_json(const nlohmann::json& j);

// CSV dumps with documented headers
void write_curve_csv(std::ostream& os, const curve& c, const grid_spec& g);    // x,value
void write_bound_csv(std::ostream& os, const bounding_fn& f, const grid_spec& g);  // x,prob
void write_trace_csv(std::ostream& os, const packet_trace& t);  // n,flow_id,arrival,departure
void write_ccdf_csv(std::ostream& os, const empirical_ccdf& c);  // x,freq,samples

}  // namespace tdnc
