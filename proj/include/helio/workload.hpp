#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helio/placement.hpp"

namespace helio {

struct Request {
  double arrival_s = 0;
  int input_len = 0;
  int output_len = 0;
};

// Truncated-lognormal length model; sigma puts p95 near twice the mean.
struct LengthParams {
  double mean_input = 763;
  double mean_output = 232;
  int max_input = 2048;
  int max_output = 1024;
  double sigma = 0.496;
};

enum class TraceMode { kOnline, kOffline };

TraceMode trace_mode_from_str(const std::string& s);
std::string trace_mode_name(TraceMode m);

// Online: Poisson arrivals at `rate` req/s. Offline: everything at t = 0.
std::vector<Request> generate_trace(int count, double rate, TraceMode mode,
                                    const LengthParams& lp, uint64_t seed);

// Arrival rate that loads the plan to 75% of its token throughput.
double rate_for_online(const PlacementPlan& plan, const LengthParams& lp);

std::string serialize_trace(const std::vector<Request>& reqs);
std::vector<Request> parse_trace(const std::string& text, const std::string& origin);
void save_trace(const std::vector<Request>& reqs, const std::string& path);
std::vector<Request> load_trace(const std::string& path);

}  // namespace helio
