#include "helio/workload.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "helio/errors.hpp"
#include "helio/rng.hpp"

namespace helio {

TraceMode trace_mode_from_str(const std::string& s) {
  if (s == "online") return TraceMode::kOnline;
  if (s == "offline") return TraceMode::kOffline;
  throw ValidationError("unknown trace mode '" + s + "' (expected online or offline)");
}

std::string trace_mode_name(TraceMode m) {
  return m == TraceMode::kOnline ? "online" : "offline";
}

namespace {

// Lognormal rounded to an integer token count, rejecting draws past the cap.
int sample_len(Rng& rng, double mean, double sigma, int max_len) {
  double mu = std::log(mean) - 0.5 * sigma * sigma;
  for (int tries = 0; tries < 10000; ++tries) {
    int len = static_cast<int>(std::llround(rng.lognormal(mu, sigma)));
    if (len >= 1 && len <= max_len) return len;
  }
  throw InternalError("length sampler rejected 10000 draws; check mean/cap");
}

}  // namespace

std::vector<Request> generate_trace(int count, double rate, TraceMode mode,
                                    const LengthParams& lp, uint64_t seed) {
  if (count < 0) throw ValidationError("trace count must be non-negative");
  if (mode == TraceMode::kOnline && rate <= 0)
    throw ValidationError("online traces need a positive arrival rate");
  Rng rng(seed);
  std::vector<Request> reqs;
  reqs.reserve(count);
  double t = 0;
  for (int i = 0; i < count; ++i) {
    Request r;
    if (mode == TraceMode::kOnline) {
      t += rng.exponential(rate);
      r.arrival_s = t;
    }
    r.input_len = sample_len(rng, lp.mean_input, lp.sigma, lp.max_input);
    r.output_len = sample_len(rng, lp.mean_output, lp.sigma, lp.max_output);
    reqs.push_back(r);
  }
  return reqs;
}

double rate_for_online(const PlacementPlan& plan, const LengthParams& lp) {
  return 0.75 * plan.objective / (lp.mean_input + lp.mean_output);
}

std::string serialize_trace(const std::vector<Request>& reqs) {
  std::string out = "arrival_time_s,input_len,output_len\n";
  char line[96];
  for (const Request& r : reqs) {
    std::snprintf(line, sizeof line, "%.9f,%d,%d\n", r.arrival_s, r.input_len, r.output_len);
    out += line;
  }
  return out;
}

std::vector<Request> parse_trace(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "arrival_time_s,input_len,output_len")
    throw ParseError(origin + ": expected header 'arrival_time_s,input_len,output_len'");
  std::vector<Request> reqs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Request r;
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%d,%d%c", &r.arrival_s, &r.input_len, &r.output_len,
                    &extra) != 3)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": malformed trace row");
    if (r.arrival_s < 0 || r.input_len < 1 || r.output_len < 1)
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": arrival must be >= 0 and lengths >= 1");
    if (!reqs.empty() && r.arrival_s < reqs.back().arrival_s)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": arrivals must be nondecreasing");
    reqs.push_back(r);
  }
  return reqs;
}

void save_trace(const std::vector<Request>& reqs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << serialize_trace(reqs);
}

std::vector<Request> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), path);
}

}  // namespace helio
