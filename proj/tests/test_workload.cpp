#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helio/errors.hpp"
#include "helio/workload.hpp"

using namespace helio;

TEST_CASE("traces are deterministic per seed") {
  LengthParams lp;
  auto a = generate_trace(500, 2.0, TraceMode::kOnline, lp, 31337);
  auto b = generate_trace(500, 2.0, TraceMode::kOnline, lp, 31337);
  auto c = generate_trace(500, 2.0, TraceMode::kOnline, lp, 31338);
  CHECK(serialize_trace(a) == serialize_trace(b));
  CHECK(serialize_trace(a) != serialize_trace(c));
}

TEST_CASE("length distribution hits the configured means and caps") {
  LengthParams lp;
  auto reqs = generate_trace(20000, 0, TraceMode::kOffline, lp, 8);
  double in_sum = 0, out_sum = 0;
  for (const Request& r : reqs) {
    CHECK(r.arrival_s == 0.0);
    CHECK(r.input_len >= 1);
    CHECK(r.input_len <= lp.max_input);
    CHECK(r.output_len >= 1);
    CHECK(r.output_len <= lp.max_output);
    in_sum += r.input_len;
    out_sum += r.output_len;
  }
  // Truncation trims the upper tail slightly; 5% tolerance absorbs it.
  CHECK(in_sum / reqs.size() == doctest::Approx(lp.mean_input).epsilon(0.05));
  CHECK(out_sum / reqs.size() == doctest::Approx(lp.mean_output).epsilon(0.05));
}

TEST_CASE("online arrivals follow the requested rate") {
  LengthParams lp;
  auto reqs = generate_trace(20000, 4.0, TraceMode::kOnline, lp, 99);
  for (size_t i = 1; i < reqs.size(); ++i) CHECK(reqs[i].arrival_s >= reqs[i - 1].arrival_s);
  double span = reqs.back().arrival_s;
  CHECK(reqs.size() / span == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("online rate targets three quarters of plan throughput") {
  PlacementPlan plan;
  plan.objective = 995.0;
  LengthParams lp;
  CHECK(rate_for_online(plan, lp) == doctest::Approx(0.75 * 995.0 / (763.0 + 232.0)));
}

TEST_CASE("trace csv round-trips") {
  LengthParams lp;
  auto reqs = generate_trace(64, 1.5, TraceMode::kOnline, lp, 5);
  auto back = parse_trace(serialize_trace(reqs), "test");
  REQUIRE(back.size() == reqs.size());
  for (size_t i = 0; i < reqs.size(); ++i) {
    CHECK(back[i].arrival_s == doctest::Approx(reqs[i].arrival_s).epsilon(1e-9));
    CHECK(back[i].input_len == reqs[i].input_len);
    CHECK(back[i].output_len == reqs[i].output_len);
  }
  CHECK(serialize_trace(back) == serialize_trace(reqs));
}

TEST_CASE("malformed traces are rejected") {
  CHECK_THROWS_AS(parse_trace("nope\n1,2,3\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_trace("arrival_time_s,input_len,output_len\n1.0,5\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_trace("arrival_time_s,input_len,output_len\n1.0,5,0\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_trace("arrival_time_s,input_len,output_len\n-1.0,5,5\n", "t"), ParseError);
  CHECK_THROWS_AS(
      parse_trace("arrival_time_s,input_len,output_len\n2.0,5,5\n1.0,5,5\n", "t"), ParseError);
  CHECK(parse_trace("arrival_time_s,input_len,output_len\n", "t").empty());
}

TEST_CASE("generation guards") {
  LengthParams lp;
  CHECK_THROWS_AS(generate_trace(-1, 1.0, TraceMode::kOffline, lp, 1), ValidationError);
  CHECK_THROWS_AS(generate_trace(10, 0.0, TraceMode::kOnline, lp, 1), ValidationError);
  CHECK(generate_trace(0, 1.0, TraceMode::kOnline, lp, 1).empty());

  LengthParams impossible;
  impossible.mean_input = 5000;  // far above the cap: rejection cannot succeed
  impossible.max_input = 8;
  impossible.sigma = 0.01;
  CHECK_THROWS_AS(generate_trace(1, 1.0, TraceMode::kOffline, impossible, 1), InternalError);

  CHECK(trace_mode_from_str("online") == TraceMode::kOnline);
  CHECK(trace_mode_from_str("offline") == TraceMode::kOffline);
  CHECK_THROWS_AS(trace_mode_from_str("batch"), ValidationError);
}
