#pragma once

#include <string>
#include <vector>

#include "helio/flow_graph.hpp"

namespace helio {

struct HeuristicResult {
  Placement placement;
  std::vector<std::string> warnings;
};

// Uniform stages sized so the weakest node holds one stage; nodes spread
// greedily (largest single-layer capacity onto the lightest stage).
HeuristicResult swarm_placement(const ClusterSpec& c);

// Nodes claim, in declared order, the k_i-layer window with the least total
// served capacity so far (ties: lowest start).
HeuristicResult petals_placement(const ClusterSpec& c);

// One evenly split pipeline per device type; types that cannot hold the whole
// model are left unused.
HeuristicResult separate_pipelines_placement(const ClusterSpec& c);

}  // namespace helio
