#ifndef MMU_MAXFLOW_HPP
#define MMU_MAXFLOW_HPP

// Integer max-flow (Dinic) and the assignment network behind the Benders
// feasibility check.
//
// Whether fixed sessions x and walk-in routing w leave room for all steerable
// demand is a transportation feasibility question. The network has a source
// arc s -> v of capacity d_v per origin, an arc v -> k for every facility k
// in v's steerable consideration set (capacity effectively unbounded, encoded
// as the total demand D), and a sink arc k -> t whose capacity is the
// residual gamma_k left after walk-ins. All steerable demand fits exactly
// when the max flow equals D; otherwise the origins on the source side of a
// min cut form a violated coverage set U.

#include <cstdint>
#include <vector>

#include "mmu/problem.hpp"

namespace mmu {

class FlowNetwork {
 public:
  explicit FlowNetwork(int num_nodes);

  int num_nodes() const { return static_cast<int>(head_.size()); }
  // Returns the arc id; a reverse arc of capacity 0 is added alongside.
  int add_arc(int from, int to, long long cap);

  // Dinic. Deterministic: arcs are scanned in insertion order.
  long long max_flow(int s, int t);

  // Flow pushed over arc id (call after max_flow).
  long long flow(int arc) const;
  // Nodes reachable from s in the residual graph of the last max_flow run;
  // the inclusion-minimal min-cut source side.
  std::vector<uint8_t> min_cut_source_side(int s) const;

 private:
  bool bfs(int s, int t);
  long long dfs(int u, int t, long long limit);

  struct Arc {
    int to;
    long long cap;  // remaining capacity
  };
  std::vector<Arc> arcs_;                 // arc 2i and its reverse 2i+1
  std::vector<std::vector<int>> head_;    // adjacency: arc ids per node
  std::vector<long long> orig_cap_;       // per arc id
  std::vector<int> level_, iter_;
};

// The Benders subproblem network for demand vector `steerable` and residual
// capacities `gamma` (one per facility key, all nonnegative). Node layout:
// 0 = source, 1..V = origins, V+1..V+K = facilities, V+K+1 = sink.
struct BendersNetwork {
  FlowNetwork net;
  int source = 0;
  int sink = 0;
  long long total_demand = 0;                // D
  std::vector<int> origin_arc;               // arc s -> v
  std::vector<std::vector<int>> assign_arc;  // per origin, arcs to steer_cons
};

// gamma must be nonnegative (enforce the walk-in capacity rows first); a
// negative entry raises ModelError.
BendersNetwork build_benders_network(const Problem& pb, const std::vector<long long>& steerable,
                                     const std::vector<long long>& gamma);

// Reads z_vk off the assignment arcs after a max-flow run that saturated all
// source arcs (flow == D); rows align with steer_cons.
std::vector<std::vector<long long>> recover_assignment(const Problem& pb,
                                                       const BendersNetwork& bn);

}  // namespace mmu

#endif  // MMU_MAXFLOW_HPP
