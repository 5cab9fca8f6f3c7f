#include "mmu/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "mmu/core.hpp"

namespace mmu {

FlowNetwork::FlowNetwork(int num_nodes) : head_(num_nodes) {}

int FlowNetwork::add_arc(int from, int to, long long cap) {
  if (from < 0 || from >= num_nodes() || to < 0 || to >= num_nodes())
    throw ModelError("add_arc: node out of range");
  if (cap < 0) throw ModelError("add_arc: negative capacity");
  int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, cap});
  arcs_.push_back({from, 0});
  head_[from].push_back(id);
  head_[to].push_back(id + 1);
  orig_cap_.push_back(cap);
  orig_cap_.push_back(0);
  return id;
}

bool FlowNetwork::bfs(int s, int t) {
  level_.assign(num_nodes(), -1);
  std::queue<int> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int id : head_[u]) {
      const Arc& a = arcs_[id];
      if (a.cap > 0 && level_[a.to] < 0) {
        level_[a.to] = level_[u] + 1;
        q.push(a.to);
      }
    }
  }
  return level_[t] >= 0;
}

long long FlowNetwork::dfs(int u, int t, long long limit) {
  if (u == t || limit == 0) return limit;
  for (int& i = iter_[u]; i < static_cast<int>(head_[u].size()); ++i) {
    int id = head_[u][i];
    Arc& a = arcs_[id];
    if (a.cap <= 0 || level_[a.to] != level_[u] + 1) continue;
    long long pushed = dfs(a.to, t, std::min(limit, a.cap));
    if (pushed > 0) {
      a.cap -= pushed;
      arcs_[id ^ 1].cap += pushed;
      return pushed;
    }
  }
  level_[u] = -1;  // dead end on this level graph
  return 0;
}

long long FlowNetwork::max_flow(int s, int t) {
  if (s == t) throw ModelError("max_flow: source equals sink");
  long long total = 0;
  while (bfs(s, t)) {
    iter_.assign(num_nodes(), 0);
    while (long long pushed = dfs(s, t, std::numeric_limits<long long>::max()))
      total += pushed;
  }
  return total;
}

long long FlowNetwork::flow(int arc) const {
  if (arc < 0 || arc >= static_cast<int>(arcs_.size()))
    throw ModelError("flow: arc out of range");
  return orig_cap_[arc] - arcs_[arc].cap;
}

std::vector<uint8_t> FlowNetwork::min_cut_source_side(int s) const {
  std::vector<uint8_t> seen(num_nodes(), 0);
  std::queue<int> q;
  seen[s] = 1;
  q.push(s);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int id : head_[u]) {
      const Arc& a = arcs_[id];
      if (a.cap > 0 && !seen[a.to]) {
        seen[a.to] = 1;
        q.push(a.to);
      }
    }
  }
  return seen;
}

BendersNetwork build_benders_network(const Problem& pb, const std::vector<long long>& steerable,
                                     const std::vector<long long>& gamma) {
  const int nv = pb.num_origins();
  const int nk = pb.num_facilities();
  if (static_cast<int>(steerable.size()) != nv)
    throw ModelError("build_benders_network: demand vector size mismatch");
  if (static_cast<int>(gamma.size()) != nk)
    throw ModelError("build_benders_network: residual vector size mismatch");
  for (int k = 0; k < nk; ++k)
    if (gamma[k] < 0)
      throw ModelError("build_benders_network: negative residual capacity at facility '" +
                       pb.facility_id(pb.facility(k)) +
                       "' (master must carry the walk-in capacity rows)");

  BendersNetwork bn{FlowNetwork(nv + nk + 2), 0, nv + nk + 1, 0, {}, {}};
  for (int v = 0; v < nv; ++v) {
    if (steerable[v] < 0) throw ModelError("build_benders_network: negative demand");
    bn.total_demand += steerable[v];
  }
  for (int v = 0; v < nv; ++v)
    bn.origin_arc.push_back(bn.net.add_arc(bn.source, 1 + v, steerable[v]));
  // Assignment arcs carry unbounded amounts in the model; D is a safe finite
  // stand-in since no s-t flow can exceed it.
  bn.assign_arc.resize(nv);
  for (int v = 0; v < nv; ++v)
    for (Facility f : pb.origins[v].steer_cons)
      bn.assign_arc[v].push_back(bn.net.add_arc(1 + v, 1 + nv + pb.fkey(f), bn.total_demand));
  for (int k = 0; k < nk; ++k) bn.net.add_arc(1 + nv + k, bn.sink, gamma[k]);
  return bn;
}

std::vector<std::vector<long long>> recover_assignment(const Problem& pb,
                                                       const BendersNetwork& bn) {
  std::vector<std::vector<long long>> z(pb.num_origins());
  for (int v = 0; v < pb.num_origins(); ++v) {
    long long total = 0;
    z[v].resize(bn.assign_arc[v].size());
    for (size_t i = 0; i < bn.assign_arc[v].size(); ++i) {
      z[v][i] = bn.net.flow(bn.assign_arc[v][i]);
      total += z[v][i];
    }
    if (total != bn.net.flow(bn.origin_arc[v]))
      throw ModelError("recover_assignment: flow rows out of balance");
  }
  return z;
}

}  // namespace mmu
