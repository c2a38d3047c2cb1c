#include "raileval/ap_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace raileval::ap {

std::vector<std::pair<int, int>> greedy_match(std::span<const ScoredPred> preds,
                                              const std::vector<MatchCandidate>& edges) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

  std::vector<std::pair<int, int>> matches;
  std::vector<int> gt_taken;
  for (std::size_t idx : order) {
    const int pred_id = preds[idx].id;
    int best_gt = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& e : edges) {
      if (e.pred_id != pred_id) continue;
      if (std::find(gt_taken.begin(), gt_taken.end(), e.gt_id) != gt_taken.end()) continue;
      if (e.cost < best_cost || (e.cost == best_cost && e.gt_id < best_gt)) {
        best_cost = e.cost;
        best_gt = e.gt_id;
      }
    }
    if (best_gt >= 0) {
      gt_taken.push_back(best_gt);
      matches.emplace_back(pred_id, best_gt);
    }
  }
  return matches;
}

namespace {

// Min-cost max-flow network specialised to unit-capacity bipartite
// assignment. Node ids: 0 source, 1..L lefts, L+1..L+R rights, L+R+1 sink.
struct FlowGraph {
  struct Edge {
    int to;
    int cap;
    double cost;
    int rev;
  };
  std::vector<std::vector<Edge>> adj;

  explicit FlowGraph(int nodes) : adj(nodes) {}

  void add(int from, int to, int cap, double cost) {
    adj[from].push_back({to, cap, cost, static_cast<int>(adj[to].size())});
    adj[to].push_back({from, 0, -cost, static_cast<int>(adj[from].size()) - 1});
  }
};

} // namespace

MatchResult min_weight_max_matching(int left_count, int right_count,
                                    std::vector<MatchCandidate> edges) {
  MatchResult result;
  if (left_count <= 0 || right_count <= 0 || edges.empty()) return result;

  std::sort(edges.begin(), edges.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
    if (a.pred_id != b.pred_id) return a.pred_id < b.pred_id;
    if (a.gt_id != b.gt_id) return a.gt_id < b.gt_id;
    return a.cost < b.cost;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const MatchCandidate& a, const MatchCandidate& b) {
                            return a.pred_id == b.pred_id && a.gt_id == b.gt_id;
                          }),
              edges.end());

  const int n = left_count + right_count + 2;
  const int source = 0;
  const int sink = n - 1;
  FlowGraph g(n);
  for (int i = 0; i < left_count; ++i) g.add(source, 1 + i, 1, 0.0);
  for (int j = 0; j < right_count; ++j) g.add(1 + left_count + j, sink, 1, 0.0);
  for (const auto& e : edges) {
    if (e.pred_id < 0 || e.pred_id >= left_count || e.gt_id < 0 || e.gt_id >= right_count) continue;
    g.add(1 + e.pred_id, 1 + left_count + e.gt_id, 1, e.cost);
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(n, 0.0); // costs are non-negative
  std::vector<double> dist(n);
  std::vector<int> prev_node(n), prev_edge(n);

  while (true) {
    std::fill(dist.begin(), dist.end(), inf);
    dist[source] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, source});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (std::size_t k = 0; k < g.adj[u].size(); ++k) {
        const auto& e = g.adj[u][k];
        if (e.cap <= 0) continue;
        const double nd = d + e.cost + potential[u] - potential[e.to];
        if (nd < dist[e.to]) {
          dist[e.to] = nd;
          prev_node[e.to] = u;
          prev_edge[e.to] = static_cast<int>(k);
          pq.push({nd, e.to});
        }
      }
    }
    if (dist[sink] == inf) break;
    for (int v = 0; v < n; ++v) {
      if (dist[v] < inf) potential[v] += dist[v];
    }
    for (int v = sink; v != source; v = prev_node[v]) {
      auto& e = g.adj[prev_node[v]][prev_edge[v]];
      e.cap -= 1;
      g.adj[v][e.rev].cap += 1;
    }
  }

  for (int i = 0; i < left_count; ++i) {
    for (const auto& e : g.adj[1 + i]) {
      if (e.to != source && e.cap == 0 && e.to != sink) {
        result.pairs.emplace_back(i, e.to - 1 - left_count);
        result.total_cost += e.cost;
      }
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

std::vector<PRPoint> pr_curve(std::vector<ScoredUnit> units, std::int64_t total_gt) {
  std::stable_sort(units.begin(), units.end(),
                   [](const ScoredUnit& a, const ScoredUnit& b) { return a.score > b.score; });

  auto make_point = [total_gt](double threshold, std::int64_t tp, std::int64_t fp) {
    PRPoint pt;
    pt.score_threshold = threshold;
    pt.tp = tp;
    pt.fp = fp;
    pt.fn = total_gt - tp;
    pt.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    pt.recall = (tp + pt.fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + pt.fn) : 1.0;
    return pt;
  };

  std::vector<PRPoint> curve;
  if (units.empty()) {
    curve.push_back(make_point(1.0, 0, 0));
    return curve;
  }
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].is_tp) {
      ++tp;
    } else {
      ++fp;
    }
    if (i + 1 == units.size() || units[i + 1].score != units[i].score) {
      curve.push_back(make_point(units[i].score, tp, fp));
    }
  }
  return curve;
}

double average_precision(std::span<const PRPoint> curve) {
  // Precision envelope over recall, then sampled at the 101 levels.
  // Points with tp+fp == 0 are placeholders for empty prediction sets,
  // not operating points; their 0/0 precision must not enter the envelope.
  std::vector<std::pair<double, double>> by_recall; // (recall, precision)
  by_recall.reserve(curve.size());
  for (const auto& pt : curve) {
    if (pt.tp + pt.fp > 0) by_recall.emplace_back(pt.recall, pt.precision);
  }
  std::sort(by_recall.begin(), by_recall.end());
  std::vector<double> suffix_max(by_recall.size());
  double running = 0.0;
  for (std::size_t i = by_recall.size(); i-- > 0;) {
    running = std::max(running, by_recall[i].second);
    suffix_max[i] = running;
  }

  double sum = 0.0;
  for (int level = 0; level <= 100; ++level) {
    const double r = level / 100.0;
    const auto it = std::lower_bound(
        by_recall.begin(), by_recall.end(), r,
        [](const std::pair<double, double>& p, double value) { return p.first < value; });
    if (it != by_recall.end()) {
      sum += suffix_max[static_cast<std::size_t>(it - by_recall.begin())];
    }
  }
  return sum / 101.0;
}

APResult make_ap_result(std::vector<ScoredUnit> units, std::int64_t total_gt,
                        double threshold, std::string metric_name) {
  APResult out;
  out.curve = pr_curve(std::move(units), total_gt);
  out.ap = average_precision(out.curve);
  out.threshold = threshold;
  out.metric_name = std::move(metric_name);
  return out;
}

} // namespace raileval::ap
