// Score-ordered matching machinery and precision-recall integration
// shared by all AP-style metrics.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace raileval::ap {

/// One admissible (prediction, ground truth) pairing with its cost
/// (geometric distance or 1 - IoU). Ids are frame-local indices.
struct MatchCandidate {
  int pred_id = -1;
  int gt_id = -1;
  double cost = 0.0;
};

struct ScoredPred {
  int id = -1;
  double score = 1.0;
};

/// Predictions take turns in descending score order (ties keep the given
/// order); each takes the unmatched valid ground truth of minimal cost,
/// ties resolved toward the smaller gt id.
std::vector<std::pair<int, int>> greedy_match(std::span<const ScoredPred> preds,
                                              const std::vector<MatchCandidate>& edges);

struct MatchResult {
  std::vector<std::pair<int, int>> pairs; // sorted by (pred_id, gt_id)
  double total_cost = 0.0;
};

/// Maximum-cardinality matching of the bipartite graph given by `edges`;
/// among those, one of minimum total cost. Solved as min-cost max-flow by
/// successive shortest paths; deterministic for a fixed input order.
MatchResult min_weight_max_matching(int left_count, int right_count,
                                    std::vector<MatchCandidate> edges);

struct PRPoint {
  double score_threshold = 1.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 1.0; // tp/(tp+fp), 0/0 defined as 1
  double recall = 1.0;    // tp/(tp+fn), 0/0 defined as 1
};

struct ScoredUnit {
  double score = 1.0;
  bool is_tp = false;
};

/// One PR point per distinct score threshold, descending, with cumulative
/// counts; the last point covers all predictions. Always emits at least
/// one point so empty prediction sets have a defined operating point.
std::vector<PRPoint> pr_curve(std::vector<ScoredUnit> units, std::int64_t total_gt);

/// 101-point interpolated area under the PR curve: mean over recall
/// levels {0.00,0.01,...,1.00} of the best precision at recall >= level.
double average_precision(std::span<const PRPoint> curve);

struct APResult {
  double ap = 0.0;
  std::vector<PRPoint> curve;
  double threshold = 0.0; // similarity threshold the metric ran at
  std::string metric_name;
};

APResult make_ap_result(std::vector<ScoredUnit> units, std::int64_t total_gt,
                        double threshold, std::string metric_name);

} // namespace raileval::ap
