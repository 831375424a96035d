#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "floorstitch/geom.h"
#include "floorstitch/verify.h"

namespace floorstitch {

// Default measurement noise: 5 cm per axis and one degree.
inline Vec3 DefaultEdgeSigma() { return {0.05, 0.05, DegToRad(1.0)}; }

struct PoseGraphEdge {
  int i = 0;
  int j = 0;
  Pose2 z_ij;  // measured pose of j in i's frame
  Vec3 sigma = DefaultEdgeSigma();
  double score = 1.0;
};

struct PoseGraph {
  std::vector<int> nodes;  // sorted ascending
  std::vector<PoseGraphEdge> edges;
};

using PoseMap = std::map<int, Pose2>;

// Collapses parallel edges to one per unordered pair, keeping the highest
// score (first one on ties). Edges are stored with i < j, sorted by (i, j).
// Throws ValidationError for self-loops, unknown endpoints or non-positive
// sigmas.
PoseGraph BuildGraph(std::vector<int> nodes, std::vector<PoseGraphEdge> edges);

// Graph from verifier output; every edge gets `sigma` and the verifier score.
PoseGraph BuildGraph(std::vector<int> nodes,
                     const std::vector<ScoredHypothesis>& accepted,
                     const Vec3& sigma = DefaultEdgeSigma());

// Components sorted by size (descending), ties by smallest member id. Member
// lists are sorted ascending.
std::vector<std::vector<int>> ConnectedComponents(const PoseGraph& graph);

// Chains edge measurements along breadth-first shortest paths from the
// smallest id in `component`, which is placed at the identity. Throws
// ValidationError if the component is not connected in the graph.
PoseMap SpanningTreeInit(const PoseGraph& graph, const std::vector<int>& component);

struct RobustConfig {
  // Huber threshold on the whitened residual norm. Infinity gives plain
  // least squares.
  double huber_delta = 1.345;
  int max_iterations = 100;
  // Stop once an accepted step lowers the cost by less than this fraction.
  double convergence_tol = 1e-12;
  double initial_lambda = 1e-4;
  double lambda_factor = 10.0;
  double max_lambda = 1e12;
  // Standard deviation of the gauge prior on the root node.
  double prior_sigma = 1e-8;

  void Validate() const;
};

inline RobustConfig QuadraticConfig() {
  RobustConfig c;
  c.huber_delta = std::numeric_limits<double>::infinity();
  return c;
}

// Residual of one edge on the manifold: Log(z^-1 * T_i^-1 * T_j).
Twist2 EdgeResidual(const PoseGraphEdge& edge, const Pose2& t_i,
                    const Pose2& t_j);

// Sum of robust kernel values over edges whose endpoints are both in
// `poses` (whitened residual norms, Huber or quadratic per config).
double RobustCost(const PoseGraph& graph, const PoseMap& poses,
                  const RobustConfig& config);

struct OptimizationResult {
  PoseMap poses;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  // Cost after every accepted step, starting with the initial cost.
  std::vector<double> cost_history;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt over the nodes in `init`, with retraction
// T <- T * Exp(xi). The smallest id is held near its initial pose by a prior.
// Throws NumericalError if the cost becomes non-finite.
OptimizationResult Optimize(const PoseGraph& graph, const PoseMap& init,
                            const RobustConfig& config = {});

// Plain-text dump using g2o SE2 records (VERTEX_SE2 / EDGE_SE2 with the
// upper triangle of the information matrix); verifier scores are written as
// "# SCORE i j value" comment lines.
std::string GraphToString(const PoseGraph& graph, const PoseMap& poses);
void ParseGraph(const std::string& text, PoseGraph* graph, PoseMap* poses);

}  // namespace floorstitch
