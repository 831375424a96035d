#include "floorstitch/posegraph.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <queue>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>

#include "floorstitch/errors.h"

namespace floorstitch {

PoseGraph BuildGraph(std::vector<int> nodes, std::vector<PoseGraphEdge> edges) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto known = [&](int id) {
    return std::binary_search(nodes.begin(), nodes.end(), id);
  };
  std::map<std::pair<int, int>, PoseGraphEdge> best;
  for (PoseGraphEdge e : edges) {
    if (e.i == e.j) throw ValidationError("pose graph edge is a self-loop");
    if (!known(e.i) || !known(e.j)) {
      throw ValidationError("pose graph edge references an unknown node");
    }
    if (!(e.sigma.minCoeff() > 0.0)) {
      throw ValidationError("pose graph edge sigma must be positive");
    }
    if (e.i > e.j) {
      std::swap(e.i, e.j);
      e.z_ij = e.z_ij.Inverse();
    }
    auto [it, inserted] = best.try_emplace({e.i, e.j}, e);
    if (!inserted && e.score > it->second.score) it->second = e;
  }
  PoseGraph graph;
  graph.nodes = std::move(nodes);
  for (auto& [key, e] : best) graph.edges.push_back(e);
  return graph;
}

PoseGraph BuildGraph(std::vector<int> nodes,
                     const std::vector<ScoredHypothesis>& accepted,
                     const Vec3& sigma) {
  std::vector<PoseGraphEdge> edges;
  edges.reserve(accepted.size());
  for (const auto& s : accepted) {
    edges.push_back({s.hypothesis.pano_i, s.hypothesis.pano_j,
                     s.hypothesis.i_T_j, sigma, s.decision.score});
  }
  return BuildGraph(std::move(nodes), std::move(edges));
}

namespace {

std::map<int, std::vector<std::pair<int, const PoseGraphEdge*>>> Adjacency(
    const PoseGraph& graph) {
  std::map<int, std::vector<std::pair<int, const PoseGraphEdge*>>> adj;
  for (int n : graph.nodes) adj[n];
  for (const auto& e : graph.edges) {
    adj[e.i].emplace_back(e.j, &e);
    adj[e.j].emplace_back(e.i, &e);
  }
  for (auto& [n, list] : adj) {
    std::sort(list.begin(), list.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return adj;
}

}  // namespace

std::vector<std::vector<int>> ConnectedComponents(const PoseGraph& graph) {
  const auto adj = Adjacency(graph);
  std::set<int> seen;
  std::vector<std::vector<int>> components;
  for (int start : graph.nodes) {
    if (seen.count(start)) continue;
    std::vector<int> comp;
    std::vector<int> stack = {start};
    seen.insert(start);
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      comp.push_back(n);
      for (const auto& [m, e] : adj.at(n)) {
        if (seen.insert(m).second) stack.push_back(m);
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) {
                     if (a.size() != b.size()) return a.size() > b.size();
                     return a.front() < b.front();
                   });
  return components;
}

PoseMap SpanningTreeInit(const PoseGraph& graph,
                         const std::vector<int>& component) {
  if (component.empty()) return {};
  const std::set<int> members(component.begin(), component.end());
  const auto adj = Adjacency(graph);
  const int root = *members.begin();
  PoseMap poses;
  poses[root] = Pose2::Identity();
  std::queue<int> frontier;
  frontier.push(root);
  while (!frontier.empty()) {
    const int n = frontier.front();
    frontier.pop();
    auto it = adj.find(n);
    if (it == adj.end()) break;
    for (const auto& [m, e] : it->second) {
      if (!members.count(m) || poses.count(m)) continue;
      poses[m] = e->i == n ? poses[n] * e->z_ij : poses[n] * e->z_ij.Inverse();
      frontier.push(m);
    }
  }
  if (poses.size() != members.size()) {
    throw ValidationError("component is not connected in the pose graph");
  }
  return poses;
}

void RobustConfig::Validate() const {
  if (!(huber_delta > 0.0)) throw ConfigError("huber_delta must be positive");
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(initial_lambda > 0.0 && lambda_factor > 1.0)) {
    throw ConfigError("invalid damping schedule");
  }
  if (!(prior_sigma > 0.0)) throw ConfigError("prior_sigma must be positive");
}

Twist2 EdgeResidual(const PoseGraphEdge& edge, const Pose2& t_i,
                    const Pose2& t_j) {
  return Log(edge.z_ij.Inverse() * (t_i.Inverse() * t_j));
}

namespace {

double Kernel(double norm, double delta) {
  if (norm <= delta) return 0.5 * norm * norm;
  return delta * norm - 0.5 * delta * delta;
}

double KernelWeight(double norm, double delta) {
  return norm <= delta ? 1.0 : delta / norm;
}

class Problem {
 public:
  Problem(const PoseGraph& graph, const PoseMap& init, const RobustConfig& config)
      : config_(config), anchor_(init.begin()->second) {
    for (const auto& [id, pose] : init) {
      index_[id] = static_cast<int>(ids_.size());
      ids_.push_back(id);
    }
    for (const auto& e : graph.edges) {
      if (index_.count(e.i) && index_.count(e.j)) edges_.push_back(&e);
    }
  }

  int NumVars() const { return 3 * static_cast<int>(ids_.size()); }

  double Cost(const std::vector<Pose2>& poses) const {
    double cost = 0.0;
    for (const PoseGraphEdge* e : edges_) {
      const Vec3 r = EdgeResidual(*e, poses[index_.at(e->i)],
                                  poses[index_.at(e->j)]).AsVector();
      cost += Kernel(r.cwiseQuotient(e->sigma).norm(), config_.huber_delta);
    }
    const Vec3 rp = Log(anchor_.Inverse() * poses[0]).AsVector() /
                    config_.prior_sigma;
    return cost + 0.5 * rp.squaredNorm();
  }

  void Linearize(const std::vector<Pose2>& poses, Eigen::MatrixXd* hessian,
                 Eigen::VectorXd* gradient) const {
    const int n = NumVars();
    hessian->setZero(n, n);
    gradient->setZero(n);
    for (const PoseGraphEdge* e : edges_) {
      const int a = index_.at(e->i);
      const int b = index_.at(e->j);
      const Pose2 between = poses[a].Inverse() * poses[b];
      const Twist2 r = Log(e->z_ij.Inverse() * between);
      const Mat3 jr_inv = RightJacobianInverse(r);
      const Vec3 inv_sigma = e->sigma.cwiseInverse();
      Mat3 jb = inv_sigma.asDiagonal() * jr_inv;
      Mat3 ja = -jb * between.Inverse().Adjoint();
      const Vec3 err = r.AsVector().cwiseProduct(inv_sigma);
      const double w = KernelWeight(err.norm(), config_.huber_delta);
      hessian->block<3, 3>(3 * a, 3 * a) += w * ja.transpose() * ja;
      hessian->block<3, 3>(3 * a, 3 * b) += w * ja.transpose() * jb;
      hessian->block<3, 3>(3 * b, 3 * a) += w * jb.transpose() * ja;
      hessian->block<3, 3>(3 * b, 3 * b) += w * jb.transpose() * jb;
      gradient->segment<3>(3 * a) += w * ja.transpose() * err;
      gradient->segment<3>(3 * b) += w * jb.transpose() * err;
    }
    const Twist2 rp = Log(anchor_.Inverse() * poses[0]);
    const Mat3 jp = RightJacobianInverse(rp) / config_.prior_sigma;
    hessian->block<3, 3>(0, 0) += jp.transpose() * jp;
    gradient->segment<3>(0) += jp.transpose() * (rp.AsVector() / config_.prior_sigma);
  }

  const std::vector<int>& ids() const { return ids_; }

 private:
  const RobustConfig& config_;
  Pose2 anchor_;
  std::vector<int> ids_;
  std::map<int, int> index_;
  std::vector<const PoseGraphEdge*> edges_;
};

}  // namespace

double RobustCost(const PoseGraph& graph, const PoseMap& poses,
                  const RobustConfig& config) {
  double cost = 0.0;
  for (const auto& e : graph.edges) {
    auto a = poses.find(e.i);
    auto b = poses.find(e.j);
    if (a == poses.end() || b == poses.end()) continue;
    const Vec3 r = EdgeResidual(e, a->second, b->second).AsVector();
    cost += Kernel(r.cwiseQuotient(e.sigma).norm(), config.huber_delta);
  }
  return cost;
}

OptimizationResult Optimize(const PoseGraph& graph, const PoseMap& init,
                            const RobustConfig& config) {
  config.Validate();
  OptimizationResult result;
  result.poses = init;
  if (init.empty()) {
    result.converged = true;
    return result;
  }
  Problem problem(graph, init, config);
  std::vector<Pose2> poses;
  for (const auto& [id, pose] : init) poses.push_back(pose);

  double cost = problem.Cost(poses);
  if (!std::isfinite(cost)) throw NumericalError("non-finite initial cost", 0);
  result.initial_cost = cost;
  result.cost_history.push_back(cost);

  const int n = problem.NumVars();
  Eigen::MatrixXd hessian(n, n);
  Eigen::VectorXd gradient(n);
  double lambda = config.initial_lambda;
  bool relinearize = true;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    result.iterations = iter;
    if (cost <= 1e-30) {
      result.converged = true;
      break;
    }
    if (relinearize) problem.Linearize(poses, &hessian, &gradient);
    Eigen::MatrixXd damped = hessian;
    for (int k = 0; k < n; ++k) {
      damped(k, k) += lambda * std::max(hessian(k, k), 1e-9);
    }
    const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
    if (!step.allFinite()) throw NumericalError("non-finite LM step", iter);
    std::vector<Pose2> candidate = poses;
    for (size_t k = 0; k < poses.size(); ++k) {
      candidate[k] = poses[k] * Exp(Twist2::FromVector(step.segment<3>(3 * k)));
    }
    const double new_cost = problem.Cost(candidate);
    if (!std::isfinite(new_cost)) throw NumericalError("non-finite cost", iter);
    if (new_cost < cost) {
      const double decrease = cost - new_cost;
      poses = std::move(candidate);
      cost = new_cost;
      result.cost_history.push_back(cost);
      lambda = std::max(lambda / config.lambda_factor, 1e-12);
      relinearize = true;
      if (decrease < config.convergence_tol * (cost + decrease)) {
        result.converged = true;
        break;
      }
    } else {
      lambda *= config.lambda_factor;
      relinearize = false;
      if (lambda > config.max_lambda) {
        result.converged = true;
        break;
      }
    }
  }
  result.final_cost = cost;
  for (size_t k = 0; k < poses.size(); ++k) {
    result.poses[problem.ids()[k]] = poses[k];
  }
  return result;
}

std::string GraphToString(const PoseGraph& graph, const PoseMap& poses) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# floorstitch pose graph v1 (g2o SE2 records)\n";
  for (int id : graph.nodes) {
    const auto it = poses.find(id);
    if (it == poses.end()) {
      out << "# NODE " << id << "\n";
      continue;
    }
    out << "VERTEX_SE2 " << id << ' ' << it->second.x() << ' ' << it->second.y()
        << ' ' << it->second.theta() << "\n";
  }
  for (const auto& e : graph.edges) {
    const Vec3 info = e.sigma.array().square().inverse();
    out << "EDGE_SE2 " << e.i << ' ' << e.j << ' ' << e.z_ij.x() << ' '
        << e.z_ij.y() << ' ' << e.z_ij.theta() << ' ' << info(0) << " 0 0 "
        << info(1) << " 0 " << info(2) << "\n";
    out << "# SCORE " << e.i << ' ' << e.j << ' ' << e.score << "\n";
  }
  return out.str();
}

void ParseGraph(const std::string& text, PoseGraph* graph, PoseMap* poses) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<int> nodes;
  std::vector<PoseGraphEdge> edges;
  std::map<std::pair<int, int>, double> scores;
  poses->clear();
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "VERTEX_SE2") {
      int id;
      double x, y, t;
      if (!(ls >> id >> x >> y >> t)) throw ParseError("bad VERTEX_SE2", line_no);
      nodes.push_back(id);
      (*poses)[id] = Pose2(x, y, t);
    } else if (tag == "EDGE_SE2") {
      PoseGraphEdge e;
      double x, y, t, i11, i12, i13, i22, i23, i33;
      if (!(ls >> e.i >> e.j >> x >> y >> t >> i11 >> i12 >> i13 >> i22 >> i23 >>
            i33)) {
        throw ParseError("bad EDGE_SE2", line_no);
      }
      e.z_ij = Pose2(x, y, t);
      e.sigma = Vec3(1.0 / std::sqrt(i11), 1.0 / std::sqrt(i22),
                     1.0 / std::sqrt(i33));
      edges.push_back(e);
    } else if (tag == "#") {
      std::string kind;
      ls >> kind;
      if (kind == "NODE") {
        int id;
        if (!(ls >> id)) throw ParseError("bad NODE comment", line_no);
        nodes.push_back(id);
      } else if (kind == "SCORE") {
        int i, j;
        double s;
        if (!(ls >> i >> j >> s)) throw ParseError("bad SCORE comment", line_no);
        scores[{i, j}] = s;
      }
    } else {
      throw ParseError("unknown record '" + tag + "'", line_no);
    }
  }
  for (auto& e : edges) {
    auto it = scores.find({e.i, e.j});
    if (it != scores.end()) e.score = it->second;
  }
  *graph = BuildGraph(std::move(nodes), std::move(edges));
}

}  // namespace floorstitch
