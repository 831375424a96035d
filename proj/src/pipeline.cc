#include "floorstitch/pipeline.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <set>

#include <json.hpp>

#include "floorstitch/errors.h"
#include "floorstitch/io_util.h"

namespace floorstitch {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* AggregationName(Aggregation a) {
  return a == Aggregation::kPgo ? "pgo" : "spanning_tree";
}

const char* VerifierName(VerifierKind v) {
  return v == VerifierKind::kOracle ? "oracle" : "xcorr";
}

ordered_json ConfigToJson(const PipelineConfig& c) {
  const bool quadratic = std::isinf(c.robust.huber_delta);
  ordered_json j;
  j["format"] = "floorstitch-config";
  j["version"] = kConfigFormatVersion;
  j["verifier"] = {
      {"kind", VerifierName(c.verifier)},
      {"accept_threshold", c.verifier_config.accept_threshold},
      {"rot_tol_door_window_deg", RadToDeg(c.verifier_config.rot_tol_door_window)},
      {"rot_tol_opening_deg", RadToDeg(c.verifier_config.rot_tol_opening)},
      {"trans_tol_linf", c.verifier_config.trans_tol_linf},
      {"xcorr_threshold", c.verifier_config.xcorr_threshold},
      {"xcorr_min_overlap", c.verifier_config.xcorr_min_overlap}};
  j["hypotheses"] = {{"min_width_ratio", c.hypotheses.min_width_ratio},
                     {"max_width_ratio", c.hypotheses.max_width_ratio},
                     {"duplicate_tol", c.hypotheses.duplicate_tol},
                     {"axis_align", c.hypotheses.axis_align},
                     {"axis_align_cap_deg", RadToDeg(c.hypotheses.axis_align_cap)}};
  j["robust"] = {{"kernel", quadratic ? "quadratic" : "huber"},
                 {"huber_delta", quadratic ? RobustConfig{}.huber_delta
                                           : c.robust.huber_delta},
                 {"max_iterations", c.robust.max_iterations},
                 {"convergence_tol", c.robust.convergence_tol},
                 {"initial_lambda", c.robust.initial_lambda},
                 {"lambda_factor", c.robust.lambda_factor},
                 {"prior_sigma", c.robust.prior_sigma}};
  j["edge_sigma"] = {{"x", c.edge_sigma(0)},
                     {"y", c.edge_sigma(1)},
                     {"theta_deg", RadToDeg(c.edge_sigma(2))}};
  j["aggregation"] = AggregationName(c.aggregation);
  j["floorplan"] = {{"grouping_iou", c.grouping_iou}, {"cell_size", c.cell_size}};
  j["bev"] = {{"resolution", c.bev.resolution},
              {"extent", c.bev.extent},
              {"pano_width", c.bev.pano_width},
              {"pano_height", c.bev.pano_height},
              {"ceiling_rise", c.bev.ceiling_rise},
              {"kernel_size", c.bev.kernel_size}};
  j["ransac"] = {{"n_hypotheses", c.ransac.n_hypotheses},
                 {"subset_frac", c.ransac.subset_frac},
                 {"inlier_threshold", c.ransac.inlier_threshold},
                 {"seed", c.ransac.seed}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

// Overlays `patch` onto `base`, which holds the full default schema.
void Merge(ordered_json& base, const ordered_json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key_path = path + "." + it.key();
    auto target = base.find(it.key());
    if (target == base.end()) throw ConfigError("unknown config key " + key_path);
    const ordered_json& v = it.value();
    if (target->is_object()) {
      Merge(*target, v, key_path);
    } else if (target->is_number_float()) {
      if (!v.is_number()) throw ConfigError(key_path + ": expected a number");
      *target = v.get<double>();
    } else if (target->is_number_integer()) {
      if (!v.is_number_integer()) throw ConfigError(key_path + ": expected an integer");
      if (target->is_number_unsigned() && v.get<int64_t>() < 0) {
        throw ConfigError(key_path + ": expected a non-negative integer");
      }
      *target = v;
    } else if (target->is_boolean()) {
      if (!v.is_boolean()) throw ConfigError(key_path + ": expected true or false");
      *target = v;
    } else if (target->is_string()) {
      if (!v.is_string()) throw ConfigError(key_path + ": expected a string");
      *target = v;
    }
  }
}

PipelineConfig ConfigFromJson(const ordered_json& j) {
  if (j.at("format") != "floorstitch-config") {
    throw ConfigError("not a floorstitch config document");
  }
  if (j.at("version") != kConfigFormatVersion) {
    throw ConfigError("unsupported config version");
  }
  PipelineConfig c;
  const auto& v = j.at("verifier");
  const std::string kind = v.at("kind");
  if (kind == "oracle") {
    c.verifier = VerifierKind::kOracle;
  } else if (kind == "xcorr") {
    c.verifier = VerifierKind::kXcorr;
  } else {
    throw ConfigError("verifier.kind must be 'oracle' or 'xcorr'");
  }
  c.verifier_config.accept_threshold = v.at("accept_threshold");
  c.verifier_config.rot_tol_door_window = DegToRad(v.at("rot_tol_door_window_deg"));
  c.verifier_config.rot_tol_opening = DegToRad(v.at("rot_tol_opening_deg"));
  c.verifier_config.trans_tol_linf = v.at("trans_tol_linf");
  c.verifier_config.xcorr_threshold = v.at("xcorr_threshold");
  c.verifier_config.xcorr_min_overlap = v.at("xcorr_min_overlap");

  const auto& h = j.at("hypotheses");
  c.hypotheses.min_width_ratio = h.at("min_width_ratio");
  c.hypotheses.max_width_ratio = h.at("max_width_ratio");
  c.hypotheses.duplicate_tol = h.at("duplicate_tol");
  c.hypotheses.axis_align = h.at("axis_align");
  c.hypotheses.axis_align_cap = DegToRad(h.at("axis_align_cap_deg"));

  const auto& r = j.at("robust");
  const std::string kernel = r.at("kernel");
  if (kernel == "huber") {
    c.robust.huber_delta = r.at("huber_delta");
  } else if (kernel == "quadratic") {
    c.robust.huber_delta = std::numeric_limits<double>::infinity();
  } else {
    throw ConfigError("robust.kernel must be 'huber' or 'quadratic'");
  }
  c.robust.max_iterations = r.at("max_iterations");
  c.robust.convergence_tol = r.at("convergence_tol");
  c.robust.initial_lambda = r.at("initial_lambda");
  c.robust.lambda_factor = r.at("lambda_factor");
  c.robust.prior_sigma = r.at("prior_sigma");

  const auto& s = j.at("edge_sigma");
  c.edge_sigma = Vec3(s.at("x").get<double>(), s.at("y").get<double>(),
                      DegToRad(s.at("theta_deg").get<double>()));

  const std::string agg = j.at("aggregation");
  if (agg == "pgo") {
    c.aggregation = Aggregation::kPgo;
  } else if (agg == "spanning_tree") {
    c.aggregation = Aggregation::kSpanningTree;
  } else {
    throw ConfigError("aggregation must be 'pgo' or 'spanning_tree'");
  }
  c.grouping_iou = j.at("floorplan").at("grouping_iou");
  c.cell_size = j.at("floorplan").at("cell_size");

  const auto& b = j.at("bev");
  c.bev.resolution = b.at("resolution");
  c.bev.extent = b.at("extent");
  c.bev.pano_width = b.at("pano_width");
  c.bev.pano_height = b.at("pano_height");
  c.bev.ceiling_rise = b.at("ceiling_rise");
  c.bev.kernel_size = b.at("kernel_size");

  const auto& rs = j.at("ransac");
  c.ransac.n_hypotheses = rs.at("n_hypotheses");
  c.ransac.subset_frac = rs.at("subset_frac");
  c.ransac.inlier_threshold = rs.at("inlier_threshold");
  c.ransac.seed = rs.at("seed");
  c.seed = j.at("seed");
  c.threads = j.at("threads");
  c.Validate();
  return c;
}

}  // namespace

void PipelineConfig::Validate() const {
  verifier_config.Validate();
  robust.Validate();
  ransac.Validate();
  if (!(hypotheses.min_width_ratio > 0.0 &&
        hypotheses.min_width_ratio <= hypotheses.max_width_ratio &&
        hypotheses.max_width_ratio <= 1.0)) {
    throw ConfigError("width ratio bounds must satisfy 0 < min <= max <= 1");
  }
  if (!(hypotheses.axis_align_cap >= 0.0)) {
    throw ConfigError("axis_align_cap must be non-negative");
  }
  if (!(edge_sigma.minCoeff() > 0.0)) throw ConfigError("edge sigmas must be positive");
  if (!(grouping_iou >= 0.0 && grouping_iou < 1.0)) {
    throw ConfigError("grouping_iou must be in [0, 1)");
  }
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be positive");
  if (!(bev.resolution > 0.0 && bev.extent > bev.resolution)) {
    throw ConfigError("bev resolution and extent must be positive");
  }
  if (bev.pano_width < 2 || bev.pano_height < 2) {
    throw ConfigError("bev panorama sampling grid too small");
  }
  if (bev.kernel_size < 1 || bev.kernel_size % 2 == 0) {
    throw ConfigError("bev kernel_size must be a positive odd integer");
  }
}

std::string ConfigToString(const PipelineConfig& config) {
  return ConfigToJson(config).dump(2) + "\n";
}

PipelineConfig ConfigFromString(const std::string& text) {
  ordered_json patch;
  try {
    patch = ordered_json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ordered_json base = ConfigToJson(PipelineConfig{});
  Merge(base, patch, "$");
  return ConfigFromJson(base);
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  return ConfigFromString(ReadFile(path));
}

void ApplyOverride(PipelineConfig* config, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  ordered_json value = ordered_json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  ordered_json patch = value;
  size_t end = key.size();
  while (true) {
    const size_t dot = key.rfind('.', end - 1);
    const std::string part =
        key.substr(dot == std::string::npos ? 0 : dot + 1,
                   end - (dot == std::string::npos ? 0 : dot + 1));
    if (part.empty()) throw ConfigError("bad override key: " + key);
    patch = ordered_json{{part, patch}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  ordered_json base = ConfigToJson(*config);
  Merge(base, patch, "$");
  *config = ConfigFromJson(base);
}

std::string ConfigHash(const PipelineConfig& config) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : ConfigToString(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::vector<StageTiming>* out) : out_(out) {}
  void Mark(const char* stage) {
    const auto now = std::chrono::steady_clock::now();
    out_->push_back({stage, std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>* out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

Reconstruction Reconstruct(const Scene& scene, const PipelineConfig& config) {
  config.Validate();
  ValidateScene(scene);
  Reconstruction rec;
  rec.floorplan.cell_size = config.cell_size;
  StageTimer timer(&rec.timings);

  const auto sets = GenerateAllHypotheses(scene, config.hypotheses);
  for (const auto& s : sets) rec.num_hypotheses += s.hypotheses.size();
  timer.Mark("hypotheses");

  std::unique_ptr<Verifier> verifier;
  if (config.verifier == VerifierKind::kOracle) {
    verifier = std::make_unique<OracleVerifier>(scene, config.verifier_config);
  } else {
    verifier = std::make_unique<XcorrVerifier>(scene, config.verifier_config,
                                               config.bev, config.seed);
  }
  const auto accepted = VerifyAll(sets, *verifier, config.threads);
  rec.num_accepted = accepted.size();
  timer.Mark("verify");

  std::vector<int> ids;
  for (const auto& p : scene.panoramas) ids.push_back(p.id);
  rec.graph = BuildGraph(ids, accepted, config.edge_sigma);
  rec.components = ConnectedComponents(rec.graph);
  timer.Mark("graph");

  const std::vector<int>& largest = rec.components.front();
  if (largest.size() < 2 && scene.panoramas.size() > 1) {
    rec.status = kStatusEmpty;
    return rec;
  }
  rec.init_poses = SpanningTreeInit(rec.graph, largest);
  rec.init_cost = RobustCost(rec.graph, rec.init_poses, config.robust);
  timer.Mark("spanning_tree");

  if (config.aggregation == Aggregation::kPgo) {
    const OptimizationResult opt = Optimize(rec.graph, rec.init_poses, config.robust);
    rec.poses = opt.poses;
    rec.optimizer_iterations = opt.iterations;
    rec.final_cost = RobustCost(rec.graph, rec.poses, config.robust);
  } else {
    rec.poses = rec.init_poses;
    rec.final_cost = rec.init_cost;
  }
  timer.Mark("optimize");

  rec.groups = GroupPanoramas(scene, rec.poses, config.grouping_iou);
  timer.Mark("group");
  for (auto& g : rec.groups) ExtractGroupContours(scene, rec.poses, &g);
  timer.Mark("extract");
  rec.floorplan = Stitch(rec.groups, config.cell_size);
  timer.Mark("stitch");
  return rec;
}

namespace {

json PolygonJson(const Polygon& poly) {
  json arr = json::array();
  for (const Vec2& p : poly) arr.push_back({p.x(), p.y()});
  return arr;
}

Polygon PolygonFromJson(const json& arr) {
  Polygon poly;
  for (const auto& p : arr) poly.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return poly;
}

}  // namespace

void WriteReconstruction(const std::filesystem::path& dir, const Scene& scene,
                         const Reconstruction& rec, const PipelineConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  ordered_json poses;
  poses["format"] = "floorstitch-poses";
  poses["version"] = 1;
  poses["status"] = rec.status;
  poses["poses"] = json::array();
  for (const auto& [id, p] : rec.poses) {
    poses["poses"].push_back(
        ordered_json{{"id", id}, {"x", p.x()}, {"y", p.y()}, {"theta", p.theta()}});
  }
  poses["components"] = rec.components;
  WriteFileAtomic(dir / "poses.json", poses.dump(2) + "\n");

  WriteFileAtomic(dir / "graph.txt", GraphToString(rec.graph, rec.poses));

  ordered_json fp;
  fp["format"] = "floorstitch-floorplan";
  fp["version"] = 1;
  fp["cell_size"] = rec.floorplan.cell_size;
  fp["origin"] = {rec.floorplan.origin.x(), rec.floorplan.origin.y()};
  fp["rows"] = rec.floorplan.rows;
  fp["cols"] = rec.floorplan.cols;
  fp["occupied_area_m2"] = rec.floorplan.OccupiedArea();
  fp["groups"] = json::array();
  for (const auto& g : rec.groups) {
    json polys = json::array();
    for (const auto& p : g.polygons) polys.push_back(PolygonJson(p));
    fp["groups"].push_back(ordered_json{{"members", g.members}, {"polygons", polys}});
  }
  WriteFileAtomic(dir / "floorplan.json", fp.dump(2) + "\n");
  WriteFileAtomic(dir / "floorplan.pgm", FloorplanToPgm(rec.floorplan));
  WriteFileAtomic(dir / "floorplan_rooms.ppm", FloorplanToPpm(rec.floorplan));
  WriteFileAtomic(dir / "floorplan.svg", FloorplanToSvg(rec.groups, scene, rec.poses));

  ordered_json m;
  m["format"] = "floorstitch-manifest";
  m["version"] = 1;
  m["status"] = rec.status;
  m["config_hash"] = ConfigHash(config);
  m["config"] = json::parse(ConfigToString(config));
  m["counts"] = {{"panoramas", scene.panoramas.size()},
                 {"hypotheses", rec.num_hypotheses},
                 {"accepted", rec.num_accepted},
                 {"edges", rec.graph.edges.size()},
                 {"components", rec.components.size()},
                 {"largest_component", rec.poses.size()},
                 {"groups", rec.groups.size()}};
  m["costs"] = {{"spanning_tree", rec.init_cost},
                {"final", rec.final_cost},
                {"optimizer_iterations", rec.optimizer_iterations}};
  ordered_json timings;
  for (const auto& t : rec.timings) timings[t.stage] = t.seconds;
  m["timings_s"] = timings;
  WriteFileAtomic(dir / "manifest.json", m.dump(2) + "\n");
}

SavedReconstruction LoadReconstruction(const std::filesystem::path& dir) {
  SavedReconstruction out;
  try {
    const json poses = json::parse(ReadFile(dir / "poses.json"));
    if (poses.at("format") != "floorstitch-poses") {
      throw ParseError("poses.json: unexpected format");
    }
    out.status = poses.at("status");
    for (const auto& p : poses.at("poses")) {
      out.poses[p.at("id").get<int>()] =
          Pose2(p.at("x").get<double>(), p.at("y").get<double>(),
                p.at("theta").get<double>());
    }
    out.components = poses.at("components").get<std::vector<std::vector<int>>>();

    const json fp = json::parse(ReadFile(dir / "floorplan.json"));
    if (fp.at("format") != "floorstitch-floorplan") {
      throw ParseError("floorplan.json: unexpected format");
    }
    out.cell_size = fp.at("cell_size");
    for (const auto& g : fp.at("groups")) {
      RoomGroup group;
      group.members = g.at("members").get<std::vector<int>>();
      for (const auto& p : g.at("polygons")) group.polygons.push_back(PolygonFromJson(p));
      out.groups.push_back(std::move(group));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("reconstruction artifacts: ") + e.what());
  }
  return out;
}

EvalReport Evaluate(const Scene& scene, const SavedReconstruction& rec,
                    const RansacConfig& ransac) {
  if (!scene.HasGroundTruthPoses() || !scene.gt_floorplan) {
    throw MissingGroundTruthError("evaluation needs gt poses and gt_floorplan");
  }
  PoseMap gt;
  for (const auto& p : scene.panoramas) gt[p.id] = *p.gt_pose;

  EvalReport r;
  r.total_panos = scene.panoramas.size();
  r.localized_panos = rec.poses.size();
  r.localization_pct = 100.0 * static_cast<double>(r.localized_panos) /
                       static_cast<double>(r.total_panos);
  r.cc = ComputeCcDistribution(rec.components, r.total_panos);
  if (rec.poses.empty()) return r;

  Sim2 align;
  if (rec.poses.size() >= 2) {
    const RansacResult fit = AlignRansac(rec.poses, gt, ransac);
    align = fit.transform;
    r.ransac_inliers = fit.inliers.size();
  } else {
    const auto& [id, pose] = *rec.poses.begin();
    const Pose2 d = gt.at(id) * pose.Inverse();
    align = Sim2{1.0, d.theta(), d.translation()};
    r.ransac_inliers = 1;
  }
  const PoseErrors errors = ComputePoseErrors(rec.poses, gt, align);
  r.rotation_deg = errors.rotation;
  r.translation_m = errors.translation;

  std::vector<RoomGroup> aligned = rec.groups;
  for (auto& g : aligned) {
    for (auto& p : g.polygons) p = TransformPolygon(align, p);
  }
  r.floorplan_iou = FloorplanIou(Stitch(aligned, rec.cell_size),
                                 RasterizePolygons(*scene.gt_floorplan, rec.cell_size));
  return r;
}

}  // namespace floorstitch
