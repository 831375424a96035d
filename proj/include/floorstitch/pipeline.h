#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "floorstitch/bev.h"
#include "floorstitch/eval.h"
#include "floorstitch/floorplan.h"
#include "floorstitch/hypotheses.h"
#include "floorstitch/posegraph.h"
#include "floorstitch/scene.h"
#include "floorstitch/verify.h"

namespace floorstitch {

enum class Aggregation { kSpanningTree, kPgo };
enum class VerifierKind { kOracle, kXcorr };

inline constexpr int kConfigFormatVersion = 1;

struct PipelineConfig {
  VerifierKind verifier = VerifierKind::kOracle;
  VerifierConfig verifier_config;
  HypothesisOptions hypotheses;
  RobustConfig robust;
  Vec3 edge_sigma = DefaultEdgeSigma();
  Aggregation aggregation = Aggregation::kPgo;
  double grouping_iou = 0.25;
  double cell_size = 0.1;
  BevConfig bev;
  RansacConfig ransac;
  uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency

  // Throws ConfigError.
  void Validate() const;
};

// Versioned JSON. Missing keys keep their defaults; unknown keys and type
// mismatches are ConfigErrors.
std::string ConfigToString(const PipelineConfig& config);
PipelineConfig ConfigFromString(const std::string& text);
PipelineConfig LoadConfig(const std::filesystem::path& path);

// Applies "dotted.key=value" overrides, e.g. "robust.huber_delta=2".
void ApplyOverride(PipelineConfig* config, const std::string& assignment);

// FNV-1a 64 of the canonical config text, as 16 hex digits.
std::string ConfigHash(const PipelineConfig& config);

inline constexpr const char* kStatusOk = "ok";
inline constexpr const char* kStatusEmpty = "empty_largest_component";

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct Reconstruction {
  std::string status = kStatusOk;
  size_t num_hypotheses = 0;
  size_t num_accepted = 0;
  PoseGraph graph;
  std::vector<std::vector<int>> components;
  PoseMap init_poses;  // spanning-tree solution of the largest component
  PoseMap poses;       // final poses of the largest component
  double init_cost = 0.0;
  double final_cost = 0.0;
  int optimizer_iterations = 0;
  std::vector<RoomGroup> groups;
  FloorplanRaster floorplan;
  std::vector<StageTiming> timings;
};

Reconstruction Reconstruct(const Scene& scene, const PipelineConfig& config);

// Writes poses.json, graph.txt, floorplan.json, floorplan.pgm,
// floorplan_rooms.ppm, floorplan.svg and manifest.json into `dir`.
void WriteReconstruction(const std::filesystem::path& dir, const Scene& scene,
                         const Reconstruction& rec, const PipelineConfig& config);

struct SavedReconstruction {
  std::string status;
  PoseMap poses;
  std::vector<std::vector<int>> components;
  std::vector<RoomGroup> groups;
  double cell_size = 0.1;
};

SavedReconstruction LoadReconstruction(const std::filesystem::path& dir);

// Throws MissingGroundTruthError when the scene lacks gt poses or floorplan.
EvalReport Evaluate(const Scene& scene, const SavedReconstruction& rec,
                    const RansacConfig& ransac = {});

}  // namespace floorstitch
