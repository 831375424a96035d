#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floorstitch/geom.h"
#include "floorstitch/polygon.h"

namespace floorstitch {

enum class WdoKind { kWindow, kDoor, kOpening };

std::string_view WdoKindName(WdoKind kind);
// Throws ParseError for unknown names.
WdoKind ParseWdoKind(std::string_view name);

// A window, door or opening detected on the room boundary. Endpoints are in
// the panorama's room frame; interior_normal points into the room the camera
// stands in.
struct WdoDetection {
  WdoKind kind = WdoKind::kDoor;
  Vec2 e1 = Vec2::Zero();
  Vec2 e2 = Vec2::Zero();
  Vec2 interior_normal = Vec2::UnitY();
  double confidence = 1.0;

  double Width() const { return (e2 - e1).norm(); }
  Vec2 Center() const { return 0.5 * (e1 + e2); }

  bool operator==(const WdoDetection&) const = default;
};

// Floor-wall boundary in the room frame (camera at the origin), one
// confidence per vertex.
struct RoomContour {
  Polygon vertices;
  std::vector<double> confidence;

  bool operator==(const RoomContour&) const = default;
};

struct PanoramaRecord {
  int id = 0;
  RoomContour contour;
  std::vector<WdoDetection> wdos;
  // Clockwise angle from the camera's reference axis to the first dominant
  // wall direction, stored in [0, pi/2).
  double vanishing_angle = 0.0;
  double camera_height = 1.5;
  std::optional<Pose2> gt_pose;
  // Index into Scene::gt_floorplan of the room the camera stands in.
  std::optional<int> gt_room;

  bool operator==(const PanoramaRecord&) const = default;
};

struct Scene {
  std::vector<PanoramaRecord> panoramas;
  std::optional<std::vector<Polygon>> gt_floorplan;

  const PanoramaRecord& Panorama(int id) const;
  bool HasGroundTruthPoses() const;

  bool operator==(const Scene&) const = default;
};

// Throws ValidationError naming the first violated invariant.
void ValidateScene(const Scene& scene);

// Versioned JSON scene documents. See docs/scene_format.md.
inline constexpr int kSceneFormatVersion = 1;
std::string SceneToString(const Scene& scene);
Scene SceneFromString(std::string_view text);
void SaveScene(const Scene& scene, const std::filesystem::path& path);
Scene LoadScene(const std::filesystem::path& path);

struct SyntheticHomeConfig {
  int n_rooms = 4;
  int min_panos_per_room = 1;
  int max_panos_per_room = 1;
  uint64_t seed = 0;
  // Chamfer some exterior corners to produce non-Manhattan walls.
  bool non_manhattan = true;
  // Rooms whose longer side exceeds this are split in two by an opening
  // (only when n_rooms >= 3 and the room budget allows).
  double split_threshold = 5.5;
  // Probability of a door between adjacent rooms beyond the spanning doors.
  double extra_door_prob = 0.5;
};

Scene GenerateSyntheticHome(const SyntheticHomeConfig& config);

struct NoiseSpec {
  double sigma_vertex = 0.0;
  double sigma_wdo_endpoint = 0.0;
  double sigma_vanishing = 0.0;
  double wdo_drop_prob = 0.0;
  uint64_t seed = 0;
};

Scene Perturb(const Scene& scene, const NoiseSpec& spec);

}  // namespace floorstitch
