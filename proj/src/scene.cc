#include "floorstitch/scene.h"

#include <cmath>
#include <set>
#include <sstream>

#include "floorstitch/errors.h"
#include "floorstitch/random.h"

namespace floorstitch {

std::string_view WdoKindName(WdoKind kind) {
  switch (kind) {
    case WdoKind::kWindow:
      return "window";
    case WdoKind::kDoor:
      return "door";
    case WdoKind::kOpening:
      return "opening";
  }
  return "unknown";
}

WdoKind ParseWdoKind(std::string_view name) {
  if (name == "window") return WdoKind::kWindow;
  if (name == "door") return WdoKind::kDoor;
  if (name == "opening") return WdoKind::kOpening;
  throw ParseError("unknown W/D/O kind '" + std::string(name) + "'");
}

const PanoramaRecord& Scene::Panorama(int id) const {
  for (const auto& pano : panoramas) {
    if (pano.id == id) return pano;
  }
  throw ValidationError("no panorama with id " + std::to_string(id));
}

bool Scene::HasGroundTruthPoses() const {
  for (const auto& pano : panoramas) {
    if (!pano.gt_pose) return false;
  }
  return !panoramas.empty();
}

namespace {

[[noreturn]] void Fail(const PanoramaRecord& pano, const std::string& what) {
  throw ValidationError("panorama " + std::to_string(pano.id) + ": " + what);
}

void ValidatePanorama(const PanoramaRecord& pano) {
  if (!(pano.camera_height > 0.0) || !std::isfinite(pano.camera_height)) {
    Fail(pano, "camera_height must be positive");
  }
  if (!(pano.vanishing_angle >= 0.0 && pano.vanishing_angle < kPi / 2.0)) {
    Fail(pano, "vanishing_angle must lie in [0, pi/2)");
  }
  const RoomContour& c = pano.contour;
  if (c.vertices.size() < 3) Fail(pano, "contour needs at least 3 vertices");
  if (c.confidence.size() != c.vertices.size()) {
    Fail(pano, "contour confidence count differs from vertex count");
  }
  for (double conf : c.confidence) {
    if (!(conf >= 0.0 && conf <= 1.0)) {
      Fail(pano, "contour confidence outside [0, 1]");
    }
  }
  if (!IsSimplePolygon(c.vertices)) Fail(pano, "contour is not simple");
  if (!PointInPolygon(c.vertices, Vec2::Zero())) {
    Fail(pano, "contour does not contain the camera");
  }
  for (size_t k = 0; k < pano.wdos.size(); ++k) {
    const WdoDetection& d = pano.wdos[k];
    const std::string where = "wdo " + std::to_string(k) + ": ";
    if (!(d.Width() > 0.0)) Fail(pano, where + "width must be positive");
    if (std::abs(d.interior_normal.norm() - 1.0) > 1e-9) {
      Fail(pano, where + "interior_normal is not unit length");
    }
    if (std::abs(d.interior_normal.dot((d.e2 - d.e1) / d.Width())) > 1e-9) {
      Fail(pano, where + "interior_normal is not perpendicular to the segment");
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      Fail(pano, where + "confidence outside [0, 1]");
    }
  }
}

}  // namespace

void ValidateScene(const Scene& scene) {
  if (scene.panoramas.empty()) {
    throw ValidationError("scene has no panoramas");
  }
  std::set<int> ids;
  for (const auto& pano : scene.panoramas) {
    if (!ids.insert(pano.id).second) {
      throw ValidationError("duplicate panorama id " + std::to_string(pano.id));
    }
    ValidatePanorama(pano);
    if (pano.gt_room && scene.gt_floorplan &&
        (*pano.gt_room < 0 ||
         *pano.gt_room >= static_cast<int>(scene.gt_floorplan->size()))) {
      Fail(pano, "gt_room does not index gt_floorplan");
    }
  }
  if (scene.gt_floorplan) {
    for (size_t r = 0; r < scene.gt_floorplan->size(); ++r) {
      if ((*scene.gt_floorplan)[r].size() < 3) {
        throw ValidationError("gt_floorplan room " + std::to_string(r) +
                              " has fewer than 3 vertices");
      }
    }
  }
}

Scene Perturb(const Scene& scene, const NoiseSpec& spec) {
  if (spec.sigma_vertex < 0 || spec.sigma_wdo_endpoint < 0 ||
      spec.sigma_vanishing < 0) {
    throw ConfigError("noise sigmas must be non-negative");
  }
  if (!(spec.wdo_drop_prob >= 0.0 && spec.wdo_drop_prob <= 1.0)) {
    throw ConfigError("wdo_drop_prob must lie in [0, 1]");
  }
  Rng rng(spec.seed);
  Scene out = scene;
  for (auto& pano : out.panoramas) {
    if (spec.sigma_vertex > 0.0) {
      for (Vec2& v : pano.contour.vertices) {
        v.x() += rng.Normal(0.0, spec.sigma_vertex);
        v.y() += rng.Normal(0.0, spec.sigma_vertex);
      }
    }
    std::vector<WdoDetection> kept;
    for (WdoDetection d : pano.wdos) {
      if (spec.sigma_wdo_endpoint > 0.0) {
        d.e1.x() += rng.Normal(0.0, spec.sigma_wdo_endpoint);
        d.e1.y() += rng.Normal(0.0, spec.sigma_wdo_endpoint);
        d.e2.x() += rng.Normal(0.0, spec.sigma_wdo_endpoint);
        d.e2.y() += rng.Normal(0.0, spec.sigma_wdo_endpoint);
        const Vec2 dir = (d.e2 - d.e1).normalized();
        Vec2 normal(-dir.y(), dir.x());
        if (normal.dot(d.interior_normal) < 0.0) normal = -normal;
        d.interior_normal = normal;
      }
      if (spec.wdo_drop_prob > 0.0 && rng.Bernoulli(spec.wdo_drop_prob)) {
        continue;
      }
      kept.push_back(d);
    }
    pano.wdos = std::move(kept);
    if (spec.sigma_vanishing > 0.0) {
      pano.vanishing_angle =
          WrapPositive(pano.vanishing_angle +
                           rng.Normal(0.0, spec.sigma_vanishing),
                       kPi / 2.0);
    }
  }
  return out;
}

}  // namespace floorstitch
