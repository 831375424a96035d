#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "floorstitch/errors.h"
#include "floorstitch/scene.h"
#include "floorstitch/io_util.h"

namespace floorstitch {

using nlohmann::json;

namespace {

json PointToJson(const Vec2& p) { return json::array({p.x(), p.y()}); }

json PolygonToJson(const Polygon& poly) {
  json arr = json::array();
  for (const Vec2& p : poly) arr.push_back(PointToJson(p));
  return arr;
}

json PanoramaToJson(const PanoramaRecord& pano) {
  json j;
  j["id"] = pano.id;
  j["camera_height"] = pano.camera_height;
  j["vanishing_angle"] = pano.vanishing_angle;
  if (pano.gt_pose) {
    j["gt_pose"] = {{"x", pano.gt_pose->x()},
                    {"y", pano.gt_pose->y()},
                    {"theta", pano.gt_pose->theta()}};
  } else {
    j["gt_pose"] = nullptr;
  }
  if (pano.gt_room) j["gt_room"] = *pano.gt_room;
  j["contour"] = {{"vertices", PolygonToJson(pano.contour.vertices)},
                  {"confidence", pano.contour.confidence}};
  json wdos = json::array();
  for (const WdoDetection& d : pano.wdos) {
    wdos.push_back({{"kind", std::string(WdoKindName(d.kind))},
                    {"e1", PointToJson(d.e1)},
                    {"e2", PointToJson(d.e2)},
                    {"interior_normal", PointToJson(d.interior_normal)},
                    {"confidence", d.confidence}});
  }
  j["wdos"] = std::move(wdos);
  return j;
}

// Schema reader that reports the JSON path of whatever it fails on.
class Reader {
 public:
  [[noreturn]] static void Fail(const std::string& path,
                                const std::string& what) {
    throw ParseError(path + ": " + what);
  }

  static const json& Field(const json& obj, const std::string& path,
                           const char* key) {
    if (!obj.is_object()) Fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) Fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  static double Number(const json& j, const std::string& path) {
    if (!j.is_number()) Fail(path, "expected a number");
    return j.get<double>();
  }

  static int Integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) Fail(path, "expected an integer");
    return j.get<int>();
  }

  static const json& Array(const json& j, const std::string& path) {
    if (!j.is_array()) Fail(path, "expected an array");
    return j;
  }

  static Vec2 Point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) Fail(path, "expected [x, y]");
    return {Number(j[0], path + "[0]"), Number(j[1], path + "[1]")};
  }

  static Polygon Poly(const json& j, const std::string& path) {
    Polygon poly;
    const json& arr = Array(j, path);
    for (size_t i = 0; i < arr.size(); ++i) {
      poly.push_back(Point(arr[i], path + "[" + std::to_string(i) + "]"));
    }
    return poly;
  }
};

PanoramaRecord PanoramaFromJson(const json& j, const std::string& path) {
  PanoramaRecord pano;
  pano.id = Reader::Integer(Reader::Field(j, path, "id"), path + ".id");
  pano.camera_height = Reader::Number(Reader::Field(j, path, "camera_height"),
                                      path + ".camera_height");
  pano.vanishing_angle =
      Reader::Number(Reader::Field(j, path, "vanishing_angle"),
                     path + ".vanishing_angle");
  if (auto it = j.find("gt_pose"); it != j.end() && !it->is_null()) {
    const std::string p = path + ".gt_pose";
    pano.gt_pose = Pose2(Reader::Number(Reader::Field(*it, p, "x"), p + ".x"),
                         Reader::Number(Reader::Field(*it, p, "y"), p + ".y"),
                         Reader::Number(Reader::Field(*it, p, "theta"),
                                        p + ".theta"));
  }
  if (auto it = j.find("gt_room"); it != j.end() && !it->is_null()) {
    pano.gt_room = Reader::Integer(*it, path + ".gt_room");
  }
  const std::string cp = path + ".contour";
  const json& contour = Reader::Field(j, path, "contour");
  pano.contour.vertices =
      Reader::Poly(Reader::Field(contour, cp, "vertices"), cp + ".vertices");
  const json& conf =
      Reader::Array(Reader::Field(contour, cp, "confidence"), cp + ".confidence");
  for (size_t i = 0; i < conf.size(); ++i) {
    pano.contour.confidence.push_back(
        Reader::Number(conf[i], cp + ".confidence[" + std::to_string(i) + "]"));
  }
  const json& wdos = Reader::Array(Reader::Field(j, path, "wdos"), path + ".wdos");
  for (size_t k = 0; k < wdos.size(); ++k) {
    const std::string wp = path + ".wdos[" + std::to_string(k) + "]";
    const json& w = wdos[k];
    WdoDetection d;
    const json& kind = Reader::Field(w, wp, "kind");
    if (!kind.is_string()) Reader::Fail(wp + ".kind", "expected a string");
    try {
      d.kind = ParseWdoKind(kind.get<std::string>());
    } catch (const ParseError& e) {
      Reader::Fail(wp + ".kind", e.what());
    }
    d.e1 = Reader::Point(Reader::Field(w, wp, "e1"), wp + ".e1");
    d.e2 = Reader::Point(Reader::Field(w, wp, "e2"), wp + ".e2");
    d.interior_normal = Reader::Point(Reader::Field(w, wp, "interior_normal"),
                                      wp + ".interior_normal");
    d.confidence = Reader::Number(Reader::Field(w, wp, "confidence"),
                                  wp + ".confidence");
    pano.wdos.push_back(d);
  }
  return pano;
}

int LineOfByte(std::string_view text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

std::string SceneToString(const Scene& scene) {
  json doc;
  doc["format"] = "floorstitch-scene";
  doc["version"] = kSceneFormatVersion;
  doc["units"] = {{"length", "meters"}, {"angle", "radians"}};
  json panos = json::array();
  for (const auto& pano : scene.panoramas) panos.push_back(PanoramaToJson(pano));
  doc["panoramas"] = std::move(panos);
  if (scene.gt_floorplan) {
    json rooms = json::array();
    for (const Polygon& room : *scene.gt_floorplan) {
      rooms.push_back(PolygonToJson(room));
    }
    doc["gt_floorplan"] = std::move(rooms);
  }
  return doc.dump(2) + "\n";
}

Scene SceneFromString(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), LineOfByte(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const auto& format = Reader::Field(doc, "$", "format");
  if (format != "floorstitch-scene") {
    Reader::Fail("$.format", "expected \"floorstitch-scene\"");
  }
  const int version =
      Reader::Integer(Reader::Field(doc, "$", "version"), "$.version");
  if (version != kSceneFormatVersion) {
    Reader::Fail("$.version", "unsupported version " + std::to_string(version));
  }
  if (auto it = doc.find("units"); it != doc.end()) {
    if (it->value("length", "meters") != "meters" ||
        it->value("angle", "radians") != "radians") {
      Reader::Fail("$.units", "only meters and radians are supported");
    }
  }
  Scene scene;
  const json& panos =
      Reader::Array(Reader::Field(doc, "$", "panoramas"), "$.panoramas");
  for (size_t i = 0; i < panos.size(); ++i) {
    scene.panoramas.push_back(
        PanoramaFromJson(panos[i], "$.panoramas[" + std::to_string(i) + "]"));
  }
  if (auto it = doc.find("gt_floorplan"); it != doc.end() && !it->is_null()) {
    std::vector<Polygon> rooms;
    const json& arr = Reader::Array(*it, "$.gt_floorplan");
    for (size_t r = 0; r < arr.size(); ++r) {
      rooms.push_back(
          Reader::Poly(arr[r], "$.gt_floorplan[" + std::to_string(r) + "]"));
    }
    scene.gt_floorplan = std::move(rooms);
  }
  ValidateScene(scene);
  return scene;
}

void SaveScene(const Scene& scene, const std::filesystem::path& path) {
  ValidateScene(scene);
  WriteFileAtomic(path, SceneToString(scene));
}

Scene LoadScene(const std::filesystem::path& path) {
  return SceneFromString(ReadFile(path));
}

}  // namespace floorstitch
