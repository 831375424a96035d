#include "floorstitch/scene.h"

#include <filesystem>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "floorstitch/errors.h"
#include "floorstitch/io_util.h"
#include "test_util.h"

namespace floorstitch {
namespace {

constexpr const char* kMinimal = R"({
  "format": "floorstitch-scene",
  "version": 1,
  "units": {"length": "meters", "angle": "radians"},
  "panoramas": [
    {
      "id": 3,
      "camera_height": 1.5,
      "vanishing_angle": 0.0,
      "gt_pose": null,
      "contour": {
        "vertices": [[-1, -1], [2, -1], [2, 2], [-1, 2]],
        "confidence": [1, 1, 0.5, 1]
      },
      "wdos": [
        {"kind": "window", "e1": [0, -1], "e2": [1, -1],
         "interior_normal": [0, 1], "confidence": 0.9}
      ]
    }
  ]
})";

TEST(LoadScene, MinimalOneRoom) {
  const Scene s = SceneFromString(kMinimal);
  ASSERT_EQ(s.panoramas.size(), 1u);
  const PanoramaRecord& p = s.panoramas[0];
  EXPECT_EQ(p.id, 3);
  EXPECT_FALSE(p.gt_pose);
  EXPECT_EQ(p.contour.vertices.size(), 4u);
  EXPECT_EQ(p.contour.confidence[2], 0.5);
  ASSERT_EQ(p.wdos.size(), 1u);
  EXPECT_EQ(p.wdos[0].kind, WdoKind::kWindow);
  EXPECT_DOUBLE_EQ(p.wdos[0].Width(), 1.0);
  EXPECT_FALSE(s.gt_floorplan);
}

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const size_t pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

TEST(LoadScene, DuplicateIdsRejected) {
  Scene s = SceneFromString(kMinimal);
  s.panoramas.push_back(s.panoramas[0]);
  EXPECT_THROW(SceneFromString(SceneToString(s)), ValidationError);
}

TEST(LoadScene, SyntaxErrorCarriesLine) {
  const std::string bad = Replace(kMinimal, "\"id\": 3,", "\"id\": 3,,");
  try {
    SceneFromString(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7);
  }
}

TEST(LoadScene, SchemaErrorNamesField) {
  const std::string bad = Replace(kMinimal, "\"camera_height\": 1.5", "\"camera_height\": \"high\"");
  try {
    SceneFromString(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("panoramas[0].camera_height"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "\"window\"", "\"skylight\"")), ParseError);
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "\"version\": 1", "\"version\": 9")),
               ParseError);
}

TEST(LoadScene, InvariantViolations) {
  // Camera outside its contour.
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "[[-1, -1], [2, -1], [2, 2], [-1, 2]]",
                                       "[[1, 1], [2, 1], [2, 2], [1, 2]]")),
               ValidationError);
  // Self-intersecting contour.
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "[[-1, -1], [2, -1], [2, 2], [-1, 2]]",
                                       "[[-1, -1], [2, 2], [2, -1], [-1, 2]]")),
               ValidationError);
  // Normal not perpendicular.
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "\"interior_normal\": [0, 1]",
                                       "\"interior_normal\": [0.6, 0.8]")),
               ValidationError);
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "\"camera_height\": 1.5",
                                       "\"camera_height\": 0")),
               ValidationError);
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "\"vanishing_angle\": 0.0",
                                       "\"vanishing_angle\": 1.6")),
               ValidationError);
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "[1, 1, 0.5, 1]", "[1, 1, 1]")),
               ValidationError);
  EXPECT_THROW(SceneFromString(Replace(kMinimal, "\"e2\": [1, -1]", "\"e2\": [0, -1]")),
               ValidationError);
}

TEST(SaveScene, RoundTripThroughFile) {
  SyntheticHomeConfig cfg;
  cfg.n_rooms = 6;
  cfg.max_panos_per_room = 3;
  cfg.seed = 21;
  const Scene s = GenerateSyntheticHome(cfg);
  const auto path = std::filesystem::temp_directory_path() / "floorstitch_roundtrip.json";
  SaveScene(s, path);
  const Scene back = LoadScene(path);
  EXPECT_EQ(back, s);
  EXPECT_EQ(SceneToString(back), SceneToString(s));
  std::filesystem::remove(path);
  EXPECT_THROW(LoadScene(path), IoError);
}

TEST(Generate, SingleRoom) {
  SyntheticHomeConfig cfg;
  cfg.n_rooms = 1;
  const Scene s = GenerateSyntheticHome(cfg);
  ASSERT_EQ(s.panoramas.size(), 1u);
  int windows = 0, doors = 0;
  for (const auto& w : s.panoramas[0].wdos) {
    windows += w.kind == WdoKind::kWindow;
    doors += w.kind == WdoKind::kDoor;
  }
  EXPECT_GE(windows, 1);
  EXPECT_EQ(doors, 0);
  ASSERT_TRUE(s.gt_floorplan);
  EXPECT_EQ(s.gt_floorplan->size(), 1u);
}

TEST(Generate, RejectsBadConfig) {
  SyntheticHomeConfig cfg;
  cfg.n_rooms = 0;
  EXPECT_THROW(GenerateSyntheticHome(cfg), ConfigError);
  cfg.n_rooms = 3;
  cfg.min_panos_per_room = 2;
  cfg.max_panos_per_room = 1;
  EXPECT_THROW(GenerateSyntheticHome(cfg), ConfigError);
}

std::pair<Vec2, Vec2> WorldSegment(const PanoramaRecord& p, const WdoDetection& d) {
  return {*p.gt_pose * d.e1, *p.gt_pose * d.e2};
}

bool SameSegment(const std::pair<Vec2, Vec2>& a, const std::pair<Vec2, Vec2>& b,
                 double tol) {
  return ((a.first - b.first).norm() < tol && (a.second - b.second).norm() < tol) ||
         ((a.first - b.second).norm() < tol && (a.second - b.first).norm() < tol);
}

TEST(Generate, TwoRoomsShareOneDoor) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticHomeConfig cfg;
    cfg.n_rooms = 2;
    cfg.seed = seed;
    const Scene s = GenerateSyntheticHome(cfg);
    ASSERT_EQ(s.panoramas.size(), 2u);
    std::vector<std::pair<Vec2, Vec2>> doors[2];
    for (int k = 0; k < 2; ++k) {
      for (const auto& d : s.panoramas[k].wdos) {
        if (d.kind == WdoKind::kDoor) doors[k].push_back(WorldSegment(s.panoramas[k], d));
      }
    }
    ASSERT_EQ(doors[0].size(), 1u) << "seed " << seed;
    ASSERT_EQ(doors[1].size(), 1u) << "seed " << seed;
    EXPECT_TRUE(SameSegment(doors[0][0], doors[1][0], 1e-9)) << "seed " << seed;
  }
}

TEST(Generate, Deterministic) {
  SyntheticHomeConfig cfg;
  cfg.n_rooms = 9;
  cfg.max_panos_per_room = 3;
  cfg.seed = 77;
  EXPECT_EQ(SceneToString(GenerateSyntheticHome(cfg)),
            SceneToString(GenerateSyntheticHome(cfg)));
  SyntheticHomeConfig other = cfg;
  other.seed = 78;
  EXPECT_NE(SceneToString(GenerateSyntheticHome(cfg)),
            SceneToString(GenerateSyntheticHome(other)));
}

class GeneratedHome : public ::testing::TestWithParam<uint64_t> {
 protected:
  Scene Make() const {
    SyntheticHomeConfig cfg;
    cfg.n_rooms = 5 + static_cast<int>(GetParam() % 8);
    cfg.min_panos_per_room = 1;
    cfg.max_panos_per_room = 3;
    cfg.seed = GetParam();
    return GenerateSyntheticHome(cfg);
  }
};

TEST_P(GeneratedHome, RoomCountAndValidity) {
  const Scene s = Make();
  EXPECT_NO_THROW(ValidateScene(s));
  ASSERT_TRUE(s.gt_floorplan);
  EXPECT_EQ(static_cast<int>(s.gt_floorplan->size()), 5 + static_cast<int>(GetParam() % 8));
  std::set<int> rooms_with_panos;
  for (const auto& p : s.panoramas) {
    ASSERT_TRUE(p.gt_pose);
    ASSERT_TRUE(p.gt_room);
    rooms_with_panos.insert(*p.gt_room);
    // The contour is the gt room seen from the camera.
    const Polygon& room = (*s.gt_floorplan)[*p.gt_room];
    const Polygon world = TransformPolygon(*p.gt_pose, p.contour.vertices);
    ASSERT_EQ(world.size(), room.size());
    for (size_t k = 0; k < room.size(); ++k) EXPECT_LT((world[k] - room[k]).norm(), 1e-9);
    EXPECT_GE(p.camera_height, 1.0);
  }
  EXPECT_EQ(rooms_with_panos.size(), s.gt_floorplan->size());
}

TEST_P(GeneratedHome, RoomsAreInteriorDisjoint) {
  const Scene s = Make();
  const auto& rooms = *s.gt_floorplan;
  Rng rng(GetParam());
  Vec2 lo = Vec2::Constant(1e9), hi = Vec2::Constant(-1e9);
  for (const auto& r : rooms) {
    lo = lo.cwiseMin(Bounds(r).min);
    hi = hi.cwiseMax(Bounds(r).max);
  }
  double area_sum = 0.0;
  for (const auto& r : rooms) area_sum += Area(r);
  int inside_any = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const Vec2 p(rng.Uniform(lo.x(), hi.x()), rng.Uniform(lo.y(), hi.y()));
    int count = 0;
    for (const auto& r : rooms) count += PointInPolygon(r, p);
    EXPECT_LE(count, 1);
    inside_any += count > 0;
  }
  // Monte-Carlo area of the union matches the sum of areas.
  const double box = (hi - lo).prod();
  EXPECT_NEAR(box * inside_any / n, area_sum, 0.05 * area_sum);
}

TEST_P(GeneratedHome, DoorsConnectAllRooms) {
  const Scene s = Make();
  // Doors and openings seen from two different rooms link those rooms.
  std::vector<std::tuple<int, std::pair<Vec2, Vec2>>> links;
  for (const auto& p : s.panoramas) {
    for (const auto& d : p.wdos) {
      if (d.kind == WdoKind::kWindow) continue;
      links.emplace_back(*p.gt_room, WorldSegment(p, d));
    }
  }
  const int n = static_cast<int>(s.gt_floorplan->size());
  std::vector<int> parent(n);
  for (int k = 0; k < n; ++k) parent[k] = k;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (size_t a = 0; a < links.size(); ++a) {
    for (size_t b = 0; b < links.size(); ++b) {
      if (std::get<0>(links[a]) != std::get<0>(links[b]) &&
          SameSegment(std::get<1>(links[a]), std::get<1>(links[b]), 1e-9)) {
        parent[find(std::get<0>(links[a]))] = find(std::get<0>(links[b]));
      }
    }
  }
  for (int k = 0; k < n; ++k) EXPECT_EQ(find(k), find(0));
}

TEST_P(GeneratedHome, NormalsFaceTheCamera) {
  const Scene s = Make();
  for (const auto& p : s.panoramas) {
    for (const auto& d : p.wdos) {
      EXPECT_NEAR(d.interior_normal.norm(), 1.0, 1e-12);
      EXPECT_NEAR(d.interior_normal.dot(d.e2 - d.e1), 0.0, 1e-9);
      EXPECT_GT(d.interior_normal.dot(-d.Center()), 0.0);
    }
    EXPECT_GE(p.vanishing_angle, 0.0);
    EXPECT_LT(p.vanishing_angle, kPi / 2);
  }
}

TEST_P(GeneratedHome, SplitRoomsUseOpenings) {
  const Scene s = Make();
  // Every opening is seen from both sides.
  for (const auto& p : s.panoramas) {
    for (const auto& d : p.wdos) {
      if (d.kind != WdoKind::kOpening) continue;
      bool seen_from_other_room = false;
      for (const auto& q : s.panoramas) {
        if (q.gt_room == p.gt_room) continue;
        for (const auto& e : q.wdos) {
          seen_from_other_room |= e.kind == WdoKind::kOpening &&
                                  SameSegment(WorldSegment(p, d), WorldSegment(q, e), 1e-9);
        }
      }
      EXPECT_TRUE(seen_from_other_room);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, GeneratedHome, ::testing::Range<uint64_t>(0, 12));

Scene SampleHome(uint64_t seed = 5) {
  SyntheticHomeConfig cfg;
  cfg.n_rooms = 6;
  cfg.max_panos_per_room = 2;
  cfg.seed = seed;
  return GenerateSyntheticHome(cfg);
}

TEST(Perturb, ZeroSpecIsIdentity) {
  const Scene s = SampleHome();
  EXPECT_EQ(Perturb(s, NoiseSpec{}), s);
}

TEST(Perturb, DropAll) {
  NoiseSpec spec;
  spec.wdo_drop_prob = 1.0;
  for (const auto& p : Perturb(SampleHome(), spec).panoramas) EXPECT_TRUE(p.wdos.empty());
}

TEST(Perturb, EndpointNoiseHasRequestedSpread) {
  const Scene s = SampleHome();
  std::vector<double> devs;
  for (uint64_t seed = 0; devs.size() < 2000; ++seed) {
    NoiseSpec spec;
    spec.sigma_wdo_endpoint = 0.05;
    spec.seed = seed;
    const Scene noisy = Perturb(s, spec);
    for (size_t i = 0; i < s.panoramas.size(); ++i) {
      for (size_t k = 0; k < s.panoramas[i].wdos.size(); ++k) {
        const Vec2 d = noisy.panoramas[i].wdos[k].e1 - s.panoramas[i].wdos[k].e1;
        devs.push_back(d.x());
        devs.push_back(d.y());
      }
    }
  }
  double mean = 0.0;
  for (double d : devs) mean += d;
  mean /= devs.size();
  double var = 0.0;
  for (double d : devs) var += (d - mean) * (d - mean);
  const double sd = std::sqrt(var / (devs.size() - 1));
  EXPECT_GE(sd, 0.045);
  EXPECT_LE(sd, 0.055);
}

TEST(Perturb, PreservesStructureAndGroundTruth) {
  const Scene s = SampleHome(9);
  NoiseSpec spec;
  spec.sigma_vertex = 0.02;
  spec.sigma_wdo_endpoint = 0.03;
  spec.sigma_vanishing = DegToRad(2);
  spec.seed = 4;
  const Scene noisy = Perturb(s, spec);
  ASSERT_EQ(noisy.panoramas.size(), s.panoramas.size());
  EXPECT_EQ(noisy.gt_floorplan, s.gt_floorplan);
  for (size_t i = 0; i < s.panoramas.size(); ++i) {
    const auto& a = s.panoramas[i];
    const auto& b = noisy.panoramas[i];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.gt_pose, b.gt_pose);
    ASSERT_EQ(a.wdos.size(), b.wdos.size());
    for (size_t k = 0; k < a.wdos.size(); ++k) {
      EXPECT_EQ(a.wdos[k].kind, b.wdos[k].kind);
      EXPECT_GT(a.wdos[k].interior_normal.dot(b.wdos[k].interior_normal), 0.9);
    }
    EXPECT_GE(b.vanishing_angle, 0.0);
    EXPECT_LT(b.vanishing_angle, kPi / 2);
  }
  EXPECT_EQ(Perturb(s, spec), noisy);
}

TEST(Perturb, RejectsBadSpec) {
  NoiseSpec spec;
  spec.wdo_drop_prob = 1.5;
  EXPECT_THROW(Perturb(SampleHome(), spec), ConfigError);
  spec.wdo_drop_prob = 0.0;
  spec.sigma_vertex = -1.0;
  EXPECT_THROW(Perturb(SampleHome(), spec), ConfigError);
}

}  // namespace
}  // namespace floorstitch
