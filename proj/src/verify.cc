#include "floorstitch/verify.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "floorstitch/errors.h"

namespace floorstitch {

void VerifierConfig::Validate() const {
  if (!(accept_threshold >= 0.0)) {
    throw ConfigError("accept_threshold must be non-negative");
  }
  if (!(rot_tol_door_window > 0.0 && rot_tol_opening > 0.0 &&
        trans_tol_linf > 0.0)) {
    throw ConfigError("verifier tolerances must be positive");
  }
  if (!(xcorr_threshold >= 0.0)) {
    throw ConfigError("xcorr_threshold must be non-negative");
  }
}

VerifierDecision OracleVerify(const AlignmentHypothesis& h, const Pose2& gt_i,
                              const Pose2& gt_j, double camera_height,
                              const VerifierConfig& config) {
  if (!(camera_height > 0.0)) {
    throw ConfigError("camera height must be positive");
  }
  const Pose2 gt = Between(gt_i, gt_j);
  const double rot_err = std::abs(WrapAngle(h.i_T_j.theta() - gt.theta()));
  const double rot_tol = h.kind == WdoKind::kOpening ? config.rot_tol_opening
                                                     : config.rot_tol_door_window;
  const Vec2 dt = (h.i_T_j.translation() - gt.translation()) / camera_height;
  const double trans_err = dt.cwiseAbs().maxCoeff();
  VerifierDecision d;
  d.source = VerifierSource::kOracle;
  d.score = (rot_err < rot_tol && trans_err < config.trans_tol_linf) ? 1.0 : 0.0;
  d.accept = d.score >= config.accept_threshold;
  return d;
}

BevPair RenderBevPair(const PanoramaRecord& pano, const TextureFn& floor,
                      const TextureFn& ceiling, const BevConfig& config) {
  return {Densify(RenderBev(pano, BevSurface::kFloor, floor, config),
                  config.kernel_size),
          Densify(RenderBev(pano, BevSurface::kCeiling, ceiling, config),
                  config.kernel_size)};
}

namespace {

struct Moments {
  double n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  void Add(double a, double b) {
    n += 1;
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
};

void Gather(const DenseBev& from, const DenseBev& onto,
            const Pose2& from_to_onto, bool from_is_a, Moments* m) {
  const BevGrid& g = from.grid;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const size_t idx = g.Index(r, c);
      if (!g.occupied[idx] || !from.mask.reliable[idx]) continue;
      const auto cell = onto.grid.CellOf(from_to_onto * g.CellCenter(r, c));
      if (!cell) continue;
      const size_t jdx = onto.grid.Index(cell->first, cell->second);
      if (!onto.grid.occupied[jdx] || !onto.mask.reliable[jdx]) continue;
      const double v_from = g.intensity[idx];
      const double v_onto = onto.grid.intensity[jdx];
      if (from_is_a) {
        m->Add(v_from, v_onto);
      } else {
        m->Add(v_onto, v_from);
      }
    }
  }
}

}  // namespace

double SurfaceCorrelation(const DenseBev& a, const DenseBev& b,
                          const Pose2& i_T_j, size_t min_overlap) {
  Moments m;
  Gather(a, b, i_T_j.Inverse(), true, &m);
  Gather(b, a, i_T_j, false, &m);
  if (m.n < static_cast<double>(std::max<size_t>(min_overlap, 2))) return 0.0;
  const double cov = m.sab - m.sa * m.sb / m.n;
  const double va = m.saa - m.sa * m.sa / m.n;
  const double vb = m.sbb - m.sb * m.sb / m.n;
  if (va <= 1e-12 || vb <= 1e-12) return 0.0;
  return std::clamp(cov / std::sqrt(va * vb), 0.0, 1.0);
}

VerifierDecision XcorrVerify(const AlignmentHypothesis& h, const BevPair& bev_i,
                             const BevPair& bev_j, const VerifierConfig& config) {
  VerifierDecision d;
  d.source = VerifierSource::kXcorr;
  d.score = 0.5 * (SurfaceCorrelation(bev_i.floor, bev_j.floor, h.i_T_j,
                                      config.xcorr_min_overlap) +
                   SurfaceCorrelation(bev_i.ceiling, bev_j.ceiling, h.i_T_j,
                                      config.xcorr_min_overlap));
  d.accept = d.score >= config.xcorr_threshold;
  return d;
}

OracleVerifier::OracleVerifier(const Scene& scene, VerifierConfig config)
    : scene_(scene), config_(config) {
  config_.Validate();
  for (const auto& pano : scene.panoramas) {
    if (!pano.gt_pose) {
      throw MissingGroundTruthError("oracle verifier needs gt_pose for panorama " +
                                    std::to_string(pano.id));
    }
  }
}

VerifierDecision OracleVerifier::Verify(const AlignmentHypothesis& h) const {
  const PanoramaRecord& a = scene_.Panorama(h.pano_i);
  const PanoramaRecord& b = scene_.Panorama(h.pano_j);
  return OracleVerify(h, *a.gt_pose, *b.gt_pose, a.camera_height, config_);
}

XcorrVerifier::XcorrVerifier(const Scene& scene, VerifierConfig config,
                             const BevConfig& bev_config, uint64_t texture_seed)
    : config_(config) {
  config_.Validate();
  const TextureFn floor = ProceduralTexture(BevSurface::kFloor, texture_seed);
  const TextureFn ceiling = ProceduralTexture(BevSurface::kCeiling, texture_seed);
  for (const auto& pano : scene.panoramas) {
    if (!pano.gt_pose) {
      throw MissingGroundTruthError(
          "procedural textures need gt_pose for panorama " +
          std::to_string(pano.id));
    }
    ids_.push_back(pano.id);
    bevs_.push_back(RenderBevPair(pano, floor, ceiling, bev_config));
  }
}

const BevPair& XcorrVerifier::Bev(int pano_id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), pano_id);
  if (it == ids_.end()) {
    throw Error("no rendered BEV for panorama " + std::to_string(pano_id));
  }
  return bevs_[it - ids_.begin()];
}

VerifierDecision XcorrVerifier::Verify(const AlignmentHypothesis& h) const {
  return XcorrVerify(h, Bev(h.pano_i), Bev(h.pano_j), config_);
}

std::vector<ScoredHypothesis> VerifyAll(const std::vector<HypothesisSet>& sets,
                                        const Verifier& verifier,
                                        unsigned num_threads) {
  std::vector<const AlignmentHypothesis*> flat;
  for (const auto& set : sets) {
    for (const auto& h : set.hypotheses) flat.push_back(&h);
  }
  std::vector<VerifierDecision> decisions(flat.size());
  if (num_threads == 0) num_threads = std::max(1u, std::thread::hardware_concurrency());
  num_threads = std::min<unsigned>(num_threads, std::max<size_t>(flat.size(), 1));

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= flat.size() || failed) return;
      try {
        decisions[i] = verifier.Verify(*flat[i]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  if (num_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < num_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ScoredHypothesis> accepted;
  for (size_t i = 0; i < flat.size(); ++i) {
    if (decisions[i].accept) accepted.push_back({*flat[i], decisions[i]});
  }
  return accepted;
}

}  // namespace floorstitch
