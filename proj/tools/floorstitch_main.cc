// Command-line front end: generate | reconstruct | evaluate | render.
//
// Exit codes: 0 success, 1 usage or config error, 2 input/output or parse
// error, 3 numerical failure.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floorstitch/bev.h"
#include "floorstitch/errors.h"
#include "floorstitch/image_io.h"
#include "floorstitch/io_util.h"
#include "floorstitch/pipeline.h"
#include "floorstitch/scene.h"

namespace fs = floorstitch;

namespace {

struct GenerateArgs {
  fs::SyntheticHomeConfig home;
  fs::NoiseSpec noise;
  double sigma_vanishing_deg = 0.0;
  bool manhattan = false;
  std::string out;
};

struct ReconstructArgs {
  std::string scene;
  std::string out;
  std::string config;
  std::vector<std::string> overrides;
  std::string mode;
  std::string verifier;
  bool no_axis_align = false;
  int threads = -1;
  bool print_config = false;
};

struct EvaluateArgs {
  std::string scene;
  std::string recon;
  std::string out;
};

struct RenderArgs {
  std::string scene;
  int pano = 0;
  std::string surface = "floor";
  std::string out;
  std::string mask_out;
  bool dense = false;
  uint64_t texture_seed = 0;
  double resolution = 0.02;
  double extent = 10.0;
};

int RunGenerate(const GenerateArgs& args) {
  fs::SyntheticHomeConfig home = args.home;
  home.non_manhattan = !args.manhattan;
  fs::Scene scene = fs::GenerateSyntheticHome(home);
  fs::NoiseSpec noise = args.noise;
  noise.sigma_vanishing = fs::DegToRad(args.sigma_vanishing_deg);
  if (noise.sigma_vertex > 0 || noise.sigma_wdo_endpoint > 0 ||
      noise.sigma_vanishing > 0 || noise.wdo_drop_prob > 0) {
    scene = fs::Perturb(scene, noise);
  }
  fs::SaveScene(scene, args.out);

  std::map<fs::WdoKind, int> counts;
  for (const auto& p : scene.panoramas) {
    for (const auto& w : p.wdos) ++counts[w.kind];
  }
  std::cout << "rooms " << (scene.gt_floorplan ? scene.gt_floorplan->size() : 0)
            << "\npanoramas " << scene.panoramas.size() << "\nwindows "
            << counts[fs::WdoKind::kWindow] << "\ndoors " << counts[fs::WdoKind::kDoor]
            << "\nopenings " << counts[fs::WdoKind::kOpening] << "\nwrote " << args.out
            << "\n";
  return 0;
}

fs::PipelineConfig BuildConfig(const ReconstructArgs& args) {
  fs::PipelineConfig config;
  if (!args.config.empty()) config = fs::LoadConfig(args.config);
  if (!args.mode.empty()) fs::ApplyOverride(&config, "aggregation=" + args.mode);
  if (!args.verifier.empty()) fs::ApplyOverride(&config, "verifier.kind=" + args.verifier);
  if (args.no_axis_align) fs::ApplyOverride(&config, "hypotheses.axis_align=false");
  if (args.threads >= 0) {
    fs::ApplyOverride(&config, "threads=" + std::to_string(args.threads));
  }
  for (const auto& o : args.overrides) fs::ApplyOverride(&config, o);
  return config;
}

int RunReconstruct(const ReconstructArgs& args) {
  const fs::PipelineConfig config = BuildConfig(args);
  if (args.print_config) {
    std::cout << fs::ConfigToString(config);
    return 0;
  }
  if (args.scene.empty() || args.out.empty()) {
    throw fs::ConfigError("--scene and --out are required");
  }
  const fs::Scene scene = fs::LoadScene(args.scene);
  const fs::Reconstruction rec = fs::Reconstruct(scene, config);
  fs::WriteReconstruction(args.out, scene, rec, config);
  if (rec.status != fs::kStatusOk) {
    std::cerr << "warning: largest connected component has no edges; "
                 "floorplan is empty (status "
              << rec.status << ")\n";
  }
  std::cout << "status " << rec.status << "\nhypotheses " << rec.num_hypotheses
            << "\naccepted " << rec.num_accepted << "\nlocalized " << rec.poses.size()
            << "/" << scene.panoramas.size() << "\ncost " << rec.init_cost << " -> "
            << rec.final_cost << "\nconfig_hash " << fs::ConfigHash(config)
            << "\nwrote " << args.out << "\n";
  return 0;
}

int RunEvaluate(const EvaluateArgs& args) {
  const fs::Scene scene = fs::LoadScene(args.scene);
  const fs::SavedReconstruction rec = fs::LoadReconstruction(args.recon);
  const std::string report = fs::ReportToString(fs::Evaluate(scene, rec));
  const std::string out =
      args.out.empty() ? (std::filesystem::path(args.recon) / "report.json").string()
                       : args.out;
  fs::WriteFileAtomic(out, report);
  std::cout << report;
  return 0;
}

int RunRender(const RenderArgs& args) {
  const fs::Scene scene = fs::LoadScene(args.scene);
  const fs::PanoramaRecord& pano = scene.Panorama(args.pano);
  fs::BevConfig bev;
  bev.resolution = args.resolution;
  bev.extent = args.extent;
  if (!(bev.resolution > 0.0 && bev.extent > bev.resolution)) {
    throw fs::ConfigError("resolution and extent must be positive");
  }
  const fs::BevSurface surface =
      args.surface == "ceiling" ? fs::BevSurface::kCeiling : fs::BevSurface::kFloor;
  const fs::BevGrid sparse =
      fs::RenderBev(pano, surface, fs::ProceduralTexture(surface, args.texture_seed), bev);
  if (args.dense || !args.mask_out.empty()) {
    const fs::DenseBev dense = fs::Densify(sparse, bev.kernel_size);
    fs::WriteFileAtomic(args.out, fs::BevToPgm(args.dense ? dense.grid : sparse));
    if (!args.mask_out.empty()) fs::WriteFileAtomic(args.mask_out, fs::MaskToPgm(dense.mask));
  } else {
    fs::WriteFileAtomic(args.out, fs::BevToPgm(sparse));
  }
  std::cout << "occupied " << sparse.OccupiedCount() << " of "
            << sparse.rows * sparse.cols << " cells\nwrote " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floorstitch: panorama layout stitching and evaluation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic home scene");
  g->add_option("-o,--out", gen.out, "Output scene path")->required();
  g->add_option("--rooms", gen.home.n_rooms, "Number of rooms")->capture_default_str();
  g->add_option("--min-panos", gen.home.min_panos_per_room)->capture_default_str();
  g->add_option("--max-panos", gen.home.max_panos_per_room)->capture_default_str();
  g->add_option("--seed", gen.home.seed)->capture_default_str();
  g->add_flag("--manhattan", gen.manhattan, "Disable chamfered corners");
  g->add_option("--split-threshold", gen.home.split_threshold)->capture_default_str();
  g->add_option("--extra-door-prob", gen.home.extra_door_prob)->capture_default_str();
  g->add_option("--sigma-vertex", gen.noise.sigma_vertex, "Contour vertex noise (m)");
  g->add_option("--sigma-wdo", gen.noise.sigma_wdo_endpoint, "W/D/O endpoint noise (m)");
  g->add_option("--sigma-vanishing-deg", gen.sigma_vanishing_deg);
  g->add_option("--drop-prob", gen.noise.wdo_drop_prob, "W/D/O drop probability");
  g->add_option("--noise-seed", gen.noise.seed);

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct", "Stitch a floorplan from a scene");
  r->add_option("-s,--scene", rec.scene, "Scene file");
  r->add_option("-o,--out", rec.out, "Output directory");
  r->add_option("-c,--config", rec.config, "Pipeline config JSON");
  r->add_option("--set", rec.overrides, "Config override key=value (repeatable)");
  r->add_option("--mode", rec.mode, "spanning_tree or pgo");
  r->add_option("--verifier", rec.verifier, "oracle or xcorr");
  r->add_flag("--no-axis-align", rec.no_axis_align);
  r->add_option("--threads", rec.threads, "Worker threads (0 = all cores)");
  r->add_flag("--print-config", rec.print_config, "Print the effective config and exit");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score a reconstruction against ground truth");
  e->add_option("-s,--scene", ev.scene, "Scene file with ground truth")->required();
  e->add_option("-r,--recon", ev.recon, "Reconstruction directory")->required();
  e->add_option("-o,--out", ev.out, "Report path (default <recon>/report.json)");

  RenderArgs rd;
  auto* v = app.add_subcommand("render", "Render one panorama's BEV texture as PGM");
  v->add_option("-s,--scene", rd.scene, "Scene file")->required();
  v->add_option("--pano", rd.pano, "Panorama id")->required();
  v->add_option("--surface", rd.surface)
      ->check(CLI::IsMember({"floor", "ceiling"}))
      ->capture_default_str();
  v->add_option("-o,--out", rd.out, "Output PGM")->required();
  v->add_option("--mask", rd.mask_out, "Also write the reliability mask");
  v->add_flag("--dense", rd.dense, "Write the densified grid");
  v->add_option("--texture-seed", rd.texture_seed);
  v->add_option("--resolution", rd.resolution)->capture_default_str();
  v->add_option("--extent", rd.extent)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (*g) return RunGenerate(gen);
    if (*r) return RunReconstruct(rec);
    if (*e) return RunEvaluate(ev);
    if (*v) return RunRender(rd);
  } catch (const fs::NumericalError& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return 3;
  } catch (const fs::DegenerateInputError& err) {
    std::cerr << "degenerate input: " << err.what() << "\n";
    return 3;
  } catch (const fs::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const fs::IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return 2;
  } catch (const fs::ParseError& err) {
    std::cerr << "parse error: " << err.what() << "\n";
    return 2;
  } catch (const fs::ValidationError& err) {
    std::cerr << "invalid input: " << err.what() << "\n";
    return 2;
  } catch (const fs::MissingGroundTruthError& err) {
    std::cerr << "missing ground truth: " << err.what() << "\n";
    return 2;
  } catch (const fs::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
