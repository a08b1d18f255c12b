// Command-line front end: dataset synthesis, focal-length warping, depth
// metric evaluation, receptive-field maps and focal/depth ambiguity demos.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <vfl/vfl.hpp>

namespace {

double parse_rot_deg(const std::string& s, bool& uniform) {
  if (s == "uniform") {
    uniform = true;
    return 0;
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw vfl::InputError("--rot-deg expects a number or \"uniform\", got: " + s);
  }
}

struct TransformArgs {
  std::string config_path;
  vfl::TransformConfig config;
  std::string rot_deg_str = "0";
  std::string preset;
  std::string presets_file = std::string(VFL_DATA_DIR) + "/presets.json";
};

int run_transform_cmd(TransformArgs& args, bool flags_used) {
  vfl::TransformConfig config;
  if (!args.config_path.empty()) {
    if (flags_used)
      throw vfl::InputError("--config cannot be combined with other transform options");
    std::ifstream in(args.config_path);
    if (!in) throw vfl::IoError(vfl::IoError::Kind::unreadable, "cannot open " + args.config_path);
    nlohmann::json j;
    in >> j;
    config = vfl::TransformConfig::from_json(j);
  } else {
    config = args.config;
    config.rot_deg = parse_rot_deg(args.rot_deg_str, config.rot_uniform);
    if (!args.preset.empty())
      config.source_focal = vfl::Presets::load(args.presets_file).intrinsics.at(args.preset).f;
    config.validate();
  }

  const vfl::DatasetManifest manifest = vfl::run_transform(config);
  manifest.write(config.output_dir + "/manifest.json");

  const int failed = manifest.failed_count();
  std::cout << "wrote " << (manifest.entries.size() - static_cast<std::size_t>(failed))
            << " of " << manifest.entries.size() << " outputs to " << config.output_dir << "\n";
  for (const vfl::ManifestEntry& e : manifest.entries)
    if (!e.error.empty())
      std::cerr << "failed: " << e.source_path << " @ f=" << vfl::format_compact(e.focal_px)
                << ": " << e.error << "\n";
  return failed > 0 ? 1 : 0;
}

struct EvalArgs {
  std::string pred_dir;
  std::string gt_dir;
  double cap = 0;
  std::string preset;
  std::string presets_file = std::string(VFL_DATA_DIR) + "/presets.json";
  double depth_scale = 1000;
  std::string json_out;
};

int run_eval_cmd(const EvalArgs& args, bool cap_given) {
  std::optional<double> cap;
  if (!args.preset.empty()) {
    const vfl::Presets presets = vfl::Presets::load(args.presets_file);
    if (!presets.eval_caps_m.count(args.preset))
      throw vfl::InputError("no evaluation cap named " + args.preset + " in " + args.presets_file);
    cap = presets.eval_caps_m.at(args.preset);
  }
  if (cap_given) cap = args.cap;

  const vfl::EvalResult result = vfl::run_eval(args.pred_dir, args.gt_dir, cap, args.depth_scale);
  std::cout << result.table();
  for (const std::string& name : result.unmatched_pred)
    std::cerr << "only in prediction directory: " << name << "\n";
  for (const std::string& name : result.unmatched_gt)
    std::cerr << "only in reference directory: " << name << "\n";

  if (!args.json_out.empty()) {
    if (args.json_out == "-") {
      std::cout << result.to_json().dump(2) << "\n";
    } else {
      std::ofstream out(args.json_out);
      if (!out) throw vfl::IoError(vfl::IoError::Kind::unwritable, "cannot write " + args.json_out);
      out << result.to_json().dump(2) << "\n";
    }
  }

  int bad = 0;
  for (const vfl::FrameEval& f : result.frames)
    if (!f.ok) {
      std::cerr << "failed: " << f.name << ": " << f.error << "\n";
      ++bad;
    }
  return bad > 0 ? 1 : 0;
}

struct RfArgs {
  std::string arch_path;
  int out_x = -1;
  int out_y = -1;
  std::string csv_out;
  std::string pgm_out;
};

int run_rf_cmd(const RfArgs& args) {
  const vfl::Architecture arch = vfl::Architecture::load(args.arch_path);
  const vfl::PlaneSize out = arch.output_size();
  const int x = args.out_x >= 0 ? args.out_x : out.width / 2;
  const int y = args.out_y >= 0 ? args.out_y : out.height / 2;
  const vfl::CountMap map = vfl::count_map(arch, x, y);

  std::cout << "input  " << arch.input_width << "x" << arch.input_height << "\n"
            << "output " << out.width << "x" << out.height << ", node (" << x << ", " << y
            << ")\n"
            << "support " << map.counts.width() << "x" << map.counts.height() << " anchored at ("
            << map.anchor_x << ", " << map.anchor_y << ")\n"
            << "peak count " << map.max_count() << ", total paths " << map.total() << "\n";

  if (!args.csv_out.empty()) {
    if (args.csv_out == "-") {
      vfl::write_csv(map, std::cout);
    } else {
      std::ofstream out_stream(args.csv_out);
      if (!out_stream)
        throw vfl::IoError(vfl::IoError::Kind::unwritable, "cannot write " + args.csv_out);
      vfl::write_csv(map, out_stream);
    }
  }
  if (!args.pgm_out.empty()) {
    std::ofstream out_stream(args.pgm_out, std::ios::binary);
    if (!out_stream)
      throw vfl::IoError(vfl::IoError::Kind::unwritable, "cannot write " + args.pgm_out);
    vfl::write_pgm(map, out_stream);
  }
  return 0;
}

struct AmbiguityArgs {
  std::string out_dir;
  double f1 = 580;
  double f2 = 700;
  double d1 = 2.0;
  int width = 320;
  int height = 240;
  double texel_size_m = 0.01;
  std::uint64_t seed = 0;
};

int run_ambiguity_cmd(const AmbiguityArgs& args) {
  vfl::PlaneScene scene;
  scene.texel_size_m = args.texel_size_m;
  scene.depth_m = args.d1;

  // Size the texture so the wider of the two views stays on the plane.
  const double q = args.d1 / args.f1;
  const double ex = (args.width / 2.0 + 1) * q + 2 * args.texel_size_m;
  const double ey = (args.height / 2.0 + 1) * q + 2 * args.texel_size_m;
  const int tw = static_cast<int>(std::ceil(2 * ex / args.texel_size_m)) + 2;
  const int th = static_cast<int>(std::ceil(2 * ey / args.texel_size_m)) + 2;
  scene.texture = vfl::Image<vfl::Rgb8>(tw, th);
  vfl::SplitMix rng(vfl::derive_seed(args.seed, 0, 0xa3b1));
  for (auto& c : scene.texture.pixels())
    c = {static_cast<std::uint8_t>(rng.next_below(256)),
         static_cast<std::uint8_t>(rng.next_below(256)),
         static_cast<std::uint8_t>(rng.next_below(256))};

  const vfl::AmbiguityPair pair =
      vfl::generate_pair(scene, args.f1, args.f2, vfl::Intrinsics::centered(args.f1, args.width,
                                                                            args.height));

  std::filesystem::create_directories(args.out_dir);
  const std::string stem_a = "view_a_f" + vfl::format_compact(args.f1);
  const std::string stem_b = "view_b_f" + vfl::format_compact(args.f2);
  vfl::save_rgbd(pair.frame1, args.out_dir + "/" + stem_a + ".png",
                 args.out_dir + "/" + stem_a + "_depth.png", 1000);
  vfl::save_rgbd(pair.frame2, args.out_dir + "/" + stem_b + ".png",
                 args.out_dir + "/" + stem_b + "_depth.png", 1000);

  nlohmann::json j = pair.record();
  j["files"] = {stem_a + ".png", stem_a + "_depth.png", stem_b + ".png",
                stem_b + "_depth.png"};
  std::ofstream out(args.out_dir + "/pair.json");
  if (!out)
    throw vfl::IoError(vfl::IoError::Kind::unwritable, "cannot write " + args.out_dir +
                                                           "/pair.json");
  out << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct SynthArgs {
  std::string out_dir;
  int count = 10;
  std::uint64_t seed = 0;
  int width = 640;
  int height = 480;
  double depth_scale = 1000;
};

int run_synth_cmd(const SynthArgs& args) {
  const std::vector<std::string> stems = vfl::write_synthetic_corpus(
      args.out_dir, args.count, args.seed, args.width, args.height, args.depth_scale);
  std::cout << "wrote " << stems.size() << " color/depth pairs to " << args.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RGB-D focal-length warping, depth evaluation and analysis toolkit"};
  app.require_subcommand(1);

  TransformArgs transform;
  CLI::App* t = app.add_subcommand(
      "transform", "Warp an RGB-D directory to new focal lengths (with optional small rotations)");
  auto* t_cfg = t->add_option("--config", transform.config_path, "JSON config file");
  auto* t_in = t->add_option("-i,--input-dir", transform.config.input_dir,
                             "directory of <stem>.png + <stem>_depth.png pairs");
  auto* t_out = t->add_option("-o,--output-dir", transform.config.output_dir,
                              "output directory (manifest.json is written here)");
  auto* t_f = t->add_option("--focals", transform.config.focals,
                            "target focal lengths in pixels")
                  ->delimiter(',');
  auto* t_sf = t->add_option("--source-focal", transform.config.source_focal,
                             "focal length the inputs were captured with");
  std::string axis_str = "none";
  auto* t_ax = t->add_option("--rot-axis", axis_str, "rotation axis: none, x or y")
                   ->check(CLI::IsMember({"none", "x", "y"}));
  auto* t_deg = t->add_option("--rot-deg", transform.rot_deg_str,
                              "rotation in degrees (|deg| <= 5) or \"uniform\"");
  auto* t_sh = t->add_flag("--share-rotation", transform.config.share_rotation,
                           "draw one random angle per frame instead of per output");
  auto* t_seed = t->add_option("--seed", transform.config.seed, "random seed");
  auto* t_ds = t->add_option("--depth-scale", transform.config.depth_scale,
                             "stored value = depth in meters * this scale");
  auto* t_w = t->add_option("--workers", transform.config.workers,
                            "worker threads (0 = hardware concurrency)");
  auto* t_p = t->add_option("--preset", transform.preset,
                            "take the source focal length from a named preset");
  t->add_option("--presets-file", transform.presets_file, "presets JSON file");

  EvalArgs eval;
  CLI::App* e = app.add_subcommand("eval", "Compare two directories of 16-bit depth PNGs");
  e->add_option("-p,--pred-dir", eval.pred_dir, "predicted depth maps")->required();
  e->add_option("-g,--gt-dir", eval.gt_dir, "reference depth maps")->required();
  auto* e_cap = e->add_option("--cap", eval.cap, "ignore reference depths above this (meters)");
  e->add_option("--preset", eval.preset, "take the cap from a named preset");
  e->add_option("--presets-file", eval.presets_file, "presets JSON file");
  e->add_option("--depth-scale", eval.depth_scale, "stored value = depth in meters * this scale");
  e->add_option("--json", eval.json_out, "write the full JSON report here (\"-\" = stdout)");

  RfArgs rf;
  CLI::App* r = app.add_subcommand(
      "rf", "Per-pixel usage counts of one output node of a conv/pool stack");
  r->add_option("--arch", rf.arch_path, "architecture JSON file")->required();
  r->add_option("--out-x", rf.out_x, "output node x (default: center)");
  r->add_option("--out-y", rf.out_y, "output node y (default: center)");
  r->add_option("--csv", rf.csv_out, "write the count grid as CSV (\"-\" = stdout)");
  r->add_option("--pgm", rf.pgm_out, "write the count grid as a normalized PGM image");

  AmbiguityArgs amb;
  CLI::App* a = app.add_subcommand(
      "ambiguity", "Render one plane at two focal/depth pairs that give the same image");
  a->add_option("-o,--out-dir", amb.out_dir, "output directory")->required();
  a->add_option("--f1", amb.f1, "first focal length in pixels");
  a->add_option("--f2", amb.f2, "second focal length in pixels");
  a->add_option("--d1", amb.d1, "plane depth for the first view (meters)");
  a->add_option("--width", amb.width, "image width");
  a->add_option("--height", amb.height, "image height");
  a->add_option("--texel-size", amb.texel_size_m, "texture square size (meters)");
  a->add_option("--seed", amb.seed, "texture seed");

  SynthArgs synth;
  CLI::App* s = app.add_subcommand("synth", "Write a deterministic procedural RGB-D corpus");
  s->add_option("-o,--out-dir", synth.out_dir, "output directory")->required();
  s->add_option("--count", synth.count, "number of frames");
  s->add_option("--seed", synth.seed, "corpus seed");
  s->add_option("--width", synth.width, "frame width");
  s->add_option("--height", synth.height, "frame height");
  s->add_option("--depth-scale", synth.depth_scale,
                "stored value = depth in meters * this scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (t->parsed()) {
      const bool flags_used = t_in->count() || t_out->count() || t_f->count() || t_sf->count() ||
                              t_ax->count() || t_deg->count() || t_sh->count() ||
                              t_seed->count() || t_ds->count() || t_w->count() || t_p->count();
      if (!t_cfg->count()) {
        if (!t_in->count() || !t_out->count())
          throw vfl::InputError("transform needs --config or both --input-dir and --output-dir");
        transform.config.rot_axis = vfl::rot_axis_from_string(axis_str);
      }
      return run_transform_cmd(transform, t_cfg->count() && flags_used);
    }
    if (e->parsed()) return run_eval_cmd(eval, e_cap->count() > 0);
    if (r->parsed()) return run_rf_cmd(rf);
    if (a->parsed()) return run_ambiguity_cmd(amb);
    if (s->parsed()) return run_synth_cmd(synth);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
