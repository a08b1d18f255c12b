#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vfl/errors.hpp"
#include "vfl/geometry.hpp"
#include "vfl/hole_fill.hpp"
#include "vfl/metrics.hpp"
#include "vfl/png_io.hpp"
#include "vfl/rng.hpp"
#include "vfl/splat.hpp"

namespace vfl {

enum class RotAxis { none, x, y };

inline std::string to_string(RotAxis axis) {
  switch (axis) {
    case RotAxis::none: return "none";
    case RotAxis::x: return "x";
    case RotAxis::y: return "y";
  }
  return "none";
}

inline RotAxis rot_axis_from_string(const std::string& s) {
  if (s == "none") return RotAxis::none;
  if (s == "x") return RotAxis::x;
  if (s == "y") return RotAxis::y;
  throw InputError("rotation axis must be none, x or y: " + s);
}

inline std::string format_compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline constexpr double kMaxRotDeg = 5.0;

struct TransformConfig {
  std::string input_dir;
  std::string output_dir;
  std::vector<double> focals{460, 500, 540, 620, 660, 700};
  double source_focal = 580;
  RotAxis rot_axis = RotAxis::none;
  double rot_deg = 0;        // fixed angle; unused when rot_uniform
  bool rot_uniform = false;  // draw each angle from [-kMaxRotDeg, kMaxRotDeg]
  bool share_rotation = false;  // one draw per frame instead of per output
  std::uint64_t seed = 0;
  double depth_scale = 1000;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const {
    if (input_dir.empty() || output_dir.empty())
      throw InputError("input and output directories are required");
    if (focals.empty()) throw InputError("focal list must be non-empty");
    for (double f : focals)
      if (!(f > 0) || !std::isfinite(f)) throw InputError("focal lengths must be positive");
    if (!(source_focal > 0) || !std::isfinite(source_focal))
      throw InputError("source focal length must be positive");
    if (!rot_uniform && !(std::abs(rot_deg) <= kMaxRotDeg))
      throw InputError("rotation must lie in [-5, 5] degrees");
    if (!(depth_scale > 0)) throw InputError("depth scale must be positive");
    if (workers < 0) throw InputError("worker count cannot be negative");
  }

  static TransformConfig from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{
        "input_dir", "output_dir", "focals",      "source_focal", "rot_axis",
        "rot_deg",   "seed",       "depth_scale", "workers",      "share_rotation"};
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!known.count(it.key())) throw InputError("unknown config key: " + it.key());

    TransformConfig c;
    c.input_dir = j.at("input_dir").get<std::string>();
    c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("focals")) c.focals = j.at("focals").get<std::vector<double>>();
    if (j.contains("source_focal")) c.source_focal = j.at("source_focal").get<double>();
    if (j.contains("rot_axis"))
      c.rot_axis = rot_axis_from_string(j.at("rot_axis").get<std::string>());
    if (j.contains("rot_deg")) {
      if (j.at("rot_deg").is_string()) {
        if (j.at("rot_deg").get<std::string>() != "uniform")
          throw InputError("rot_deg must be a number or \"uniform\"");
        c.rot_uniform = true;
      } else {
        c.rot_deg = j.at("rot_deg").get<double>();
      }
    }
    if (j.contains("share_rotation")) c.share_rotation = j.at("share_rotation").get<bool>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("depth_scale")) c.depth_scale = j.at("depth_scale").get<double>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    c.validate();
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"input_dir", input_dir},
                     {"output_dir", output_dir},
                     {"focals", focals},
                     {"source_focal", source_focal},
                     {"rot_axis", to_string(rot_axis)},
                     {"seed", seed},
                     {"depth_scale", depth_scale},
                     {"workers", workers},
                     {"share_rotation", share_rotation}};
    if (rot_uniform)
      j["rot_deg"] = "uniform";
    else
      j["rot_deg"] = rot_deg;
    return j;
  }
};

struct ManifestEntry {
  std::string source_path;
  std::string output_path;  // color file, relative to output_dir
  double focal_px = 0;
  std::string rot_axis = "none";
  double rot_deg = 0;
  std::array<double, 3> translation{0, 0, 0};
  std::uint64_t seed = 0;
  double hole_fraction_before_fill = 0;
  int depth_clamp_count = 0;
  std::string error;  // empty on success

  nlohmann::json to_json() const {
    return nlohmann::json{{"source_path", source_path},
                          {"output_path", output_path},
                          {"focal_px", focal_px},
                          {"rot_axis", rot_axis},
                          {"rot_deg", rot_deg},
                          {"translation", translation},
                          {"seed", seed},
                          {"hole_fraction_before_fill", hole_fraction_before_fill},
                          {"depth_clamp_count", depth_clamp_count},
                          {"error", error}};
  }
};

struct DatasetManifest {
  nlohmann::json config;
  std::vector<ManifestEntry> entries;

  int failed_count() const {
    int n = 0;
    for (const auto& e : entries) n += !e.error.empty();
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json ej = nlohmann::json::array();
    for (const auto& e : entries) ej.push_back(e.to_json());
    return nlohmann::json{{"config", config}, {"entries", ej}};
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError(IoError::Kind::unwritable, "cannot write " + path);
    out << to_json().dump(2) << '\n';
  }
};

struct InputPair {
  std::string stem;
  std::string color_path;
  std::string depth_path;
};

// Non-recursive scan for <stem>.png + <stem>_depth.png pairs, sorted by
// stem. A color file without its depth sibling is reported as a pair with
// an empty depth path so the caller can record the failure.
inline std::vector<InputPair> discover_rgbd_pairs(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
  std::vector<InputPair> pairs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() < 4 || name.substr(name.size() - 4) != ".png") continue;
    const std::string stem = name.substr(0, name.size() - 4);
    if (stem.size() >= 6 && stem.substr(stem.size() - 6) == "_depth") continue;
    const fs::path depth = entry.path().parent_path() / (stem + "_depth.png");
    pairs.push_back({stem, entry.path().string(),
                     fs::is_regular_file(depth) ? depth.string() : std::string()});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const InputPair& a, const InputPair& b) { return a.stem < b.stem; });
  return pairs;
}

namespace detail {

inline constexpr std::uint64_t kStreamFill = 1;
inline constexpr std::uint64_t kStreamAngle = 2;
inline constexpr std::uint64_t kStreamAngleShared = 3;

inline double draw_rot_deg(const TransformConfig& config, std::size_t frame_idx,
                           std::size_t focal_idx, std::size_t n_focals) {
  if (config.rot_axis == RotAxis::none) return 0;
  if (!config.rot_uniform) return config.rot_deg;
  const std::uint64_t bits =
      config.share_rotation
          ? derive_seed(config.seed, frame_idx, kStreamAngleShared)
          : derive_seed(config.seed, frame_idx * n_focals + focal_idx, kStreamAngle);
  return -kMaxRotDeg + 2 * kMaxRotDeg * unit_real(bits);
}

inline void process_frame(const TransformConfig& config, const InputPair& input,
                          std::size_t frame_idx, std::vector<ManifestEntry>& entries) {
  const std::size_t n_focals = config.focals.size();
  const std::size_t base = frame_idx * n_focals;

  for (std::size_t ki = 0; ki < n_focals; ++ki) {
    ManifestEntry& e = entries[base + ki];
    e.source_path = input.color_path;
    e.focal_px = config.focals[ki];
    e.rot_axis = to_string(config.rot_axis);
    e.seed = derive_seed(config.seed, frame_idx * n_focals + ki, kStreamFill);
    e.output_path = input.stem + "_f" + format_compact(config.focals[ki]) + ".png";
  }

  if (input.depth_path.empty()) {
    for (std::size_t ki = 0; ki < n_focals; ++ki)
      entries[base + ki].error = "missing depth file for " + input.color_path;
    return;
  }

  RgbdFrame frame;
  ColoredPointCloud cloud;
  Intrinsics k_src;
  try {
    frame = load_rgbd(input.color_path, input.depth_path, config.depth_scale);
    k_src = Intrinsics::centered(config.source_focal, frame.width(), frame.height());
    cloud = backproject(frame, k_src);
    if (cloud.empty()) throw InputError("frame has no valid depth");
  } catch (const std::exception& ex) {
    for (std::size_t ki = 0; ki < n_focals; ++ki) entries[base + ki].error = ex.what();
    return;
  }

  for (std::size_t ki = 0; ki < n_focals; ++ki) {
    ManifestEntry& e = entries[base + ki];
    try {
      const double deg = draw_rot_deg(config, frame_idx, ki, n_focals);
      e.rot_deg = deg;

      RecenteringSpec spec;
      spec.axis = config.rot_axis == RotAxis::x ? Axis::x : Axis::y;
      spec.angle_rad = deg * 0.017453292519943295;
      spec.f_new = config.focals[ki];

      const RigidMotion motion = recentering_motion(cloud, k_src, spec);
      e.translation = {motion.t.x(), motion.t.y(), motion.t.z()};

      const Intrinsics k_new = k_src.with_focal(config.focals[ki]);
      const SparseRgbdFrame sparse = splat(apply_motion(cloud, motion), k_new);
      e.hole_fraction_before_fill = sparse.hole_fraction();

      const RgbdFrame filled = fill(sparse, e.seed);
      const std::string color_out = config.output_dir + "/" + e.output_path;
      const std::string depth_out =
          config.output_dir + "/" + input.stem + "_f" + format_compact(config.focals[ki]) +
          "_depth.png";
      e.depth_clamp_count = save_rgbd(filled, color_out, depth_out, config.depth_scale);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  }
}

}  // namespace detail

// Warps every input pair to every requested focal length. Frames are
// distributed over a worker pool; all randomness is keyed on (seed, frame,
// focal), so outputs are byte-identical for any worker count.
inline DatasetManifest run_transform(const TransformConfig& config) {
  config.validate();
  const std::vector<InputPair> inputs = discover_rgbd_pairs(config.input_dir);
  if (inputs.empty()) throw InputError("no RGB-D pairs found in " + config.input_dir);
  std::filesystem::create_directories(config.output_dir);

  DatasetManifest manifest;
  manifest.config = config.to_json();
  manifest.entries.resize(inputs.size() * config.focals.size());

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t n_workers = config.workers > 0 ? static_cast<std::size_t>(config.workers)
                                             : std::max(1u, hw);
  n_workers = std::min(n_workers, inputs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t fi = next.fetch_add(1); fi < inputs.size(); fi = next.fetch_add(1))
      detail::process_frame(config, inputs[fi], fi, manifest.entries);
  };

  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return manifest;
}

struct FrameEval {
  std::string name;
  bool ok = false;
  std::string error;
  MetricsReport report;
};

struct EvalResult {
  MetricsReport aggregate;
  std::vector<FrameEval> frames;
  std::vector<std::string> unmatched_pred;
  std::vector<std::string> unmatched_gt;

  nlohmann::json to_json() const {
    nlohmann::json fj = nlohmann::json::array();
    for (const auto& f : frames) {
      nlohmann::json j{{"name", f.name}, {"ok", f.ok}};
      if (f.ok)
        j["metrics"] = vfl::to_json(f.report);
      else
        j["error"] = f.error;
      fj.push_back(j);
    }
    return nlohmann::json{{"aggregate", vfl::to_json(aggregate)},
                          {"frames", fj},
                          {"unmatched_pred", unmatched_pred},
                          {"unmatched_gt", unmatched_gt}};
  }

  std::string table() const {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-32s %10s %8s %8s %8s %8s %8s %8s\n", "frame", "pixels",
                  "rel", "rms", "log10", "d<1.25", "d<1.25^2", "d<1.25^3");
    os << buf;
    auto row = [&](const std::string& name, const MetricsReport& r) {
      std::snprintf(buf, sizeof buf, "%-32s %10lld %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f\n",
                    name.c_str(), static_cast<long long>(r.valid_pixel_count), r.rel, r.rms,
                    r.log10, r.delta1, r.delta2, r.delta3);
      os << buf;
    };
    for (const auto& f : frames) {
      if (f.ok)
        row(f.name, f.report);
      else {
        std::snprintf(buf, sizeof buf, "%-32s   [failed: %s]\n", f.name.c_str(),
                      f.error.c_str());
        os << buf;
      }
    }
    row("(all pixels)", aggregate);
    return os.str();
  }
};

// Compares 16-bit depth PNGs whose frame stems match across the two
// directories; the aggregate pools pixels over all matched frames.
//
// A directory may hold bare depth maps (frame name = file name) or full
// color/depth pairs (`<stem>.png` + `<stem>_depth.png`); in the paired case
// the depth member is evaluated under the frame name `<stem>.png` and the
// color member is not treated as a depth candidate. This lets a transform
// output directory be compared directly against another depth directory.
inline EvalResult run_eval(const std::string& pred_dir, const std::string& gt_dir,
                           std::optional<double> cap_m, double depth_scale = 1000) {
  namespace fs = std::filesystem;
  if (!(depth_scale > 0)) throw InputError("depth scale must be positive");
  // frame name -> depth file name
  auto depth_files = [](const std::string& dir) {
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.size() >= 4 && name.substr(name.size() - 4) == ".png") names.insert(name);
    }
    constexpr std::string_view suffix = "_depth.png";
    std::map<std::string, std::string> frames;
    for (const std::string& name : names) {
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        frames[name.substr(0, name.size() - suffix.size()) + ".png"] = name;
      } else if (!names.count(name.substr(0, name.size() - 4) + std::string(suffix))) {
        frames[name] = name;  // bare depth map, not the color half of a pair
      }
    }
    return frames;
  };

  const std::map<std::string, std::string> pred_frames = depth_files(pred_dir);
  const std::map<std::string, std::string> gt_frames = depth_files(gt_dir);

  EvalResult result;
  std::vector<std::string> matched;
  for (const auto& [name, file] : pred_frames) {
    if (gt_frames.count(name))
      matched.push_back(name);
    else
      result.unmatched_pred.push_back(name);
  }
  for (const auto& [name, file] : gt_frames)
    if (!pred_frames.count(name)) result.unmatched_gt.push_back(name);
  if (matched.empty()) throw InputError("no common depth files between the two directories");

  MetricsAccumulator pooled(cap_m);
  for (const std::string& name : matched) {
    FrameEval fe;
    fe.name = name;
    try {
      const DepthMap pred = load_depth_png(pred_dir + "/" + pred_frames.at(name), depth_scale);
      const DepthMap gt = load_depth_png(gt_dir + "/" + gt_frames.at(name), depth_scale);
      fe.report = evaluate(pred, gt, cap_m);
      fe.ok = true;
      pooled.add(pred, gt);
    } catch (const std::exception& ex) {
      fe.error = ex.what();
    }
    result.frames.push_back(std::move(fe));
  }
  if (pooled.empty()) throw EmptyEvaluationError("no evaluable pixels in any matched frame");
  result.aggregate = pooled.report();
  return result;
}

}  // namespace vfl
