#pragma once

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "vfl/errors.hpp"
#include "vfl/geometry.hpp"

namespace vfl {

// Named intrinsics and evaluation depth caps loaded from a small JSON file.
struct Presets {
  std::map<std::string, Intrinsics> intrinsics;
  std::map<std::string, double> eval_caps_m;

  static Presets load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(IoError::Kind::unreadable, "cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
      Presets p;
      for (auto it = j.at("intrinsics").begin(); it != j.at("intrinsics").end(); ++it) {
        const nlohmann::json& kj = it.value();
        p.intrinsics[it.key()] = Intrinsics::validated(
            {kj.at("f_px").get<double>(), kj.at("u0").get<double>(), kj.at("v0").get<double>(),
             kj.at("width").get<int>(), kj.at("height").get<int>()});
      }
      if (j.contains("eval_caps_m"))
        for (auto it = j.at("eval_caps_m").begin(); it != j.at("eval_caps_m").end(); ++it)
          p.eval_caps_m[it.key()] = it.value().get<double>();
      return p;
    } catch (const nlohmann::json::exception& e) {
      throw InputError("bad presets file " + path + ": " + e.what());
    }
  }
};

}  // namespace vfl
