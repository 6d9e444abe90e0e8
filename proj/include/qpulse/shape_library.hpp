#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapes.hpp"

namespace qp {

// Built-in self-refocusing shape coefficients. Sn = first-order shapes
// (K=1), Qn = second-order (K=2); n = endpoint-constraint order L.
inline const std::map<std::string, PulseShape>& shape_library() {
  static const std::map<std::string, PulseShape> lib = [] {
    std::map<std::string, PulseShape> m;
    auto add = [&](const std::string& label, double deg, int L, int K,
                   std::vector<double> a) {
      m[label] = PulseShape{deg * M_PI / 180, 1.0, std::move(a), L, K, label};
    };
    add("S1(90)", 90, 1, 1, {-1.8963102551, 1.1337663752, 0.5125438801});
    add("S2(90)", 90, 2, 1, {-1.9049987341, 1.9858884053, 0.1063314501, -0.4372211211});
    add("Q1(90)", 90, 1, 2, {-1.8948543589, 0.5873324062, 0.5970352560, 0.4604866969});
    add("Q2(90)", 90, 2, 2, {-2.1145695246, 0.6415685732, 1.6854185871, 0.4511145740, -0.9135322049});
    add("S1(180)", 180, 1, 1, {-1.2053193822, 0.4796467863, 0.2256725959});
    add("S2(180)", 180, 2, 1, {-1.1950692860, 0.7841592117, 0.0737326786, -0.1628226043});
    add("Q1(180)", 180, 1, 2, {-1.1374072085, 1.5774920785, -0.6825355002, -0.2575493698});
    add("Q2(180)", 180, 2, 2, {-1.0964843348, 1.5308987822, -1.1472441408, 0.0025173181, 0.2103123753});
    add("S1(360)", 360, 1, 1, {-0.0237996956, -0.6226198703, -0.3535804341});
    add("S2(360)", 360, 2, 1, {-0.0294359406, -1.1741824154, -0.2097531295, 0.4133714855});
    add("Q1(360)", 360, 1, 2, {2.1406171699, -2.3966480505, -0.6474844418, -0.0964846776});
    add("Q2(360)", 360, 2, 2, {1.4818894659, -2.6971749102, -0.4384679067, 0.3434236044, 0.3103297466});
    return m;
  }();
  return lib;
}

inline PulseShape builtin_shape(const std::string& label) {
  auto it = shape_library().find(label);
  if (it == shape_library().end())
    throw std::invalid_argument("unknown shape label: " + label);
  return it->second;
}

inline nlohmann::json shape_to_json(const PulseShape& s) {
  return {{"label", s.label},
          {"phi0_degrees", s.phi0 * 180 / M_PI},
          {"L", s.L},
          {"K_claimed", s.K},
          {"coeffs", s.coeffs}};
}

inline PulseShape shape_from_json(const nlohmann::json& j) {
  PulseShape s;
  s.label = j.at("label").get<std::string>();
  s.phi0 = j.at("phi0_degrees").get<double>() * M_PI / 180;
  s.L = j.at("L").get<int>();
  s.K = j.at("K_claimed").get<int>();
  s.coeffs = j.at("coeffs").get<std::vector<double>>();
  return s;
}

inline PulseShape load_shape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open shape file: " + path);
  nlohmann::json j;
  in >> j;
  return shape_from_json(j);
}

inline void save_shape(const PulseShape& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write shape file: " + path);
  out << shape_to_json(s).dump(2) << "\n";
}

}  // namespace qp
