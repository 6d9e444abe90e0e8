#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "linalg.hpp"
#include "rng.hpp"

namespace qp {

enum class ChainModel { Ising, IsingDz, XXZ, XXZDz, XXZVecD };

inline ChainModel chain_model_from_string(const std::string& s) {
  if (s == "ising") return ChainModel::Ising;
  if (s == "ising_dz") return ChainModel::IsingDz;
  if (s == "xxz") return ChainModel::XXZ;
  if (s == "xxz_dz") return ChainModel::XXZDz;
  if (s == "xxz_vecd") return ChainModel::XXZVecD;
  throw std::invalid_argument("unknown chain model: " + s);
}

inline std::string to_string(ChainModel m) {
  switch (m) {
    case ChainModel::Ising: return "ising";
    case ChainModel::IsingDz: return "ising_dz";
    case ChainModel::XXZ: return "xxz";
    case ChainModel::XXZDz: return "xxz_dz";
    default: return "xxz_vecd";
  }
}

struct ChainSpec {
  int n = 2;
  ChainModel model = ChainModel::Ising;
  std::vector<double> jz;               // n-1 bonds
  std::vector<double> jperp;            // n-1 bonds; zero for Ising models
  std::vector<std::array<double, 3>> delta;  // per-site fields
  uint64_t seed = 0;
};

struct CouplingRanges {
  double j_lo = 0.5, j_hi = 1.5;
  double d_max = 0.5;
};

// Site-stable draws: coupling (class, site) always maps to the same stream
// position, so growing n extends a chain without re-rolling existing bonds.
inline ChainSpec sample_random(ChainModel model, int n, uint64_t seed,
                               CouplingRanges ranges = {}) {
  if (n < 1 || n > 7) throw std::invalid_argument("n must be in 1..7");
  ChainSpec spec;
  spec.n = n;
  spec.model = model;
  spec.seed = seed;
  bool xxz = model == ChainModel::XXZ || model == ChainModel::XXZDz ||
             model == ChainModel::XXZVecD;
  auto draw = [&](uint64_t cls, uint64_t site, double lo, double hi) {
    counter_rng rng{seed, cls, site};
    return rng.uniform(lo, hi);
  };
  for (int i = 0; i + 1 < n; i++) {
    spec.jz.push_back(draw(1, i, ranges.j_lo, ranges.j_hi));
    spec.jperp.push_back(xxz ? draw(2, i, ranges.j_lo, ranges.j_hi) : 0.0);
  }
  for (int i = 0; i < n; i++) {
    std::array<double, 3> d{0, 0, 0};
    if (model == ChainModel::XXZVecD) {
      for (int mu = 0; mu < 3; mu++) d[mu] = draw(3 + mu, i, -ranges.d_max, ranges.d_max);
    } else if (model == ChainModel::IsingDz || model == ChainModel::XXZDz) {
      d[2] = draw(5, i, -ranges.d_max, ranges.d_max);
    }
    spec.delta.push_back(d);
  }
  return spec;
}

inline mat build_hamiltonian(const ChainSpec& spec) {
  int n = spec.n;
  if (n < 1 || n > 7) throw std::invalid_argument("n must be in 1..7");
  int dim = 1 << n;
  mat h = mat::Zero(dim, dim);
  for (int i = 0; i + 1 < n; i++) {
    h += spec.jz[i] / 4 * site_op(n, i, pauli(3)) * site_op(n, i + 1, pauli(3));
    if (spec.jperp[i] != 0)
      h += spec.jperp[i] / 4 *
           (site_op(n, i, pauli(1)) * site_op(n, i + 1, pauli(1)) +
            site_op(n, i, pauli(2)) * site_op(n, i + 1, pauli(2)));
  }
  for (int i = 0; i < n; i++)
    for (int mu = 0; mu < 3; mu++)
      if (spec.delta[i][mu] != 0)
        h += spec.delta[i][mu] / 2 * site_op(n, i, pauli(mu + 1));
  return h;
}

inline nlohmann::json chain_to_json(const ChainSpec& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["model"] = to_string(s.model);
  j["jz"] = s.jz;
  j["jperp"] = s.jperp;
  j["delta"] = s.delta;
  j["seed"] = s.seed;
  return j;
}

inline ChainSpec chain_from_json(const nlohmann::json& j) {
  ChainSpec s;
  s.n = j.at("n").get<int>();
  s.model = chain_model_from_string(j.at("model").get<std::string>());
  s.jz = j.at("jz").get<std::vector<double>>();
  s.jperp = j.at("jperp").get<std::vector<double>>();
  s.delta = j.at("delta").get<std::vector<std::array<double, 3>>>();
  s.seed = j.at("seed").get<uint64_t>();
  return s;
}

}  // namespace qp
