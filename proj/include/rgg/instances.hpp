#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"
#include "rgg/rng.hpp"

namespace rgg {

/// `per_cell` uniform points in every cell [j h, (j+1) h) of the lattice of
/// spacing h, clipped to [0,1]^d. Cells are laid out like a dissection at
/// the same spacing, so each one is dense for K <= per_cell.
inline PointSet stratified_points(std::size_t d, double h, std::size_t per_cell, std::uint64_t seed) {
  require(d >= 1 && h > 0.0 && h <= 1.0, "stratified_points: bad dimension or spacing");
  const auto per_axis = static_cast<std::size_t>(std::floor(1.0 / h + 1e-9)) + 1;
  CounterRng rng(seed);
  PointSet out(d);
  std::vector<std::size_t> idx(d, 0);
  Point z(d);
  while (true) {
    bool empty = false;
    for (std::size_t j = 0; j < d; ++j) empty = empty || static_cast<double>(idx[j]) * h >= 1.0;
    if (!empty) {
      for (std::size_t k = 0; k < per_cell; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
          const double lo = static_cast<double>(idx[j]) * h;
          const double hi = std::min(1.0, lo + h);
          z[j] = std::min(hi, lo + (hi - lo) * rng.uniform());
        }
        out.push_back(z);
      }
    }
    std::size_t j = d;
    while (j > 0 && idx[j - 1] + 1 == per_axis) idx[--j] = 0;
    if (j == 0) break;
    ++idx[j - 1];
  }
  return out;
}

struct PlantedSpec {
  double rho = 0.3;
  double eta = 0.1;
  std::size_t per_cell = 40;
  /// Hole radius in units of r' = rho (1 - eta sqrt 2).
  double hole_factor = 1.3;
  std::size_t clique_size = 3;
  std::size_t chain_points = 2;
  /// Chains per hole; with one the far clique hangs off a cut vertex.
  std::size_t bridges = 2;
  /// Hole centres; empty means one centre drawn from [0.35, 0.65]^2.
  std::vector<Point> centres;
};

struct PlantedInstance {
  PointSet points{2};
  double rho = 0.0;
  double hole_radius = 0.0;
  std::vector<Point> centres;
  std::vector<std::vector<VertexId>> cliques;
  std::vector<std::vector<VertexId>> chains;  // `bridges` per hole, ordered from the clique outwards
};

/// Stratified points in the unit square with circular holes; in each hole a
/// small clique near the centre, joined to the rim by chains in opposite
/// directions. The clique is farther than rho from every rim point, so with
/// two chains the graph is 2-connected only through the pair of them.
inline PlantedInstance planted_instance(const PlantedSpec& spec, std::uint64_t seed) {
  require(spec.rho > 0.0 && spec.eta > 0.0 && spec.eta * std::numbers::sqrt2 < 1.0, "planted_instance: bad scale");
  require(spec.clique_size >= 1 && spec.chain_points >= 1, "planted_instance: need a clique and chains");
  require(spec.bridges == 1 || spec.bridges == 2, "planted_instance: one or two bridges per hole");
  PlantedInstance inst;
  inst.rho = spec.rho;
  inst.hole_radius = spec.hole_factor * spec.rho * (1.0 - spec.eta * std::numbers::sqrt2);
  CounterRng rng(derive_seed(seed, 1));
  inst.centres = spec.centres;
  if (inst.centres.empty()) inst.centres.push_back({rng.uniform(0.35, 0.65), rng.uniform(0.35, 0.65)});
  const double R = inst.hole_radius;
  // The last gap reaches the rim, whose nearest point lies within a cell diagonal.
  require(R / static_cast<double>(spec.chain_points + 1) + spec.eta * spec.rho * std::numbers::sqrt2 <= spec.rho,
          "planted_instance: chains too sparse");

  const auto base = stratified_points(2, spec.eta * spec.rho, spec.per_cell, derive_seed(seed, 0));
  auto in_hole = [&](std::span<const double> z) {
    for (const auto& c : inst.centres)
      if (std::hypot(z[0] - c[0], z[1] - c[1]) < R) return true;
    return false;
  };
  for (std::size_t i = 0; i < base.size(); ++i)
    if (!in_hole(base[i])) inst.points.push_back(base.point(i));

  const double spacing = R / static_cast<double>(spec.chain_points + 1);
  for (const auto& c : inst.centres) {
    auto& clique = inst.cliques.emplace_back();
    for (std::size_t k = 0; k < spec.clique_size; ++k) {
      const double a = rng.uniform(0.0, 2.0 * std::numbers::pi), s = 0.01 * std::sqrt(rng.uniform());
      clique.push_back(static_cast<VertexId>(inst.points.size()));
      inst.points.push_back({c[0] + s * std::cos(a), c[1] + s * std::sin(a)});
    }
    const double theta = rng.uniform(0.0, std::numbers::pi);
    for (std::size_t k = 0; k < spec.bridges; ++k) {
      const double dir = theta + static_cast<double>(k) * std::numbers::pi;
      auto& chain = inst.chains.emplace_back();
      for (std::size_t j = 1; j <= spec.chain_points; ++j) {
        chain.push_back(static_cast<VertexId>(inst.points.size()));
        const double s = spacing * static_cast<double>(j);
        inst.points.push_back({c[0] + s * std::cos(dir), c[1] + s * std::sin(dir)});
      }
    }
  }
  require(inst.points.in_unit_cube(), "planted_instance: holes must lie inside the unit square");
  return inst;
}

}  // namespace rgg
