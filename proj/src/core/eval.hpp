#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "core/env.hpp"
#include "core/nn.hpp"

namespace rq::eval {

// Test matrix of relative masses times action-perturbation probabilities.
struct PerturbGrid {
  std::vector<double> mass_ratios = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
                                     1.2, 1.4, 1.6, 1.8, 2.0};
  std::vector<double> deltas = {0.0,  0.05, 0.1,  0.15, 0.2, 0.25,
                                0.3, 0.35, 0.4,  0.45, 0.5};
  int episodes_per_cell = 10;
};

struct Heatmap {
  PerturbGrid grid;
  std::vector<double> mean_returns;     // rows x cols, row-major
  std::vector<double> episode_returns;  // rows x cols x episodes; empty when
                                        // loaded from a mean-only CSV

  int rows() const { return static_cast<int>(grid.mass_ratios.size()); }
  int cols() const { return static_cast<int>(grid.deltas.size()); }
  double mean(int i, int j) const { return mean_returns[static_cast<size_t>(i) * cols() + j]; }
  double episode(int i, int j, int k) const;
};

// One frozen-policy episode: deterministic actor actions (no exploration
// noise, no adversary), initial state sampled like in training, rewards
// summed undiscounted until termination.
double episode_return(const nn::Mlp& actor, const env::PerturbConfig& perturb,
                      const env::World& world, Rng& rng);

// Runs episodes_per_cell episodes for every grid cell. Each episode uses an
// RNG stream derived from (seed, mass index, delta index, episode index),
// so results are independent of execution order and of the worker count.
// threads <= 0 picks the hardware concurrency.
Heatmap sweep(const nn::Mlp& actor, const PerturbGrid& grid,
              const env::World& world, std::uint64_t seed, int threads = 0);

struct CompareResult {
  int rows = 0, cols = 0;
  std::vector<double> difference;  // robust mean - baseline mean
  double win_fraction = 0.0;       // cells where robust mean > baseline mean
};

// Throws UsageError when the grids differ.
CompareResult compare(const Heatmap& robust, const Heatmap& baseline);

// First row "mass_ratio\delta, <deltas...>", then one row per mass ratio.
void write_heatmap_csv(const Heatmap& map, std::ostream& os);
// Long format: mass_ratio,delta,episode,return.
void write_episode_returns_csv(const Heatmap& map, std::ostream& os);
void write_difference_csv(const Heatmap& grid_source, const CompareResult& cmp,
                          std::ostream& os);

// Parses the mean-return layout written by write_heatmap_csv.
Heatmap read_heatmap_csv(std::istream& is, const std::string& origin);

}  // namespace rq::eval
