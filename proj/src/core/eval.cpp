#include "core/eval.hpp"

#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "core/errors.hpp"
#include "core/text.hpp"

namespace rq::eval {

double Heatmap::episode(int i, int j, int k) const {
  const size_t eps = static_cast<size_t>(grid.episodes_per_cell);
  return episode_returns[(static_cast<size_t>(i) * cols() + j) * eps + k];
}

double episode_return(const nn::Mlp& actor, const env::PerturbConfig& perturb,
                      const env::World& world, Rng& rng) {
  env::Episode episode(world);
  episode.reset(rng);
  while (!episode.done()) {
    const auto out = nn::mlp_forward(actor, episode.observation().v);
    episode.step({out[0], out[1], out[2], out[3]}, perturb, rng);
  }
  return episode.undiscounted_return();
}

Heatmap sweep(const nn::Mlp& actor, const PerturbGrid& grid,
              const env::World& world, std::uint64_t seed, int threads) {
  if (grid.mass_ratios.empty() || grid.deltas.empty())
    throw ConfigError("sweep: empty perturbation grid");
  if (grid.episodes_per_cell < 1)
    throw ConfigError("sweep: episodes_per_cell must be >= 1");

  Heatmap map;
  map.grid = grid;
  const int rows = map.rows(), cols = map.cols();
  const int eps = grid.episodes_per_cell;
  map.mean_returns.assign(static_cast<size_t>(rows) * cols, 0.0);
  map.episode_returns.assign(static_cast<size_t>(rows) * cols * eps, 0.0);

  const int cells = rows * cols;
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers > cells) workers = cells;

  std::atomic<int> next_cell{0};
  auto run_cells = [&]() {
    for (;;) {
      const int cell = next_cell.fetch_add(1);
      if (cell >= cells) break;
      const int i = cell / cols;
      const int j = cell % cols;
      const env::PerturbConfig pc{grid.mass_ratios[i], grid.deltas[j]};
      double sum = 0.0;
      for (int k = 0; k < eps; ++k) {
        Rng rng = Rng::derive(seed, {stream::kSweepCell, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j),
                                     static_cast<std::uint64_t>(k)});
        const double ret = episode_return(actor, pc, world, rng);
        map.episode_returns[(static_cast<size_t>(i) * cols + j) * eps + k] = ret;
        sum += ret;
      }
      map.mean_returns[static_cast<size_t>(i) * cols + j] = sum / eps;
    }
  };

  if (workers == 1) {
    run_cells();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_cells);
    for (auto& t : pool) t.join();
  }
  return map;
}

CompareResult compare(const Heatmap& robust, const Heatmap& baseline) {
  if (robust.grid.mass_ratios != baseline.grid.mass_ratios ||
      robust.grid.deltas != baseline.grid.deltas) {
    std::ostringstream msg;
    msg << "compare: grids differ (" << robust.rows() << "x" << robust.cols()
        << " mass " << format_double(robust.grid.mass_ratios.front()) << ".."
        << format_double(robust.grid.mass_ratios.back()) << " delta "
        << format_double(robust.grid.deltas.front()) << ".."
        << format_double(robust.grid.deltas.back()) << " vs " << baseline.rows()
        << "x" << baseline.cols() << " mass "
        << format_double(baseline.grid.mass_ratios.front()) << ".."
        << format_double(baseline.grid.mass_ratios.back()) << " delta "
        << format_double(baseline.grid.deltas.front()) << ".."
        << format_double(baseline.grid.deltas.back()) << ")";
    throw UsageError(msg.str());
  }
  CompareResult out;
  out.rows = robust.rows();
  out.cols = robust.cols();
  out.difference.resize(robust.mean_returns.size());
  int wins = 0;
  for (size_t i = 0; i < robust.mean_returns.size(); ++i) {
    out.difference[i] = robust.mean_returns[i] - baseline.mean_returns[i];
    if (robust.mean_returns[i] > baseline.mean_returns[i]) ++wins;
  }
  out.win_fraction = robust.mean_returns.empty()
                         ? 0.0
                         : static_cast<double>(wins) / robust.mean_returns.size();
  return out;
}

namespace {

void write_matrix_csv(const PerturbGrid& grid, const std::vector<double>& values,
                      std::ostream& os) {
  os << "mass_ratio\\delta";
  for (double d : grid.deltas) os << "," << format_double(d);
  os << "\n";
  const int cols = static_cast<int>(grid.deltas.size());
  for (size_t i = 0; i < grid.mass_ratios.size(); ++i) {
    os << format_double(grid.mass_ratios[i]);
    for (int j = 0; j < cols; ++j) os << "," << format_double(values[i * cols + j]);
    os << "\n";
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

void write_heatmap_csv(const Heatmap& map, std::ostream& os) {
  write_matrix_csv(map.grid, map.mean_returns, os);
}

void write_episode_returns_csv(const Heatmap& map, std::ostream& os) {
  os << "mass_ratio,delta,episode,return\n";
  for (int i = 0; i < map.rows(); ++i)
    for (int j = 0; j < map.cols(); ++j)
      for (int k = 0; k < map.grid.episodes_per_cell; ++k)
        os << format_double(map.grid.mass_ratios[i]) << ","
           << format_double(map.grid.deltas[j]) << "," << k << ","
           << format_double(map.episode(i, j, k)) << "\n";
}

void write_difference_csv(const Heatmap& grid_source, const CompareResult& cmp,
                          std::ostream& os) {
  write_matrix_csv(grid_source.grid, cmp.difference, os);
}

Heatmap read_heatmap_csv(std::istream& is, const std::string& origin) {
  Heatmap map;
  map.grid.mass_ratios.clear();
  map.grid.deltas.clear();
  map.grid.episodes_per_cell = 0;  // unknown for mean-only files
  std::string line;
  if (!std::getline(is, line))
    throw FormatError(FormatError::Kind::Truncated, origin + ": empty heatmap CSV");
  auto header = split(line, ',');
  if (header.empty() || trim(header[0]) != "mass_ratio\\delta")
    throw FormatError(FormatError::Kind::Malformed,
                      origin + ": heatmap CSV must start with mass_ratio\\delta");
  for (size_t j = 1; j < header.size(); ++j) {
    double v;
    if (!parse_double(header[j], v))
      throw FormatError(FormatError::Kind::Malformed,
                        origin + ": bad delta label '" + std::string(header[j]) + "'");
    map.grid.deltas.push_back(v);
  }
  if (map.grid.deltas.empty())
    throw FormatError(FormatError::Kind::Malformed, origin + ": no delta columns");
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != map.grid.deltas.size() + 1)
      throw FormatError(FormatError::Kind::Malformed,
                        origin + ": row with " + std::to_string(cells.size()) +
                            " cells, expected " +
                            std::to_string(map.grid.deltas.size() + 1));
    double ratio;
    if (!parse_double(cells[0], ratio))
      throw FormatError(FormatError::Kind::Malformed,
                        origin + ": bad mass ratio '" + std::string(cells[0]) + "'");
    map.grid.mass_ratios.push_back(ratio);
    for (size_t j = 1; j < cells.size(); ++j) {
      double v;
      if (!parse_double(cells[j], v))
        throw FormatError(FormatError::Kind::Malformed,
                          origin + ": bad mean return '" + std::string(cells[j]) + "'");
      map.mean_returns.push_back(v);
    }
  }
  if (map.grid.mass_ratios.empty())
    throw FormatError(FormatError::Kind::Malformed, origin + ": no data rows");
  return map;
}

}  // namespace rq::eval
