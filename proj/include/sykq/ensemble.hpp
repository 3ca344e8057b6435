#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sykq/hamiltonian.hpp"
#include "sykq/state.hpp"
#include "sykq/stats.hpp"
#include "sykq/types.hpp"

namespace sykq {

/// Everything that parameterizes one disorder-averaged run.
struct RunConfig {
  int L = 0;
  int q = 0;
  Flavor flavor = Flavor::Fermionic;
  Axis axis = Axis::Z;
  double omega = 1.0;
  double J = 1.0;
  int n_realizations = 0;
  std::uint64_t base_seed = 0;
  TimeGrid grid{};
  bool measure_pairs = true;                  // all sites + all pairs i < j
  std::vector<std::pair<int, int>> pairs;     // explicit subset (with sites)
  std::vector<int> sizes;                     // k values, x-axis runs only
  std::string out_dir;
  int threads = 0;  // 0: SYKQ_THREADS env or hardware concurrency

  void validate() const;
};

std::uint64_t config_hash(const RunConfig& cfg);

/// Row labels of the raw per-realization series matrix, in record order:
/// sites, then pairs, then return-amplitude operators.
struct SeriesLayout {
  struct Entry {
    std::string label;
    PauliString op;
  };
  std::vector<Entry> entries;
  std::vector<int> site_row;                   // site i -> row, or -1
  std::vector<std::vector<int>> pair_row;      // (i, j) -> row, or -1
  std::vector<int> size_row;                   // index in cfg.sizes -> row
  std::vector<std::pair<int, int>> pair_list;  // measured pairs
  std::vector<int> sizes;

  static SeriesLayout plan(const RunConfig& cfg);
  int rows() const { return static_cast<int>(entries.size()); }
  int row_of_site(int i) const;
  int row_of_pair(int i, int j) const;
  int row_of_size(int k) const;
};

/// Raw output of one realization: every series sampled on the grid.
struct RealizationRecord {
  std::uint32_t index = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;
  Eigen::MatrixXd series;  // rows x n_points
};

RealizationRecord run_realization(const RunConfig& cfg,
                                  const SeriesLayout& layout, int index);

void save_record(const std::filesystem::path& path,
                 const RealizationRecord& rec, std::uint64_t cfg_hash);
std::optional<RealizationRecord> load_record(const std::filesystem::path& path,
                                             std::uint64_t cfg_hash,
                                             int expected_rows,
                                             int expected_cols);
std::filesystem::path record_path(const std::filesystem::path& out_dir,
                                  int index);

struct RealizationStatus {
  int index;
  std::uint64_t seed;
  bool done;
  std::string error;  // empty when done
};

/// Aggregated run: layout, per-point moments over all completed
/// realizations, bandwidth statistics and per-realization status.
struct EnsembleData {
  RunConfig cfg;
  SeriesLayout layout;
  VectorMoments moments;
  double mean_bandwidth = 0.0;
  std::vector<RealizationStatus> status;

  long n() const { return moments.count(); }
  EnsembleSeries raw_series(int row, const std::string& label) const;
};

/// Run (or resume) the full ensemble: realizations whose record files are
/// already present and valid are not recomputed; new records are written
/// before aggregation; aggregation always reads records back in index order,
/// so the aggregate is bit-for-bit reproducible in serial and parallel mode
/// alike.  Failed realizations are excluded (n shrinks) and reported.
EnsembleData run_ensemble(const RunConfig& cfg);

/// Rebuild the aggregate from record files alone.
EnsembleData aggregate_records(const RunConfig& cfg);

/// Pairwise combination of two partial aggregates of the same run.
EnsembleData merge(const EnsembleData& a, const EnsembleData& b);

int resolve_threads(int requested);

}  // namespace sykq
