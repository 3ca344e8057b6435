#include "sykq/ensemble.hpp"

#include <atomic>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sykq/majorana.hpp"
#include "sykq/rng.hpp"

namespace sykq {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (L < 2 || L > 30) throw ConfigError("L must be in [2, 30]");
  if (q < 2 || q % 2 != 0) throw ConfigError("q must be even and >= 2");
  if (q > 2 * L) throw ConfigError("q must not exceed 2L");
  if (axis == Axis::Y) {
    throw ConfigError("axis y is equivalent to x; configure axis x");
  }
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (!(J > 0.0)) throw ConfigError("J must be positive");
  if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
  if (grid.n_steps < 1 || !(grid.t_max > 0.0)) {
    throw ConfigError("time grid requires t_max > 0 and n_steps >= 1");
  }
  for (const auto& [i, j] : pairs) {
    if (i < 1 || j <= i || j > L) {
      throw ConfigError("pair (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is not a valid i < j site pair");
    }
  }
  for (int k : sizes) {
    if (k < 1 || k > 2 * L - 1) {
      throw ConfigError("operator size k=" + std::to_string(k) +
                        " has no representative at L=" + std::to_string(L));
    }
    if (axis != Axis::X) {
      throw ConfigError(
          "return-amplitude sizes are defined for the a=x quench protocol");
    }
  }
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "L=" << cfg.L << ";q=" << cfg.q << ";flavor=" << to_string(cfg.flavor)
     << ";axis=" << to_string(cfg.axis) << ";omega=" << cfg.omega
     << ";J=" << cfg.J << ";n=" << cfg.n_realizations
     << ";seed=" << cfg.base_seed << ";tmax=" << cfg.grid.t_max
     << ";steps=" << cfg.grid.n_steps << ";allpairs=" << cfg.measure_pairs
     << ";pairs=";
  for (const auto& [i, j] : cfg.pairs) os << i << "_" << j << ",";
  os << ";sizes=";
  for (int k : cfg.sizes) os << k << ",";
  // FNV-1a over the canonical text; out_dir and threads are execution
  // details, not part of the physics identity.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

SeriesLayout SeriesLayout::plan(const RunConfig& cfg) {
  cfg.validate();
  SeriesLayout lay;
  lay.site_row.assign(static_cast<std::size_t>(cfg.L) + 1, -1);
  lay.pair_row.assign(static_cast<std::size_t>(cfg.L) + 1,
                      std::vector<int>(static_cast<std::size_t>(cfg.L) + 1, -1));
  Pauli letter = cfg.axis == Axis::X ? Pauli::X : Pauli::Z;
  std::string axis_name = to_string(cfg.axis);

  if (cfg.measure_pairs) {
    for (int i = 1; i <= cfg.L; ++i) {
      for (int j = i + 1; j <= cfg.L; ++j) lay.pair_list.emplace_back(i, j);
    }
  } else {
    lay.pair_list = cfg.pairs;
  }

  std::vector<bool> need_site(static_cast<std::size_t>(cfg.L) + 1, false);
  if (cfg.measure_pairs) {
    for (int i = 1; i <= cfg.L; ++i) need_site[static_cast<std::size_t>(i)] = true;
  }
  for (const auto& [i, j] : lay.pair_list) {
    need_site[static_cast<std::size_t>(i)] = true;
    need_site[static_cast<std::size_t>(j)] = true;
  }

  for (int i = 1; i <= cfg.L; ++i) {
    if (!need_site[static_cast<std::size_t>(i)]) continue;
    lay.site_row[static_cast<std::size_t>(i)] = lay.rows();
    lay.entries.push_back(
        {"site:" + axis_name + ":" + std::to_string(i),
         PauliString::single(cfg.L, i, letter)});
  }
  for (const auto& [i, j] : lay.pair_list) {
    lay.pair_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
        lay.rows();
    lay.entries.push_back(
        {"pair:" + axis_name + ":" + std::to_string(i) + ":" + std::to_string(j),
         multiply(PauliString::single(cfg.L, i, letter),
                  PauliString::single(cfg.L, j, letter))});
  }
  lay.sizes = cfg.sizes;
  for (int k : cfg.sizes) {
    lay.size_row.push_back(lay.rows());
    lay.entries.push_back(
        {"ret:" + std::to_string(k), size_representative(k, cfg.L)});
  }
  return lay;
}

int SeriesLayout::row_of_site(int i) const {
  if (i < 1 || i >= static_cast<int>(site_row.size()) ||
      site_row[static_cast<std::size_t>(i)] < 0) {
    throw DimensionError("site series not measured: " + std::to_string(i));
  }
  return site_row[static_cast<std::size_t>(i)];
}

int SeriesLayout::row_of_pair(int i, int j) const {
  if (i < 1 || j <= i || j >= static_cast<int>(pair_row.size()) ||
      pair_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] < 0) {
    throw DimensionError("pair series not measured: (" + std::to_string(i) +
                         "," + std::to_string(j) + ")");
  }
  return pair_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

int SeriesLayout::row_of_size(int k) const {
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    if (sizes[s] == k) return size_row[s];
  }
  throw DimensionError("return-amplitude series not measured: k=" +
                       std::to_string(k));
}

RealizationRecord run_realization(const RunConfig& cfg,
                                  const SeriesLayout& layout, int index) {
  RealizationRecord rec;
  rec.index = static_cast<std::uint32_t>(index);
  rec.seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(index));
  CouplingTensor tensor = CouplingTensor::sample(cfg.q, cfg.L, cfg.J, rec.seed);
  QuenchHamiltonian quench = make_quench(tensor, cfg.flavor, cfg.axis, cfg.omega);
  rec.bandwidth = quench.bandwidth;

  StateVector psi0 = ground_state(cfg.axis, cfg.omega, cfg.L);
  rec.series.resize(layout.rows(), cfg.grid.n_points());
  Propagator prop(quench.post);
  prop.trajectory(psi0, cfg.grid, [&](int ti, const StateVector& psi) {
    for (int r = 0; r < layout.rows(); ++r) {
      rec.series(r, ti) =
          expectation_real(psi, layout.entries[static_cast<std::size_t>(r)].op);
    }
  });
  return rec;
}

namespace {

constexpr char kRecordMagic[8] = {'S', 'Y', 'K', 'R', 'E', 'C', '0', '1'};
constexpr char kRecordFooter[8] = {'S', 'Y', 'K', 'E', 'N', 'D', '0', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return bool(is);
}

}  // namespace

std::filesystem::path record_path(const fs::path& out_dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "rec_%05d.bin", index);
  return out_dir / "records" / name;
}

void save_record(const fs::path& path, const RealizationRecord& rec,
                 std::uint64_t cfg_hash) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os.write(kRecordMagic, sizeof(kRecordMagic));
    write_pod(os, cfg_hash);
    write_pod(os, rec.index);
    write_pod(os, rec.seed);
    write_pod(os, rec.bandwidth);
    std::uint32_t rows = static_cast<std::uint32_t>(rec.series.rows());
    std::uint32_t cols = static_cast<std::uint32_t>(rec.series.cols());
    write_pod(os, rows);
    write_pod(os, cols);
    os.write(reinterpret_cast<const char*>(rec.series.data()),
             static_cast<std::streamsize>(sizeof(double) * rows * cols));
    os.write(kRecordFooter, sizeof(kRecordFooter));
    if (!os) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);  // completion is atomic: no footer, no record
}

std::optional<RealizationRecord> load_record(const fs::path& path,
                                             std::uint64_t cfg_hash,
                                             int expected_rows,
                                             int expected_cols) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kRecordMagic, 8) != 0) return std::nullopt;
  std::uint64_t h;
  RealizationRecord rec;
  std::uint32_t rows, cols;
  if (!read_pod(is, h) || h != cfg_hash) return std::nullopt;
  if (!read_pod(is, rec.index) || !read_pod(is, rec.seed) ||
      !read_pod(is, rec.bandwidth) || !read_pod(is, rows) ||
      !read_pod(is, cols)) {
    return std::nullopt;
  }
  if (static_cast<int>(rows) != expected_rows ||
      static_cast<int>(cols) != expected_cols) {
    return std::nullopt;
  }
  rec.series.resize(rows, cols);
  is.read(reinterpret_cast<char*>(rec.series.data()),
          static_cast<std::streamsize>(sizeof(double) * rows * cols));
  char footer[8];
  is.read(footer, sizeof(footer));
  if (!is || std::memcmp(footer, kRecordFooter, 8) != 0) return std::nullopt;
  return rec;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SYKQ_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

EnsembleSeries EnsembleData::raw_series(int row, const std::string& label) const {
  EnsembleSeries s;
  s.times = cfg.grid.times();
  s.n = moments.count();
  s.label = label;
  s.mean.resize(s.times.size());
  s.stderr_.resize(s.times.size());
  for (int t = 0; t < moments.n_points(); ++t) {
    s.mean[static_cast<std::size_t>(t)] = moments.mean_at(row, t);
    s.stderr_[static_cast<std::size_t>(t)] = moments.stderr_of_mean(row, t);
  }
  return s;
}

namespace {

EnsembleData aggregate_from(const RunConfig& cfg, const SeriesLayout& layout,
                            const std::vector<RealizationStatus>& status) {
  EnsembleData data;
  data.cfg = cfg;
  data.layout = layout;
  data.status = status;
  data.moments = VectorMoments(layout.rows(), cfg.grid.n_points());
  std::uint64_t h = config_hash(cfg);
  double bw_sum = 0.0;
  long bw_n = 0;
  for (const auto& st : status) {
    if (!st.done) continue;
    auto rec = load_record(record_path(cfg.out_dir, st.index), h,
                           layout.rows(), cfg.grid.n_points());
    if (!rec) {
      throw std::runtime_error("record for completed realization " +
                               std::to_string(st.index) + " is unreadable");
    }
    data.moments.accumulate(rec->series);
    bw_sum += rec->bandwidth;
    ++bw_n;
  }
  data.mean_bandwidth = bw_n ? bw_sum / static_cast<double>(bw_n) : 0.0;
  return data;
}

}  // namespace

EnsembleData run_ensemble(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.out_dir.empty()) {
    throw ConfigError("run_ensemble requires an output directory");
  }
  SeriesLayout layout = SeriesLayout::plan(cfg);
  std::uint64_t h = config_hash(cfg);
  fs::create_directories(fs::path(cfg.out_dir) / "records");

  std::vector<RealizationStatus> status(
      static_cast<std::size_t>(cfg.n_realizations));
  std::vector<int> todo;
  for (int i = 0; i < cfg.n_realizations; ++i) {
    auto& st = status[static_cast<std::size_t>(i)];
    st.index = i;
    st.seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(i));
    st.done = false;
    auto existing = load_record(record_path(cfg.out_dir, i), h, layout.rows(),
                                cfg.grid.n_points());
    if (existing) {
      st.done = true;
    } else {
      todo.push_back(i);
    }
  }

  int threads = std::min<int>(resolve_threads(cfg.threads),
                              std::max<std::size_t>(todo.size(), 1));
  std::atomic<std::size_t> next{0};
  std::mutex mtx;
  auto worker = [&]() {
    for (;;) {
      std::size_t slot = next.fetch_add(1);
      if (slot >= todo.size()) return;
      int index = todo[slot];
      auto& st = status[static_cast<std::size_t>(index)];
      try {
        RealizationRecord rec = run_realization(cfg, layout, index);
        save_record(record_path(cfg.out_dir, index), rec, h);
        st.done = true;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mtx);
        st.error = e.what();
        std::cerr << "[sykq] realization " << index
                  << " failed and is excluded from the average: " << e.what()
                  << "\n";
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  return aggregate_from(cfg, layout, status);
}

EnsembleData aggregate_records(const RunConfig& cfg) {
  cfg.validate();
  SeriesLayout layout = SeriesLayout::plan(cfg);
  std::uint64_t h = config_hash(cfg);
  std::vector<RealizationStatus> status;
  for (int i = 0; i < cfg.n_realizations; ++i) {
    auto rec = load_record(record_path(cfg.out_dir, i), h, layout.rows(),
                           cfg.grid.n_points());
    status.push_back(RealizationStatus{
        i, derive_seed(cfg.base_seed, static_cast<std::uint64_t>(i)),
        rec.has_value(), rec ? "" : "missing record"});
  }
  return aggregate_from(cfg, layout, status);
}

EnsembleData merge(const EnsembleData& a, const EnsembleData& b) {
  if (a.n() == 0) return b;
  if (b.n() == 0) return a;
  if (config_hash(a.cfg) != config_hash(b.cfg)) {
    throw ConfigError("merge: aggregates come from different configurations");
  }
  if (a.moments.n_points() != b.moments.n_points() ||
      a.moments.n_series() != b.moments.n_series()) {
    throw DimensionError("merge: grid or label mismatch");
  }
  EnsembleData r = a;
  r.moments = VectorMoments::merged(a.moments, b.moments);
  double na = static_cast<double>(a.n()), nb = static_cast<double>(b.n());
  r.mean_bandwidth =
      (a.mean_bandwidth * na + b.mean_bandwidth * nb) / (na + nb);
  r.status.insert(r.status.end(), b.status.begin(), b.status.end());
  return r;
}

}  // namespace sykq
