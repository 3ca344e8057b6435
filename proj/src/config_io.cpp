#include "sykq/config_io.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sykq/rng.hpp"

namespace sykq {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "L",      "q",         "axis",   "flavor",         "omega",
      "J",      "n_realizations",      "base_seed",      "t_max",
      "n_steps", "pairs",    "sizes",  "out_dir",        "threads"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown configuration key '" + it.key() + "'");
    }
  }
  for (const char* req : {"L", "q", "axis", "n_realizations", "base_seed"}) {
    if (!j.contains(req)) {
      throw ConfigError(std::string("missing required key '") + req + "'");
    }
  }
  RunConfig cfg;
  cfg.L = j.at("L").get<int>();
  cfg.q = j.at("q").get<int>();
  std::string axis = j.at("axis").get<std::string>();
  Axis a = axis_from_string(axis);
  if (a == Axis::Y) {
    std::cerr << "[sykq] note: axis y is equivalent to axis x by a global "
                 "rotation; running the x model\n";
    a = Axis::X;
  }
  cfg.axis = a;
  cfg.flavor = j.contains("flavor")
                   ? flavor_from_string(j.at("flavor").get<std::string>())
                   : Flavor::Fermionic;
  cfg.omega = j.value("omega", 1.0);
  cfg.J = j.value("J", 1.0);
  cfg.n_realizations = j.at("n_realizations").get<int>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  double t_max = j.value("t_max", 20.0);
  int n_steps = j.value("n_steps", 400);
  cfg.grid = TimeGrid(t_max, n_steps);
  cfg.measure_pairs = true;
  if (j.contains("pairs")) {
    const auto& p = j.at("pairs");
    if (p.is_string()) {
      std::string v = p.get<std::string>();
      if (v == "all") {
        cfg.measure_pairs = true;
      } else if (v == "none") {
        cfg.measure_pairs = false;
      } else {
        throw ConfigError("pairs must be \"all\", \"none\" or a list");
      }
    } else if (p.is_array()) {
      cfg.measure_pairs = false;
      for (const auto& e : p) {
        if (!e.is_array() || e.size() != 2) {
          throw ConfigError("each pair must be a two-element [i, j] array");
        }
        cfg.pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    } else {
      throw ConfigError("pairs must be \"all\", \"none\" or a list");
    }
  }
  if (j.contains("sizes")) {
    cfg.sizes = j.at("sizes").get<std::vector<int>>();
  }
  cfg.out_dir = j.value("out_dir", std::string{});
  cfg.threads = j.value("threads", 0);
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& cfg) {
  json j{{"L", cfg.L},
         {"q", cfg.q},
         {"axis", to_string(cfg.axis)},
         {"flavor", to_string(cfg.flavor)},
         {"omega", cfg.omega},
         {"J", cfg.J},
         {"n_realizations", cfg.n_realizations},
         {"base_seed", cfg.base_seed},
         {"t_max", cfg.grid.t_max},
         {"n_steps", cfg.grid.n_steps}};
  if (cfg.measure_pairs) {
    j["pairs"] = "all";
  } else {
    json arr = json::array();
    for (const auto& [a, b] : cfg.pairs) arr.push_back(json::array({a, b}));
    j["pairs"] = arr;
  }
  if (!cfg.sizes.empty()) j["sizes"] = cfg.sizes;
  if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
  if (cfg.threads) j["threads"] = cfg.threads;
  return j;
}

void write_series_csv(const fs::path& path, const EnsembleSeries& s) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "t,mean,stderr,n\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << s.times[i] << "," << s.mean[i] << "," << s.stderr_[i] << "," << s.n
       << "\n";
  }
  if (!os) throw std::runtime_error("short write to " + path.string());
}

EnsembleSeries read_series_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != "t,mean,stderr,n") {
    throw std::runtime_error("bad series CSV header in " + path.string());
  }
  EnsembleSeries s;
  s.label = path.stem().string();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double t, m, se;
    long n;
    char c;
    if (!(ls >> t >> c >> m >> c >> se >> c >> n)) {
      throw std::runtime_error("bad series CSV row in " + path.string());
    }
    s.times.push_back(t);
    s.mean.push_back(m);
    s.stderr_.push_back(se);
    s.n = n;
  }
  return s;
}

void write_peaks_csv(const fs::path& path, const PeakMatrix& pm) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "i,j,P\n";
  os << std::setprecision(17);
  for (int i = 1; i <= pm.L; ++i) {
    for (int j = i + 1; j <= pm.L; ++j) {
      os << i << "," << j << "," << pm.at(i, j) << "\n";
    }
  }
  if (!os) throw std::runtime_error("short write to " + path.string());
}

std::string hash_string(std::uint64_t h) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_manifest(const EnsembleData& data,
                    const std::vector<std::string>& outputs) {
  json m;
  m["format"] = "sykq-run-manifest";
  m["version"] = 1;
  m["tool_version"] = kToolVersion;
  m["rng"] = kRngIdentity;
  m["config"] = config_to_json(data.cfg);
  m["config_hash"] = hash_string(config_hash(data.cfg));
  m["n_completed"] = data.n();
  m["mean_bandwidth"] = data.mean_bandwidth;
  json labels = json::array();
  for (const auto& e : data.layout.entries) labels.push_back(e.label);
  m["series_labels"] = labels;
  json reals = json::array();
  for (const auto& st : data.status) {
    json r{{"index", st.index},
           {"seed", st.seed},
           {"status", st.done ? "done" : "failed"}};
    if (st.done) {
      r["record"] = record_path(data.cfg.out_dir, st.index)
                        .lexically_relative(data.cfg.out_dir)
                        .string();
    } else {
      r["error"] = st.error;
    }
    reals.push_back(r);
  }
  m["realizations"] = reals;
  m["outputs"] = outputs;
  fs::path path = fs::path(data.cfg.out_dir) / "manifest.json";
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  os << m.dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

void append_manifest_outputs(const fs::path& out_dir,
                             const std::vector<std::string>& outputs) {
  fs::path path = out_dir / "manifest.json";
  std::ifstream is(path);
  if (!is) throw std::runtime_error("no manifest at " + path.string());
  json m;
  is >> m;
  is.close();
  auto& arr = m["outputs"];
  for (const auto& o : outputs) {
    bool present = false;
    for (const auto& e : arr) {
      if (e == o) present = true;
    }
    if (!present) arr.push_back(o);
  }
  std::ofstream os(path, std::ios::trunc);
  os << m.dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot rewrite " + path.string());
}

}  // namespace sykq
