#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sykq/ensemble.hpp"
#include "sykq/observables.hpp"
#include "sykq/stats.hpp"

namespace sykq {

/// Parse a JSON run configuration.  Required keys: L, q, axis,
/// n_realizations, base_seed.  Defaults: omega = 1, J = 1, t_max = 20,
/// n_steps = 400, flavor = fermionic, pairs = "all".  Unknown keys are
/// rejected.  Axis "y" is accepted and mapped to "x" (the models are related
/// by a global rotation); a note goes to stderr.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

/// CSV with header exactly "t,mean,stderr,n".
void write_series_csv(const std::filesystem::path& path,
                      const EnsembleSeries& s);
EnsembleSeries read_series_csv(const std::filesystem::path& path);

/// CSV with header exactly "i,j,P".
void write_peaks_csv(const std::filesystem::path& path, const PeakMatrix& pm);

/// Run manifest: config, hash, generator identity, per-realization status
/// and every data file emitted for this run.
void write_manifest(const EnsembleData& data,
                    const std::vector<std::string>& outputs);
/// Register additional output files in an existing manifest.
void append_manifest_outputs(const std::filesystem::path& out_dir,
                             const std::vector<std::string>& outputs);

std::string hash_string(std::uint64_t h);

}  // namespace sykq
