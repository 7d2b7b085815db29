#pragma once

// Offline training, online evaluation and report aggregation on disk.
//
// Layout under the output directory:
//   manifest.json                      artifact groups with input keys and file hashes
//   snapshots/<key>/                   HFM runs (training points and ground truth)
//   global/                            domain-wide basis
//   regions/subdomain-<id>/            bases, tangents, Xi matrices, hyper mesh
//   online/errors.csv, timing.csv, summary.json

#include "prom/config.hpp"
#include "prom/evaluation.hpp"
#include "prom/region_model.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prom {

namespace fs = std::filesystem;

/// Content-hash bookkeeping of persisted artifacts.
class Manifest {
 public:
  struct Group {
    std::string input;                          ///< hash of everything the group depends on
    std::map<std::string, std::string> files;  ///< relative path -> sha256
  };

  static Manifest load(const fs::path& root);  ///< empty manifest if absent
  void save() const;

  /// True if the group exists with the same input key and every file hashes
  /// to its recorded value.
  bool up_to_date(const std::string& group, const std::string& input) const;
  /// Throws ConfigError if the group is missing or any file fails its hash.
  void verify(const std::string& group, const std::string& hint) const;
  void record(const std::string& group, const std::string& input, const std::vector<std::string>& rel_files);

  const fs::path& root() const { return root_; }
  bool contains(const std::string& group) const { return groups_.count(group) != 0; }

 private:
  fs::path root_;
  std::map<std::string, Group> groups_;
};

struct OfflineSummary {
  Index simulations_run = 0;
  Index simulations_reused = 0;
  Index regions_built = 0;
  Index regions_reused = 0;
  bool global_built = false;
};

struct OnlineOptions {
  std::optional<std::vector<std::vector<double>>> points;  ///< overrides the validation block
  std::ostream* log = nullptr;
};

struct OnlineResult {
  std::vector<ComparisonReport> rows;
  fs::path errors_csv;
  fs::path timing_csv;
};

struct ReportResult {
  Index files = 0;
  Index rows = 0;
  fs::path summary_csv;
};

/// Parallel loop over [0, count) with `workers` threads (0: hardware
/// concurrency). The first exception by index is rethrown.
void parallel_for(Index count, int workers, const std::function<void(Index)>& body);

OfflineSummary run_offline(const ExperimentConfig& cfg, std::ostream* log = nullptr);
OnlineResult run_online(const ExperimentConfig& cfg, const OnlineOptions& opts = {});
ReportResult report(const fs::path& dir, std::ostream* log = nullptr);

/// Query points of the validation block (deduplicated, in grid order).
std::vector<ParameterPoint<double>> validation_points(const ExperimentConfig& cfg);

/// Persist / restore a region model.
void save_region(const RegionModel<double>& rm, const fs::path& dir, std::vector<std::string>& written,
                 const fs::path& root);
RegionModel<double> load_region(const fs::path& dir);

std::string hyper_mesh_json(const HyperMesh<double>& mesh);
HyperMesh<double> hyper_mesh_from_json(const std::string& text);

}  // namespace prom
