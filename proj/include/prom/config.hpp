#pragma once

// Experiment configuration: JSON with a strict schema. Unknown keys are
// rejected so that a misspelled parameter name cannot silently fall back to
// a default.

#include "prom/excitation.hpp"
#include "prom/newmark.hpp"
#include "prom/param_space.hpp"
#include "prom/region_model.hpp"
#include "prom/structural_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace prom {

/// Per-story quantity: one value, an explicit list, or a linear profile
/// from the bottom story to the top story.
struct StoryProfile {
  std::vector<double> values;  ///< size 1 (uniform) or `stories`
  bool linear = false;         ///< values = {bottom, top}

  std::vector<double> expand(Index stories) const;
};

enum class ParamTarget { A, ZMax, CutoffHz, Amplitude, FrequencyHz };

const char* to_string(ParamTarget t);

struct AxisConfig {
  std::string name;
  ParamTarget target = ParamTarget::A;
  double lower = 0, upper = 0;
};

struct ExcitationConfig {
  std::string type = "sinusoid";  ///< sinusoid | quake
  double frequency_hz = 1;        ///< sinusoid
  double cutoff_hz = 1;           ///< quake
  double amplitude = 1;
  double duration_s = 10;         ///< quake: active window; sinusoid: unused
  std::string pattern = "top";    ///< sinusoid: top | all
  std::vector<double> pattern_values;
  std::uint64_t realization = 0;  ///< quake noise realization index
};

struct ModelConfig {
  Index stories = 2;
  StoryProfile story_mass{{1.0}};
  StoryProfile story_stiffness{{1.0}};
  double damping_ratio = 0.04;
  StoryProfile k_link{{1.0}};
  double A = 1;
  double z_max = 1;
  double w = 1;
  int substeps = 4;
  ExcitationConfig excitation;
  double total_time_s = 10;
};

struct GridConfig {
  std::vector<double> extents;   ///< physical tile extents per axis
  std::vector<Index> divisions;  ///< alternative: equal divisions per axis
  Overlap overlap = Overlap::Remainder;
};

struct ValidationConfig {
  std::string mode = "diagonal_midpoints";  ///< diagonal_midpoints | centroids | points
  std::vector<std::vector<double>> points;
};

struct ReductionConfig {
  Index r_local = 4;
  Index r_global = 0;  ///< region basis order; 0 keeps every stacked column
  std::vector<Variant> variants{Variant::Global, Variant::Local, Variant::Entries, Variant::Coefficients};
};

struct EcswConfig {
  bool enabled = false;
  double tau = 0.01;
  Index stride = 5;
};

struct TimingConfig {
  bool enabled = false;
  int repeats = 3;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelConfig model;
  std::vector<AxisConfig> axes;
  GridConfig grid;
  ValidationConfig validation;
  ReductionConfig reduction;
  EcswConfig ecsw;
  IntegratorConfig<double> integrator;
  TimingConfig timing;
  bool literal_metric = false;
  std::filesystem::path output = "runs/experiment";
  std::uint64_t seed = 0;
  int workers = 0;  ///< 0: hardware concurrency

  Box<double> domain() const;
  ParameterGrid<double> grid_layout() const;

  /// HFM at parameter point p (axes override the model block).
  StructuralModel<double> model_at(const ParameterPoint<double>& p) const;
  LoadHistory<double> loads_at(const ParameterPoint<double>& p, const StructuralModel<double>& model) const;

  /// Canonical JSON of everything that determines the HFM response at a
  /// point, used as the cache key of snapshots and ground truth.
  std::string simulation_key(const ParameterPoint<double>& p) const;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "a,b;c,d" -> {{a,b},{c,d}}
std::vector<std::vector<double>> parse_points(const std::string& text);

}  // namespace prom
