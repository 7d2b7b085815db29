#include "prom/config.hpp"

#include "prom/io.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

namespace prom {

using json = nlohmann::json;

namespace {

/// Reads keys from one JSON object and rejects whatever is left over.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing required key '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const json& v = at(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

StoryProfile parse_profile(const json& j, const std::string& where) {
  StoryProfile p;
  if (j.is_number()) {
    p.values = {j.get<double>()};
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError(where + ": list entries must be numbers");
      p.values.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    Reader r(j, where);
    p.values = {r.get<double>("bottom"), r.get<double>("top")};
    p.linear = true;
    r.finish();
  } else {
    throw ConfigError(where + ": expected a number, a list or {bottom, top}");
  }
  return p;
}

ParamTarget target_from_string(const std::string& s) {
  if (s == "A") return ParamTarget::A;
  if (s == "z_max") return ParamTarget::ZMax;
  if (s == "cutoff_hz") return ParamTarget::CutoffHz;
  if (s == "amplitude") return ParamTarget::Amplitude;
  if (s == "frequency_hz") return ParamTarget::FrequencyHz;
  throw ConfigError("unknown axis target '" + s + "' (expected A, z_max, cutoff_hz, amplitude or frequency_hz)");
}

ExcitationConfig parse_excitation(const json& j) {
  Reader r(j, "model.excitation");
  ExcitationConfig e;
  e.type = r.get<std::string>("type");
  e.amplitude = r.get<double>("amplitude");
  if (e.type == "sinusoid") {
    e.frequency_hz = r.get<double>("frequency_hz");
    if (r.has("pattern")) {
      const json& p = r.at("pattern");
      if (p.is_string()) {
        e.pattern = p.get<std::string>();
        if (e.pattern != "top" && e.pattern != "all") {
          throw ConfigError("model.excitation.pattern: expected 'top', 'all' or a list");
        }
      } else if (p.is_array()) {
        e.pattern = "list";
        for (const auto& v : p) e.pattern_values.push_back(v.get<double>());
      } else {
        throw ConfigError("model.excitation.pattern: expected 'top', 'all' or a list");
      }
    }
  } else if (e.type == "quake") {
    e.cutoff_hz = r.get<double>("cutoff_hz");
    e.duration_s = r.get<double>("duration_s");
    e.realization = r.get_or<std::uint64_t>("realization", 0);
  } else {
    throw ConfigError("model.excitation.type: expected 'sinusoid' or 'quake', got '" + e.type + "'");
  }
  r.finish();
  return e;
}

ModelConfig parse_model(const json& j) {
  Reader r(j, "model");
  ModelConfig m;
  m.stories = r.get<Index>("stories");
  m.story_mass = parse_profile(r.at("story_mass"), "model.story_mass");
  m.story_stiffness = parse_profile(r.at("story_stiffness"), "model.story_stiffness");
  m.damping_ratio = r.get<double>("damping_ratio");
  {
    Reader l(r.at("link"), "model.link");
    m.k_link = parse_profile(l.at("k_link"), "model.link.k_link");
    m.A = l.get_or<double>("A", m.A);
    m.z_max = l.get_or<double>("z_max", m.z_max);
    m.w = l.get_or<double>("w", m.w);
    m.substeps = l.get_or<int>("substeps", m.substeps);
    l.finish();
  }
  m.excitation = parse_excitation(r.at("excitation"));
  m.total_time_s = r.get<double>("total_time_s");
  r.finish();
  return m;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + ": list entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json profile_json(const StoryProfile& p, Index stories) { return json(p.expand(stories)); }

}  // namespace

std::vector<double> StoryProfile::expand(Index stories) const {
  require(stories >= 1, "stories must be >= 1");
  if (linear) {
    std::vector<double> out(static_cast<std::size_t>(stories));
    for (Index e = 0; e < stories; ++e) {
      const double t = stories > 1 ? double(e) / double(stories - 1) : 0.0;
      out[static_cast<std::size_t>(e)] = values[0] + t * (values[1] - values[0]);
    }
    return out;
  }
  if (values.size() == 1) return std::vector<double>(static_cast<std::size_t>(stories), values[0]);
  require(static_cast<Index>(values.size()) == stories,
          "per-story list has " + std::to_string(values.size()) + " entries for " + std::to_string(stories) +
              " stories");
  return values;
}

const char* to_string(ParamTarget t) {
  switch (t) {
    case ParamTarget::A: return "A";
    case ParamTarget::ZMax: return "z_max";
    case ParamTarget::CutoffHz: return "cutoff_hz";
    case ParamTarget::Amplitude: return "amplitude";
    case ParamTarget::FrequencyHz: return "frequency_hz";
  }
  return "unknown";
}

Box<double> ExperimentConfig::domain() const {
  Box<double> b;
  for (const auto& a : axes) b.axes.push_back({a.name, a.lower, a.upper});
  return b;
}

ParameterGrid<double> ExperimentConfig::grid_layout() const {
  const Box<double> d = domain();
  if (!grid.extents.empty()) return partition_grid_extents(d, grid.extents, grid.overlap);
  return partition_grid(d, grid.divisions, grid.overlap);
}

namespace {

struct Resolved {
  double A, z_max, cutoff_hz, amplitude, frequency_hz;
};

Resolved resolve(const ExperimentConfig& c, const ParameterPoint<double>& p) {
  require(p.dim() == static_cast<Index>(c.axes.size()), "parameter point " + p.str() + " has the wrong dimension");
  Resolved r{c.model.A, c.model.z_max, c.model.excitation.cutoff_hz, c.model.excitation.amplitude,
             c.model.excitation.frequency_hz};
  for (std::size_t k = 0; k < c.axes.size(); ++k) {
    const double v = p[static_cast<Index>(k)];
    switch (c.axes[k].target) {
      case ParamTarget::A: r.A = v; break;
      case ParamTarget::ZMax: r.z_max = v; break;
      case ParamTarget::CutoffHz: r.cutoff_hz = v; break;
      case ParamTarget::Amplitude: r.amplitude = v; break;
      case ParamTarget::FrequencyHz: r.frequency_hz = v; break;
    }
  }
  return r;
}

}  // namespace

StructuralModel<double> ExperimentConfig::model_at(const ParameterPoint<double>& p) const {
  const Resolved r = resolve(*this, p);
  const Index n = model.stories;
  const auto kl = model.k_link.expand(n);
  std::vector<LinkParams<double>> lp;
  for (Index e = 0; e < n; ++e) lp.push_back({kl[static_cast<std::size_t>(e)], r.A, r.z_max, model.w});
  return build_shear_frame(model.story_mass.expand(n), model.story_stiffness.expand(n), model.damping_ratio, lp,
                           model.substeps);
}

LoadHistory<double> ExperimentConfig::loads_at(const ParameterPoint<double>& p,
                                               const StructuralModel<double>& m) const {
  const Resolved r = resolve(*this, p);
  const double dt = integrator.dt;
  const auto& e = model.excitation;
  if (e.type == "quake") {
    QuakeParams<double> q{r.cutoff_hz, r.amplitude, e.duration_s, model.total_time_s, mix_seed(seed, e.realization)};
    return filtered_noise_quake(q, m.mass_diagonal(), dt);
  }
  Vec<double> pattern = Vec<double>::Zero(m.n);
  if (e.pattern == "top") {
    pattern(m.n - 1) = 1;
  } else if (e.pattern == "all") {
    pattern.setOnes();
  } else {
    require(static_cast<Index>(e.pattern_values.size()) == m.n, "load pattern needs one entry per story");
    for (Index i = 0; i < m.n; ++i) pattern(i) = e.pattern_values[static_cast<std::size_t>(i)];
  }
  const Index steps = static_cast<Index>(std::floor(model.total_time_s / dt + 1e-9)) + 1;
  return sinusoid(r.frequency_hz, r.amplitude, pattern, dt, steps);
}

std::string ExperimentConfig::simulation_key(const ParameterPoint<double>& p) const {
  const Resolved r = resolve(*this, p);
  const Index n = model.stories;
  json j;
  j["story_mass"] = profile_json(model.story_mass, n);
  j["story_stiffness"] = profile_json(model.story_stiffness, n);
  j["damping_ratio"] = model.damping_ratio;
  j["k_link"] = profile_json(model.k_link, n);
  j["A"] = r.A;
  j["z_max"] = r.z_max;
  j["w"] = model.w;
  j["substeps"] = model.substeps;
  j["excitation"] = {{"type", model.excitation.type},
                     {"amplitude", r.amplitude},
                     {"frequency_hz", r.frequency_hz},
                     {"cutoff_hz", r.cutoff_hz},
                     {"duration_s", model.excitation.duration_s},
                     {"pattern", model.excitation.pattern},
                     {"pattern_values", model.excitation.pattern_values},
                     {"realization", model.excitation.realization}};
  j["total_time_s"] = model.total_time_s;
  j["integrator"] = {{"dt", integrator.dt},
                     {"beta", integrator.beta},
                     {"gamma", integrator.gamma},
                     {"newton_tol", integrator.newton_tol},
                     {"max_newton_iters", integrator.max_newton_iters}};
  if (model.excitation.type == "quake") j["seed"] = seed;
  return io::sha256_string(j.dump());
}

void ExperimentConfig::validate() const {
  require(model.stories >= 1, "model.stories must be >= 1");
  require(model.damping_ratio > 0, "model.damping_ratio must be positive");
  require(model.total_time_s > 0, "model.total_time_s must be positive");
  require(model.w >= 1, "model.link.w must be >= 1");
  require(model.substeps >= 1, "model.link.substeps must be >= 1");
  for (const auto* p : {&model.story_mass, &model.story_stiffness, &model.k_link}) {
    for (double v : p->expand(model.stories)) require(v > 0, "per-story masses and stiffnesses must be positive");
  }
  require(!axes.empty(), "at least one parameter axis is required");
  std::set<std::string> names;
  std::set<ParamTarget> targets;
  for (const auto& a : axes) {
    require(names.insert(a.name).second, "duplicate axis name '" + a.name + "'");
    require(targets.insert(a.target).second, "two axes drive the same parameter '" + std::string(to_string(a.target)) + "'");
    require(a.upper > a.lower, "axis '" + a.name + "' is degenerate (zero or negative width)");
    require(a.lower > 0, "axis '" + a.name + "' must stay positive");
    if (a.target == ParamTarget::CutoffHz) require(model.excitation.type == "quake", "cutoff_hz axis needs a quake excitation");
    if (a.target == ParamTarget::FrequencyHz) require(model.excitation.type == "sinusoid", "frequency_hz axis needs a sinusoid excitation");
  }
  require(grid.extents.empty() != grid.divisions.empty(), "grid needs exactly one of 'extents' or 'divisions'");
  require(grid.extents.empty() || grid.extents.size() == axes.size(), "grid.extents needs one entry per axis");
  require(grid.divisions.empty() || grid.divisions.size() == axes.size(), "grid.divisions needs one entry per axis");
  require(reduction.r_local >= 1, "reduction.r_local must be >= 1");
  require(reduction.r_global >= 0, "reduction.r_global must be >= 0");
  require(!reduction.variants.empty(), "reduction.variants must not be empty");
  require(ecsw.tau > 0 && ecsw.tau <= 1, "ecsw.tau must lie in (0, 1]");
  require(ecsw.stride >= 1, "ecsw.stride must be >= 1");
  require(timing.repeats >= 1, "timing.repeats must be >= 1");
  require(workers >= 0, "workers must be >= 0");
  for (const auto& p : validation.points) {
    require(p.size() == axes.size(), "validation point has the wrong dimension");
  }
  integrator.validate();
  grid_layout();  // rejects degenerate partitions
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Reader r(root, "config");
  ExperimentConfig c;
  c.name = r.get_or<std::string>("name", c.name);
  c.model = parse_model(r.at("model"));

  const json& axes = r.at("axes");
  if (!axes.is_array()) throw ConfigError("config.axes: expected a list");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    Reader a(axes[i], "axes[" + std::to_string(i) + "]");
    AxisConfig ax;
    ax.name = a.get<std::string>("name");
    ax.target = target_from_string(a.get<std::string>("target"));
    ax.lower = a.get<double>("lower");
    ax.upper = a.get<double>("upper");
    a.finish();
    c.axes.push_back(ax);
  }

  {
    Reader g(r.at("grid"), "grid");
    if (g.has("extents")) c.grid.extents = number_list(g.at("extents"), "grid.extents");
    if (g.has("divisions")) {
      for (double v : number_list(g.at("divisions"), "grid.divisions")) {
        require(v >= 1 && v == std::floor(v), "grid.divisions entries must be positive integers");
        c.grid.divisions.push_back(static_cast<Index>(v));
      }
    }
    const std::string ov = g.get_or<std::string>("overlap", "remainder");
    if (ov == "remainder") c.grid.overlap = Overlap::Remainder;
    else if (ov == "none") c.grid.overlap = Overlap::None;
    else throw ConfigError("grid.overlap: expected 'remainder' or 'none'");
    g.finish();
  }

  if (r.has("validation")) {
    Reader v(r.at("validation"), "validation");
    c.validation.mode = v.get_or<std::string>("mode", c.validation.mode);
    if (v.has("points")) {
      for (const auto& p : v.at("points")) c.validation.points.push_back(number_list(p, "validation.points"));
    }
    v.finish();
    if (c.validation.mode != "diagonal_midpoints" && c.validation.mode != "centroids" && c.validation.mode != "points") {
      throw ConfigError("validation.mode: expected diagonal_midpoints, centroids or points");
    }
    if (c.validation.mode == "points" && c.validation.points.empty()) {
      throw ConfigError("validation.mode 'points' needs a non-empty points list");
    }
  }

  {
    Reader red(r.at("reduction"), "reduction");
    c.reduction.r_local = red.get<Index>("r_local");
    c.reduction.r_global = red.get_or<Index>("r_global", 0);
    if (red.has("variants")) {
      c.reduction.variants.clear();
      for (const auto& s : red.get<std::vector<std::string>>("variants")) {
        c.reduction.variants.push_back(variant_from_string(s));
      }
    }
    red.finish();
  }

  if (r.has("ecsw")) {
    Reader e(r.at("ecsw"), "ecsw");
    c.ecsw.enabled = e.get_or<bool>("enabled", c.ecsw.enabled);
    c.ecsw.tau = e.get_or<double>("tau", c.ecsw.tau);
    c.ecsw.stride = e.get_or<Index>("stride", c.ecsw.stride);
    e.finish();
  }

  if (r.has("integrator")) {
    Reader in(r.at("integrator"), "integrator");
    c.integrator.dt = in.get_or<double>("dt", c.integrator.dt);
    c.integrator.beta = in.get_or<double>("beta", c.integrator.beta);
    c.integrator.gamma = in.get_or<double>("gamma", c.integrator.gamma);
    c.integrator.newton_tol = in.get_or<double>("newton_tol", c.integrator.newton_tol);
    c.integrator.max_newton_iters = in.get_or<int>("max_newton_iters", c.integrator.max_newton_iters);
    in.finish();
  }

  if (r.has("timing")) {
    Reader t(r.at("timing"), "timing");
    c.timing.enabled = t.get_or<bool>("enabled", c.timing.enabled);
    c.timing.repeats = t.get_or<int>("repeats", c.timing.repeats);
    t.finish();
  }

  if (r.has("metric")) {
    Reader m(r.at("metric"), "metric");
    const std::string d = m.get_or<std::string>("denominator", "hfm");
    if (d == "hfm") c.literal_metric = false;
    else if (d == "literal") c.literal_metric = true;
    else throw ConfigError("metric.denominator: expected 'hfm' or 'literal'");
    m.finish();
  }

  c.output = r.get_or<std::string>("output", "runs/" + c.name);
  c.seed = r.get_or<std::uint64_t>("seed", 0);
  c.workers = r.get_or<int>("workers", 0);
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file " + path.string() + " does not exist");
  return parse_config(io::read_text(path));
}

std::vector<std::vector<double>> parse_points(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> p;
    std::stringstream one(item);
    std::string tok;
    while (std::getline(one, tok, ',')) {
      try {
        std::size_t used = 0;
        p.push_back(std::stod(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("cannot parse query point coordinate '" + tok + "'");
      }
    }
    out.push_back(std::move(p));
  }
  if (out.empty()) throw ConfigError("--points needs at least one point, e.g. \"0.5,30000;0.6,20000\"");
  return out;
}

}  // namespace prom
