#include "prom/pipeline.hpp"

#include "prom/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace prom {

using json = nlohmann::json;

// ---------------------------------------------------------------- manifest

Manifest Manifest::load(const fs::path& root) {
  Manifest m;
  m.root_ = root;
  const fs::path p = root / "manifest.json";
  if (!fs::exists(p)) return m;
  json j;
  try {
    j = json::parse(io::read_text(p));
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + p.string() + " is corrupt: " + e.what());
  }
  for (auto& [name, g] : j.at("groups").items()) {
    Group grp;
    grp.input = g.at("input").get<std::string>();
    grp.files = g.at("files").get<std::map<std::string, std::string>>();
    m.groups_[name] = std::move(grp);
  }
  return m;
}

void Manifest::save() const {
  json j;
  j["format"] = 1;
  j["groups"] = json::object();
  for (const auto& [name, g] : groups_) j["groups"][name] = {{"input", g.input}, {"files", g.files}};
  io::write_text(root_ / "manifest.json", j.dump(2) + "\n");
}

bool Manifest::up_to_date(const std::string& group, const std::string& input) const {
  auto it = groups_.find(group);
  if (it == groups_.end() || it->second.input != input) return false;
  for (const auto& [rel, sha] : it->second.files) {
    const fs::path p = root_ / rel;
    if (!fs::exists(p) || io::sha256_file(p) != sha) return false;
  }
  return true;
}

void Manifest::verify(const std::string& group, const std::string& hint) const {
  auto it = groups_.find(group);
  if (it == groups_.end()) {
    throw ConfigError("artifact group '" + group + "' is missing from " + (root_ / "manifest.json").string() + "; " +
                      hint);
  }
  for (const auto& [rel, sha] : it->second.files) {
    const fs::path p = root_ / rel;
    if (!fs::exists(p)) throw ConfigError("artifact " + p.string() + " is missing; " + hint);
    if (io::sha256_file(p) != sha) throw ConfigError("artifact " + p.string() + " failed hash verification; " + hint);
  }
}

void Manifest::record(const std::string& group, const std::string& input, const std::vector<std::string>& rel_files) {
  Group g;
  g.input = input;
  for (const auto& rel : rel_files) g.files[rel] = io::sha256_file(root_ / rel);
  groups_[group] = std::move(g);
}

// ---------------------------------------------------------------- helpers

void parallel_for(Index count, int workers, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  unsigned nw = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
  nw = std::min<unsigned>(nw, static_cast<unsigned>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

std::string short_key(const std::string& key) { return key.substr(0, 16); }

std::string snapshot_group(const std::string& key) { return "snapshot:" + short_key(key); }

std::string rel_snapshot_dir(const std::string& key) { return "snapshots/" + short_key(key); }

json point_json(const ParameterPoint<double>& p) {
  std::vector<double> v(p.coords.data(), p.coords.data() + p.dim());
  return v;
}

ParameterPoint<double> point_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return ParameterPoint<double>(Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size())));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

void say(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << '\n';
}

/// Write an HFM run and return the relative file list.
std::vector<std::string> write_snapshot(const fs::path& root, const std::string& key, const ParameterPoint<double>& p,
                                        const GroundTruth<double>& g) {
  const std::string dir = rel_snapshot_dir(key);
  io::write_matrix(root / dir / "displacements.bin", g.displacements);
  io::write_matrix(root / dir / "link_forces.bin", g.link_forces);
  json meta;
  meta["parameter_point"] = point_json(p);
  meta["simulation_key"] = key;
  meta["dofs"] = g.displacements.rows();
  meta["steps"] = g.displacements.cols();
  meta["links"] = g.link_forces.rows();
  io::write_text(root / dir / "meta.json", meta.dump(2) + "\n");
  return {dir + "/displacements.bin", dir + "/link_forces.bin", dir + "/meta.json"};
}

SnapshotSet<double> read_snapshot(const fs::path& root, const std::string& key, const ParameterPoint<double>& p) {
  const fs::path dir = root / rel_snapshot_dir(key);
  return {p, io::read_matrix(dir / "displacements.bin"), io::read_matrix(dir / "link_forces.bin")};
}

GroundTruth<double> truth_from_snapshot(const ExperimentConfig& cfg, const ParameterPoint<double>& p,
                                        SnapshotSet<double> s) {
  GroundTruth<double> g;
  const auto model = cfg.model_at(p);
  g.displacements = std::move(s.displacements);
  g.link_forces = std::move(s.link_forces);
  g.story_forces = element_force_history(model, g.displacements, g.link_forces);
  return g;
}

std::string region_input(const ExperimentConfig& cfg, const Subdomain<double>& sub) {
  json j;
  j["lower"] = point_json(sub.lower);
  j["upper"] = point_json(sub.upper);
  std::vector<std::string> keys;
  for (const auto& tp : sub.training_points) keys.push_back(cfg.simulation_key(tp));
  j["snapshots"] = keys;
  j["r_local"] = cfg.reduction.r_local;
  j["r_global"] = cfg.reduction.r_global;
  j["ecsw"] = {{"enabled", cfg.ecsw.enabled}, {"tau", cfg.ecsw.tau}, {"stride", cfg.ecsw.stride}};
  return io::sha256_string(j.dump());
}

std::string region_group(Index id) { return "region:" + std::to_string(id); }

std::string region_rel_dir(Index id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "regions/subdomain-%03ld", static_cast<long>(id));
  return buf;
}

json basis_meta(const ReductionBasis<double>& b) {
  std::vector<double> sv(b.singular_values.data(), b.singular_values.data() + b.singular_values.size());
  return {{"provenance", to_string(b.provenance)}, {"source", b.source}, {"singular_values", sv},
          {"rows", b.dofs()}, {"cols", b.order()}};
}

ReductionBasis<double> read_basis(const fs::path& bin, const json& meta) {
  ReductionBasis<double> b;
  b.matrix = io::read_matrix(bin);
  const auto sv = meta.at("singular_values").get<std::vector<double>>();
  b.singular_values = Eigen::Map<const VectorXd>(sv.data(), static_cast<Index>(sv.size()));
  b.provenance = provenance_from_string(meta.at("provenance").get<std::string>());
  b.source = meta.at("source").get<std::string>();
  return b;
}

const char* kOfflineHint = "run `prom offline --config <config>` first";

}  // namespace

// ---------------------------------------------------------------- persistence

std::string hyper_mesh_json(const HyperMesh<double>& mesh) {
  json j;
  j["selected"] = mesh.selected;
  std::vector<double> w(mesh.weights.data(), mesh.weights.data() + mesh.weights.size());
  j["weights"] = w;
  j["tau"] = mesh.tau;
  j["residual"] = mesh.residual;
  j["feasible"] = mesh.feasible;
  j["total_elements"] = mesh.total_elements;
  j["basis_fingerprint"] = mesh.basis_fingerprint;
  return j.dump(2) + "\n";
}

HyperMesh<double> hyper_mesh_from_json(const std::string& text) {
  const json j = json::parse(text);
  HyperMesh<double> m;
  m.selected = j.at("selected").get<std::vector<Index>>();
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const VectorXd>(w.data(), static_cast<Index>(w.size()));
  m.tau = j.at("tau").get<double>();
  m.residual = j.at("residual").get<double>();
  m.feasible = j.at("feasible").get<bool>();
  m.total_elements = j.at("total_elements").get<Index>();
  m.basis_fingerprint = j.at("basis_fingerprint").get<std::string>();
  return m;
}

void save_region(const RegionModel<double>& rm, const fs::path& dir, std::vector<std::string>& written,
                 const fs::path& root) {
  auto rel = [&](const std::string& name) {
    const fs::path p = dir / name;
    written.push_back(fs::relative(p, root).generic_string());
    return p;
  };
  json meta;
  meta["subdomain"] = {{"id", rm.subdomain.id},
                       {"lower", point_json(rm.subdomain.lower)},
                       {"upper", point_json(rm.subdomain.upper)},
                       {"reference_index", rm.subdomain.reference_index},
                       {"overlapping", rm.subdomain.overlapping}};
  json tps = json::array();
  for (const auto& tp : rm.subdomain.training_points) tps.push_back(point_json(tp));
  meta["subdomain"]["training_points"] = tps;

  json locals = json::array();
  for (std::size_t i = 0; i < rm.local_bases.size(); ++i) {
    const std::string k = std::to_string(i);
    io::write_matrix(rel("local_basis_" + k + ".bin"), rm.local_bases[i].matrix);
    io::write_matrix(rel("tangent_" + k + ".bin"), rm.tangent_locals[i].matrix);
    io::write_matrix(rel("xi_" + k + ".bin"), rm.coeff_matrices[i]);
    locals.push_back(basis_meta(rm.local_bases[i]));
  }
  meta["local_bases"] = locals;
  io::write_matrix(rel("reference_basis.bin"), rm.reference_basis.matrix);
  meta["reference_basis"] = basis_meta(rm.reference_basis);
  io::write_matrix(rel("region_basis.bin"), rm.global_region_basis.matrix);
  meta["region_basis"] = basis_meta(rm.global_region_basis);
  io::write_matrix(rel("local_region_basis.bin"), rm.local_region_basis.matrix);
  meta["local_region_basis"] = basis_meta(rm.local_region_basis);
  meta["has_hyper_mesh"] = rm.hyper_mesh.has_value();
  if (rm.hyper_mesh) io::write_text(rel("hyper_mesh.json"), hyper_mesh_json(*rm.hyper_mesh));
  io::write_text(rel("meta.json"), meta.dump(2) + "\n");
}

RegionModel<double> load_region(const fs::path& dir) {
  const json meta = json::parse(io::read_text(dir / "meta.json"));
  RegionModel<double> rm;
  const json& s = meta.at("subdomain");
  rm.subdomain.id = s.at("id").get<Index>();
  rm.subdomain.lower = point_from_json(s.at("lower"));
  rm.subdomain.upper = point_from_json(s.at("upper"));
  rm.subdomain.reference_index = s.at("reference_index").get<Index>();
  rm.subdomain.overlapping = s.at("overlapping").get<bool>();
  for (const auto& tp : s.at("training_points")) rm.subdomain.training_points.push_back(point_from_json(tp));
  const auto& locals = meta.at("local_bases");
  for (std::size_t i = 0; i < locals.size(); ++i) {
    const std::string k = std::to_string(i);
    rm.local_bases.push_back(read_basis(dir / ("local_basis_" + k + ".bin"), locals[i]));
    rm.tangent_locals.push_back({io::read_matrix(dir / ("tangent_" + k + ".bin")), rm.id()});
    rm.coeff_matrices.push_back(io::read_matrix(dir / ("xi_" + k + ".bin")));
  }
  rm.reference_basis = read_basis(dir / "reference_basis.bin", meta.at("reference_basis"));
  rm.global_region_basis = read_basis(dir / "region_basis.bin", meta.at("region_basis"));
  rm.local_region_basis = read_basis(dir / "local_region_basis.bin", meta.at("local_region_basis"));
  if (meta.at("has_hyper_mesh").get<bool>()) rm.hyper_mesh = hyper_mesh_from_json(io::read_text(dir / "hyper_mesh.json"));
  return rm;
}

// ---------------------------------------------------------------- offline

OfflineSummary run_offline(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const fs::path root = cfg.output;
  fs::create_directories(root);
  Manifest manifest = Manifest::load(root);
  const auto grid = cfg.grid_layout();
  OfflineSummary summary;

  // Unique training points in grid order.
  std::vector<ParameterPoint<double>> points;
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const auto& sub : grid.subdomains) {
    for (const auto& tp : sub.training_points) {
      const std::string key = cfg.simulation_key(tp);
      if (seen.insert(key).second) {
        points.push_back(tp);
        keys.push_back(key);
      }
    }
  }

  std::vector<Index> todo;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (manifest.up_to_date(snapshot_group(keys[i]), keys[i])) {
      ++summary.simulations_reused;
    } else {
      todo.push_back(static_cast<Index>(i));
    }
  }
  say(log, "offline: " + std::to_string(points.size()) + " training points, " + std::to_string(todo.size()) +
               " to simulate");
  std::vector<std::vector<std::string>> written(todo.size());
  parallel_for(static_cast<Index>(todo.size()), cfg.workers, [&](Index t) {
    const auto i = static_cast<std::size_t>(todo[static_cast<std::size_t>(t)]);
    try {
      const auto model = cfg.model_at(points[i]);
      const auto g = run_hfm(model, cfg.loads_at(points[i], model), cfg.integrator);
      written[static_cast<std::size_t>(t)] = write_snapshot(root, keys[i], points[i], g);
    } catch (const NumericError& e) {
      throw NumericError("training simulation at " + points[i].str() + " failed: " + e.what());
    }
  });
  for (std::size_t t = 0; t < todo.size(); ++t) {
    const auto i = static_cast<std::size_t>(todo[t]);
    manifest.record(snapshot_group(keys[i]), keys[i], written[t]);
  }
  summary.simulations_run = static_cast<Index>(todo.size());
  manifest.save();

  std::map<std::string, SnapshotSet<double>> snaps;
  auto snapshot = [&](const ParameterPoint<double>& p) -> const SnapshotSet<double>& {
    const std::string key = cfg.simulation_key(p);
    auto it = snaps.find(key);
    if (it == snaps.end()) it = snaps.emplace(key, read_snapshot(root, key, p)).first;
    return it->second;
  };

  const bool want_global = std::count(cfg.reduction.variants.begin(), cfg.reduction.variants.end(), Variant::Global) > 0;
  if (want_global) {
    const std::string input = io::sha256_string(
        json{{"snapshots", keys}, {"r", cfg.reduction.r_local}}.dump());
    if (!manifest.up_to_date("global", input)) {
      std::vector<const SnapshotSet<double>*> all;
      for (const auto& p : points) all.push_back(&snapshot(p));
      const auto gb = build_global(all, cfg.reduction.r_local);
      io::write_matrix(root / "global/basis.bin", gb.matrix);
      io::write_text(root / "global/meta.json", basis_meta(gb).dump(2) + "\n");
      manifest.record("global", input, {"global/basis.bin", "global/meta.json"});
      manifest.save();
      summary.global_built = true;
      say(log, "offline: global basis built");
    }
  }

  std::vector<Index> regions_todo;
  for (const auto& sub : grid.subdomains) {
    if (manifest.up_to_date(region_group(sub.id), region_input(cfg, sub))) {
      ++summary.regions_reused;
    } else {
      regions_todo.push_back(sub.id);
    }
  }
  for (Index id : regions_todo) {
    for (const auto& tp : grid.subdomains[static_cast<std::size_t>(id)].training_points) snapshot(tp);
  }
  std::vector<std::vector<std::string>> region_files(regions_todo.size());
  parallel_for(static_cast<Index>(regions_todo.size()), cfg.workers, [&](Index t) {
    const auto& sub = grid.subdomains[static_cast<std::size_t>(regions_todo[static_cast<std::size_t>(t)])];
    std::vector<const SnapshotSet<double>*> sets;
    for (const auto& tp : sub.training_points) sets.push_back(&snaps.at(cfg.simulation_key(tp)));
    auto rm = build_region(sub, sets, cfg.reduction.r_local, cfg.reduction.r_global);
    if (cfg.ecsw.enabled) {
      rm.hyper_mesh = train_region_mesh(rm, cfg.model_at(sub.reference()), sets, cfg.ecsw.stride, cfg.ecsw.tau);
    }
    const fs::path dir = root / region_rel_dir(sub.id);
    fs::remove_all(dir);
    save_region(rm, dir, region_files[static_cast<std::size_t>(t)], root);
  });
  for (std::size_t t = 0; t < regions_todo.size(); ++t) {
    const auto& sub = grid.subdomains[static_cast<std::size_t>(regions_todo[t])];
    manifest.record(region_group(sub.id), region_input(cfg, sub), region_files[t]);
  }
  summary.regions_built = static_cast<Index>(regions_todo.size());
  manifest.save();
  say(log, "offline: " + std::to_string(summary.regions_built) + " region models built, " +
               std::to_string(summary.regions_reused) + " up to date");
  return summary;
}

// ---------------------------------------------------------------- online

std::vector<ParameterPoint<double>> validation_points(const ExperimentConfig& cfg) {
  std::vector<ParameterPoint<double>> out;
  std::set<std::string> seen;
  auto add = [&](const ParameterPoint<double>& p) {
    if (seen.insert(p.str()).second) out.push_back(p);
  };
  if (cfg.validation.mode == "points") {
    for (const auto& v : cfg.validation.points) {
      add(ParameterPoint<double>(Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()))));
    }
    return out;
  }
  const auto grid = cfg.grid_layout();
  for (const auto& sub : grid.subdomains) {
    if (cfg.validation.mode == "centroids") {
      add(sub.reference());
      continue;
    }
    const VectorXd c = sub.reference().coords;
    for (Index k = 0; k < sub.reference_index; ++k) {
      add(ParameterPoint<double>(VectorXd((c + sub.training_points[static_cast<std::size_t>(k)].coords) / 2)));
    }
  }
  return out;
}

OnlineResult run_online(const ExperimentConfig& cfg, const OnlineOptions& opts) {
  cfg.validate();
  const fs::path root = cfg.output;
  if (!fs::exists(root / "manifest.json")) {
    throw ConfigError("no offline artifacts in " + root.string() + "; " + kOfflineHint);
  }
  Manifest manifest = Manifest::load(root);
  const auto grid = cfg.grid_layout();
  const auto domain = cfg.domain();

  std::vector<ParameterPoint<double>> queries;
  if (opts.points) {
    for (const auto& v : *opts.points) {
      require(v.size() == cfg.axes.size(), "query point has " + std::to_string(v.size()) + " coordinates, expected " +
                                               std::to_string(cfg.axes.size()));
      queries.emplace_back(Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size())));
    }
  } else {
    queries = validation_points(cfg);
  }

  // Regions and global basis, hash-verified on load.
  std::vector<Index> sub_of(queries.size());
  std::map<Index, RegionModel<double>> regions;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& sub = locate(grid, queries[i]);
    sub_of[i] = sub.id;
    if (!regions.count(sub.id)) {
      if (!manifest.up_to_date(region_group(sub.id), region_input(cfg, sub))) {
        manifest.verify(region_group(sub.id), kOfflineHint);
        throw ConfigError("region model " + region_rel_dir(sub.id) + " is out of date with the config; " + kOfflineHint);
      }
      regions.emplace(sub.id, load_region(root / region_rel_dir(sub.id)));
    }
  }
  std::optional<ReductionBasis<double>> global;
  const auto& variants = cfg.reduction.variants;
  if (std::count(variants.begin(), variants.end(), Variant::Global)) {
    manifest.verify("global", kOfflineHint);
    global = read_basis(root / "global/basis.bin", json::parse(io::read_text(root / "global/meta.json")));
  }

  // Ground truth, shared across variants and with the training cache.
  std::vector<std::string> keys;
  std::vector<Index> todo;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    keys.push_back(cfg.simulation_key(queries[i]));
    if (!manifest.up_to_date(snapshot_group(keys.back()), keys.back())) todo.push_back(static_cast<Index>(i));
  }
  say(opts.log, "online: " + std::to_string(queries.size()) + " query points, " + std::to_string(todo.size()) +
                    " ground-truth runs to compute");
  std::vector<std::vector<std::string>> written(todo.size());
  parallel_for(static_cast<Index>(todo.size()), cfg.workers, [&](Index t) {
    const auto i = static_cast<std::size_t>(todo[static_cast<std::size_t>(t)]);
    const auto model = cfg.model_at(queries[i]);
    const auto g = run_hfm(model, cfg.loads_at(queries[i], model), cfg.integrator);
    written[static_cast<std::size_t>(t)] = write_snapshot(root, keys[i], queries[i], g);
  });
  for (std::size_t t = 0; t < todo.size(); ++t) {
    const auto i = static_cast<std::size_t>(todo[t]);
    manifest.record(snapshot_group(keys[i]), keys[i], written[t]);
  }
  manifest.save();

  struct Job {
    Variant variant;
    bool hyper;
  };
  std::vector<Job> jobs;
  for (Variant v : variants) jobs.push_back({v, false});
  if (cfg.ecsw.enabled) {
    for (Variant v : variants) jobs.push_back({v, true});
  }
  auto job_name = [](const Job& j) { return std::string(to_string(j.variant)) + (j.hyper ? "+ecsw" : ""); };
  auto make_rom = [&](const Job& j, const RegionModel<double>& rm, const ParameterPoint<double>& q,
                      const StructuralModel<double>& model) {
    auto basis = variant_basis(j.variant, rm, domain, q, global ? &*global : nullptr);
    if (!j.hyper) return ReducedSystem<double>(model, std::move(basis));
    require(rm.hyper_mesh.has_value(), rm.id() + " has no hyper mesh; enable ecsw and rerun offline");
    HyperMesh<double> mesh = *rm.hyper_mesh;
    if (j.variant == Variant::Global) {
      throw ConfigError("ECSW meshes are trained per subdomain; the global variant cannot use them");
    }
    mesh = rebind(mesh, basis);
    return ReducedSystem<double>(model, std::move(basis), &mesh);
  };

  std::vector<Job> run_jobs;
  for (const auto& j : jobs) {
    if (!(j.hyper && j.variant == Variant::Global)) run_jobs.push_back(j);
  }

  OnlineResult result;
  result.rows.resize(queries.size() * run_jobs.size());
  for (const auto& [id, rm] : regions) {
    if (cfg.ecsw.enabled && !rm.hyper_mesh) throw ConfigError(rm.id() + " has no hyper mesh; " + kOfflineHint);
  }
  parallel_for(static_cast<Index>(queries.size()), cfg.workers, [&](Index qi) {
    const auto i = static_cast<std::size_t>(qi);
    const auto& q = queries[i];
    const auto& rm = regions.at(sub_of[i]);
    const auto model = cfg.model_at(q);
    const auto loads = cfg.loads_at(q, model);
    const auto truth = truth_from_snapshot(cfg, q, read_snapshot(root, keys[i], q));
    for (std::size_t v = 0; v < run_jobs.size(); ++v) {
      try {
        auto rom = make_rom(run_jobs[v], rm, q, model);
        auto row = compare_rom(model, loads, cfg.integrator, truth, rom, cfg.literal_metric);
        row.variant = job_name(run_jobs[v]);
        row.query = q.str();
        row.subdomain = rm.subdomain.id;
        row.hfm_wall_s = row.rom_wall_s = row.speedup = 0;
        result.rows[i * run_jobs.size() + v] = row;
      } catch (const NumericError& e) {
        throw NumericError("variant " + job_name(run_jobs[v]) + " at " + q.str() + ": " + e.what());
      }
    }
  });

  const fs::path out = root / "online";
  fs::create_directories(out);
  {
    std::ostringstream csv;
    csv << "variant";
    for (const auto& a : cfg.axes) csv << ',' << a.name;
    csv << ",subdomain,order,re_u,re_rf,re_sigma,mesh_elements,total_elements\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      const auto& r = result.rows[i];
      const auto& q = queries[i / run_jobs.size()];
      csv << r.variant;
      for (Index k = 0; k < q.dim(); ++k) csv << ',' << fmt(q[k]);
      csv << ',' << r.subdomain << ',' << r.order << ',' << fmt(r.re_u) << ',' << fmt(r.re_rf) << ','
          << fmt(r.re_sigma) << ',' << r.mesh_elements << ',' << r.total_elements << '\n';
    }
    result.errors_csv = out / "errors.csv";
    io::write_text(result.errors_csv, csv.str());
  }

  json summary = json::object();
  for (const auto& j : run_jobs) {
    std::vector<ComparisonReport> rows;
    for (const auto& r : result.rows) {
      if (r.variant == job_name(j)) rows.push_back(r);
    }
    const auto s = summarize(rows);
    summary[job_name(j)] = {{"count", s.count},           {"mean_re_u", s.mean_re_u},
                            {"max_re_u", s.max_re_u},     {"mean_re_rf", s.mean_re_rf},
                            {"max_re_rf", s.max_re_rf},   {"mean_re_sigma", s.mean_re_sigma},
                            {"max_re_sigma", s.max_re_sigma}};
  }
  io::write_text(out / "summary.json", summary.dump(2) + "\n");

  if (cfg.timing.enabled) {
    // Single worker: warm-up run discarded, then the median of `repeats`.
    auto timed = [&](const std::function<double()>& run) {
      run();
      std::vector<double> t;
      for (int k = 0; k < cfg.timing.repeats; ++k) t.push_back(run());
      std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
      return t[t.size() / 2];
    };
    std::ostringstream csv;
    csv << "variant";
    for (const auto& a : cfg.axes) csv << ',' << a.name;
    csv << ",hfm_wall_s,rom_wall_s,speedup\n";
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto& q = queries[i];
      const auto& rm = regions.at(sub_of[i]);
      const auto model = cfg.model_at(q);
      const auto loads = cfg.loads_at(q, model);
      const double th = timed([&] { return integrate_full(model, loads, cfg.integrator).wall_time_s; });
      for (std::size_t v = 0; v < run_jobs.size(); ++v) {
        const double tr = timed([&] {
          auto rom = make_rom(run_jobs[v], rm, q, model);
          return integrate_reduced(rom, loads, cfg.integrator).wall_time_s;
        });
        auto& row = result.rows[i * run_jobs.size() + v];
        row.hfm_wall_s = th;
        row.rom_wall_s = tr;
        row.speedup = speedup(th, tr);
        csv << row.variant;
        for (Index k = 0; k < q.dim(); ++k) csv << ',' << fmt(q[k]);
        csv << ',' << fmt(th) << ',' << fmt(tr) << ',' << fmt(row.speedup) << '\n';
      }
    }
    result.timing_csv = out / "timing.csv";
    io::write_text(result.timing_csv, csv.str());
  }
  say(opts.log, "online: wrote " + result.errors_csv.string());
  return result;
}

// ---------------------------------------------------------------- report

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

ReportResult report(const fs::path& dir, std::ostream* log) {
  if (!fs::exists(dir)) throw ConfigError("report directory " + dir.string() + " does not exist");
  ReportResult res;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == "errors.csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  res.files = static_cast<Index>(files.size());
  if (files.empty()) {
    if (log) *log << "warning: no errors.csv found under " << dir.string() << "; summary is empty\n";
  }

  std::ostringstream summary;
  summary << "partition,variant,count,mean_re_u,max_re_u,mean_re_rf,max_re_rf,mean_re_sigma,max_re_sigma\n";
  const fs::path grids = dir / "grids";
  for (const auto& f : files) {
    // The run directory is the parent of online/.
    fs::path run = f.parent_path();
    if (run.filename() == "online") run = run.parent_path();
    std::string partition = fs::relative(run, dir).generic_string();
    if (partition.empty() || partition == ".") partition = run.filename().string();
    if (partition.empty()) partition = ".";

    std::istringstream in(io::read_text(f));
    std::string line;
    std::getline(in, line);
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw ConfigError(f.string() + " has no column '" + name + "'");
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_u = col("re_u"), c_rf = col("re_rf"), c_s = col("re_sigma"), c_sub = col("subdomain");
    std::map<std::string, std::vector<ComparisonReport>> by_variant;
    std::map<std::string, std::string> grid_text;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      if (cells.size() != header.size()) throw ConfigError(f.string() + ": malformed row '" + line + "'");
      ComparisonReport r;
      r.variant = cells[0];
      r.re_u = std::stod(cells[c_u]);
      r.re_rf = std::stod(cells[c_rf]);
      r.re_sigma = std::stod(cells[c_s]);
      if (!by_variant.count(r.variant)) {
        order.push_back(r.variant);
        std::string h;
        for (std::size_t k = 1; k < c_sub; ++k) h += header[k] + ",";
        grid_text[r.variant] = h + "re_u,re_rf,re_sigma\n";
      }
      by_variant[r.variant].push_back(r);
      std::string row;
      for (std::size_t k = 1; k < c_sub; ++k) row += cells[k] + ",";
      grid_text[r.variant] += row + cells[c_u] + "," + cells[c_rf] + "," + cells[c_s] + "\n";
      ++res.rows;
    }
    std::string tag = partition;
    std::replace(tag.begin(), tag.end(), '/', '_');
    for (const auto& v : order) {
      const auto s = summarize(by_variant[v]);
      summary << partition << ',' << v << ',' << s.count << ',' << fmt(s.mean_re_u) << ',' << fmt(s.max_re_u) << ','
              << fmt(s.mean_re_rf) << ',' << fmt(s.max_re_rf) << ',' << fmt(s.mean_re_sigma) << ','
              << fmt(s.max_re_sigma) << '\n';
      std::string vt = v;
      std::replace(vt.begin(), vt.end(), '+', '_');
      io::write_text(grids / (tag + "__" + vt + ".csv"), grid_text[v]);
    }
  }
  res.summary_csv = dir / "summary.csv";
  io::write_text(res.summary_csv, summary.str());
  if (log) *log << "report: " << res.files << " result files, " << res.rows << " rows -> " << res.summary_csv.string() << '\n';
  return res;
}

}  // namespace prom
