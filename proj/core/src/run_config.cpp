#include "hgtomo/run_config.hpp"

#include "hgtomo/errors.hpp"
#include "hgtomo/io.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <set>

namespace hgtomo {

namespace {

using Keys = std::set<std::string>;

void reject_unknown(const YAML::Node& node, const Keys& allowed, const std::string& where) {
  if (!node.IsMap()) throw ValidationError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  const YAML::Node value = node[key];
  if (!value) return;
  try {
    out = value.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError("bad value for " + where + "." + key);
  }
}

std::string lower_dashes(std::string_view text) {
  std::string s(text);
  for (auto& c : s) {
    if (c == '_') c = '-';
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

PovmModel parse_model(std::string_view text) {
  const auto s = lower_dashes(text);
  if (s == "diagonal") return PovmModel::diagonal;
  if (s == "full") return PovmModel::full;
  throw ValidationError("unknown POVM model '" + std::string(text) + "' (diagonal|full)");
}

StepRule parse_step_rule(std::string_view text) {
  const auto s = lower_dashes(text);
  if (s == "backtracking") return StepRule::backtracking;
  if (s == "fixed") return StepRule::fixed;
  throw ValidationError("unknown step rule '" + std::string(text) + "' (backtracking|fixed)");
}

NoiseKind parse_noise_kind(std::string_view text) {
  const auto s = lower_dashes(text);
  if (s == "none") return NoiseKind::none;
  if (s == "poisson") return NoiseKind::poisson;
  if (s == "gaussian") return NoiseKind::gaussian;
  throw ValidationError("unknown noise kind '" + std::string(text) + "' (none|poisson|gaussian)");
}

const char* noise_name(NoiseKind k) {
  switch (k) {
  case NoiseKind::poisson: return "poisson";
  case NoiseKind::gaussian: return "gaussian";
  case NoiseKind::none: break;
  }
  return "none";
}

RunConfig from_yaml(const YAML::Node& root) {
  RunConfig c;
  if (!root || root.IsNull()) return c;
  reject_unknown(root, {"geometry", "scan", "simulation", "source", "noise", "seed", "normalization",
                        "reconstruction", "output"},
                 "config");

  if (const auto g = root["geometry"]) {
    reject_unknown(g, {"wavelength", "focal_length", "fiber_waist"}, "geometry");
    read(g, "wavelength", c.geometry.wavelength, "geometry");
    read(g, "focal_length", c.geometry.focal_length, "geometry");
    read(g, "fiber_waist", c.geometry.fiber_waist, "geometry");
  }

  if (const auto s = root["scan"]) {
    reject_unknown(s, {"displacements", "detectors", "basis_size", "modulation"}, "scan");
    if (const auto d = s["displacements"]) {
      if (d.IsSequence()) {
        c.displacements.clear();
        read(s, "displacements", c.displacements, "scan");
      } else {
        reject_unknown(d, {"min", "max", "count"}, "scan.displacements");
        double lo = -3.0, hi = 3.0;
        int count = 41;
        read(d, "min", lo, "scan.displacements");
        read(d, "max", hi, "scan.displacements");
        read(d, "count", count, "scan.displacements");
        c.displacements = RunConfig::uniform_displacements(lo, hi, count);
      }
    }
    read(s, "detectors", c.detectors, "scan");
    if (s["basis_size"]) {
      int m = 0;
      read(s, "basis_size", m, "scan");
      c.basis_size = m;
    }
    std::string modulation;
    read(s, "modulation", modulation, "scan");
    if (!modulation.empty()) c.modulation = parse_modulation(modulation);
  }

  if (const auto s = root["simulation"]) {
    reject_unknown(s, {"grid_size", "waist_pixels", "grating_period_pixels", "aperture_radius", "input_waist"},
                   "simulation");
    read(s, "grid_size", c.simulation.grid_size, "simulation");
    read(s, "waist_pixels", c.simulation.waist_pixels, "simulation");
    read(s, "grating_period_pixels", c.simulation.grating_period_pixels, "simulation");
    read(s, "aperture_radius", c.simulation.aperture_radius, "simulation");
    if (s["input_waist"] && !s["input_waist"].IsNull()) {
      double w = 0.0;
      read(s, "input_waist", w, "simulation");
      c.simulation.input_waist = w;
    }
  }

  if (root["source"]) {
    std::string source;
    read(root, "source", source, "config");
    parse_source(source, c);
  }

  if (const auto n = root["noise"]) {
    reject_unknown(n, {"kind", "total_counts", "sigma"}, "noise");
    std::string kind = "none";
    read(n, "kind", kind, "noise");
    c.noise.kind = parse_noise_kind(kind);
    read(n, "total_counts", c.noise.total_counts, "noise");
    read(n, "sigma", c.noise.sigma, "noise");
  }

  read(root, "seed", c.seed, "config");
  if (root["normalization"]) {
    std::string scheme;
    read(root, "normalization", scheme, "config");
    c.normalization = parse_normalization(scheme);
  }

  if (const auto r = root["reconstruction"]) {
    reject_unknown(r, {"model", "step_rule", "max_iterations", "tolerance", "constraint_tolerance"}, "reconstruction");
    std::string text;
    read(r, "model", text, "reconstruction");
    if (!text.empty()) c.model = parse_model(text);
    text.clear();
    read(r, "step_rule", text, "reconstruction");
    if (!text.empty()) c.step_rule = parse_step_rule(text);
    read(r, "max_iterations", c.max_iterations, "reconstruction");
    read(r, "tolerance", c.tolerance, "reconstruction");
    read(r, "constraint_tolerance", c.constraint_tolerance, "reconstruction");
  }

  if (const auto o = root["output"]) {
    reject_unknown(o, {"dir", "export_masks"}, "output");
    std::string dir;
    read(o, "dir", dir, "output");
    if (!dir.empty()) c.output_dir = dir;
    read(o, "export_masks", c.export_masks, "output");
  }
  return c;
}

} // namespace

std::vector<double> RunConfig::uniform_displacements(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw ValidationError("displacement grid needs count >= 2 and max > min");
  std::vector<double> d(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) d[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return d;
}

ReconstructionConfig RunConfig::reconstruction() const {
  ReconstructionConfig r;
  r.basis_size = effective_basis_size();
  r.model = model;
  r.max_iterations = max_iterations;
  r.step_rule = step_rule;
  r.tolerance = tolerance;
  r.constraint_tolerance = constraint_tolerance;
  r.record_history = true;
  return r;
}

void RunConfig::validate() const {
  geometry.validate();
  if (source != SourceKind::file) {
    if (displacements.size() < 2) throw ValidationError("scan needs at least 2 displacements");
    for (std::size_t i = 1; i < displacements.size(); ++i) {
      if (!(displacements[i] > displacements[i - 1])) throw ValidationError("displacements must be strictly increasing");
    }
    if (detectors < 1) throw ValidationError("scan needs at least one detector");
  } else if (source_path.empty()) {
    throw ValidationError("file source needs a path");
  }
  if (source == SourceKind::simulate) simulation.validate();
  noise.validate();
  reconstruction().validate(source == SourceKind::file ? 1 : detectors);
}

RunConfig parse_run_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config is not valid YAML: ") + e.what());
  }
  return from_yaml(root);
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text_file(path)); }

std::string config_echo(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["geometry"] = {{"wavelength", c.geometry.wavelength},
                   {"focal_length", c.geometry.focal_length},
                   {"fiber_waist", c.geometry.fiber_waist}};
  j["scan"]["displacements"] = c.displacements;
  j["scan"]["detectors"] = c.detectors;
  j["scan"]["basis_size"] = c.effective_basis_size();
  j["scan"]["modulation"] = to_string(c.modulation);
  j["simulation"] = {{"grid_size", c.simulation.grid_size},
                     {"waist_pixels", c.simulation.waist_pixels},
                     {"grating_period_pixels", c.simulation.grating_period_pixels},
                     {"aperture_radius", c.simulation.aperture_radius}};
  j["simulation"]["input_waist"] = c.simulation.input_waist ? nlohmann::ordered_json(*c.simulation.input_waist) : nullptr;
  j["source"] = source_label(c);
  j["noise"] = {{"kind", noise_name(c.noise.kind)}, {"total_counts", c.noise.total_counts}, {"sigma", c.noise.sigma}};
  j["seed"] = c.seed;
  j["normalization"] = to_string(c.normalization);
  j["reconstruction"] = {{"model", c.model == PovmModel::diagonal ? "diagonal" : "full"},
                         {"step_rule", c.step_rule == StepRule::backtracking ? "backtracking" : "fixed"},
                         {"max_iterations", c.max_iterations},
                         {"tolerance", c.tolerance},
                         {"constraint_tolerance", c.constraint_tolerance}};
  j["output"] = {{"dir", c.output_dir.generic_string()}, {"export_masks", c.export_masks}};
  return j.dump(2);
}

Modulation parse_modulation(std::string_view text) {
  const auto s = lower_dashes(text);
  if (s == "phase" || s == "phase-only") return Modulation::phase_only;
  if (s == "exact" || s == "exact-amplitude") return Modulation::exact_amplitude;
  throw ValidationError("unknown modulation '" + std::string(text) + "' (phase|exact)");
}

void parse_source(std::string_view text, RunConfig& config) {
  if (text.starts_with("file:")) {
    const auto path = text.substr(5);
    if (path.empty()) throw ValidationError("file source needs a path after 'file:'");
    config.source = SourceKind::file;
    config.source_path = std::filesystem::path(std::string(path));
    return;
  }
  const auto s = lower_dashes(text);
  if (s == "simulate") {
    config.source = SourceKind::simulate;
  } else if (s == "ideal" || s == "analytic-ideal") {
    config.source = SourceKind::analytic_ideal;
  } else {
    throw ValidationError("unknown source '" + std::string(text) + "' (simulate|ideal|file:<path>)");
  }
  config.source_path.clear();
}

Normalization parse_normalization(std::string_view text) {
  const auto s = lower_dashes(text);
  if (s == "raw") return Normalization::raw;
  if (s == "per-mode") return Normalization::per_mode;
  if (s == "per-probe") return Normalization::per_probe;
  throw ValidationError("unknown normalization '" + std::string(text) + "' (raw|per-mode|per-probe)");
}

std::string to_string(Modulation m) { return m == Modulation::phase_only ? "phase" : "exact"; }

std::string to_string(Normalization n) {
  switch (n) {
  case Normalization::per_mode: return "per-mode";
  case Normalization::per_probe: return "per-probe";
  case Normalization::raw: break;
  }
  return "raw";
}

std::string source_label(const RunConfig& config) {
  switch (config.source) {
  case SourceKind::analytic_ideal: return "ideal";
  case SourceKind::file: return "file:" + config.source_path.generic_string();
  case SourceKind::simulate: break;
  }
  return "simulate";
}

} // namespace hgtomo
