// Copyright 2026 The qnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <cmath>
#include <fstream>

#include "qnd/errors.hpp"

namespace qnd::cli {

json default_config() {
  return json{
      {"seed", 20260101},
      {"species", {{"spin_f", 0.5}, {"lande_gf", 2.0}, {"wavelength_um", kDefaultWavelength}}},
      {"beam", {{"waist_um", 20.0}}},
      {"cloud",
       {{"sigma_perp_um", 100.0},
        {"sigma_z_um", 100.0},
        {"eta0_cm3", nullptr},
        {"N", nullptr},
        {"od_eff", nullptr}}},
      {"dynamics",
       {{"p_max", 15},
        {"slice_count", 61},
        {"extent_sigmas", 3.0},
        {"max_slice_over_zR", 0.25},
        {"horizon", 3.0},
        {"gamma0", 1.0},
        {"rel_tol", 1e-8},
        {"abs_tol", 1e-12},
        {"samples", 2001},
        {"diffuse", true},
        {"measurement", true}}},
      {"modes",
       {{"p_max", 6},
        {"l_max", 3},
        {"z_over_zR", {0.0, 1.0, -1.0, 3.0, -3.0}},
        {"profile_points", 101}}},
      {"effnums", {{"gamma0_T", {0.1, 0.5, 1.0, 2.0, 3.0}}}},
      {"scan",
       {{"axes", "ar_waist"},
        {"aspect_ratios", {0.1, 1.0, 10.0, 100.0, 316.0}},
        {"sigma_z_um", nullptr},
        {"waists_um", {20.0}},
        {"closure",
         {{"kind", "fixed_volume"},
          {"volume_um3", nullptr},
          {"N", nullptr},
          {"eta0_cm3", nullptr}}}}},
      {"oracle",
       {{"weights", {1.0, 0.8, 0.5, 0.3}},
        {"kappa", 1.0},
        {"gamma0", 1.0},
        {"g_f", 2.0},
        {"horizon", 2.0},
        {"steps", 1600},
        {"checkpoints", 10},
        {"trajectories", 2000}}}};
}

namespace {

void check_keys_against(const json& value, const json& schema, const std::string& path) {
  if (!value.is_object() || !schema.is_object()) return;
  for (auto it = value.begin(); it != value.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!schema.contains(it.key())) throw ValidationError("unknown configuration key '" + key + "'");
    check_keys_against(it.value(), schema[it.key()], key);
  }
}

// Axis lists may be given as {"log": [lo, hi, n]}.
std::vector<double> axis(const json& v, const std::string& name) {
  if (v.is_object() && v.contains("log")) {
    const auto& l = v["log"];
    if (!l.is_array() || l.size() != 3) throw ValidationError(name + ".log must be [lo, hi, n]");
    try {
      return log_grid(l[0].get<double>(), l[1].get<double>(), l[2].get<int>());
    } catch (const DomainError& e) {
      throw ValidationError(name + ": " + e.what());
    }
  }
  if (!v.is_array()) throw ValidationError(name + " must be a list or {\"log\": [lo, hi, n]}");
  return v.get<std::vector<double>>();
}

template <typename T>
T get(const json& block, const char* key, const std::string& where) {
  if (!block.contains(key) || block[key].is_null())
    throw ValidationError("missing value for '" + where + "." + key + "'");
  try {
    return block[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError("wrong type for '" + where + "." + key + "'");
  }
}

double positive(const json& block, const char* key, const std::string& where) {
  const double v = get<double>(block, key, where);
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("'" + where + "." + key + "' must be > 0");
  return v;
}

void merge_into(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base[it.key()].is_object()) {
      merge_into(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

}  // namespace

void check_keys(const json& config) {
  if (!config.is_object()) throw ValidationError("configuration must be a JSON object");
  check_keys_against(config, default_config(), "");
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ValidationError("empty key in --set path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    if (!(*node)[key].is_object()) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

json resolve_config(const std::string& path, const std::vector<std::string>& sets) {
  json config = default_config();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration file '" + path + "'");
    json file = json::parse(in, nullptr, false);
    if (file.is_discarded()) throw ValidationError("configuration file '" + path + "' is not valid JSON");
    check_keys(file);
    merge_into(config, file);
  }
  for (const auto& s : sets) apply_override(config, s);
  check_keys(config);
  return config;
}

Constraint resolve_constraint(const json& cloud) {
  int count = 0;
  Constraint c;
  if (cloud.contains("eta0_cm3") && !cloud["eta0_cm3"].is_null()) {
    ++count;
    c = FixedPeakDensity{per_cm3_to_per_um3(positive(cloud, "eta0_cm3", "cloud"))};
  }
  if (cloud.contains("N") && !cloud["N"].is_null()) {
    ++count;
    c = FixedTotalN{positive(cloud, "N", "cloud")};
  }
  if (cloud.contains("od_eff") && !cloud["od_eff"].is_null()) {
    ++count;
    c = FixedOdEff{positive(cloud, "od_eff", "cloud")};
  }
  if (count != 1) {
    throw ValidationError(
        "exactly one density closure is required: set one of 'cloud.eta0_cm3', 'cloud.N', "
        "'cloud.od_eff' (found " + std::to_string(count) + ")");
  }
  return c;
}

Resolved resolve_common(const json& config, bool need_cloud) {
  Resolved r;
  const json& sp = config["species"];
  r.wavelength = positive(sp, "wavelength_um", "species");
  try {
    r.species = make_species(get<double>(sp, "spin_f", "species"), get<double>(sp, "lande_gf", "species"),
                             r.wavelength);
    r.beam = beam_derived(r.wavelength, positive(config["beam"], "waist_um", "beam"));
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  const json& cl = config["cloud"];
  r.sigma_perp = positive(cl, "sigma_perp_um", "cloud");
  r.sigma_z = positive(cl, "sigma_z_um", "cloud");
  if (need_cloud) r.constraint = resolve_constraint(cl);

  const json& d = config["dynamics"];
  auto& s = r.dynamics;
  s.p_max = get<int>(d, "p_max", "dynamics");
  s.slice_count = get<int>(d, "slice_count", "dynamics");
  s.extent_sigmas = get<double>(d, "extent_sigmas", "dynamics");
  s.max_slice_over_zR = get<double>(d, "max_slice_over_zR", "dynamics");
  s.horizon = get<double>(d, "horizon", "dynamics");
  s.gamma0 = positive(d, "gamma0", "dynamics");
  s.rel_tol = positive(d, "rel_tol", "dynamics");
  s.abs_tol = positive(d, "abs_tol", "dynamics");
  s.samples = get<int>(d, "samples", "dynamics");
  s.diffuse = get<bool>(d, "diffuse", "dynamics");
  s.measurement = get<bool>(d, "measurement", "dynamics");
  if (s.p_max < 0) throw ValidationError("'dynamics.p_max' must be >= 0");
  if (s.slice_count < 4) throw ValidationError("'dynamics.slice_count' must be >= 4");
  if (!(s.extent_sigmas >= 3.0)) throw ValidationError("'dynamics.extent_sigmas' must be >= 3");
  if (!(s.max_slice_over_zR >= 0.0)) throw ValidationError("'dynamics.max_slice_over_zR' must be >= 0");
  if (!(s.horizon >= 0.0)) throw ValidationError("'dynamics.horizon' must be >= 0");
  if (s.samples < 2) throw ValidationError("'dynamics.samples' must be >= 2");
  return r;
}

ScanSpec resolve_scan(const json& config) {
  const Resolved r = resolve_common(config, true);
  ScanSpec spec;
  spec.constraint = r.constraint;
  spec.species = r.species;
  spec.wavelength = r.wavelength;
  spec.dynamics = r.dynamics;
  if (spec.dynamics.horizon <= 0.0) throw ValidationError("'dynamics.horizon' must be > 0 for scans");
  const json& s = config["scan"];
  const std::string kind = get<std::string>(s, "axes", "scan");
  const auto waists = axis(s["waists_um"], "scan.waists_um");
  if (kind == "ar_waist") {
    ArWaistAxes a;
    a.aspect_ratios = axis(s["aspect_ratios"], "scan.aspect_ratios");
    a.waists = waists;
    const json& c = s["closure"];
    const std::string ck = get<std::string>(c, "kind", "scan.closure");
    if (ck == "fixed_sigma_perp") {
      a.closure = FixedSigmaPerp{r.sigma_perp};
    } else if (ck == "fixed_volume") {
      double vol = r.sigma_perp * r.sigma_perp * r.sigma_z;
      if (!c["volume_um3"].is_null()) {
        vol = positive(c, "volume_um3", "scan.closure");
      } else if (!c["N"].is_null() || !c["eta0_cm3"].is_null()) {
        const double N = positive(c, "N", "scan.closure");
        const double eta = per_cm3_to_per_um3(positive(c, "eta0_cm3", "scan.closure"));
        vol = N / (eta * std::pow(kPi / 2.0, 1.5));
      }
      a.closure = FixedVolume{vol};
    } else {
      throw ValidationError("'scan.closure.kind' must be fixed_volume or fixed_sigma_perp");
    }
    spec.axes = a;
  } else if (kind == "sigma_z_waist") {
    SigmaZWaistAxes a;
    a.sigma_perp = r.sigma_perp;
    a.sigma_z = axis(s["sigma_z_um"], "scan.sigma_z_um");
    a.waists = waists;
    spec.axes = a;
  } else {
    throw ValidationError("'scan.axes' must be ar_waist or sigma_z_waist");
  }
  try {
    validate_scan(spec);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  return spec;
}

OracleRun resolve_oracle(const json& config) {
  const json& o = config["oracle"];
  OracleRun run;
  run.weights = get<std::vector<double>>(o, "weights", "oracle");
  for (double w : run.weights)
    if (!(w > 0.0) || w > 1.0) throw ValidationError("'oracle.weights' entries must lie in (0, 1]");
  if (run.weights.empty() || run.weights.size() > 6)
    throw ValidationError("'oracle.weights' must list 1 to 6 atoms");
  run.config.kappa = positive(o, "kappa", "oracle");
  run.config.gamma0 = get<double>(o, "gamma0", "oracle");
  if (!(run.config.gamma0 >= 0.0)) throw ValidationError("'oracle.gamma0' must be >= 0");
  run.config.g_f = get<double>(o, "g_f", "oracle");
  run.config.horizon = positive(o, "horizon", "oracle");
  run.config.steps = get<int>(o, "steps", "oracle");
  run.config.checkpoints = get<int>(o, "checkpoints", "oracle");
  run.trajectories = get<int>(o, "trajectories", "oracle");
  if (run.config.steps < 1) throw ValidationError("'oracle.steps' must be >= 1");
  if (run.config.checkpoints < 1 || run.config.checkpoints > run.config.steps)
    throw ValidationError("'oracle.checkpoints' must lie in [1, steps]");
  if (run.trajectories < 1) throw ValidationError("'oracle.trajectories' must be >= 1");
  run.seed = get<std::uint64_t>(config, "seed", "");
  return run;
}

}  // namespace qnd::cli
