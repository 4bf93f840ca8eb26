// Copyright 2026 The Crossres Authors
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

#include "crossres/experiment.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "crossres/parallel.hpp"

namespace crossres {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
      return exit_code::parse;
    case ErrorKind::InvalidDimension:
    case ErrorKind::EmbedMismatch:
    case ErrorKind::TermShapeError:
    case ErrorKind::EmptySpec:
    case ErrorKind::HeterogeneousTerms:
    case ErrorKind::NoResonance:
    case ErrorKind::SpecMismatch:
    case ErrorKind::DegenerateDressing:
    case ErrorKind::EmptySweep:
      return exit_code::spec;
    case ErrorKind::StepTooCoarse:
      return exit_code::step_too_coarse;
    case ErrorKind::NotHermitian:
    case ErrorKind::NormalizationError:
    case ErrorKind::NotUnitary:
    case ErrorKind::NotProjector:
      return exit_code::internal;
  }
  return exit_code::internal;
}

FrameIntegers ExperimentConfig::frame_integers() const {
  if (frame) {
    if (frame->n.size() != system.num_modes()) {
      throw Error(ErrorKind::SpecMismatch, "frame needs one integer per mode");
    }
    for (int n : frame->n) {
      if (n < 1) throw Error(ErrorKind::SpecMismatch, "frame integers must be positive");
    }
    return *frame;
  }
  return solve_frame_integers(system.terms);
}

// ---------------------------------------------------------------------------
// YAML reading

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                         const std::string& why) const {
    std::ostringstream msg;
    msg << origin_;
    const YAML::Mark mark = node.Mark();
    if (mark.line >= 0) msg << ':' << mark.line + 1 << ':' << mark.column + 1;
    msg << ": " << field << ": " << why;
    throw Error(ErrorKind::ConfigError, msg.str());
  }

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw Error(ErrorKind::ConfigError, origin_ + ": " + field + ": " + why);
  }

  void only_keys(const YAML::Node& map, const std::string& field,
                 std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, field, "expected a mapping");
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
      }
    }
  }

  YAML::Node need(const YAML::Node& map, const char* key, const std::string& field) const {
    const YAML::Node node = map[key];
    if (!node) fail(map, join(field, key), "missing required key");
    return node;
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    try {
      const double v = node.as<double>();
      if (!std::isfinite(v)) fail(node, field, "expected a finite number");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected an integer");
    try {
      return node.as<long long>();
    } catch (const YAML::BadConversion&) {
      fail(node, field, "expected an integer, got '" + node.Scalar() + "'");
    }
  }

  std::size_t count(const YAML::Node& node, const std::string& field) const {
    const long long v = integer(node, field);
    if (v < 0) fail(node, field, "must not be negative");
    return static_cast<std::size_t>(v);
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  bool boolean(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(node, field, "expected true or false, got '" + node.Scalar() + "'");
    }
  }

  // A real number or a [re, im] pair.
  Complex complex(const YAML::Node& node, const std::string& field) const {
    if (node.IsSequence()) {
      if (node.size() != 2) fail(node, field, "expected a number or a [re, im] pair");
      return {number(node[0], field + "[0]"), number(node[1], field + "[1]")};
    }
    return {number(node, field), 0.0};
  }

  YAML::Node sequence(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail(node, field, "expected a list");
    return node;
  }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

  static std::string at(const std::string& field, std::size_t i) {
    return field + "[" + std::to_string(i) + "]";
  }

 private:
  std::string origin_;
};

bool known_parameter(const std::string& name, std::size_t modes, std::size_t terms) {
  if (name == "drive_freq" || name == "drive_strength" || name == "qubit_freq") return true;
  auto indexed = [&](std::string_view prefix, std::size_t limit) {
    if (name.rfind(prefix, 0) != 0) return false;
    const std::string rest = name.substr(prefix.size());
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    return ec == std::errc{} && ptr == rest.data() + rest.size() && !rest.empty() && k < limit;
  };
  return indexed("mode_freq.", modes) || indexed("coupling.", terms);
}

PropagationMethod parse_method(const Reader& r, const YAML::Node& node, const std::string& field) {
  const std::string name = r.text(node, field);
  for (auto m : {PropagationMethod::automatic, PropagationMethod::static_frame,
                 PropagationMethod::time_ordered}) {
    if (to_string(m) == name) return m;
  }
  r.fail(node, field, "unknown method '" + name + "' (auto, static or time_ordered)");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const Reader r(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << origin << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw Error(ErrorKind::ConfigError, msg.str());
  }
  if (!root || root.IsNull()) r.fail("", "empty config");
  r.only_keys(root, "", {"units", "system", "frame", "propagation", "case", "initial",
                         "rwa_threshold", "sweep", "scaling", "output"});

  ExperimentConfig cfg;
  cfg.source_text = text;

  if (const YAML::Node units = root["units"]) {
    r.only_keys(units, "units", {"reference"});
    if (units["reference"]) cfg.reference_unit = r.text(units["reference"], "units.reference");
  }

  const YAML::Node sys = r.need(root, "system", "");
  r.only_keys(sys, "system", {"qubit_freq", "modes", "terms", "drive"});
  cfg.system.omega_q = r.number(r.need(sys, "qubit_freq", "system"), "system.qubit_freq");

  const YAML::Node modes = r.sequence(r.need(sys, "modes", "system"), "system.modes");
  if (modes.size() == 0) r.fail(modes, "system.modes", "at least one mode is required");
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const std::string field = Reader::at("system.modes", k);
    r.only_keys(modes[k], field, {"freq", "dim"});
    const double freq = r.number(r.need(modes[k], "freq", field), field + ".freq");
    if (!(freq > 0.0)) r.fail(modes[k]["freq"], field + ".freq", "must be positive");
    const std::size_t dim = r.count(r.need(modes[k], "dim", field), field + ".dim");
    if (dim < 2) r.fail(modes[k]["dim"], field + ".dim", "must be at least 2");
    cfg.system.mode_freqs.push_back(freq);
    cfg.mode_dims.push_back(dim);
  }

  const YAML::Node terms = r.sequence(r.need(sys, "terms", "system"), "system.terms");
  if (terms.size() == 0) r.fail(terms, "system.terms", "at least one term is required");
  for (std::size_t l = 0; l < terms.size(); ++l) {
    const std::string field = Reader::at("system.terms", l);
    r.only_keys(terms[l], field, {"strength", "exponents"});
    InteractionTerm term;
    term.strength = r.complex(r.need(terms[l], "strength", field), field + ".strength");
    const YAML::Node exps =
        r.sequence(r.need(terms[l], "exponents", field), field + ".exponents");
    if (exps.size() != modes.size()) {
      r.fail(exps, field + ".exponents", "expected one [annihilate, create] pair per mode");
    }
    for (std::size_t k = 0; k < exps.size(); ++k) {
      const std::string ef = Reader::at(field + ".exponents", k);
      if (!exps[k].IsSequence() || exps[k].size() != 2) {
        r.fail(exps[k], ef, "expected an [annihilate, create] pair");
      }
      const long long m1 = r.integer(exps[k][0], ef + "[0]");
      const long long m2 = r.integer(exps[k][1], ef + "[1]");
      if (m1 < 0 || m2 < 0) r.fail(exps[k], ef, "exponents must not be negative");
      term.exponents.push_back({static_cast<int>(m1), static_cast<int>(m2)});
    }
    cfg.system.terms.push_back(std::move(term));
  }

  const YAML::Node drive = r.need(sys, "drive", "system");
  r.only_keys(drive, "system.drive", {"strength", "freq"});
  cfg.system.drive_strength =
      r.number(r.need(drive, "strength", "system.drive"), "system.drive.strength");
  if (cfg.system.drive_strength < 0.0) {
    r.fail(drive["strength"], "system.drive.strength", "must not be negative");
  }
  if (const YAML::Node freq = drive["freq"]) {
    cfg.system.drive_freq = r.number(freq, "system.drive.freq");
  } else {
    cfg.drive_at_resonance = true;
    const auto wd = resonant_drive(cfg.system);
    if (!wd) {
      throw Error(ErrorKind::NoResonance,
                  origin + ": system.drive.freq: terms share no resonance, set it explicitly");
    }
    cfg.system.drive_freq = *wd;
  }

  if (const YAML::Node frame = root["frame"]) {
    r.sequence(frame, "frame");
    FrameIntegers f;
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const long long n = r.integer(frame[k], Reader::at("frame", k));
      if (n < 1) r.fail(frame[k], Reader::at("frame", k), "must be a positive integer");
      f.n.push_back(static_cast<int>(n));
    }
    if (f.n.size() != modes.size()) r.fail(frame, "frame", "expected one integer per mode");
    cfg.frame = f;
  }

  const YAML::Node kase = r.need(root, "case", "");
  r.only_keys(kase, "case", {"kind", "m1", "m2", "amplitude"});
  {
    const YAML::Node kind = r.need(kase, "kind", "case");
    const auto parsed = parse_case_kind(r.text(kind, "case.kind"));
    if (!parsed) r.fail(kind, "case.kind", "unknown case '" + kind.Scalar() + "'");
    cfg.conditional.kind = *parsed;
    if (kase["m1"]) cfg.conditional.m1 = static_cast<int>(r.integer(kase["m1"], "case.m1"));
    if (kase["m2"]) cfg.conditional.m2 = static_cast<int>(r.integer(kase["m2"], "case.m2"));
    if (kase["amplitude"]) {
      const double a = r.number(kase["amplitude"], "case.amplitude");
      if (!(a > 0.0)) r.fail(kase["amplitude"], "case.amplitude", "must be positive");
      cfg.amplitude = a;
    }
  }

  if (const YAML::Node prop = root["propagation"]) {
    r.only_keys(prop, "propagation", {"t_final", "dt", "samples", "truncation_tail",
                                      "tail_tolerance", "method", "dt_refine",
                                      "refine_tolerance"});
    auto& p = cfg.propagation;
    if (prop["t_final"]) p.t_final = r.number(prop["t_final"], "propagation.t_final");
    if (prop["dt"]) p.dt = r.number(prop["dt"], "propagation.dt");
    if (prop["samples"]) p.samples = r.count(prop["samples"], "propagation.samples");
    if (prop["truncation_tail"]) {
      p.truncation_tail = r.count(prop["truncation_tail"], "propagation.truncation_tail");
    }
    if (prop["tail_tolerance"]) {
      p.tail_tolerance = r.number(prop["tail_tolerance"], "propagation.tail_tolerance");
    }
    if (prop["method"]) p.method = parse_method(r, prop["method"], "propagation.method");
    if (prop["dt_refine"]) p.dt_refine = r.boolean(prop["dt_refine"], "propagation.dt_refine");
    if (prop["refine_tolerance"]) {
      p.refine_tolerance = r.number(prop["refine_tolerance"], "propagation.refine_tolerance");
    }
    if (prop["t_final"] && !(p.t_final >= 0.0)) {
      r.fail(prop["t_final"], "propagation.t_final", "must not be negative");
    }
    if (prop["dt"] && !(p.dt > 0.0)) r.fail(prop["dt"], "propagation.dt", "must be positive");
  }
  const YAML::Node prop = root["propagation"];
  if (!prop || !prop["t_final"]) {
    if (!cfg.amplitude) r.fail(root, "propagation.t_final", "give t_final or case.amplitude");
    cfg.propagation.t_final = time_for_amplitude(cfg.conditional, cfg.system, *cfg.amplitude);
  }

  if (const YAML::Node init = root["initial"]) {
    r.only_keys(init, "initial", {"qubit", "fock"});
    if (init["qubit"]) {
      const auto q = parse_qubit_init(r.text(init["qubit"], "initial.qubit"));
      if (!q) r.fail(init["qubit"], "initial.qubit", "expected g, e, plus or minus");
      cfg.initial_qubit = *q;
    }
    if (init["fock"]) {
      const YAML::Node fock = r.sequence(init["fock"], "initial.fock");
      if (fock.size() != modes.size()) r.fail(fock, "initial.fock", "expected one level per mode");
      for (std::size_t k = 0; k < fock.size(); ++k) {
        const std::size_t n = r.count(fock[k], Reader::at("initial.fock", k));
        if (n >= cfg.mode_dims[k]) {
          r.fail(fock[k], Reader::at("initial.fock", k), "level exceeds the mode dimension");
        }
        cfg.initial_fock.push_back(n);
      }
    }
  }
  if (cfg.initial_fock.empty()) cfg.initial_fock.assign(modes.size(), 0);

  if (const YAML::Node thr = root["rwa_threshold"]) {
    cfg.rwa_threshold = r.number(thr, "rwa_threshold");
    if (!(cfg.rwa_threshold > 0.0)) r.fail(thr, "rwa_threshold", "must be positive");
  }

  if (const YAML::Node sweep = root["sweep"]) {
    r.only_keys(sweep, "sweep", {"parameter", "values"});
    SweepAxis axis;
    const YAML::Node param = r.need(sweep, "parameter", "sweep");
    axis.parameter = r.text(param, "sweep.parameter");
    if (!known_parameter(axis.parameter, modes.size(), terms.size())) {
      r.fail(param, "sweep.parameter", "unknown parameter '" + axis.parameter + "'");
    }
    const YAML::Node values = r.sequence(r.need(sweep, "values", "sweep"), "sweep.values");
    for (std::size_t i = 0; i < values.size(); ++i) {
      axis.values.push_back(r.number(values[i], Reader::at("sweep.values", i)));
    }
    cfg.sweep = std::move(axis);
  }

  if (const YAML::Node scaling = root["scaling"]) {
    r.only_keys(scaling, "scaling", {"ratios"});
    const YAML::Node ratios = r.sequence(r.need(scaling, "ratios", "scaling"), "scaling.ratios");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      cfg.scaling_ratios.push_back(r.number(ratios[i], Reader::at("scaling.ratios", i)));
    }
  }

  if (const YAML::Node output = root["output"]) {
    r.only_keys(output, "output", {"path", "format"});
    if (output["path"]) cfg.output_path = r.text(output["path"], "output.path");
    if (output["format"]) {
      const std::string f = r.text(output["format"], "output.format");
      if (f == "csv") {
        cfg.output_format = OutputFormat::csv;
      } else if (f == "json") {
        cfg.output_format = OutputFormat::json;
      } else {
        r.fail(output["format"], "output.format", "expected csv or json");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, path.string() + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

SystemSpec with_parameter(const SystemSpec& spec, const std::string& parameter, double value) {
  SystemSpec out = spec;
  auto index = [&](std::string_view prefix, std::size_t limit) {
    std::size_t k = 0;
    const std::string rest = parameter.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || k >= limit) {
      throw Error(ErrorKind::ConfigError, "bad parameter index in '" + parameter + "'");
    }
    return k;
  };
  if (parameter == "drive_freq") {
    out.drive_freq = value;
  } else if (parameter == "drive_strength") {
    out.drive_strength = value;
  } else if (parameter == "qubit_freq") {
    out.omega_q = value;
  } else if (parameter.rfind("mode_freq.", 0) == 0) {
    out.mode_freqs[index("mode_freq.", out.num_modes())] = value;
  } else if (parameter.rfind("coupling.", 0) == 0) {
    out.terms[index("coupling.", out.terms.size())].strength = value;
  } else {
    throw Error(ErrorKind::ConfigError, "unknown parameter '" + parameter + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::string rational_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_from(const std::string& s) {
  const auto slash = s.find('/');
  return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
}

json record_json(const FidelityRecord& r) {
  return {{"time", r.time},
          {"state_fidelity", r.state_fidelity},
          {"operator_fidelity", r.operator_fidelity},
          {"leakage", r.leakage},
          {"rwa_ratio_g", r.rwa_ratio_g},
          {"rwa_ratio_delta", r.rwa_ratio_delta},
          {"leakage_breach", r.leakage_breach}};
}

FidelityRecord record_from(const json& j) {
  FidelityRecord r;
  r.time = j.at("time").get<double>();
  r.state_fidelity = j.at("state_fidelity").get<double>();
  r.operator_fidelity = j.at("operator_fidelity").get<double>();
  r.leakage = j.at("leakage").get<double>();
  r.rwa_ratio_g = j.at("rwa_ratio_g").get<double>();
  r.rwa_ratio_delta = j.at("rwa_ratio_delta").get<double>();
  r.leakage_breach = j.at("leakage_breach").get<bool>();
  return r;
}

ResonanceReport report_from(const json& j) {
  ResonanceReport r;
  r.f_A = rational_from(j.at("f_A").get<std::string>());
  r.chi_A = j.at("chi_A").get<double>();
  r.eta_A = j.at("eta_A").get<double>();
  r.delta_A = j.at("delta_A").get<double>();
  r.omega_A = j.at("omega_A").get<double>();
  r.mode_detunings = j.at("mode_detunings").get<std::vector<double>>();
  r.qubit_detuning = j.at("qubit_detuning").get<double>();
  r.phase_rate = j.at("phase_rate").get<double>();
  return r;
}

bool same_report(const ResonanceReport& a, const ResonanceReport& b) {
  return a.f_A == b.f_A && a.chi_A == b.chi_A && a.eta_A == b.eta_A && a.delta_A == b.delta_A &&
         a.omega_A == b.omega_A && a.mode_detunings == b.mode_detunings &&
         a.qubit_detuning == b.qubit_detuning && a.phase_rate == b.phase_rate;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
  json modes = json::array();
  for (std::size_t k = 0; k < cfg.system.num_modes(); ++k) {
    modes.push_back({{"freq", cfg.system.mode_freqs[k]}, {"dim", cfg.mode_dims[k]}});
  }
  json terms = json::array();
  for (const auto& t : cfg.system.terms) {
    json exps = json::array();
    for (const auto& e : t.exponents) exps.push_back({e.annihilate, e.create});
    terms.push_back({{"strength", complex_json(t.strength)}, {"exponents", exps}});
  }
  const auto& p = cfg.propagation;
  json j = {
      {"units", {{"reference", cfg.reference_unit}}},
      {"system",
       {{"qubit_freq", cfg.system.omega_q},
        {"modes", modes},
        {"terms", terms},
        {"drive",
         {{"strength", cfg.system.drive_strength},
          {"freq", cfg.system.drive_freq},
          {"at_resonance", cfg.drive_at_resonance}}}}},
      {"frame", cfg.frame ? json(cfg.frame->n) : json(nullptr)},
      {"propagation",
       {{"t_final", p.t_final},
        {"dt", p.dt},
        {"samples", p.samples},
        {"truncation_tail", p.truncation_tail},
        {"tail_tolerance", p.tail_tolerance},
        {"method", std::string(to_string(p.method))},
        {"dt_refine", p.dt_refine},
        {"refine_tolerance", p.refine_tolerance}}},
      {"case",
       {{"kind", std::string(to_string(cfg.conditional.kind))},
        {"m1", cfg.conditional.m1},
        {"m2", cfg.conditional.m2},
        {"amplitude", cfg.amplitude ? json(*cfg.amplitude) : json(nullptr)}}},
      {"initial",
       {{"qubit", std::string(to_string(cfg.initial_qubit))}, {"fock", cfg.initial_fock}}},
      {"rwa_threshold", cfg.rwa_threshold},
      {"scaling", {{"ratios", cfg.scaling_ratios}}},
  };
  if (cfg.sweep) {
    j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  }
  return j;
}

json to_json(const ResonanceReport& r) {
  return {{"f_A", rational_string(r.f_A)},
          {"chi_A", r.chi_A},
          {"eta_A", r.eta_A},
          {"delta_A", r.delta_A},
          {"omega_A", r.omega_A},
          {"mode_detunings", r.mode_detunings},
          {"qubit_detuning", r.qubit_detuning},
          {"phase_rate", r.phase_rate}};
}

json to_json(const ExperimentResult& result) {
  json resonance_terms = json::array();
  for (const auto& r : result.resonance) resonance_terms.push_back(to_json(r));
  json records = json::array();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    json rec = record_json(result.records[i]);
    if (i < result.sweep_values.size()) rec["sweep_value"] = result.sweep_values[i];
    records.push_back(std::move(rec));
  }
  const auto& d = result.diagnostics;
  json diag = {
      {"path", d.path},
      {"dt", d.dt},
      {"truncation_tail", d.truncation_tail},
      {"refinement_delta", d.refinement_delta ? json(*d.refinement_delta) : json(nullptr)},
      {"max_leakage", d.max_leakage},
      {"leakage_breach", d.leakage_breach},
      {"rwa",
       {{"epsilon", d.rwa.epsilon},
        {"ratio_g", d.rwa.ratio_g},
        {"ratio_delta", d.rwa.ratio_delta},
        {"threshold", d.rwa.threshold},
        {"violated", d.rwa.violated}}},
      {"metadata", {{"wall_seconds", d.wall_seconds}, {"timestamp", d.timestamp}}},
  };
  if (d.sweep) diag["sweep"] = {{"parameter", d.sweep->parameter}, {"values", d.sweep->values}};
  if (d.scaling) {
    json rows = json::array();
    for (const auto& row : d.scaling->rows) {
      rows.push_back(
          {{"ratio", row.ratio}, {"t_final", row.t_final}, {"infidelity", row.infidelity}});
    }
    diag["scaling"] = {{"rows", rows},
                       {"monotone", d.scaling->monotone},
                       {"slope", d.scaling->slope}};
  }
  return {{"config", {{"sha256", result.config_hash}, {"resolved", result.config}}},
          {"resonance", {{"frame", result.frame.n}, {"terms", resonance_terms}}},
          {"records", records},
          {"diagnostics", diag}};
}

ExperimentResult result_from_json(const json& j) {
  ExperimentResult out;
  out.config_hash = j.at("config").at("sha256").get<std::string>();
  out.config = j.at("config").at("resolved");
  out.frame.n = j.at("resonance").at("frame").get<std::vector<int>>();
  for (const auto& r : j.at("resonance").at("terms")) out.resonance.push_back(report_from(r));
  for (const auto& r : j.at("records")) {
    out.records.push_back(record_from(r));
    if (r.contains("sweep_value")) out.sweep_values.push_back(r.at("sweep_value").get<double>());
  }
  const json& d = j.at("diagnostics");
  auto& diag = out.diagnostics;
  diag.path = d.at("path").get<std::string>();
  diag.dt = d.at("dt").get<double>();
  diag.truncation_tail = d.at("truncation_tail").get<std::size_t>();
  if (!d.at("refinement_delta").is_null()) {
    diag.refinement_delta = d.at("refinement_delta").get<double>();
  }
  diag.max_leakage = d.at("max_leakage").get<double>();
  diag.leakage_breach = d.at("leakage_breach").get<bool>();
  const json& rwa = d.at("rwa");
  diag.rwa.epsilon = rwa.at("epsilon").get<double>();
  diag.rwa.ratio_g = rwa.at("ratio_g").get<double>();
  diag.rwa.ratio_delta = rwa.at("ratio_delta").get<double>();
  diag.rwa.threshold = rwa.at("threshold").get<double>();
  diag.rwa.violated = rwa.at("violated").get<bool>();
  if (d.contains("sweep")) {
    diag.sweep = SweepAxis{d["sweep"].at("parameter").get<std::string>(),
                           d["sweep"].at("values").get<std::vector<double>>()};
  }
  if (d.contains("scaling")) {
    ScalingTable table;
    for (const auto& row : d["scaling"].at("rows")) {
      table.rows.push_back({row.at("ratio").get<double>(), row.at("t_final").get<double>(),
                            row.at("infidelity").get<double>()});
    }
    table.monotone = d["scaling"].at("monotone").get<bool>();
    table.slope = d["scaling"].at("slope").get<double>();
    diag.scaling = std::move(table);
  }
  diag.wall_seconds = d.at("metadata").at("wall_seconds").get<double>();
  diag.timestamp = d.at("metadata").at("timestamp").get<std::string>();
  return out;
}

bool equivalent(const ExperimentResult& a, const ExperimentResult& b) {
  // Metadata (wall clock, timestamp) is deliberately ignored.
  json ja = to_json(a);
  json jb = to_json(b);
  ja["diagnostics"].erase("metadata");
  jb["diagnostics"].erase("metadata");
  if (a.resonance.size() != b.resonance.size()) return false;
  for (std::size_t i = 0; i < a.resonance.size(); ++i) {
    if (!same_report(a.resonance[i], b.resonance[i])) return false;
  }
  return ja == jb;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ec == std::errc{} ? ptr : buf);
}

void append_record(std::string& out, const FidelityRecord& r) {
  for (double v : {r.time, r.state_fidelity, r.operator_fidelity, r.leakage, r.rwa_ratio_g}) {
    append_number(out, v);
    out += ',';
  }
  append_number(out, r.rwa_ratio_delta);
  out += '\n';
}

}  // namespace

std::string records_csv(const std::vector<FidelityRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) append_record(out, r);
  return out;
}

std::string sweep_csv(const std::vector<double>& values,
                      const std::vector<FidelityRecord>& records) {
  if (values.size() != records.size()) {
    throw Error(ErrorKind::SpecMismatch, "one record per sweep value is required");
  }
  std::string out = "sweep_value," + std::string(kCsvHeader) + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    append_number(out, values[i]);
    out += ',';
    append_record(out, records[i]);
  }
  return out;
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

ExperimentResult result_shell(const ExperimentConfig& cfg) {
  ExperimentResult out;
  out.config_hash = sha256_hex(cfg.source_text);
  out.config = to_json(cfg);
  out.frame = cfg.frame_integers();
  out.resonance = resonance_reports(cfg.system, out.frame);
  out.diagnostics.rwa = rwa_margin(cfg.system, out.frame, cfg.rwa_threshold);
  out.diagnostics.dt = effective_step(cfg.propagation, cfg.system);
  out.diagnostics.truncation_tail = effective_tail(cfg.propagation, cfg.hilbert());
  return out;
}

void finish_diagnostics(ExperimentResult& result) {
  auto& d = result.diagnostics;
  for (const auto& r : result.records) {
    d.max_leakage = std::max(d.max_leakage, r.leakage);
    d.leakage_breach = d.leakage_breach || r.leakage_breach;
  }
  d.timestamp = utc_timestamp();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

ExperimentResult run_simulation(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  const HilbertSpec h = cfg.hilbert();
  ExperimentResult out = result_shell(cfg);
  const Vector psi0 = initial_state(cfg.initial_qubit, cfg.initial_fock, cfg.system, h);
  const CompareRun run = compare_run(cfg.system, out.frame, cfg.propagation, psi0,
                                     cfg.conditional, h, cfg.rwa_threshold);
  out.records = run.records;
  out.diagnostics.path = std::string(to_string(run.path));
  out.diagnostics.refinement_delta = run.refinement_delta;
  if (!cfg.scaling_ratios.empty()) {
    out.diagnostics.scaling = scaling_study(cfg.system, out.frame, cfg.propagation,
                                            cfg.scaling_ratios, psi0, cfg.conditional, h);
  }
  finish_diagnostics(out);
  out.diagnostics.wall_seconds = seconds_since(start);
  return out;
}

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep || cfg.sweep->values.empty()) {
    throw Error(ErrorKind::EmptySweep, "sweep needs a parameter and at least one value");
  }
  const auto start = Clock::now();
  const HilbertSpec h = cfg.hilbert();
  ExperimentResult out = result_shell(cfg);
  const SweepAxis& axis = *cfg.sweep;

  struct Point {
    FidelityRecord record;
    std::string path;
    std::optional<double> refinement_delta;
  };
  const std::vector<Point> points = parallel_map(axis.values.size(), [&](std::size_t i) {
    const SystemSpec spec = with_parameter(cfg.system, axis.parameter, axis.values[i]);
    const Vector psi0 = initial_state(cfg.initial_qubit, cfg.initial_fock, spec, h);
    // Same sample grid as simulate, so a one-value sweep reproduces its last row.
    const CompareRun run = compare_run(spec, out.frame, cfg.propagation, psi0, cfg.conditional,
                                       h, cfg.rwa_threshold);
    return Point{run.records.back(), std::string(to_string(run.path)), run.refinement_delta};
  });

  std::vector<std::string> paths;
  for (const auto& pt : points) {
    out.records.push_back(pt.record);
    if (std::find(paths.begin(), paths.end(), pt.path) == paths.end()) paths.push_back(pt.path);
    if (pt.refinement_delta) {
      out.diagnostics.refinement_delta =
          std::max(out.diagnostics.refinement_delta.value_or(0.0), *pt.refinement_delta);
    }
  }
  for (const auto& p : paths) {
    out.diagnostics.path += (out.diagnostics.path.empty() ? "" : "+") + p;
  }
  out.sweep_values = axis.values;
  out.diagnostics.sweep = axis;
  finish_diagnostics(out);
  out.diagnostics.wall_seconds = seconds_since(start);
  return out;
}

std::vector<ValidationIssue> validate_config(const ExperimentConfig& cfg) {
  std::vector<ValidationIssue> issues;
  auto guard = [&](const char* check, auto&& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      // Drop the "<Kind>: " prefix; the check name already says what failed.
      std::string_view what = e.what();
      what.remove_prefix(std::min(what.size(), to_string(e.kind()).size() + 2));
      issues.push_back({check, std::string(what)});
      return false;
    }
  };

  const HilbertSpec h = cfg.hilbert();
  const bool shape_ok = guard("shape", [&] {
    cfg.system.validate(h);
    for (const auto& term : cfg.system.terms) validate_term(term);
    check_case_matches(cfg.conditional, cfg.system);
  });
  guard("propagation", [&] { cfg.propagation.validate(h); });

  FrameIntegers frame;
  const bool frame_ok = guard("frame", [&] { frame = cfg.frame_integers(); });

  bool dressing_ok = false;
  if (frame_ok) {
    dressing_ok = guard("rwa", [&] {
      const RwaMargin m = rwa_margin(cfg.system, frame, cfg.rwa_threshold);
      if (m.violated) {
        std::ostringstream msg;
        msg << "coupling/epsilon = " << m.ratio_g << ", detuning/epsilon = " << m.ratio_delta
            << " (threshold " << m.threshold << ")";
        throw Error(ErrorKind::SpecMismatch, msg.str());
      }
    });
  }

  if (shape_ok && dressing_ok) {
    guard("truncation", [&] {
      const double amplitude =
          target_amplitude(cfg.conditional, cfg.system, cfg.propagation.t_final);
      const std::size_t tail = effective_tail(cfg.propagation, h);
      const double support =
          target_support(cfg.conditional, amplitude, cfg.initial_fock, h, tail);
      if (support < 0.9999) {
        std::ostringstream msg;
        msg << "target keeps " << support << " of its weight below the top " << tail
            << " levels (need 0.9999)";
        throw Error(ErrorKind::SpecMismatch, msg.str());
      }
    });
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

ExperimentConfig load_for_command(const CommandOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.dt_refine) cfg.propagation.dt_refine = true;
  if (opts.format) cfg.output_format = *opts.format;
  if (opts.out) cfg.output_path = *opts.out;
  return cfg;
}

// Runs body, mapping library errors to exit codes and messages on err.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const YAML::Exception& e) {
    err << "error: ConfigError: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::internal;
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << text;
  if (!file) throw std::runtime_error("failed writing " + path.string());
}

// Writes data to the configured path, or to out when there is none.
void emit(const ExperimentConfig& cfg, const std::string& data, std::ostream& out) {
  if (cfg.output_path) {
    write_text(*cfg.output_path, data);
  } else {
    out << data;
  }
}

std::string resonance_csv(const std::vector<ResonanceReport>& reports) {
  std::string out = "term,f_A,omega_A,chi_A,eta_A,delta_A,phase_rate\n";
  for (std::size_t l = 0; l < reports.size(); ++l) {
    const auto& r = reports[l];
    out += std::to_string(l) + "," + rational_string(r.f_A);
    for (double v : {r.omega_A, r.chi_A, r.eta_A, r.delta_A, r.phase_rate}) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

void print_rwa(std::ostream& s, const RwaMargin& m) {
  s << "rwa: coupling/epsilon " << m.ratio_g << ", detuning/epsilon " << m.ratio_delta
    << " (threshold " << m.threshold << ")" << (m.violated ? "  RWA MARGIN VIOLATED" : "")
    << '\n';
}

}  // namespace

int cmd_resonance(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_for_command(opts);
    ExperimentResult result = result_shell(cfg);
    result.diagnostics.path = "none";
    finish_diagnostics(result);

    std::ostream& summary = cfg.output_path ? out : err;
    summary << "frame integers:";
    for (int n : result.frame.n) summary << ' ' << n;
    summary << "\ndrive frequency: " << cfg.system.drive_freq
            << (cfg.drive_at_resonance ? " (set to resonance)" : "") << '\n';
    if (const auto wd = resonant_drive(cfg.system)) {
      summary << "recommended drive frequency: " << *wd << '\n';
    } else {
      summary << "recommended drive frequency: none (terms resonate at different frequencies)\n";
    }
    summary << "qubit detuning Delta: " << cfg.system.qubit_detuning() << '\n';
    for (std::size_t l = 0; l < result.resonance.size(); ++l) {
      const auto& r = result.resonance[l];
      summary << "term " << l << ": f_A " << rational_string(r.f_A) << ", omega_A " << r.omega_A
              << ", chi_A " << r.chi_A << ", eta_A " << r.eta_A << ", delta_A " << r.delta_A
              << ", phase rate " << r.phase_rate << ", delta_k";
      for (double d : r.mode_detunings) summary << ' ' << d;
      summary << '\n';
    }
    print_rwa(summary, result.diagnostics.rwa);
    emit(cfg,
         cfg.output_format == OutputFormat::csv ? resonance_csv(result.resonance)
                                                : to_json(result).dump(2) + "\n",
         out);
    return exit_code::ok;
  });
}

int cmd_validate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_for_command(opts);
    const auto issues = validate_config(cfg);
    for (const char* check : {"shape", "propagation", "frame", "rwa", "truncation"}) {
      const auto it = std::find_if(issues.begin(), issues.end(),
                                   [&](const ValidationIssue& i) { return i.check == check; });
      if (it == issues.end()) {
        out << "ok    " << check << '\n';
      } else {
        out << "FAIL  " << check << ": " << it->message << '\n';
      }
    }
    return issues.empty() ? exit_code::ok : exit_code::validation;
  });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_for_command(opts);
    const ExperimentResult result = run_simulation(cfg);
    emit(cfg,
         cfg.output_format == OutputFormat::csv ? records_csv(result.records)
                                                : to_json(result).dump(2) + "\n",
         out);

    std::ostream& summary = cfg.output_path ? out : err;
    const auto& last = result.records.back();
    const auto& d = result.diagnostics;
    summary << "path: " << d.path << ", dt " << d.dt << '\n';
    summary << "final state fidelity " << last.state_fidelity << ", operator fidelity "
            << last.operator_fidelity << '\n';
    summary << "max leakage " << d.max_leakage << " in the top " << d.truncation_tail
            << " levels" << (d.leakage_breach ? "  TRUNCATION BREACHED" : "") << '\n';
    print_rwa(summary, d.rwa);
    if (d.scaling) {
      summary << "scaling (ratio, infidelity):";
      for (const auto& row : d.scaling->rows) {
        summary << " (" << row.ratio << ", " << row.infidelity << ")";
      }
      summary << "\n  monotone " << (d.scaling->monotone ? "yes" : "no") << ", log-log slope "
              << d.scaling->slope << '\n';
    }
    return d.leakage_breach ? exit_code::leakage : exit_code::ok;
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_for_command(opts);
    const ExperimentResult result = run_sweep(cfg);
    emit(cfg,
         cfg.output_format == OutputFormat::csv ? sweep_csv(result.sweep_values, result.records)
                                                : to_json(result).dump(2) + "\n",
         out);
    std::ostream& summary = cfg.output_path ? out : err;
    summary << "swept " << cfg.sweep->parameter << " over " << result.records.size()
            << " values, path " << result.diagnostics.path << '\n';
    print_rwa(summary, result.diagnostics.rwa);
    if (result.diagnostics.leakage_breach) summary << "TRUNCATION BREACHED\n";
    return result.diagnostics.leakage_breach ? exit_code::leakage : exit_code::ok;
  });
}

}  // namespace crossres
