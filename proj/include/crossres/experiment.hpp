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

// Experiment configs (YAML in, JSON/CSV out) and the command implementations
// behind the command-line tool. Commands write to caller-supplied streams and
// return the process exit code so they can be exercised in-process.

#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crossres/analysis.hpp"

namespace crossres {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int parse = 2;
inline constexpr int spec = 3;
inline constexpr int leakage = 4;
inline constexpr int validation = 5;
inline constexpr int step_too_coarse = 6;
}  // namespace exit_code

int exit_code_for(ErrorKind kind);

enum class OutputFormat { csv, json };

struct SweepAxis {
  // drive_freq, drive_strength, qubit_freq, mode_freq.<k> or coupling.<l>
  std::string parameter;
  std::vector<double> values;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct ExperimentConfig {
  std::string reference_unit = "reference frequency";
  SystemSpec system;
  std::vector<std::size_t> mode_dims;
  // True when the drive frequency was left out and set to the resonance.
  bool drive_at_resonance = false;
  std::optional<FrameIntegers> frame;
  PropagationConfig propagation;
  ConditionalCase conditional;
  // Target amplitude |alpha|, |zeta| or theta; sets t_final when that is absent.
  std::optional<double> amplitude;
  QubitInit initial_qubit = QubitInit::g;
  std::vector<std::size_t> initial_fock;
  double rwa_threshold = 0.1;
  std::optional<SweepAxis> sweep;
  std::vector<double> scaling_ratios;
  std::optional<std::filesystem::path> output_path;
  OutputFormat output_format = OutputFormat::json;

  std::string source_text;  // verbatim file contents, hashed into results

  HilbertSpec hilbert() const { return HilbertSpec(mode_dims); }
  // Explicit frame if given, else solve_frame_integers on the terms.
  FrameIntegers frame_integers() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Errors carry ErrorKind::ConfigError and a "<origin>:<line>:<col>: <field>:"
// prefix pointing at the offending entry.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Replace one sweepable parameter.
SystemSpec with_parameter(const SystemSpec& spec, const std::string& parameter, double value);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const ResonanceReport& r);

struct ResultDiagnostics {
  std::string path;  // propagation path taken
  double dt = 0.0;
  std::size_t truncation_tail = 0;
  std::optional<double> refinement_delta;
  double max_leakage = 0.0;
  bool leakage_breach = false;
  RwaMargin rwa;
  std::optional<SweepAxis> sweep;
  std::optional<ScalingTable> scaling;
  // Wall-clock metadata, excluded from the deterministic data section.
  double wall_seconds = 0.0;
  std::string timestamp;
};

struct ExperimentResult {
  std::string config_hash;  // SHA-256 of the config text
  nlohmann::json config;
  FrameIntegers frame;
  std::vector<ResonanceReport> resonance;
  std::vector<FidelityRecord> records;
  std::vector<double> sweep_values;  // parallel to records for sweeps
  ResultDiagnostics diagnostics;
};

nlohmann::json to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const nlohmann::json& j);
bool equivalent(const ExperimentResult& a, const ExperimentResult& b);

inline constexpr const char* kCsvHeader =
    "time,state_fidelity,operator_fidelity,leakage,rwa_ratio_g,rwa_ratio_delta";

// Header line then one row per record; locale independent, shortest round-trip numbers.
std::string records_csv(const std::vector<FidelityRecord>& records);
std::string sweep_csv(const std::vector<double>& values, const std::vector<FidelityRecord>& records);

std::string sha256_hex(const std::string& text);

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<OutputFormat> format;
  bool dt_refine = false;
};

int cmd_resonance(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Runs compare_run (and the scaling study when configured) for a parsed config.
ExperimentResult run_simulation(const ExperimentConfig& cfg);
// One compare_run per sweep value, final record of each, in axis order.
ExperimentResult run_sweep(const ExperimentConfig& cfg);

struct ValidationIssue {
  std::string check;
  std::string message;
};

// Static checks only; empty when everything passes.
std::vector<ValidationIssue> validate_config(const ExperimentConfig& cfg);

}  // namespace crossres
