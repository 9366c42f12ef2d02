// SPDX-License-Identifier: Apache-2.0
//
// Seeded experiments over the F1/F2/F3 front ends composed with the NL
// engine, and their reports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfhelp/automaton.hpp"
#include "selfhelp/recognizer.hpp"

namespace selfhelp {

class EmptyCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One utterance per line, tokenized; blank lines and '#' lines skipped.
std::vector<TokenSeq> load_corpus(const std::filesystem::path& path);

/// Fraction of utterances the grammar accepts, wildcards active. Throws
/// EmptyCorpus.
double ux_score(const WordAutomaton& a, const std::vector<TokenSeq>& natural_corpus);

/// Loads a grammar file; the literal value "wildcard" gives the pure
/// wildcard automaton.
WordAutomaton load_automaton(const std::filesystem::path& path);

struct ExperimentConfig {
  std::map<Mode, std::filesystem::path> grammars;
  std::filesystem::path lexicon;
  std::filesystem::path data;
  std::string agent;
  std::filesystem::path in_grammar_corpus;
  std::filesystem::path natural_corpus;
  NoiseModel noise;  // noise.seed is unused; trials derive their own
  std::optional<std::filesystem::path> confusions;
  std::size_t trials = 1000;
  std::uint64_t seed = 42;
  RejectThreshold reject_threshold = RejectThreshold::automatic();
  std::size_t max_edit = 2;
  std::vector<std::size_t> sweep;  // extra E strengths reported as a frontier
  std::string report_name = "report";
};

/// Sections [grammars] [noise] [corpus] [engine] [output]; relative paths
/// resolve against the config file. Throws ConfigError naming the field.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct StrengthPoint {
  std::size_t max_edit = 0;
  double frame_accuracy = 0.0;
  double mean_corrected_distance = 0.0;
  friend bool operator==(const StrengthPoint&, const StrengthPoint&) = default;
};

struct ModeReport {
  Mode mode = Mode::F1;
  // Language accounting: distinct grammar strings (wildcards collapsed) and
  // how many of them the NL engine can answer.
  std::uint64_t language_count = 0;
  std::uint64_t language_valid = 0;
  std::uint64_t language_invalid = 0;
  bool language_truncated = false;
  double ux_score = 0.0;
  // Trials.
  std::size_t processed = 0;
  double acceptance_rate = 0.0;   // recognitions not rejected
  double mean_distance = 0.0;     // d(recognized, truth)
  double median_distance = 0.0;
  double mean_corrected_distance = 0.0;  // d(corrected, truth)
  double frame_accuracy = 0.0;
  std::size_t valid_frames = 0;
  std::size_t invalid_frames = 0;
  std::vector<StrengthPoint> frontier;

  friend bool operator==(const ModeReport&, const ModeReport&) = default;
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t trials = 0;
  double p_sub = 0.0;
  double p_del = 0.0;
  double p_ins = 0.0;
  std::size_t max_edit = 0;
  std::string reject_threshold;
  std::vector<ModeReport> modes;

  const ModeReport& mode(Mode m) const;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Every trial samples a truth from the in-grammar corpus, runs it through
/// noise, recognition and the NL engine for each configured mode, and
/// compares against the truth and its canonical frame. Trial t draws from a
/// generator seeded with seed ^ t, shared by all modes. Throws ConfigError.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { Table, Json };

std::string render_report(const ExperimentReport& r, ReportFormat format);
/// Inverse of render_report(r, Json). Throws std::invalid_argument.
ExperimentReport parse_report(std::string_view json);

}  // namespace selfhelp
