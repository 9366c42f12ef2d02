// SPDX-License-Identifier: Apache-2.0

#include "selfhelp/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

#include "selfhelp/backend.hpp"
#include "selfhelp/edit_distance.hpp"
#include "selfhelp/kvfile.hpp"
#include "selfhelp/nl_engine.hpp"

namespace selfhelp {

namespace fs = std::filesystem;

std::vector<TokenSeq> load_corpus(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open corpus file");
  std::vector<TokenSeq> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(tokenize(t));
  }
  return out;
}

double ux_score(const WordAutomaton& a, const std::vector<TokenSeq>& natural_corpus) {
  if (natural_corpus.empty()) throw EmptyCorpus("ux_score: empty corpus");
  auto hits = std::count_if(natural_corpus.begin(), natural_corpus.end(),
                            [&](const TokenSeq& u) { return matches(a, u); });
  return static_cast<double>(hits) / static_cast<double>(natural_corpus.size());
}

WordAutomaton load_automaton(const fs::path& path) {
  if (path == "wildcard") return wildcard_automaton();
  return compile(load_grammar_file(path.string()));
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  KvFile f = KvFile::load(path);
  ExperimentConfig cfg;

  auto existing = [&](const std::string& section, const std::string& key) {
    auto p = f.resolve(f.get(section, key));
    if (!fs::exists(p)) throw ConfigError(section + "." + key, "file " + p.string() + " does not exist");
    return p;
  };

  for (const auto& key : f.keys("grammars")) {
    Mode m;
    try {
      m = parse_mode(key);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("grammars." + key, e.what());
    }
    cfg.grammars[m] = f.get("grammars", key) == "wildcard" ? fs::path("wildcard") : existing("grammars", key);
  }
  if (cfg.grammars.empty()) throw ConfigError("grammars", "at least one grammar must be configured");

  cfg.noise.p_sub = f.get_double("noise", "p_sub", 0.0);
  cfg.noise.p_del = f.get_double("noise", "p_del", 0.0);
  cfg.noise.p_ins = f.get_double("noise", "p_ins", 0.0);
  try {
    cfg.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise", e.what());
  }
  for (const auto& w : f.get_list("noise", "vocab", ',')) {
    auto t = tokenize(w);
    if (t.size() != 1) throw ConfigError("noise.vocab", "'" + w + "' is not a single word");
    cfg.noise.vocab.push_back(t[0]);
  }
  if (f.find("noise", "confusions")) {
    cfg.confusions = existing("noise", "confusions");
    try {
      cfg.noise.confusions = load_confusion_table(cfg.confusions->string());
    } catch (const std::runtime_error& e) {
      throw ConfigError("noise.confusions", e.what());
    }
  }

  cfg.in_grammar_corpus = existing("corpus", "in_grammar");
  cfg.natural_corpus = existing("corpus", "natural");

  cfg.lexicon = existing("engine", "lexicon");
  cfg.data = existing("engine", "data");
  cfg.agent = f.get("engine", "agent");
  cfg.trials = f.get_uint("engine", "trials", 1000);
  if (cfg.trials < 1) throw ConfigError("engine.trials", "must be at least 1");
  cfg.seed = f.get_uint("engine", "seed", 42);
  cfg.max_edit = f.get_uint("engine", "max_edit", kDefaultMaxEdit);
  if (auto t = f.find("engine", "reject_threshold")) {
    try {
      cfg.reject_threshold = RejectThreshold::parse(*t);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("engine.reject_threshold", e.what());
    }
  }
  for (const auto& s : f.get_list("engine", "sweep", ',')) {
    try {
      std::size_t used = 0;
      auto v = std::stoul(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      cfg.sweep.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("engine.sweep", "'" + s + "' is not a non-negative integer");
    }
  }
  cfg.report_name = f.find("output", "name").value_or("report");
  if (cfg.report_name.empty() || cfg.report_name.find('/') != std::string::npos)
    throw ConfigError("output.name", "must be a plain file stem");
  return cfg;
}

namespace {

// FNV-1a, stable across platforms unlike std::hash.
class Fnv1a {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    h_ ^= 0xff;  // field separator
    h_ *= 0x100000001b3ULL;
  }
  void add_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    add(ss.str());
  }
  std::string hex() const {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h_;
    return ss.str();
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  Fnv1a h;
  for (const auto& [m, p] : cfg.grammars) {
    h.add(to_string(m));
    if (p == "wildcard") h.add("wildcard");
    else h.add_file(p);
  }
  for (const auto* p : {&cfg.lexicon, &cfg.data, &cfg.in_grammar_corpus, &cfg.natural_corpus}) h.add_file(*p);
  h.add(cfg.agent);
  h.add(fmt_double(cfg.noise.p_sub));
  h.add(fmt_double(cfg.noise.p_del));
  h.add(fmt_double(cfg.noise.p_ins));
  for (const auto& w : cfg.noise.vocab) h.add(w);
  for (const auto& [w, cs] : cfg.noise.confusions) {
    h.add(w);
    for (const auto& c : cs) h.add(c);
  }
  h.add(std::to_string(cfg.trials));
  h.add(std::to_string(cfg.seed));
  h.add(cfg.reject_threshold.str());
  h.add(std::to_string(cfg.max_edit));
  for (auto s : cfg.sweep) h.add(std::to_string(s));
  return h.hex();
}

double median(std::vector<std::size_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  auto n = v.size();
  if (n % 2) return static_cast<double>(v[n / 2]);
  return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

constexpr std::size_t kAccountingLimit = 100000;

}  // namespace

const ModeReport& ExperimentReport::mode(Mode m) const {
  for (const auto& r : modes)
    if (r.mode == m) return r;
  throw std::out_of_range("report has no row for mode " + to_string(m));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("engine.trials", "must be at least 1");
  GrammarSet grammars;
  for (const auto& [m, p] : cfg.grammars) {
    try {
      grammars.emplace(m, load_automaton(p));
    } catch (const std::exception& e) {
      throw ConfigError("grammars." + to_string(m), e.what());
    }
  }
  Domain domain = load_domain_file(cfg.lexicon.string());
  DataStore store = DataStore::load_file(cfg.data.string());
  const AgentContext* ctx = nullptr;
  try {
    ctx = &store.agent(cfg.agent);
  } catch (const BackendError& e) {
    throw ConfigError("engine.agent", e.what());
  }
  auto truths = load_corpus(cfg.in_grammar_corpus);
  if (truths.empty()) throw ConfigError("corpus.in_grammar", "corpus is empty");
  auto natural = load_corpus(cfg.natural_corpus);
  if (natural.empty()) throw ConfigError("corpus.natural", "corpus is empty");

  std::vector<std::size_t> strengths = cfg.sweep;
  std::vector<QueryFrame> truth_frames;
  truth_frames.reserve(truths.size());
  for (const auto& t : truths) truth_frames.push_back(understand(t, domain, *ctx, 0));

  ExperimentReport report;
  report.seed = cfg.seed;
  report.config_hash = config_hash(cfg);
  report.trials = cfg.trials;
  report.p_sub = cfg.noise.p_sub;
  report.p_del = cfg.noise.p_del;
  report.p_ins = cfg.noise.p_ins;
  report.max_edit = cfg.max_edit;
  report.reject_threshold = cfg.reject_threshold.str();

  for (const auto& [mode, automaton] : grammars) {
    ModeReport row;
    row.mode = mode;
    row.language_count = count_language(automaton);
    auto language = enumerate_language(automaton, WildcardPolicy::CollapseToEpsilon, kAccountingLimit);
    row.language_truncated = language.truncated;
    for (const auto& s : language.strings) {
      if (understand(s, domain, *ctx, cfg.max_edit).status.answerable()) ++row.language_valid;
      else ++row.language_invalid;
    }
    row.ux_score = ux_score(automaton, natural);

    std::size_t accepted = 0, frames_right = 0;
    std::vector<std::size_t> distances;
    double corrected_sum = 0.0;
    std::vector<std::size_t> sweep_right(strengths.size(), 0);
    std::vector<double> sweep_dist(strengths.size(), 0.0);

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      std::mt19937_64 rng(cfg.seed ^ static_cast<std::uint64_t>(trial));
      auto pick = static_cast<std::size_t>(rng() % truths.size());
      const TokenSeq& truth = truths[pick];
      NoiseModel nm = cfg.noise;
      nm.seed = rng();

      auto rec = recognize(mode, grammars, truth, nm, cfg.reject_threshold);
      if (rec.accepted) ++accepted;
      distances.push_back(word_edit_distance(rec.hypothesis, truth));

      auto corrected = correct(rec.hypothesis, domain.lexicon, cfg.max_edit);
      corrected_sum += static_cast<double>(word_edit_distance(corrected, truth));
      auto frame = understand(rec.hypothesis, domain, *ctx, cfg.max_edit);
      if (frame == truth_frames[pick]) ++frames_right;
      if (frame.status.answerable()) ++row.valid_frames;
      else ++row.invalid_frames;

      for (std::size_t k = 0; k < strengths.size(); ++k) {
        auto fk = understand(rec.hypothesis, domain, *ctx, strengths[k]);
        if (fk == truth_frames[pick]) ++sweep_right[k];
        sweep_dist[k] += static_cast<double>(word_edit_distance(correct(rec.hypothesis, domain.lexicon, strengths[k]), truth));
      }
    }

    const auto n = static_cast<double>(cfg.trials);
    row.processed = cfg.trials;
    row.acceptance_rate = static_cast<double>(accepted) / n;
    double sum = 0.0;
    for (auto d : distances) sum += static_cast<double>(d);
    row.mean_distance = sum / n;
    row.median_distance = median(distances);
    row.mean_corrected_distance = corrected_sum / n;
    row.frame_accuracy = static_cast<double>(frames_right) / n;
    for (std::size_t k = 0; k < strengths.size(); ++k)
      row.frontier.push_back({strengths[k], static_cast<double>(sweep_right[k]) / n, sweep_dist[k] / n});
    report.modes.push_back(std::move(row));
  }
  return report;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const ExperimentReport& r) {
  ojson j;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["trials"] = r.trials;
  j["noise"] = {{"p_sub", r.p_sub}, {"p_del", r.p_del}, {"p_ins", r.p_ins}};
  j["max_edit"] = r.max_edit;
  j["reject_threshold"] = r.reject_threshold;
  j["modes"] = ojson::array();
  for (const auto& m : r.modes) {
    ojson row;
    row["mode"] = to_string(m.mode);
    row["language"] = {{"total", m.language_count},
                       {"valid", m.language_valid},
                       {"invalid", m.language_invalid},
                       {"truncated", m.language_truncated}};
    row["ux_score"] = m.ux_score;
    row["processed"] = m.processed;
    row["acceptance_rate"] = m.acceptance_rate;
    row["mean_distance"] = m.mean_distance;
    row["median_distance"] = m.median_distance;
    row["mean_corrected_distance"] = m.mean_corrected_distance;
    row["frame_accuracy"] = m.frame_accuracy;
    row["valid_frames"] = m.valid_frames;
    row["invalid_frames"] = m.invalid_frames;
    row["frontier"] = ojson::array();
    for (const auto& p : m.frontier)
      row["frontier"].push_back({{"max_edit", p.max_edit},
                                 {"frame_accuracy", p.frame_accuracy},
                                 {"mean_corrected_distance", p.mean_corrected_distance}});
    j["modes"].push_back(std::move(row));
  }
  return j;
}

std::string fixed(double v, int precision) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

std::string render_table(const ExperimentReport& r) {
  std::ostringstream out;
  out << "seed " << r.seed << "  trials " << r.trials << "  p_sub " << r.p_sub << "  p_del " << r.p_del
      << "  p_ins " << r.p_ins << "  max_edit " << r.max_edit << "  reject " << r.reject_threshold
      << "  config " << r.config_hash << "\n";

  const std::vector<std::string> header = {"mode",   "total",  "valid",   "invalid",  "ux",      "accept",
                                           "mean_d", "med_d",  "mean_dE", "frame_acc", "ok_frames", "bad_frames"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : r.modes) {
    rows.push_back({to_string(m.mode), std::to_string(m.language_count) + (m.language_truncated ? "+" : ""),
                    std::to_string(m.language_valid), std::to_string(m.language_invalid), fixed(m.ux_score, 3),
                    fixed(m.acceptance_rate, 3), fixed(m.mean_distance, 3), fixed(m.median_distance, 1),
                    fixed(m.mean_corrected_distance, 3), fixed(m.frame_accuracy, 3), std::to_string(m.valid_frames),
                    std::to_string(m.invalid_frames)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << "  ";
      if (c == 0) out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      else out << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
    }
    out << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);

  bool any_frontier = std::any_of(r.modes.begin(), r.modes.end(), [](const auto& m) { return !m.frontier.empty(); });
  if (any_frontier) {
    out << "\nNL strength frontier\n";
    out << std::left << std::setw(6) << "mode" << std::right << std::setw(10) << "max_edit" << std::setw(11)
        << "frame_acc" << std::setw(9) << "mean_dE" << "\n";
    for (const auto& m : r.modes)
      for (const auto& p : m.frontier)
        out << std::left << std::setw(6) << to_string(m.mode) << std::right << std::setw(10) << p.max_edit
            << std::setw(11) << fixed(p.frame_accuracy, 3) << std::setw(9) << fixed(p.mean_corrected_distance, 3)
            << "\n";
  }
  return out.str();
}

}  // namespace

std::string render_report(const ExperimentReport& r, ReportFormat format) {
  if (format == ReportFormat::Table) return render_table(r);
  return to_json(r).dump(2) + "\n";
}

ExperimentReport parse_report(std::string_view text) {
  try {
    auto j = ojson::parse(text);
    ExperimentReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.trials = j.at("trials").get<std::size_t>();
    r.p_sub = j.at("noise").at("p_sub").get<double>();
    r.p_del = j.at("noise").at("p_del").get<double>();
    r.p_ins = j.at("noise").at("p_ins").get<double>();
    r.max_edit = j.at("max_edit").get<std::size_t>();
    r.reject_threshold = j.at("reject_threshold").get<std::string>();
    for (const auto& row : j.at("modes")) {
      ModeReport m;
      m.mode = parse_mode(row.at("mode").get<std::string>());
      const auto& lang = row.at("language");
      m.language_count = lang.at("total").get<std::uint64_t>();
      m.language_valid = lang.at("valid").get<std::uint64_t>();
      m.language_invalid = lang.at("invalid").get<std::uint64_t>();
      m.language_truncated = lang.at("truncated").get<bool>();
      m.ux_score = row.at("ux_score").get<double>();
      m.processed = row.at("processed").get<std::size_t>();
      m.acceptance_rate = row.at("acceptance_rate").get<double>();
      m.mean_distance = row.at("mean_distance").get<double>();
      m.median_distance = row.at("median_distance").get<double>();
      m.mean_corrected_distance = row.at("mean_corrected_distance").get<double>();
      m.frame_accuracy = row.at("frame_accuracy").get<double>();
      m.valid_frames = row.at("valid_frames").get<std::size_t>();
      m.invalid_frames = row.at("invalid_frames").get<std::size_t>();
      for (const auto& p : row.at("frontier"))
        m.frontier.push_back({p.at("max_edit").get<std::size_t>(), p.at("frame_accuracy").get<double>(),
                              p.at("mean_corrected_distance").get<double>()});
      r.modes.push_back(std::move(m));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

}  // namespace selfhelp
