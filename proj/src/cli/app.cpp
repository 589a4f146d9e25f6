// Copyright 2026 The prefdiff Authors
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

#include "prefdiff/cli/app.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "prefdiff/backend/registry.h"
#include "prefdiff/cli/run_config.h"
#include "prefdiff/common/error.h"
#include "prefdiff/evaldata/evaluate.h"
#include "prefdiff/evaldata/report.h"
#include "prefdiff/prompts/facts.h"
#include "prefdiff/scoring/batch.h"
#include "prefdiff/tuning/tuning.h"

namespace prefdiff::cli {
namespace {

using nlohmann::json;

struct GlobalArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

struct Session {
  RunConfig config;
  std::unique_ptr<Backend> backend;
  FactProviders providers;
};

RunConfig load_config(const GlobalArgs& g) {
  json tree = g.config_path.empty() ? json::object() : read_config_file(g.config_path);
  for (const auto& o : g.overrides) apply_override(tree, o);
  if (g.seed) tree["seed"] = *g.seed;
  return parse_run_config(tree);
}

Session open_session(const GlobalArgs& g) {
  Session s;
  s.config = load_config(g);
  s.backend = make_backend(s.config.backend_name, s.config.backend_params,
                           default_backend_context(s.config.seed));
  s.providers = make_fact_providers(s.config.ner_provider, s.config.coref_provider,
                                    s.config.fact_cache_path);
  if (!s.config.prompt_vector_path.empty()) {
    require_file("scoring.prompt_vector", s.config.prompt_vector_path);
    s.config.scoring.prompt_vector = std::make_shared<const PromptVector>(load_checkpoint(
        s.config.prompt_vector_path, *s.backend, s.config.force_prompt_vector));
  }
  return s;
}

std::string pick(const std::string& flag, const std::string& configured) {
  return flag.empty() ? configured : flag;
}

std::vector<PairRecord> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path);
  std::vector<PairRecord> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) raise(ErrorCode::kParse, where + ": not a JSON object");
    PairRecord r;
    try {
      r.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                              : std::to_string(lineno);
      r.document = j.value("document", std::string());
      r.summary = j.value("summary", std::string());
    } catch (const json::exception&) {
      raise(ErrorCode::kParse, where + ": document and summary must be strings");
    }
    pairs.push_back(std::move(r));
  }
  return pairs;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) raise(ErrorCode::kIo, "cannot write " + path);
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

int cmd_score(const GlobalArgs& g, const std::string& input_flag, const std::string& output_flag,
              std::size_t workers, std::ostream& out) {
  Session s = open_session(g);
  const std::string input = pick(input_flag, s.config.io.input);
  require_file("io.input", input);
  const auto pairs = read_pairs(input);

  const PairScorer scorer(*s.backend, s.config.scoring, s.providers);
  const auto results = score_batch(scorer, pairs, workers);

  std::vector<TokenScoreSeq> ok;
  for (const auto& r : results) {
    if (r.ok()) ok.push_back(*r.scores);
  }
  double threshold = s.config.threshold.fixed_value;
  if (s.config.threshold.mode == ThresholdPolicy::Mode::kProportion && !ok.empty()) {
    threshold = resolve_threshold(s.config.threshold, ok);
  }

  Output dst(pick(output_flag, s.config.io.output), out);
  const std::string variant(variant_name(s.config.scoring.prompt_variant));
  for (const auto& r : results) {
    json rec;
    rec["id"] = r.id;
    if (!r.ok()) {
      rec["error"] = {{"code", std::string(error_code_name(r.failure->code))},
                      {"message", r.failure->message}};
    } else {
      const auto labels = apply_threshold(*r.scores, threshold);
      rec["word_scores"] = r.scores->word_pdiff;
      rec["word_labels"] = std::vector<int>(labels.begin(), labels.end());
      rec["summary_score"] = r.summary_score;
      rec["threshold"] = threshold;
      rec["variant"] = variant;
      if (r.scores->truncated) rec["truncated"] = true;
    }
    *dst << rec.dump() << '\n';
  }
  if (!*dst) raise(ErrorCode::kIo, "failed writing score output");
  return kExitOk;
}

std::vector<AnnotatedExample> with_word_labels(const std::vector<AnnotatedExample>& all) {
  std::vector<AnnotatedExample> out;
  for (const auto& ex : all) {
    if (ex.word_labels) out.push_back(ex);
  }
  return out;
}

int cmd_evaluate(const GlobalArgs& g, std::vector<std::string> datasets,
                 const std::vector<std::string>& categories, const std::string& report_flag,
                 std::size_t workers, std::ostream& out) {
  Session s = open_session(g);
  if (datasets.empty() && !s.config.io.dataset.empty()) datasets.push_back(s.config.io.dataset);
  if (datasets.empty()) raise(ErrorCode::kConfig, "io.dataset is required");
  for (const auto& d : datasets) require_file("io.dataset", d);
  const std::string report_dir = pick(report_flag, s.config.io.report_dir);
  if (report_dir.empty()) raise(ErrorCode::kConfig, "io.report_dir is required");

  std::vector<AnnotatedExample> all;
  std::map<std::string, std::vector<AnnotatedExample>> by_name;
  for (const auto& d : datasets) {
    Dataset ds = load_dataset(d);
    for (const auto& w : ds.warnings) out << "warning: " << w << '\n';
    by_name[std::filesystem::path(d).stem().string()] = ds.examples;
    all.insert(all.end(), ds.examples.begin(), ds.examples.end());
  }

  const PairScorer scorer(*s.backend, s.config.scoring, s.providers);
  EvaluationReport report;
  std::string line;

  const auto token_set = with_word_labels(all);
  if (!token_set.empty()) {
    const auto ev = evaluate_tokens(token_set, scorer, s.config.threshold, workers);
    report.add_tokens(ev);
    line += "corpus_f1=" + std::to_string(ev.f1.corpus_f1) +
            " average_split_f1=" + std::to_string(ev.f1.average_split_f1);
  }
  for (const auto& [name, examples] : by_name) {
    std::vector<AnnotatedExample> rated;
    for (const auto& ex : examples) {
      if (ex.summary_label) rated.push_back(ex);
    }
    if (rated.empty()) continue;
    try {
      report.pearson[name] = evaluate_summaries(rated, scorer, workers).pearson;
      line += (line.empty() ? "" : " ") + std::string("pearson[") + name +
              "]=" + std::to_string(report.pearson[name]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      report.notes.push_back("pearson[" + name + "] skipped: " + e.what());
    }
  }
  for (const auto& c : categories) {
    const Category cat = parse_category(c);
    const auto ev = category_evaluate(all, cat, scorer, *s.providers.coref);
    report.add_category(ev);
    line += (line.empty() ? "" : " ") + std::string(category_name(cat)) +
            "_pearson=" + std::to_string(ev.pearson) + " retained=" + std::to_string(ev.retained) +
            " excluded=" + std::to_string(ev.excluded);
  }
  write_report(report, report_dir);
  out << (line.empty() ? "no metrics computed" : line) << '\n';
  return kExitOk;
}

int cmd_tune(const GlobalArgs& g, const std::string& train_flag, const std::string& valid_flag,
             const std::string& preset, const std::string& resume,
             const std::string& checkpoint_flag, const std::string& trace_flag, bool force,
             std::ostream& out) {
  GlobalArgs args = g;
  // presets go first so explicit --set values win
  if (preset == "full-shot") {
    args.overrides.insert(args.overrides.begin(), "tuning.prompt_length=40");
  } else if (preset == "few-shot") {
    args.overrides.insert(args.overrides.begin(), "tuning.train_limit=300");
    args.overrides.insert(args.overrides.begin(), "tuning.prompt_length=5");
  } else if (!preset.empty()) {
    raise(ErrorCode::kConfig, "--preset: expected full-shot or few-shot");
  }
  Session s = open_session(args);
  const auto& caps = s.backend->capabilities();
  if (!caps.supports_embedding_injection || !caps.supports_gradients) {
    raise(ErrorCode::kCapability, "backend '" + s.backend->name() +
                                      "' does not support gradients w.r.t. injected embeddings");
  }
  const std::string train_path = pick(train_flag, s.config.io.train);
  const std::string valid_path = pick(valid_flag, s.config.io.valid);
  const std::string ckpt_path = pick(checkpoint_flag, s.config.io.checkpoint);
  require_file("io.train", train_path);
  require_file("io.valid", valid_path);
  if (ckpt_path.empty()) raise(ErrorCode::kConfig, "io.checkpoint is required");
  if (!resume.empty()) require_file("--resume", resume);

  auto train = load_token_dataset(train_path).examples;
  const auto valid = load_token_dataset(valid_path).examples;
  if (s.config.train_limit && train.size() > *s.config.train_limit) train.resize(*s.config.train_limit);

  std::optional<PromptVector> initial;
  if (!resume.empty()) initial = load_checkpoint(resume, *s.backend, force);

  ScoringConfig scoring = s.config.scoring;
  scoring.prompt_vector.reset();
  const auto result =
      train_prompt_vector(train, valid, s.config.tuning, *s.backend, scoring, std::move(initial));
  save_checkpoint(ckpt_path, result.vector, s.backend->fingerprint());
  const std::string trace_path = pick(trace_flag, s.config.io.trace.empty()
                                                      ? ckpt_path + ".trace.csv"
                                                      : s.config.io.trace);
  write_trace_csv(trace_path, result.trace);
  out << "best_epoch=" << result.best_epoch << " valid_f1=" << result.best_valid_f1
      << " parameters=" << result.vector.parameter_count() << '\n';
  return kExitOk;
}

int cmd_report(const GlobalArgs& g, const std::string& scores_flag,
               const std::string& dataset_flag, const std::string& report_flag,
               std::ostream& out) {
  const RunConfig config = load_config(g);
  const std::string scores_path = pick(scores_flag, config.io.scores);
  const std::string dataset_path = pick(dataset_flag, config.io.dataset);
  const std::string report_dir = pick(report_flag, config.io.report_dir);
  require_file("io.scores", scores_path);
  require_file("io.dataset", dataset_path);
  if (report_dir.empty()) raise(ErrorCode::kConfig, "io.report_dir is required");

  const auto gold = load_dataset(dataset_path).examples;
  std::map<std::string, const AnnotatedExample*> by_id;
  for (const auto& ex : gold) by_id[ex.id] = &ex;

  std::ifstream in(scores_path);
  std::vector<std::vector<int>> preds, golds;
  std::vector<std::string> splits;
  std::vector<double> pooled, human, machine;
  std::vector<int> pooled_labels;
  std::optional<double> threshold;
  std::size_t failed = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = scores_path + ":" + std::to_string(lineno);
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id")) {
      raise(ErrorCode::kParse, where + ": not a scored record");
    }
    if (j.contains("error")) {
      ++failed;
      continue;
    }
    const auto id = j["id"].get<std::string>();
    const auto it = by_id.find(id);
    if (it == by_id.end()) raise(ErrorCode::kAlignment, where + ": id '" + id + "' not in dataset");
    const auto& ex = *it->second;
    try {
      threshold = j.at("threshold").get<double>();
      if (ex.word_labels) {
        auto p = j.at("word_labels").get<std::vector<int>>();
        auto sc = j.at("word_scores").get<std::vector<double>>();
        if (p.size() != ex.word_labels->size() || sc.size() != p.size()) {
          raise(ErrorCode::kAlignment, where + ": word count differs from gold labels");
        }
        pooled.insert(pooled.end(), sc.begin(), sc.end());
        pooled_labels.insert(pooled_labels.end(), ex.word_labels->begin(), ex.word_labels->end());
        preds.push_back(std::move(p));
        golds.push_back(*ex.word_labels);
        splits.push_back(split_of(ex));
      }
      if (ex.summary_label) {
        machine.push_back(j.at("summary_score").get<double>());
        human.push_back(*ex.summary_label);
      }
    } catch (const json::exception& e) {
      raise(ErrorCode::kParse, where + ": " + e.what());
    }
  }

  EvaluationReport report;
  std::string summary;
  if (!preds.empty()) {
    const auto f1 = token_f1(preds, golds, splits);
    report.per_split_f1 = f1.per_split_f1;
    report.average_split_f1 = f1.average_split_f1;
    report.corpus_f1 = f1.corpus_f1;
    report.threshold_used = threshold;
    std::size_t pos = 0, total = 0;
    for (const auto& p : preds) {
      for (int v : p) pos += v == 1;
      total += p.size();
    }
    report.predicted_positive_rate = total ? static_cast<double>(pos) / total : 0.0;
    try {
      report.histogram = emit_histogram(pooled, pooled_labels);
    } catch (const Error& e) {
      report.notes.push_back(std::string("histogram skipped: ") + e.what());
    }
    summary += "corpus_f1=" + std::to_string(f1.corpus_f1);
  }
  if (!human.empty()) {
    const std::string name = std::filesystem::path(dataset_path).stem().string();
    try {
      report.pearson[name] = pearson(machine, human);
      summary += (summary.empty() ? "" : " ") + std::string("pearson=") +
                 std::to_string(report.pearson[name]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      report.notes.push_back(std::string("pearson skipped: ") + e.what());
    }
  }
  if (failed) report.notes.push_back(std::to_string(failed) + " scored records carried errors");
  write_report(report, report_dir);
  out << (summary.empty() ? "no metrics computed" : summary) << '\n';
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kParse:
    case ErrorCode::kAlignment:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token-level factual inconsistency scoring by probability differentials"};
  app.require_subcommand(1);
  GlobalArgs g;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  app.add_option("-c,--config", g.config_path, "JSON run configuration");
  app.add_option("--set", g.overrides, "Override a config value: section.key=value");
  auto* seed_opt = app.add_option("--seed", seed, "Global seed");

  std::string input, output, report_dir, train, valid, preset, resume, checkpoint, trace, scores,
      dataset;
  std::vector<std::string> datasets, categories;
  bool force = false;

  auto* score = app.add_subcommand("score", "Score document/summary pairs (JSONL in, JSONL out)");
  score->add_option("-i,--input", input, "Input JSONL {id, document, summary}");
  score->add_option("-o,--output", output, "Output JSONL (stdout when omitted)");
  score->add_option("-w,--workers", workers, "Parallel scoring threads")->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate on annotated datasets");
  evaluate->add_option("-d,--dataset", datasets, "Canonical JSONL dataset (repeatable)");
  evaluate->add_option("--category", categories, "EntE, CorefE or OutE (repeatable)");
  evaluate->add_option("-r,--report-dir", report_dir, "Report directory");
  evaluate->add_option("-w,--workers", workers, "Parallel scoring threads")->check(CLI::PositiveNumber);

  auto* tune = app.add_subcommand("tune", "Train a prompt vector");
  tune->add_option("--train", train, "Training JSONL with word_labels");
  tune->add_option("--valid", valid, "Validation JSONL with word_labels");
  tune->add_option("--preset", preset, "full-shot or few-shot");
  tune->add_option("--resume", resume, "Start from this checkpoint");
  tune->add_option("--checkpoint", checkpoint, "Output checkpoint path");
  tune->add_option("--trace", trace, "Per-epoch trace CSV");
  tune->add_flag("--force", force, "Load a checkpoint despite a backend fingerprint mismatch");

  auto* report = app.add_subcommand("report", "Build a report from scored JSONL and gold labels");
  report->add_option("-s,--scores", scores, "Output of the score command");
  report->add_option("-d,--dataset", dataset, "Gold dataset");
  report->add_option("-r,--report-dir", report_dir, "Report directory");

  for (auto* sub : {score, evaluate, tune, report}) {
    sub->add_option("-c,--config", g.config_path, "JSON run configuration");
    sub->add_option("--set", g.overrides, "Override a config value: section.key=value");
    sub->add_option("--seed", seed, "Global seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  for (auto* sub : {score, evaluate, tune, report}) {
    if (sub->get_option("--seed")->count() > 0) g.seed = seed;
  }

  try {
    if (*score) return cmd_score(g, input, output, workers, out);
    if (*evaluate) return cmd_evaluate(g, datasets, categories, report_dir, workers, out);
    if (*tune) return cmd_tune(g, train, valid, preset, resume, checkpoint, trace, force, out);
    if (*report) return cmd_report(g, scores, dataset, report_dir, out);
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace prefdiff::cli
