// Copyright 2026 The ginsign Authors.
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

// Command-line front end for the ginsign library.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ginsign/equivalence.h"
#include "ginsign/external_scorer.h"
#include "ginsign/grounding.h"
#include "ginsign/lifting.h"
#include "ginsign/ltl.h"
#include "ginsign/pipeline.h"
#include "ginsign/signature.h"
#include "ginsign/trace.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Each --sig may name a file or a directory of *.json signatures.
ginsign::SignatureSet LoadSignatures(const std::vector<std::string> &paths) {
  ginsign::SignatureSet sigs;
  auto add = [&](const fs::path &p) {
    std::vector<std::string> warnings;
    ginsign::Signature sig = ginsign::Signature::Load(p, &warnings);
    for (const auto &w : warnings) std::cerr << "warning: " << p.string() << ": " << w << "\n";
    std::string name = sig.name();
    sigs.insert_or_assign(name, std::move(sig));
  };
  for (const auto &path : paths) {
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto &entry : fs::directory_iterator(path)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto &f : files) add(f);
    } else {
      add(path);
    }
  }
  return sigs;
}

const ginsign::Signature &OnlySignature(const ginsign::SignatureSet &sigs) {
  if (sigs.size() != 1) {
    throw ginsign::Error(ginsign::ErrorKind::kInvalidArgument, "expected exactly one signature");
  }
  return sigs.begin()->second;
}

// Inline JSON, or @path to read it from a file.
json JsonArgument(const std::string &arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw ginsign::Error(ginsign::ErrorKind::kIo, "cannot open " + arg.substr(1));
    return json::parse(in);
  }
  return json::parse(arg);
}

ginsign::GroundingMap MapArgument(const std::string &arg) {
  ginsign::GroundingMap map;
  json doc = JsonArgument(arg);
  for (const auto &[k, v] : doc.items()) {
    map.emplace(k, ginsign::GroundedAtom::Parse(v.get<std::string>()));
  }
  return map;
}

json VerdictJson(const ginsign::EquivalenceVerdict &v) {
  json doc = {{"equivalent", v.equivalent},
              {"bound_used", v.bound_used},
              {"bound_too_small", v.bound_too_small},
              {"traces_checked", v.traces_checked}};
  doc["witness"] = v.witness ? v.witness->ToJson() : json();
  return doc;
}

std::size_t WorkerCount(std::optional<std::size_t> requested) {
  std::size_t workers = requested.value_or(std::max(1u, std::thread::hardware_concurrency()));
  if (const char *env = std::getenv("GINSIGN_WORKERS")) {
    try {
      workers = std::min<std::size_t>(workers, std::max(1ul, std::stoul(env)));
    } catch (const std::exception &) {
      std::cerr << "warning: ignoring GINSIGN_WORKERS=" << env << "\n";
    }
  }
  return std::max<std::size_t>(workers, 1);
}

void WriteOutput(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ginsign::Error(ginsign::ErrorKind::kIo, "cannot write " + path);
  out << text;
}

int ServeStdio(ginsign::SpanScorer &scorer) {
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json reply;
    try {
      reply = ginsign::HandleScoreDocument(scorer, json::parse(line));
    } catch (const json::exception &e) {
      reply = {{"id", nullptr}, {"error", std::string("invalid JSON: ") + e.what()}};
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}

int ServeHttp(ginsign::SpanScorer &scorer, const std::string &host, int port) {
  std::mutex mu;
  httplib::Server server;
  server.Post("/score", [&](const httplib::Request &req, httplib::Response &res) {
    json reply;
    try {
      json doc = json::parse(req.body);
      if (scorer.concurrent()) {
        reply = ginsign::HandleScoreDocument(scorer, doc);
      } else {
        std::lock_guard lock(mu);
        reply = ginsign::HandleScoreDocument(scorer, doc);
      }
    } catch (const json::exception &e) {
      reply = {{"id", nullptr}, {"error", std::string("invalid JSON: ") + e.what()}};
      res.status = 400;
    }
    res.set_content(reply.dump(), "application/json");
  });
  std::cerr << "serving " << scorer.id() << " on http://" << host << ":" << port << "/score\n";
  if (!server.listen(host, port)) {
    throw ginsign::Error(ginsign::ErrorKind::kTransport, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Grounding of lifted LTL specifications in typed system signatures"};
  app.require_subcommand(1);

  // prefix
  std::string sig_path;
  std::optional<std::string> type_filter;
  auto *prefix = app.add_subcommand("prefix", "Print the candidate prefix of a signature, one per line");
  prefix->add_option("--sig", sig_path, "Signature file")->required();
  prefix->add_option("--type", type_filter, "List constants of this type instead of predicates");

  // parse
  std::vector<std::string> formulas;
  bool parse_atoms = false;
  auto *parse = app.add_subcommand("parse", "Parse LTL formulas and print them in canonical form");
  parse->add_option("formula", formulas, "Formulas (read from stdin when omitted)");
  parse->add_flag("--atoms", parse_atoms, "Also list the atoms of each formula");

  // eval
  std::vector<std::string> sig_paths;
  std::string trace_path, data_path, scorer_spec = "lexical", split_path, out_path, format = "json";
  std::string formula_text;
  std::size_t k = ginsign::kDefaultBound, m = ginsign::kDefaultShardSize;
  std::optional<std::size_t> workers;
  std::uint64_t seed = 7;
  std::size_t bootstrap = 1000;
  auto *eval = app.add_subcommand(
      "eval", "Evaluate a formula on a trace (--trace), or run the grounding harness on a dataset (--data)");
  eval->add_option("formula", formula_text, "Formula to evaluate with --trace");
  eval->add_option("--trace", trace_path, "Trace file")->check(CLI::ExistingFile);
  eval->add_option("--sig", sig_paths, "Signature file or directory (repeatable)");
  eval->add_option("--data", data_path, "JSONL dataset")->check(CLI::ExistingFile);
  eval->add_option("--scorer", scorer_spec, "lexical | first | oracle | external:<cmd> | http:<url>");
  eval->add_option("--split", split_path, "Split config")->check(CLI::ExistingFile);
  eval->add_option("--k", k, "Equivalence bound");
  eval->add_option("--m", m, "Shard size");
  eval->add_option("--out", out_path, "Report path (stdout when omitted)");
  eval->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
  eval->add_option("--workers", workers, "Worker threads (capped by GINSIGN_WORKERS)");
  eval->add_option("--bootstrap", bootstrap, "Bootstrap resamples");
  eval->add_option("--seed", seed, "Bootstrap seed");
  eval->get_option("--trace")->excludes("--data");

  // ground
  std::string input_path;
  auto *ground = app.add_subcommand("ground", "Ground lifted APs read from stdin (text lines or JSONL)");
  ground->add_option("--sig", sig_path, "Signature file")->required();
  ground->add_option("--scorer", scorer_spec, "lexical | first | external:<cmd> | http:<url>");
  ground->add_option("--m", m, "Shard size");
  ground->add_option("--input", input_path, "Input file (stdin when omitted)");

  // check-equiv
  std::string f1_text, f2_text;
  auto *check_equiv = app.add_subcommand("check-equiv", "Bounded LTL equivalence of two formulas");
  check_equiv->add_option("--k", k, "Bound on prefix + loop length");
  check_equiv->add_option("f1", f1_text)->required();
  check_equiv->add_option("f2", f2_text)->required();

  // check-gle
  std::string pred_map_arg, gold_map_arg;
  auto *check_gle = app.add_subcommand("check-gle", "Grounded logical equivalence of a prediction and a gold record");
  check_gle->add_option("--pred", f1_text, "Predicted lifted formula")->required();
  check_gle->add_option("--pred-map", pred_map_arg, "Predicted grounding (JSON or @file)")->required();
  check_gle->add_option("--gold", f2_text, "Gold lifted formula")->required();
  check_gle->add_option("--gold-map", gold_map_arg, "Gold grounding (JSON or @file)")->required();
  check_gle->add_option("--k", k, "Equivalence bound");

  // model-check
  std::string model_path;
  auto *model_check = app.add_subcommand("model-check", "Bounded LTL model checking on a Kripke structure");
  model_check->add_option("--model", model_path, "Kripke structure file")->required()->check(CLI::ExistingFile);
  model_check->add_option("--k", k, "Maximum lasso length");
  model_check->add_option("formula", formula_text)->required();

  // translate
  std::string synonyms_path;
  auto *translate = app.add_subcommand("translate", "Template lifting and lifted translation stub");
  translate->add_option("sentence", formula_text, "Sentence (lifted when --sig is omitted)")->required();
  translate->add_option("--sig", sig_path, "Signature used to lift the sentence first");
  translate->add_option("--synonyms", synonyms_path, "JSON object mapping phrases to symbols");

  // export-training
  auto *export_training = app.add_subcommand("export-training", "Write gold-in training shards as JSONL");
  export_training->add_option("--sig", sig_paths, "Signature file or directory (repeatable)")->required();
  export_training->add_option("--data", data_path, "JSONL dataset")->required()->check(CLI::ExistingFile);
  export_training->add_option("--split", split_path, "Split config")->required()->check(CLI::ExistingFile);
  export_training->add_option("--m", m, "Maximum window size");
  std::uint64_t shard_seed = 13;
  export_training->add_option("--seed", shard_seed, "Seed for gold offsets");
  export_training->add_option("--out", out_path, "Output path (stdout when omitted)");

  // serve
  std::optional<int> http_port;
  std::string host = "127.0.0.1";
  auto *serve = app.add_subcommand("serve", "Expose a scorer over the NDJSON wire protocol");
  serve->add_option("--scorer", scorer_spec, "lexical | first | external:<cmd> | http:<url>");
  serve->add_option("--http", http_port, "Serve POST /score on this port instead of stdio");
  serve->add_option("--host", host, "HTTP bind address");

  // budget
  auto *budget = app.add_subcommand("budget", "Flat and hierarchical candidate budgets of signatures");
  budget->add_option("--sig", sig_paths, "Signature file or directory (repeatable)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prefix) {
      auto sig = ginsign::Signature::Load(sig_path);
      std::optional<std::string_view> filter;
      if (type_filter) filter = *type_filter;
      for (const auto &c : sig.BuildPrefix(filter)) std::cout << c << "\n";
      return 0;
    }

    if (*parse) {
      if (formulas.empty()) {
        std::string line;
        while (std::getline(std::cin, line)) {
          if (line.find_first_not_of(" \t\r") != std::string::npos) formulas.push_back(line);
        }
      }
      int status = 0;
      for (const auto &text : formulas) {
        try {
          auto f = ginsign::ParseLtl(text);
          std::cout << ginsign::PrintLtl(f);
          if (parse_atoms) {
            for (const auto &a : ginsign::ExtractAtoms(f)) std::cout << "\t" << a;
          }
          std::cout << "\n";
        } catch (const ginsign::Error &e) {
          std::cerr << e.what() << "\n";
          status = 1;
        }
      }
      return status;
    }

    if (*eval) {
      if (!trace_path.empty()) {
        if (formula_text.empty()) throw ginsign::Error(ginsign::ErrorKind::kInvalidArgument, "missing formula");
        auto trace = ginsign::Trace::Load(trace_path);
        auto f = ginsign::ParseLtl(formula_text);
        std::cout << (ginsign::EvalOnTrace(f, trace) ? "true" : "false") << "\n";
        return 0;
      }
      if (data_path.empty() || sig_paths.empty()) {
        throw ginsign::Error(ginsign::ErrorKind::kInvalidArgument, "eval needs --trace, or --sig and --data");
      }
      auto sigs = LoadSignatures(sig_paths);
      auto records = ginsign::IngestDataset(fs::path(data_path), sigs);
      ginsign::SplitConfig split;
      ginsign::EvalConfig config;
      if (!split_path.empty()) {
        split = ginsign::SplitConfig::Load(split_path);
        split.Validate(sigs);
        config.split_name = fs::path(split_path).stem().string();
      } else {
        config.split_name = "full";
      }
      config.shard_size = m;
      config.bound = k;
      config.workers = WorkerCount(workers);
      config.bootstrap_samples = bootstrap;
      config.bootstrap_seed = seed;
      std::unique_ptr<ginsign::ScorerProvider> provider =
          scorer_spec == "oracle" ? ginsign::GoldOracleScorer()
                                  : ginsign::SharedScorer(ginsign::MakeScorer(scorer_spec));
      auto report = ginsign::RunEval(records, sigs, *provider, split, config);
      WriteOutput(out_path, ginsign::EmitReport(report, format == "table" ? ginsign::ReportFormat::kTable
                                                                          : ginsign::ReportFormat::kJson));
      return 0;
    }

    if (*ground) {
      auto sig = ginsign::Signature::Load(sig_path);
      auto scorer = ginsign::MakeScorer(scorer_spec);
      ginsign::Grounder grounder(sig, *scorer, ginsign::GrounderOptions{m});
      std::ifstream file;
      if (!input_path.empty()) {
        file.open(input_path);
        if (!file) throw ginsign::Error(ginsign::ErrorKind::kIo, "cannot open " + input_path);
      }
      std::istream &in = input_path.empty() ? std::cin : file;
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        ++n;
        ginsign::LiftedAP ap;
        if (line[first] == '{') {
          json doc = json::parse(line);
          ap.placeholder_id = doc.value("placeholder_id", "prop_" + std::to_string(n));
          ap.span_text = doc.at("span").get<std::string>();
          if (doc.contains("context") && doc["context"].is_string()) ap.context_text = doc["context"];
        } else {
          ap.placeholder_id = "prop_" + std::to_string(n);
          ap.span_text = line.substr(first);
        }
        std::cout << grounder.Ground(ap).ToJson().dump() << "\n";
      }
      return 0;
    }

    if (*check_equiv) {
      auto verdict = ginsign::CheckEquivalence(ginsign::ParseLtl(f1_text), ginsign::ParseLtl(f2_text), k);
      if (verdict.bound_too_small) std::cerr << "warning: bound " << k << " is small for these formulas\n";
      std::cout << VerdictJson(verdict).dump() << "\n";
      return 0;
    }

    if (*check_gle) {
      auto v = ginsign::CheckGle(ginsign::ParseLtl(f1_text), MapArgument(pred_map_arg), ginsign::ParseLtl(f2_text),
                                 MapArgument(gold_map_arg), k);
      json doc = {{"gle", v.gle},
                  {"lifted_equivalent", v.lifted_equivalent},
                  {"grounding_match", v.grounding_match},
                  {"ap_diff", v.ap_diff},
                  {"equivalence", VerdictJson(v.equivalence)}};
      std::cout << doc.dump() << "\n";
      return 0;
    }

    if (*model_check) {
      auto model = ginsign::KripkeStructure::Load(model_path);
      auto r = ginsign::ModelCheck(model, ginsign::ParseLtl(formula_text), k);
      json doc = {{"holds", r.holds}, {"bound_used", r.bound_used}, {"bounded", r.bounded},
                  {"lassos_checked", r.lassos_checked}};
      if (r.counterexample) {
        doc["counterexample"] = r.counterexample->ToJson();
        doc["counterexample_states"] = r.counterexample_states;
        doc["counterexample_loop_start"] = r.counterexample_loop_start;
      } else {
        doc["counterexample"] = nullptr;
      }
      std::cout << doc.dump() << "\n";
      return 0;
    }

    if (*translate) {
      json doc;
      std::string lifted = formula_text;
      if (!sig_path.empty()) {
        auto sig = ginsign::Signature::Load(sig_path);
        std::map<std::string, std::string> synonyms;
        if (!synonyms_path.empty()) synonyms = JsonArgument("@" + synonyms_path).get<std::map<std::string, std::string>>();
        auto lift = ginsign::TemplateLifter(sig, synonyms).Lift(formula_text);
        lifted = lift.lifted_nl;
        json spans = json::object();
        for (const auto &s : lift.spans) spans[s.placeholder_id] = s.text;
        doc["lifted_nl"] = lifted;
        doc["ap_spans"] = spans;
      }
      doc["lifted_ltl"] = ginsign::TranslateTemplate(lifted);
      std::cout << doc.dump() << "\n";
      return 0;
    }

    if (*export_training) {
      auto sigs = LoadSignatures(sig_paths);
      auto records = ginsign::IngestDataset(fs::path(data_path), sigs);
      auto split = ginsign::SplitConfig::Load(split_path);
      split.Validate(sigs);
      std::ostringstream out;
      for (const auto &shard : ginsign::ExportTraining(records, sigs, split, m, shard_seed)) {
        out << shard.ToJson().dump() << "\n";
      }
      WriteOutput(out_path, out.str());
      return 0;
    }

    if (*serve) {
      auto scorer = ginsign::MakeScorer(scorer_spec);
      if (http_port) return ServeHttp(*scorer, host, *http_port);
      return ServeStdio(*scorer);
    }

    if (*budget) {
      for (const auto &[name, sig] : LoadSignatures(sig_paths)) {
        std::cout << name << "\tflat=" << ginsign::CandidateBudget(sig, ginsign::BudgetMode::kFlat)
                  << "\thierarchical=" << ginsign::CandidateBudget(sig, ginsign::BudgetMode::kHierarchical) << "\n";
      }
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "ginsign: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
