// Copyright 2026 The Chunkforge Authors.
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

#include "chunkforge/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "chunkforge/blocker.h"
#include "chunkforge/chunker.h"
#include "chunkforge/errors.h"
#include "chunkforge/eval.h"
#include "chunkforge/run_config.h"
#include "chunkforge/scorer.h"
#include "chunkforge/tokenizer.h"
#include "chunkforge/vfsc.h"
#include "chunkforge/window.h"
#include "json.hpp"

namespace chunkforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kEndpointEnv = "CHUNKFORGE_ENDPOINT";

// Flag values plus the CLI11 options they came from, so that only flags the
// user actually passed override the config file.
struct Flags {
  std::string config_path;
  std::string scorer_kind;
  std::string endpoint;
  std::string prob_file;
  std::uint64_t seed = 0;
  double t1 = 0.0;
  std::size_t max_tokens = 0;
  std::size_t min_tokens = 0;
  std::size_t capacity = 0;
  double overlap = 0.0;
  std::size_t top_k = 0;
  std::size_t workers = 0;
  std::string tokenizer;
  std::string separator;

  std::vector<CLI::Option*> given;

  bool Given(const std::string& name) const {
    for (const CLI::Option* opt : given) {
      if (opt->get_name() == name && opt->count() > 0) return true;
    }
    return false;
  }
};

void AddConfigFlag(CLI::App* cmd, Flags& f) {
  f.given.push_back(cmd->add_option("--config", f.config_path,
                                    "JSON config file (flags take precedence)"));
}

void AddTokenizerFlag(CLI::App* cmd, Flags& f) {
  f.given.push_back(cmd->add_option("--tokenizer", f.tokenizer, "Tokenizer id"));
}

void AddScoringFlags(CLI::App* cmd, Flags& f) {
  f.given.push_back(cmd->add_option("--scorer", f.scorer_kind, "mock | file | remote")
                        ->check(CLI::IsMember({"mock", "file", "remote"})));
  f.given.push_back(cmd->add_option(
      "--endpoint", f.endpoint,
      std::string("Scoring service URL (fallback: $") + kEndpointEnv + ")"));
  f.given.push_back(cmd->add_option("--probs", f.prob_file,
                                    "Probability JSONL for the file scorer"));
  f.given.push_back(cmd->add_option("--seed", f.seed, "Mock scorer seed"));
  f.given.push_back(cmd->add_option("--t1", f.t1, "Boundary threshold"));
  f.given.push_back(cmd->add_option("--max-tokens", f.max_tokens, "Chunk upper limit"));
  f.given.push_back(cmd->add_option("--min-tokens", f.min_tokens, "Chunk lower limit"));
  f.given.push_back(cmd->add_option("--capacity", f.capacity, "Scorer window capacity in tokens"));
  f.given.push_back(cmd->add_option("--overlap", f.overlap, "Window overlap ratio"));
  f.given.push_back(cmd->add_option("--workers", f.workers, "Documents processed in parallel"));
}

RunConfig ResolveConfig(const Flags& f) {
  RunConfig config;
  if (f.Given("--config")) config.MergeFile(f.config_path);
  if (f.Given("--scorer")) config.scorer.kind = ParseScorerKind(f.scorer_kind);
  if (f.Given("--endpoint")) config.scorer.endpoint = f.endpoint;
  if (f.Given("--probs")) config.scorer.prob_file = f.prob_file;
  if (f.Given("--seed")) config.scorer.seed = f.seed;
  if (f.Given("--t1")) config.chunker.t1 = f.t1;
  if (f.Given("--max-tokens")) config.chunker.max_tokens = f.max_tokens;
  if (f.Given("--min-tokens")) config.chunker.min_tokens = f.min_tokens;
  if (f.Given("--capacity")) config.window.capacity_tokens = f.capacity;
  if (f.Given("--overlap")) config.window.overlap_ratio = f.overlap;
  if (f.Given("--top-k")) config.top_k = f.top_k;
  if (f.Given("--workers")) config.workers = f.workers;
  if (f.Given("--tokenizer")) config.tokenizer = f.tokenizer;
  if (f.Given("--separator")) config.separator_prefix = f.separator;
  if (!config.scorer.endpoint) {
    if (const char* env = std::getenv(kEndpointEnv); env != nullptr && *env != '\0') {
      config.scorer.endpoint = env;
    }
  }
  config.Validate();
  return config;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

json ParseJson(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

// Writes to `path`, or to `out` when path is empty.
void Emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cannot write " + path);
  file << content;
  if (!file) throw ValidationError("failed writing " + path);
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown afterwards for the lowest failing index.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t workers, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min(workers, n);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::pair<std::string, fs::path>> CollectInputs(
    const std::vector<std::string>& inputs) {
  std::vector<std::pair<std::string, fs::path>> files;
  for (const std::string& input : inputs) {
    const fs::path root(input);
    if (fs::is_directory(root)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      for (const fs::path& p : found) {
        files.emplace_back(fs::relative(p, root).generic_string(), p);
      }
    } else if (fs::is_regular_file(root)) {
      files.emplace_back(root.filename().string(), root);
    } else {
      throw ValidationError("no such input: " + input);
    }
  }
  return files;
}

// --- import ---

void RunImport(const std::vector<std::string>& inputs, const std::string& out_path,
               const RunConfig& config, std::ostream& out) {
  const auto tokenizer = MakeTokenizer(config.tokenizer);
  WikiImportOptions options;
  options.separator_prefix = config.separator_prefix;

  std::string lines;
  for (const auto& [id, path] : CollectInputs(inputs)) {
    try {
      const Document doc = ImportWiki727k(ReadFile(path), *tokenizer, id, options);
      lines += ToJsonLine(doc, *tokenizer);
      lines += '\n';
    } catch (const EmptyDocumentError& e) {
      throw EmptyDocumentError(path.string() + ": " + e.what());
    }
  }
  Emit(out_path, lines, out);
}

// --- chunk ---

void RunChunk(const std::string& in_path, const std::string& out_path,
              const std::string& probs_out, const RunConfig& config,
              std::ostream& out) {
  const auto tokenizer = MakeTokenizer(config.tokenizer);
  std::vector<Document> docs;
  for (const std::string& line : ReadLines(in_path)) {
    docs.push_back(ParseJsonLine(line, *tokenizer));
  }
  const auto scorer = MakeScorer(config.EffectiveScorer());
  WindowOptions window = config.window;
  window.parallel = false;

  std::vector<BoundaryProbs> probs(docs.size());
  std::vector<std::vector<Chunk>> chunks(docs.size());
  ParallelFor(docs.size(), config.workers, [&](std::size_t i) {
    probs[i] = ScoreDocument(docs[i], *scorer, window);
    chunks[i] = ChunkDocument(docs[i].blocks, probs[i], config.chunker);
  });

  std::string chunk_lines;
  std::string prob_lines;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t c = 0; c < chunks[i].size(); ++c) {
      chunk_lines += ChunkToJsonLine(docs[i].id, c, chunks[i][c], tokenizer->Id());
      chunk_lines += '\n';
    }
    nlohmann::ordered_json p;
    p["id"] = docs[i].id;
    p["probs"] = probs[i];
    p["scorer"] = scorer->Id();
    prob_lines += p.dump();
    prob_lines += '\n';
  }
  Emit(out_path, chunk_lines, out);
  if (!probs_out.empty()) Emit(probs_out, prob_lines, out);
}

// --- evaluate ---

// Predicted labels per document id, from probability rows ({"id", "probs"}),
// label rows ({"id", "labels"}) or chunk rows ({"doc_id", "block_start",
// "block_end"}). Chunk rows become labels once the block count is known.
struct Predictions {
  std::map<std::string, BoundaryProbs> probs;
  std::map<std::string, std::vector<bool>> labels;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> chunks;

  std::set<std::string> Ids() const {
    std::set<std::string> ids;
    for (const auto& [id, v] : probs) ids.insert(id);
    for (const auto& [id, v] : labels) ids.insert(id);
    for (const auto& [id, v] : chunks) ids.insert(id);
    return ids;
  }
};

Predictions ReadPredictions(const std::string& path) {
  Predictions preds;
  std::size_t line_no = 0;
  for (const std::string& line : ReadLines(path)) {
    const std::string where = path + ":" + std::to_string(++line_no);
    const json j = ParseJson(line, where);
    try {
      if (j.contains("doc_id") && j.contains("block_start") && j.contains("block_end")) {
        preds.chunks[j.at("doc_id").get<std::string>()].emplace_back(
            j.at("block_start").get<std::size_t>(), j.at("block_end").get<std::size_t>());
      } else if (j.contains("id") && j.contains("probs")) {
        const auto id = j.at("id").get<std::string>();
        if (!preds.probs.emplace(id, j.at("probs").get<BoundaryProbs>()).second) {
          throw ValidationError(where + ": duplicate id " + id);
        }
      } else if (j.contains("id") && j.contains("labels")) {
        const auto id = j.at("id").get<std::string>();
        if (!preds.labels.emplace(id, j.at("labels").get<std::vector<bool>>()).second) {
          throw ValidationError(where + ": duplicate id " + id);
        }
      } else {
        throw ValidationError(where + ": unrecognized prediction row");
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return preds;
}

std::vector<bool> LabelsFromChunks(
    std::vector<std::pair<std::size_t, std::size_t>> ranges, std::size_t blocks,
    const std::string& id) {
  std::sort(ranges.begin(), ranges.end());
  std::vector<bool> labels(blocks - 1, false);
  std::size_t expected = 0;
  for (const auto& [begin, end] : ranges) {
    if (begin != expected || end <= begin || end > blocks) {
      throw ValidationError("chunks of '" + id + "' do not tile its " +
                            std::to_string(blocks) + " blocks");
    }
    if (end < blocks) labels[end - 1] = true;
    expected = end;
  }
  if (expected != blocks) {
    throw ValidationError("chunks of '" + id + "' do not cover every block");
  }
  return labels;
}

EvalReport RunEvaluate(const std::string& pred_path, const std::string& gold_path,
                       const RunConfig& config) {
  const auto tokenizer = MakeTokenizer(config.tokenizer);
  std::vector<Document> gold;
  for (const std::string& line : ReadLines(gold_path)) {
    gold.push_back(ParseJsonLine(line, *tokenizer));
    if (!gold.back().gold_labels) {
      throw ValidationError("gold document '" + gold.back().id + "' has no labels");
    }
  }
  const Predictions preds = ReadPredictions(pred_path);

  std::set<std::string> gold_ids;
  for (const Document& d : gold) {
    if (!gold_ids.insert(d.id).second) {
      throw ValidationError("duplicate gold document id: " + d.id);
    }
  }
  if (preds.Ids() != gold_ids) {
    throw ValidationError("predicted and gold document ids differ");
  }

  CorpusEvaluator evaluator;
  for (const Document& d : gold) {
    std::vector<bool> pred;
    if (auto it = preds.probs.find(d.id); it != preds.probs.end()) {
      pred = Binarize(it->second, config.chunker.t1);
    } else if (auto lt = preds.labels.find(d.id); lt != preds.labels.end()) {
      pred = lt->second;
    } else {
      pred = LabelsFromChunks(preds.chunks.at(d.id), d.blocks.size(), d.id);
    }
    try {
      evaluator.Add(pred, *d.gold_labels);
    } catch (const ValidationError& e) {
      throw ValidationError("document '" + d.id + "': " + e.what());
    }
  }
  return evaluator.Report();
}

// --- index / search ---

std::size_t RunIndex(const std::string& in_path, const std::string& index_path,
                     const std::string& export_path) {
  FusedIndex index;
  std::size_t line_no = 0;
  for (const std::string& line : ReadLines(in_path)) {
    const std::string where = in_path + ":" + std::to_string(++line_no);
    const json j = ParseJson(line, where);
    std::string chunk_id;
    std::string payload;
    std::vector<Embedding> vectors;
    try {
      chunk_id = j.at("chunk_id").get<std::string>();
      vectors = j.at("vectors").get<std::vector<Embedding>>();
      if (j.contains("payload") && !j["payload"].is_null()) {
        payload = j["payload"].is_string() ? j["payload"].get<std::string>()
                                           : j["payload"].dump();
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
    try {
      index.Upsert(IndexEntry{std::move(chunk_id), FusedVector::Fuse(vectors),
                              std::move(payload)});
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  index.Save(index_path);
  if (!export_path.empty()) {
    std::ofstream file(export_path, std::ios::trunc);
    if (!file) throw ValidationError("cannot write " + export_path);
    index.ExportJsonLines(file);
  }
  return index.size();
}

Embedding ParseQuery(const std::string& text, const std::string& where) {
  const json j = ParseJson(text, where);
  try {
    return j.get<Embedding>();
  } catch (const json::exception& e) {
    throw ValidationError(where + ": query must be a JSON array of numbers");
  }
}

std::string RunSearch(const std::string& index_path, const Embedding& query,
                      std::size_t top_k) {
  const FusedIndex index = FusedIndex::Load(index_path);
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  std::size_t rank = 0;
  for (const SearchHit& hit : index.Search(query, top_k)) {
    nlohmann::ordered_json h;
    h["rank"] = ++rank;
    h["chunk_id"] = hit.chunk_id;
    h["score"] = hit.score;
    h["payload"] = hit.payload;
    results.push_back(std::move(h));
  }
  return results.dump();
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Semantic chunking for long documents"};
  app.name(args.empty() ? "chunkforge" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  Flags flags;

  std::vector<std::string> import_inputs;
  std::string import_out;
  auto* import_cmd = app.add_subcommand("import", "WIKI-727K files or directories to document JSONL");
  import_cmd->add_option("inputs", import_inputs, "Input files or directories")->required();
  import_cmd->add_option("-o,--out", import_out, "Output JSONL (default: stdout)");
  flags.given.push_back(import_cmd->add_option("--separator", flags.separator,
                                               "Section separator prefix"));
  AddTokenizerFlag(import_cmd, flags);
  AddConfigFlag(import_cmd, flags);

  std::string chunk_in, chunk_out, probs_out;
  auto* chunk_cmd = app.add_subcommand("chunk", "Document JSONL to chunk JSONL");
  chunk_cmd->add_option("input", chunk_in, "Document JSONL")->required();
  chunk_cmd->add_option("-o,--out", chunk_out, "Chunk JSONL (default: stdout)");
  chunk_cmd->add_option("--probs-out", probs_out, "Also write fused probabilities here");
  AddScoringFlags(chunk_cmd, flags);
  AddTokenizerFlag(chunk_cmd, flags);
  AddConfigFlag(chunk_cmd, flags);

  std::string pred_path, gold_path, format = "json";
  auto* eval_cmd = app.add_subcommand("evaluate", "Boundary precision/recall/F1");
  eval_cmd->add_option("--pred", pred_path, "Probability, label or chunk JSONL")->required();
  eval_cmd->add_option("--gold", gold_path, "Document JSONL with gold labels")->required();
  eval_cmd->add_option("--format", format, "json | table | both")
      ->check(CLI::IsMember({"json", "table", "both"}));
  flags.given.push_back(eval_cmd->add_option("--t1", flags.t1, "Boundary threshold"));
  AddTokenizerFlag(eval_cmd, flags);
  AddConfigFlag(eval_cmd, flags);

  std::string index_in, index_path, export_path;
  auto* index_cmd = app.add_subcommand("index", "Fuse chunk embeddings into an index");
  index_cmd->add_option("input", index_in, "JSONL of {chunk_id, vectors, payload}")->required();
  index_cmd->add_option("-o,--out", index_path, "Index file")->required();
  index_cmd->add_option("--export-jsonl", export_path, "Also write a JSONL debug export");

  std::string search_index, query_text, query_file;
  auto* search_cmd = app.add_subcommand("search", "Rank indexed chunks against a query");
  search_cmd->add_option("index", search_index, "Index file")->required();
  auto* query_opt = search_cmd->add_option("--query", query_text, "Query embedding as a JSON array");
  auto* query_file_opt = search_cmd->add_option("--query-file", query_file, "File holding the query array");
  query_opt->excludes(query_file_opt);
  flags.given.push_back(search_cmd->add_option("--top-k", flags.top_k, "Results to return"));
  AddConfigFlag(search_cmd, flags);

  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration");
  AddScoringFlags(config_cmd, flags);
  AddTokenizerFlag(config_cmd, flags);
  AddConfigFlag(config_cmd, flags);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("chunkforge");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig config = ResolveConfig(flags);
    if (*import_cmd) {
      RunImport(import_inputs, import_out, config, out);
    } else if (*chunk_cmd) {
      RunChunk(chunk_in, chunk_out, probs_out, config, out);
    } else if (*eval_cmd) {
      const EvalReport report = RunEvaluate(pred_path, gold_path, config);
      if (format != "table") out << report.ToJson() << '\n';
      if (format != "json") out << report.ToTable();
    } else if (*index_cmd) {
      const std::size_t entries = RunIndex(index_in, index_path, export_path);
      out << json{{"entries", entries}, {"index", index_path}}.dump() << '\n';
    } else if (*search_cmd) {
      if (query_opt->count() == 0 && query_file_opt->count() == 0) {
        throw ValidationError("search needs --query or --query-file");
      }
      const Embedding query = query_opt->count() > 0
                                  ? ParseQuery(query_text, "--query")
                                  : ParseQuery(ReadFile(query_file), query_file);
      out << RunSearch(search_index, query, config.top_k) << '\n';
    } else if (*config_cmd) {
      out << config.ToJson() << '\n';
    }
  } catch (const ScorerError& e) {
    err << "scorer error: " << e.what() << '\n';
    return kExitScorer;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyDocumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace chunkforge
