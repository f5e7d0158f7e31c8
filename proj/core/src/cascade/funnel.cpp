#include "ombudsman/cascade/funnel.hpp"

#include <spdlog/spdlog.h>

#include "../parallel.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::cascade {

void to_json(json& j, const StageCounts& c) {
  j = json{{"in", c.in}, {"retain", c.retain}, {"drop", c.drop}, {"error", c.error}};
}

void from_json(const json& j, StageCounts& c) {
  c.in = j.at("in").get<std::size_t>();
  c.retain = j.at("retain").get<std::size_t>();
  c.drop = j.at("drop").get<std::size_t>();
  c.error = j.at("error").get<std::size_t>();
}

void to_json(json& j, const FunnelReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) {
    json by_partition = json::object();
    for (const auto& [p, c] : s.by_partition) by_partition[std::string(corpus::to_string(p))] = c;
    json by_platform = json::object();
    for (const auto& [p, c] : s.by_platform) by_platform[std::string(corpus::to_string(p))] = c;
    stages.push_back({{"stage", to_string(s.stage)},
                      {"config_hash", s.config_hash},
                      {"total", s.total},
                      {"by_partition", by_partition},
                      {"by_platform", by_platform}});
  }
  j = json{{"corpus_size", r.corpus_size}, {"stages", stages}};
}

void from_json(const json& j, FunnelReport& r) {
  r.corpus_size = j.at("corpus_size").get<std::size_t>();
  r.stages.clear();
  for (const auto& s : j.at("stages")) {
    StageReport sr;
    sr.stage = parse_stage(s.at("stage").get<std::string>());
    sr.config_hash = s.value("config_hash", std::string{});
    sr.total = s.at("total").get<StageCounts>();
    for (const auto& [k, v] : s.at("by_partition").items()) sr.by_partition[corpus::parse_partition(k)] = v;
    for (const auto& [k, v] : s.at("by_platform").items()) sr.by_platform[corpus::parse_platform(k)] = v;
    r.stages.push_back(std::move(sr));
  }
}

namespace {

StageReport empty_report(Stage stage, std::string hash) {
  StageReport r;
  r.stage = stage;
  r.config_hash = std::move(hash);
  for (auto p : corpus::kAllPartitions) r.by_partition[p] = {};
  r.by_platform[corpus::Platform::kReddit] = {};
  r.by_platform[corpus::Platform::kYoutube] = {};
  return r;
}

void count(StageReport& r, const corpus::Post& post, Verdict v) {
  for (StageCounts* c : {&r.total, &r.by_partition[post.partition], &r.by_platform[post.platform]}) {
    ++c->in;
    switch (v) {
      case Verdict::kRetain: ++c->retain; break;
      case Verdict::kDrop: ++c->drop; break;
      case Verdict::kError: ++c->error; break;
    }
  }
}

}  // namespace

CascadeResult run_cascade(const std::vector<corpus::Post>& corpus, const CascadeConfig& config,
                          const Backends& backends) {
  auto problems = config.violations();
  if (!problems.empty()) throw Error(ErrorCode::kConfig, problems.front(), problems);
  if (!backends.nli || !backends.generative) {
    throw Error(ErrorCode::kConfig, "run_cascade needs both an nli and a generative backend");
  }

  CascadeResult result;
  result.funnel.corpus_size = corpus.size();
  const std::size_t threads = config.parallelism;

  // Keyword stage.
  std::vector<StageDecision> kw(corpus.size());
  detail::parallel_for(corpus.size(), threads, [&](std::size_t i) { kw[i] = keyword_filter(corpus[i], config); });
  auto kw_report = empty_report(Stage::kKeyword, config.keyword_config_hash());
  std::vector<corpus::Post> after_kw;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    count(kw_report, corpus[i], kw[i].verdict);
    if (kw[i].verdict == Verdict::kRetain) {
      auto post = corpus[i];
      post.matched_keywords = kw[i].payload["matched_keywords"].get<std::vector<std::string>>();
      after_kw.push_back(std::move(post));
    }
  }
  spdlog::info("keyword stage: {} in, {} retained", corpus.size(), after_kw.size());

  // NLI stage.
  std::vector<StageDecision> nli(after_kw.size());
  detail::parallel_for(after_kw.size(), threads,
                       [&](std::size_t i) { nli[i] = nli_stage(after_kw[i], config, *backends.nli); });
  auto nli_report = empty_report(Stage::kNli, config.nli_config_hash(backends.nli->model_identifier()));
  std::vector<corpus::Post> after_nli;
  for (std::size_t i = 0; i < after_kw.size(); ++i) {
    count(nli_report, after_kw[i], nli[i].verdict);
    if (nli[i].verdict == Verdict::kRetain) after_nli.push_back(after_kw[i]);
  }
  spdlog::info("nli stage: {} in, {} retained", after_kw.size(), after_nli.size());

  // LLM stage, in fixed-size batches of the NLI survivors.
  const std::size_t bs = config.batch_size;
  const std::size_t n_batches = (after_nli.size() + bs - 1) / bs;
  std::vector<std::vector<StageDecision>> llm_batches(n_batches);
  detail::parallel_for(n_batches, threads, [&](std::size_t b) {
    auto first = after_nli.begin() + static_cast<std::ptrdiff_t>(b * bs);
    auto last = after_nli.begin() + static_cast<std::ptrdiff_t>(std::min(after_nli.size(), (b + 1) * bs));
    llm_batches[b] = llm_annotate(std::vector<corpus::Post>(first, last), config, *backends.generative);
  });
  std::vector<StageDecision> llm;
  for (auto& b : llm_batches) {
    for (auto& d : b) llm.push_back(std::move(d));
  }
  auto llm_report = empty_report(Stage::kLlm, config.llm_config_hash(backends.generative->model_identifier()));
  for (std::size_t i = 0; i < after_nli.size(); ++i) {
    count(llm_report, after_nli[i], llm[i].verdict);
    if (llm[i].verdict == Verdict::kRetain) result.retained.push_back(after_nli[i]);
  }
  spdlog::info("llm stage: {} in, {} retained", after_nli.size(), result.retained.size());

  result.funnel.stages = {std::move(kw_report), std::move(nli_report), std::move(llm_report)};
  result.decisions.reserve(kw.size() + nli.size() + llm.size());
  for (auto* v : {&kw, &nli, &llm}) {
    for (auto& d : *v) result.decisions.push_back(std::move(d));
  }
  return result;
}

void write_cascade_outputs(const fs::path& dir, const CascadeResult& result) {
  fs::create_directories(dir);
  std::vector<json> rows;
  rows.reserve(result.decisions.size());
  for (const auto& d : result.decisions) rows.emplace_back(d);
  write_jsonl(dir / "decisions.jsonl", rows);
  write_json_file(dir / "funnel.json", result.funnel);
  corpus::save_corpus(dir / "retained.jsonl", result.retained);
}

}  // namespace ombudsman::cascade
