#include "ombudsman/pipeline/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <system_error>

#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/ner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::pipeline {

fs::path PipelineConfig::resolve(const std::string& p) const {
  fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.lexically_normal();
  return (base_dir / path).lexically_normal();
}

namespace {

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

class Reader {
 public:
  Reader(PipelineConfig& cfg, const corpus::EnvLookup& env) : cfg_(cfg), env_(env) {}

  std::vector<std::string> out;

  void keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [k, _] : obj.items()) {
      if (!allowed.contains(k)) out.push_back("unknown key '" + join(where, k) + "'");
    }
  }

  const json* object(const json& obj, const std::string& where, const std::string& key, bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) out.push_back(join(where, key) + " is required");
      return nullptr;
    }
    if (!it->is_object()) {
      out.push_back(join(where, key) + " must be an object");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(const json& obj, const std::string& where, const std::string& key,
                                    bool required = false) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) out.push_back(join(where, key) + " is required");
      return std::nullopt;
    }
    if (!it->is_string()) {
      out.push_back(join(where, key) + " must be a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<double> number(const json& obj, const std::string& where, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_number()) {
      out.push_back(join(where, key) + " must be a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<std::uint64_t> count(const json& obj, const std::string& where, const std::string& key,
                                     bool required = false) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) out.push_back(join(where, key) + " is required");
      return std::nullopt;
    }
    if (it->is_number_unsigned()) return it->get<std::uint64_t>();
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(it->get<std::int64_t>());
    out.push_back(join(where, key) + " must be a non-negative integer");
    return std::nullopt;
  }

  std::optional<fs::path> file(const json& obj, const std::string& where, const std::string& key,
                               bool required = false) {
    auto s = string(obj, where, key, required);
    if (!s) return std::nullopt;
    auto p = cfg_.resolve(*s);
    if (!fs::is_regular_file(p)) {
      out.push_back(join(where, key) + ": file not found: " + p.string());
      return std::nullopt;
    }
    return p;
  }

  void credential(const std::string& where, const std::string& name) {
    if (name.empty()) return;
    std::optional<std::string> value;
    if (env_) {
      value = env_(name);
    } else if (const char* v = std::getenv(name.c_str())) {
      value = v;
    }
    if (!value || value->empty()) {
      out.push_back(where + ": environment variable '" + name + "' is not set");
    }
  }

  void prefixed(const std::string& where, const std::vector<std::string>& problems) {
    for (const auto& p : problems) out.push_back(where + "." + p);
  }

 private:
  PipelineConfig& cfg_;
  const corpus::EnvLookup& env_;
};

void read_ingest(Reader& r, PipelineConfig& cfg, const json& s) {
  const std::string where = "ingest";
  r.keys(s, where, {"author_salt", "sources", "wild_sample"});
  auto salt = r.string(s, where, "author_salt", true);
  if (salt && salt->empty()) r.out.emplace_back("ingest.author_salt must be non-empty");
  if (salt) cfg.ingest.author_salt = *salt;
  if (auto n = r.count(s, where, "wild_sample")) cfg.ingest.wild_sample = *n;

  auto it = s.find("sources");
  if (it == s.end() || !it->is_array() || it->empty()) {
    r.out.emplace_back("ingest.sources must be a non-empty array");
    return;
  }
  static const std::set<std::string> kSourceKeys = {"name",    "platform",     "mode",     "keywords",
                                                    "credentials_ref", "rate_limit", "page_limit",
                                                    "archive_path",    "endpoint",   "partition"};
  std::set<std::string> names;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& src = (*it)[i];
    const std::string at = "ingest.sources[" + std::to_string(i) + "]";
    if (!src.is_object()) {
      r.out.push_back(at + " must be an object");
      continue;
    }
    r.keys(src, at, kSourceKeys);
    corpus::SourceSpec spec;
    try {
      spec = src.get<corpus::SourceSpec>();
      spec.validate();
    } catch (const Error& e) {
      if (e.details().empty()) r.out.push_back(at + ": " + e.what());
      for (const auto& d : e.details()) r.out.push_back(at + ": " + d);
      continue;
    } catch (const json::exception& e) {
      r.out.push_back(at + ": " + e.what());
      continue;
    }
    if (!names.insert(spec.effective_name()).second) {
      r.out.push_back(at + ": duplicate source name '" + spec.effective_name() + "'");
    }
    r.credential(at + ".credentials_ref", spec.credentials_ref);
    if (spec.archive_path) {
      auto p = cfg.resolve(*spec.archive_path);
      if (!fs::is_regular_file(p)) r.out.push_back(at + ".archive_path: file not found: " + p.string());
      spec.archive_path = p.string();
    }
    cfg.ingest.sources.push_back(std::move(spec));
  }
}

void read_cascade(Reader& r, PipelineConfig& cfg, const json& s) {
  const std::string where = "cascade";
  r.keys(s, where,
         {"keywords", "nli_hypothesis", "nli_threshold", "annotation_prompt", "annotation_prompt_path",
          "examples_path", "batch_size", "parallelism"});
  auto& c = cfg.cascade;
  if (auto it = s.find("keywords"); it != s.end()) {
    if (!it->is_array() || !std::all_of(it->begin(), it->end(), [](const json& k) { return k.is_string(); })) {
      r.out.emplace_back("cascade.keywords must be an array of strings");
    } else {
      c.keyword_set = it->get<std::vector<std::string>>();
    }
  }
  if (auto h = r.string(s, where, "nli_hypothesis")) c.nli_hypothesis = *h;
  if (auto t = r.number(s, where, "nli_threshold")) c.nli_threshold = *t;
  if (auto b = r.count(s, where, "batch_size")) c.batch_size = *b;
  if (auto p = r.count(s, where, "parallelism")) c.parallelism = *p;
  if (s.contains("annotation_prompt") && s.contains("annotation_prompt_path")) {
    r.out.emplace_back("cascade.annotation_prompt and cascade.annotation_prompt_path are mutually exclusive");
  }
  if (auto p = r.string(s, where, "annotation_prompt")) c.annotation_prompt = *p;
  if (auto p = r.file(s, where, "annotation_prompt_path")) {
    cfg.cascade_prompt = *p;
    c.annotation_prompt = read_text_file(*p);
  }
  if (auto p = r.file(s, where, "examples_path")) {
    cfg.cascade_examples = *p;
    try {
      c.llm_examples = cascade::load_examples(p->string());
    } catch (const std::exception& e) {
      r.out.push_back(std::string("cascade.examples_path: ") + e.what());
    }
  }
  r.prefixed(where, c.violations());
}

void read_backends(Reader& r, PipelineConfig& cfg, const json& s) {
  cfg.backends = s;
  for (const auto& v : cascade::backend_section_violations(s)) r.out.push_back(v);
  for (const char* name : {"nli", "generative"}) {
    auto it = s.find(name);
    if (it == s.end() || !it->is_object()) continue;
    if (auto env = it->find("api_key_env"); env != it->end() && env->is_string()) {
      r.credential(std::string("backends.") + name + ".api_key_env", env->get<std::string>());
    }
  }
  if (auto rc = s.find("replay_cache"); rc != s.end() && rc->is_object()) {
    if (auto p = rc->find("path"); p != rc->end() && p->is_string()) {
      cfg.backends["replay_cache"]["path"] = cfg.resolve(p->get<std::string>()).string();
    }
  }
}

void read_annotation(Reader& r, PipelineConfig& cfg, const json& s) {
  const std::string where = "annotation";
  r.keys(s, where, {"records", "pool", "handoff_policy", "expert_review"});
  if (auto p = r.file(s, where, "records", true)) cfg.annotation.records = *p;
  if (auto p = r.file(s, where, "pool")) {
    cfg.annotation.pool = *p;
    try {
      auto pool = read_json_file(*p).get<std::vector<annotation::Annotator>>();
      if (pool.empty()) r.out.emplace_back("annotation.pool must list at least one annotator");
    } catch (const std::exception& e) {
      r.out.push_back(std::string("annotation.pool: ") + e.what());
    }
  }
  if (auto h = r.string(s, where, "handoff_policy")) {
    try {
      cfg.annotation.handoff_policy = annotation::parse_handoff_policy(*h);
    } catch (const std::exception&) {
      r.out.emplace_back("annotation.handoff_policy must be unanimous|at_least_two_positive|majority");
    }
  }
  if (auto e = r.string(s, where, "expert_review")) {
    if (*e == "all") {
      cfg.annotation.expert_review = ExpertReview::kAll;
    } else if (*e == "handoff_candidates") {
      cfg.annotation.expert_review = ExpertReview::kHandoffCandidates;
    } else {
      r.out.emplace_back("annotation.expert_review must be all|handoff_candidates");
    }
  }
}

void read_masking(Reader& r, PipelineConfig& cfg, const json& s) {
  const std::string where = "masking";
  r.keys(s, where, {"ner", "mask_token", "stoplist", "frequency_mode"});
  if (auto it = s.find("ner"); it != s.end()) {
    cfg.masking.ner = *it;
    for (const auto& v : masking::ner_section_violations(*it)) r.out.push_back(v);
  }
  if (auto t = r.string(s, where, "mask_token")) {
    if (t->empty()) r.out.emplace_back("masking.mask_token must be non-empty");
    cfg.masking.mask_token = *t;
  }
  if (auto p = r.file(s, where, "stoplist")) cfg.masking.stoplist = *p;
  if (auto m = r.string(s, where, "frequency_mode")) {
    if (*m == "occurrences") {
      cfg.masking.frequency_mode = masking::FrequencyMode::kOccurrences;
    } else if (*m == "posts") {
      cfg.masking.frequency_mode = masking::FrequencyMode::kPosts;
    } else {
      r.out.emplace_back("masking.frequency_mode must be occurrences|posts");
    }
  }
}

void read_train(Reader& r, PipelineConfig& cfg, const json& s) {
  const std::string where = "train";
  r.keys(s, where, {"split", "configs"});
  auto& t = cfg.train;
  if (const json* split = r.object(s, where, "split", false)) {
    r.keys(*split, "train.split", {"protocol", "train_ratio", "runs", "k"});
    if (auto p = r.string(*split, "train.split", "protocol")) {
      if (*p != "repeated_holdout" && *p != "kfold") {
        r.out.emplace_back("train.split.protocol must be repeated_holdout|kfold");
      }
      t.protocol = *p;
    }
    if (auto v = r.number(*split, "train.split", "train_ratio")) {
      if (!(*v > 0.0 && *v < 1.0)) r.out.emplace_back("train.split.train_ratio in (0,1)");
      t.train_ratio = *v;
    }
    if (auto v = r.count(*split, "train.split", "runs")) {
      if (*v == 0) r.out.emplace_back("train.split.runs must be >= 1");
      t.runs = *v;
    }
    if (auto v = r.count(*split, "train.split", "k")) {
      if (*v < 2) r.out.emplace_back("train.split.k must be >= 2");
      t.k = *v;
    }
  }
  auto it = s.find("configs");
  if (it == s.end() || !it->is_array() || it->empty()) {
    r.out.emplace_back("train.configs must be a non-empty array");
    return;
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const std::string at = "train.configs[" + std::to_string(i) + "]";
    auto problems = classifier::train_config_violations((*it)[i], at);
    if (!problems.empty()) {
      r.out.insert(r.out.end(), problems.begin(), problems.end());
      continue;
    }
    auto tc = (*it)[i].get<classifier::TrainConfig>();
    if (!seen.emplace(tc.model_identifier, std::string(classifier::to_string(tc.masking))).second) {
      r.out.push_back(at + ": duplicate (model_identifier, masking) pair");
    }
    t.configs.push_back(std::move(tc));
  }
}

void read_scan(Reader& r, PipelineConfig& cfg, const json& s) {
  const std::string where = "scan";
  r.keys(s, where, {"corpus", "model", "audit", "audit_labels"});
  auto& sc = cfg.scan;
  if (auto p = r.file(s, where, "corpus")) sc.corpus = *p;
  if (auto p = r.file(s, where, "audit_labels")) sc.audit_labels = *p;
  if (const json* m = r.object(s, where, "model", false)) {
    r.keys(*m, "scan.model", {"model_identifier", "masking", "run"});
    if (auto id = r.string(*m, "scan.model", "model_identifier")) sc.model_identifier = *id;
    if (auto mk = r.string(*m, "scan.model", "masking")) {
      try {
        sc.masking = classifier::parse_masking(*mk);
      } catch (const std::exception&) {
        r.out.emplace_back("scan.model.masking must be mask|nomask");
      }
    }
    if (auto run = r.count(*m, "scan.model", "run")) sc.run = *run;
  }
  if (const json* a = r.object(s, where, "audit", false)) {
    r.keys(*a, "scan.audit", {"n_pos", "n_neg"});
    if (auto v = r.count(*a, "scan.audit", "n_pos")) sc.audit_n_pos = *v;
    if (auto v = r.count(*a, "scan.audit", "n_neg")) sc.audit_n_neg = *v;
  }
}

// Cross-section checks that need the parsed train section.
void check_scan_model(Reader& r, PipelineConfig& cfg, bool has_model) {
  auto& sc = cfg.scan;
  const auto& configs = cfg.train.configs;
  if (configs.empty()) return;
  if (!has_model) {
    sc.model_identifier = configs.front().model_identifier;
    sc.masking = configs.front().masking;
  }
  bool found = std::any_of(configs.begin(), configs.end(), [&](const classifier::TrainConfig& c) {
    return c.model_identifier == sc.model_identifier && c.masking == sc.masking;
  });
  if (!found) {
    r.out.push_back("scan.model: no train config with model_identifier '" + sc.model_identifier +
                    "' and masking '" + std::string(classifier::to_string(sc.masking)) + "'");
  }
  std::size_t runs = cfg.train.protocol == "kfold" ? cfg.train.k : cfg.train.runs;
  if (sc.run >= runs) r.out.push_back("scan.model.run must be < " + std::to_string(runs));
}

std::vector<std::string> read_all(const json& doc, PipelineConfig& cfg, const corpus::EnvLookup& env,
                                  const std::set<std::string>& sections) {
  Reader r(cfg, env);
  if (!doc.is_object()) return {"config must be a JSON object"};
  cfg.raw = doc;
  auto want = [&](const char* s) { return sections.contains(s); };
  r.keys(doc, "",
         {"output_dir", "seed", "run_timestamp", "ingest", "cascade", "backends", "annotation", "masking",
          "train", "scan"});
  if (auto o = r.string(doc, "", "output_dir", true)) {
    if (o->empty()) r.out.emplace_back("output_dir must be non-empty");
    cfg.output_dir = cfg.resolve(*o);
  }
  if (auto seed = r.count(doc, "", "seed", true)) cfg.seed = *seed;
  if (auto ts = r.string(doc, "", "run_timestamp")) {
    try {
      cfg.run_timestamp = parse_timestamp(*ts);
    } catch (const std::exception&) {
      r.out.push_back("run_timestamp '" + *ts + "' is not a valid timestamp");
    }
  }
  if (want("ingest")) {
    if (const json* s = r.object(doc, "", "ingest", true)) read_ingest(r, cfg, *s);
  }
  if (want("cascade")) {
    if (const json* s = r.object(doc, "", "cascade", false)) {
      read_cascade(r, cfg, *s);
    } else {
      r.prefixed("cascade", cfg.cascade.violations());
    }
  }
  if (want("backends")) {
    if (const json* s = r.object(doc, "", "backends", true)) read_backends(r, cfg, *s);
  }
  if (want("annotation")) {
    if (const json* s = r.object(doc, "", "annotation", true)) read_annotation(r, cfg, *s);
  }
  if (want("masking")) {
    if (const json* s = r.object(doc, "", "masking", false)) read_masking(r, cfg, *s);
  }
  if (want("train")) {
    if (const json* s = r.object(doc, "", "train", true)) read_train(r, cfg, *s);
  }
  if (want("scan")) {
    const json* scan = r.object(doc, "", "scan", false);
    if (scan) read_scan(r, cfg, *scan);
    if (want("train")) check_scan_model(r, cfg, scan && scan->contains("model"));
    if (want("ingest") && !cfg.scan.corpus && cfg.ingest.wild_sample == 0 && !cfg.ingest.sources.empty()) {
      r.out.emplace_back("scan.corpus is required when ingest.wild_sample is 0");
    }
  }
  return std::move(r.out);
}

const std::set<std::string>& all_sections() {
  static const std::set<std::string> kAll(kSections.begin(), kSections.end());
  return kAll;
}

}  // namespace

std::vector<std::string> config_violations(const json& doc, const fs::path& base_dir, const corpus::EnvLookup& env) {
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  return read_all(doc, cfg, env, all_sections());
}

PipelineConfig parse_config(const json& doc, const fs::path& base_dir, const corpus::EnvLookup& env) {
  return parse_sections(doc, base_dir, {kSections.begin(), kSections.end()}, env);
}

PipelineConfig parse_sections(const json& doc, const fs::path& base_dir, const std::vector<std::string>& sections,
                              const corpus::EnvLookup& env) {
  for (const auto& s : sections) {
    if (std::find(kSections.begin(), kSections.end(), s) == kSections.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config section '" + s + "'");
    }
  }
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  auto problems = read_all(doc, cfg, env, {sections.begin(), sections.end()});
  if (!problems.empty()) {
    throw Error(ErrorCode::kConfig, std::to_string(problems.size()) + " config violation(s): " + problems.front(),
                problems);
  }
  return cfg;
}

json load_config_document(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kNotFound, "config file not found: " + path.string());
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

PipelineConfig load_sections(const fs::path& path, const std::vector<std::string>& sections,
                             const corpus::EnvLookup& env) {
  return parse_sections(load_config_document(path), fs::absolute(path).parent_path(), sections, env);
}

PipelineConfig validate_config(const fs::path& path, const corpus::EnvLookup& env) {
  auto cfg = parse_config(load_config_document(path), fs::absolute(path).parent_path(), env);

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  auto probe = cfg.output_dir / ".write-probe";
  bool writable = !ec && static_cast<bool>(std::ofstream(probe) << "");
  fs::remove(probe, ec);
  if (!writable) {
    throw Error(ErrorCode::kConfig, "output_dir is not writable: " + cfg.output_dir.string(),
                {"output_dir is not writable"});
  }
  return cfg;
}

}  // namespace ombudsman::pipeline
