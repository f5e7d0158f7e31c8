#include "ombudsman/classifier/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <span>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "ombudsman/cascade/rule_backends.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/mask.hpp"
#include "ombudsman/random.hpp"
#include "ombudsman/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::classifier {

std::string_view to_string(Masking m) { return m == Masking::kMask ? "mask" : "nomask"; }

Masking parse_masking(std::string_view s) {
  if (s == "mask") return Masking::kMask;
  if (s == "nomask") return Masking::kNoMask;
  throw Error(ErrorCode::kConfig, "masking must be mask or nomask, got '" + std::string(s) + "'");
}

std::vector<std::string> TrainConfig::violations() const {
  std::vector<std::string> out;
  if (model_identifier.empty()) out.emplace_back("model_identifier must be non-empty");
  if (epochs == 0) out.emplace_back("epochs must be >= 1");
  if (optimizer.name != "adam") out.push_back("optimizer '" + optimizer.name + "' is not supported (adam)");
  if (!(optimizer.learning_rate > 0.0)) out.emplace_back("optimizer.learning_rate must be > 0");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0)) out.emplace_back("optimizer.beta1 in [0,1)");
  if (!(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) out.emplace_back("optimizer.beta2 in [0,1)");
  if (!(optimizer.epsilon > 0.0)) out.emplace_back("optimizer.epsilon must be > 0");
  if (optimizer.weight_decay < 0.0) out.emplace_back("optimizer.weight_decay must be >= 0");
  if (batch_size == 0) out.emplace_back("batch_size must be >= 1");
  if (max_length == 0) out.emplace_back("max_length must be >= 1");
  return out;
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"model_identifier", c.model_identifier},
           {"masking", to_string(c.masking)},
           {"epochs", c.epochs},
           {"optimizer",
            {{"name", c.optimizer.name},
             {"learning_rate", c.optimizer.learning_rate},
             {"beta1", c.optimizer.beta1},
             {"beta2", c.optimizer.beta2},
             {"epsilon", c.optimizer.epsilon},
             {"weight_decay", c.optimizer.weight_decay}}},
           {"batch_size", c.batch_size},
           {"max_length", c.max_length},
           {"seed", c.seed},
           {"backend_options", c.backend_options}};
}

namespace {

TrainConfig parse_fields(const json& j) {
  TrainConfig c;
  c.model_identifier = j.value("model_identifier", c.model_identifier);
  if (j.contains("masking")) c.masking = parse_masking(j["masking"].get<std::string>());
  c.epochs = j.value("epochs", c.epochs);
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    c.optimizer.name = o.value("name", c.optimizer.name);
    c.optimizer.learning_rate = o.value("learning_rate", c.optimizer.learning_rate);
    c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
    c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
    c.optimizer.epsilon = o.value("epsilon", c.optimizer.epsilon);
    c.optimizer.weight_decay = o.value("weight_decay", c.optimizer.weight_decay);
  }
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_length = j.value("max_length", c.max_length);
  c.seed = j.value("seed", c.seed);
  c.backend_options = j.value("backend_options", json::object());
  return c;
}

}  // namespace

std::vector<std::string> train_config_violations(const json& j, const std::string& where) {
  std::vector<std::string> out;
  if (!j.is_object()) return {where + " must be an object"};
  static const std::set<std::string> kKeys = {"model_identifier", "masking", "epochs",   "optimizer",
                                              "batch_size",       "max_length", "seed", "backend_options"};
  static const std::set<std::string> kOpt = {"name", "learning_rate", "beta1", "beta2", "epsilon", "weight_decay"};
  for (const auto& [k, _] : j.items()) {
    if (!kKeys.contains(k)) out.push_back("unknown key '" + where + "." + k + "'");
  }
  if (j.contains("optimizer")) {
    if (!j["optimizer"].is_object()) {
      out.push_back(where + ".optimizer must be an object");
    } else {
      for (const auto& [k, _] : j["optimizer"].items()) {
        if (!kOpt.contains(k)) out.push_back("unknown key '" + where + ".optimizer." + k + "'");
      }
    }
  }
  if (!out.empty()) return out;
  try {
    for (auto& v : parse_fields(j).violations()) out.push_back(where + ": " + v);
  } catch (const Error& e) {
    out.push_back(where + ": " + e.what());
  } catch (const json::exception& e) {
    out.push_back(where + ": " + e.what());
  }
  return out;
}

void from_json(const json& j, TrainConfig& c) {
  auto problems = train_config_violations(j, "train");
  if (!problems.empty()) throw Error(ErrorCode::kConfig, problems.front(), problems);
  c = parse_fields(j);
}

void to_json(json& j, const TrainingLog& l) { j = json{{"epoch_loss", l.epoch_loss}, {"status", l.status}}; }

void from_json(const json& j, TrainingLog& l) {
  l.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  l.status = j.value("status", std::string{"ok"});
}

std::vector<double> TrainedModel::predict_batch(const std::vector<std::string>& texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(predict_proba(t));
  return out;
}

// ---------------------------------------------------------------- registry

ModelRegistry ModelRegistry::with_defaults() {
  ModelRegistry r;
  r.add(std::make_shared<BowLogregBackend>());
  r.add(std::make_shared<MockModelBackend>());
  r.add(std::make_shared<ExternalCommandBackend>());
  return r;
}

void ModelRegistry::add(std::shared_ptr<ModelBackend> backend) { backends_.push_back(std::move(backend)); }

ModelBackend& ModelRegistry::for_identifier(std::string_view id) const {
  for (const auto& b : backends_) {
    if (b->supports(id)) return *b;
  }
  throw Error(ErrorCode::kConfig, "no model backend supports '" + std::string(id) + "'");
}

ModelBackend& ModelRegistry::by_name(std::string_view name) const {
  for (const auto& b : backends_) {
    if (b->name() == name) return *b;
  }
  throw Error(ErrorCode::kConfig, "no model backend named '" + std::string(name) + "'");
}

// -------------------------------------------------------------- bow-logreg

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double bce(double p, int y) {
  constexpr double kEps = 1e-12;
  p = std::clamp(p, kEps, 1.0 - kEps);
  return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint32_t> features(std::string_view text, std::size_t max_length) {
  auto tokens = BowLogregBackend::tokenize(text, max_length);
  std::set<std::uint32_t> idx;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    idx.insert(static_cast<std::uint32_t>(fnv1a("u:" + tokens[i]) % BowLogregBackend::kBuckets));
    if (i + 1 < tokens.size()) {
      idx.insert(static_cast<std::uint32_t>(fnv1a("b:" + tokens[i] + " " + tokens[i + 1]) %
                                            BowLogregBackend::kBuckets));
    }
  }
  return {idx.begin(), idx.end()};
}

class BowLogregModel final : public TrainedModel {
 public:
  BowLogregModel(std::string id, std::size_t max_length, double bias, std::unordered_map<std::uint32_t, double> w)
      : id_(std::move(id)), max_length_(max_length), bias_(bias), w_(std::move(w)) {}

  double predict_proba(std::string_view text) override {
    double z = bias_;
    for (auto f : features(text, max_length_)) {
      if (auto it = w_.find(f); it != w_.end()) z += it->second;
    }
    return sigmoid(z);
  }

  json artifact() const override {
    std::vector<std::pair<std::uint32_t, double>> sorted(w_.begin(), w_.end());
    std::sort(sorted.begin(), sorted.end());
    json weights = json::array();
    for (const auto& [i, v] : sorted) {
      if (v != 0.0) weights.push_back({i, v});
    }
    return json{{"backend", "bow-logreg"},
                {"model_identifier", id_},
                {"buckets", BowLogregBackend::kBuckets},
                {"max_length", max_length_},
                {"bias", bias_},
                {"weights", weights}};
  }

 private:
  std::string id_;
  std::size_t max_length_;
  double bias_;
  std::unordered_map<std::uint32_t, double> w_;
};

}  // namespace

bool BowLogregBackend::supports(std::string_view id) const { return id == "bow-logreg" || id == "bow-logreg@1"; }

std::vector<std::string> BowLogregBackend::tokenize(std::string_view raw, std::size_t max_length) {
  std::string folded = text::casefold(raw);
  // The mask token is one symbol, distinct from the word "location".
  for (auto pos = folded.find("<location>"); pos != std::string::npos; pos = folded.find("<location>", pos)) {
    folded.replace(pos, 10, " __loc__ ");
  }
  std::vector<std::string> out;
  std::string cur;
  for (char ch : folded) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80 || c == '_') {
      cur.push_back(ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
      if (out.size() == max_length) return out;
    }
  }
  if (!cur.empty() && out.size() < max_length) out.push_back(std::move(cur));
  return out;
}

std::unique_ptr<TrainedModel> BowLogregBackend::train(const std::vector<std::string>& texts,
                                                      const std::vector<int>& labels, const TrainConfig& config,
                                                      TrainingLog& log) {
  if (texts.size() != labels.size() || texts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training needs equal, non-empty texts and labels");
  }
  std::vector<std::vector<std::uint32_t>> x;
  x.reserve(texts.size());
  for (const auto& t : texts) x.push_back(features(t, config.max_length));

  const auto& opt = config.optimizer;
  std::vector<double> w(kBuckets, 0.0), m(kBuckets, 0.0), v(kBuckets, 0.0);
  double b = 0, mb = 0, vb = 0;
  std::uint64_t step = 0;
  SeededRng rng(config.seed);
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), 0);

  std::unordered_map<std::uint32_t, double> grad;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_in_place(std::span<std::size_t>(order), rng);
    double loss = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      double n = static_cast<double>(end - start);
      grad.clear();
      double gb = 0;
      for (std::size_t k = start; k < end; ++k) {
        auto i = order[k];
        double z = b;
        for (auto f : x[i]) z += w[f];
        double p = sigmoid(z);
        loss += bce(p, labels[i]);
        double g = (p - labels[i]) / n;
        gb += g;
        for (auto f : x[i]) grad[f] += g;
      }
      ++step;
      const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
      // Lazy Adam: only features present in the batch are updated. Keys are
      // visited in sorted order so floating-point results do not depend on
      // hash-map iteration order.
      std::vector<std::pair<std::uint32_t, double>> sorted(grad.begin(), grad.end());
      std::sort(sorted.begin(), sorted.end());
      for (auto [f, g] : sorted) {
        g += opt.weight_decay * w[f];
        m[f] = opt.beta1 * m[f] + (1 - opt.beta1) * g;
        v[f] = opt.beta2 * v[f] + (1 - opt.beta2) * g * g;
        w[f] -= opt.learning_rate * (m[f] / c1) / (std::sqrt(v[f] / c2) + opt.epsilon);
      }
      mb = opt.beta1 * mb + (1 - opt.beta1) * gb;
      vb = opt.beta2 * vb + (1 - opt.beta2) * gb * gb;
      b -= opt.learning_rate * (mb / c1) / (std::sqrt(vb / c2) + opt.epsilon);
    }
    log.epoch_loss.push_back(loss / static_cast<double>(texts.size()));
  }
  std::unordered_map<std::uint32_t, double> sparse;
  for (std::uint32_t f = 0; f < kBuckets; ++f) {
    if (w[f] != 0.0) sparse.emplace(f, w[f]);
  }
  return std::make_unique<BowLogregModel>(config.model_identifier, config.max_length, b, std::move(sparse));
}

std::unique_ptr<TrainedModel> BowLogregBackend::load(const json& a) {
  if (a.value("backend", std::string{}) != "bow-logreg" || a.value("buckets", std::size_t{0}) != kBuckets) {
    throw Error(ErrorCode::kInvalidArgument, "artifact is not a bow-logreg model with matching bucket count");
  }
  std::unordered_map<std::uint32_t, double> w;
  for (const auto& pair : a.at("weights")) w.emplace(pair.at(0).get<std::uint32_t>(), pair.at(1).get<double>());
  return std::make_unique<BowLogregModel>(a.at("model_identifier").get<std::string>(),
                                          a.at("max_length").get<std::size_t>(), a.at("bias").get<double>(),
                                          std::move(w));
}

// -------------------------------------------------------------------- mocks

namespace {

class MockModel final : public TrainedModel {
 public:
  explicit MockModel(std::string id) : id_(std::move(id)) {}

  double predict_proba(std::string_view text) override {
    if (id_ == "mock:constant-negative") return 0.0;
    if (id_ == "mock:constant-positive") return 1.0;
    auto folded = text::casefold(text);
    int cues = 0;
    for (const auto& stem : cascade::RuleNliBackend::cue_stems()) {
      if (folded.find(stem) != std::string::npos) ++cues;
    }
    cues = std::min(cues, 4);
    // Masked inputs carry their locations as mask tokens.
    bool located = text.find(masking::kDefaultMaskToken) != std::string_view::npos ||
                   !masking::extract_locations(text, ner_).empty();
    bool flagged = located && cascade::RuleGenerativeBackend::has_future_cue(text);
    // Integer tenths keep the scores exact decimals.
    return flagged ? (55 + 10 * cues) / 100.0 : (45 - 10 * cues) / 100.0;
  }

  json artifact() const override { return json{{"backend", "mock"}, {"model_identifier", id_}}; }

 private:
  std::string id_;
  masking::GazetteerNer ner_;
};

}  // namespace

bool MockModelBackend::supports(std::string_view id) const {
  return id == "mock:constant-negative" || id == "mock:constant-positive" || id == "mock:rule";
}

std::unique_ptr<TrainedModel> MockModelBackend::train(const std::vector<std::string>& texts,
                                                      const std::vector<int>& labels, const TrainConfig& config,
                                                      TrainingLog& log) {
  if (texts.size() != labels.size() || texts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training needs equal, non-empty texts and labels");
  }
  auto model = std::make_unique<MockModel>(config.model_identifier);
  double loss = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) loss += bce(model->predict_proba(texts[i]), labels[i]);
  loss /= static_cast<double>(texts.size());
  for (std::size_t e = 0; e < config.epochs; ++e) log.epoch_loss.push_back(loss);
  return model;
}

std::unique_ptr<TrainedModel> MockModelBackend::load(const json& a) {
  auto id = a.at("model_identifier").get<std::string>();
  if (!supports(id)) throw Error(ErrorCode::kInvalidArgument, "unknown mock model '" + id + "'");
  return std::make_unique<MockModel>(id);
}

double OracleModel::predict_proba(std::string_view text) {
  auto it = gold_.find(std::string(text));
  return it == gold_.end() ? 0.0 : static_cast<double>(it->second);
}

json OracleModel::artifact() const { return json{{"backend", "oracle"}, {"size", gold_.size()}}; }

// ----------------------------------------------------------------- external

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

void run_command(const std::string& cmd) {
  spdlog::info("running: {}", cmd);
  int rc = std::system(cmd.c_str());
  if (rc != 0) throw Error(ErrorCode::kBackend, "external model command failed (status " + std::to_string(rc) + ")");
}

class ExternalModel final : public TrainedModel {
 public:
  ExternalModel(std::string id, std::string command, fs::path dir, fs::path work)
      : id_(std::move(id)), command_(std::move(command)), dir_(std::move(dir)), work_(std::move(work)) {}

  double predict_proba(std::string_view text) override { return predict_batch({std::string(text)}).at(0); }

  std::vector<double> predict_batch(const std::vector<std::string>& texts) override {
    fs::create_directories(work_);
    auto tag = short_hash(sha256_hex(dir_.string() + std::to_string(texts.size()) + texts.front()), 12);
    auto in = work_ / ("predict-" + tag + ".jsonl");
    auto out = work_ / ("scores-" + tag + ".jsonl");
    std::vector<json> rows;
    for (const auto& t : texts) rows.push_back({{"text", t}});
    write_jsonl(in, rows);
    run_command(command_ + " predict --artifact " + shell_quote(dir_.string()) + " --in " + shell_quote(in.string()) +
                " --out " + shell_quote(out.string()));
    std::vector<double> scores;
    for (const auto& row : read_jsonl(out)) scores.push_back(row.at("score").get<double>());
    if (scores.size() != texts.size()) throw Error(ErrorCode::kBackend, "external predict returned wrong count");
    return scores;
  }

  json artifact() const override {
    return json{{"backend", "external"}, {"model_identifier", id_}, {"command", command_}, {"dir", dir_.string()}};
  }

 private:
  std::string id_;
  std::string command_;
  fs::path dir_;
  fs::path work_;
};

}  // namespace

ExternalCommandBackend::ExternalCommandBackend(fs::path work_dir) : work_dir_(std::move(work_dir)) {}

bool ExternalCommandBackend::supports(std::string_view id) const { return id.starts_with("external:"); }

std::unique_ptr<TrainedModel> ExternalCommandBackend::train(const std::vector<std::string>& texts,
                                                            const std::vector<int>& labels,
                                                            const TrainConfig& config, TrainingLog& log) {
  auto command = config.backend_options.value("command", std::string{});
  if (command.empty()) throw Error(ErrorCode::kConfig, "external backends need backend_options.command");
  fs::path dir = config.backend_options.value("artifact_dir", std::string{});
  if (dir.empty()) dir = work_dir_ / ("ombudsman-" + short_hash(json_hash(config), 12));
  fs::create_directories(dir);
  std::vector<json> rows;
  for (std::size_t i = 0; i < texts.size(); ++i) rows.push_back({{"text", texts[i]}, {"label", labels[i]}});
  write_jsonl(dir / "train.jsonl", rows);
  write_json_file(dir / "config.json", config);
  try {
    run_command(command + " train --config " + shell_quote((dir / "config.json").string()) + " --train " +
                shell_quote((dir / "train.jsonl").string()) + " --out " + shell_quote(dir.string()));
  } catch (...) {
    if (fs::exists(dir / "log.json")) {
      log.epoch_loss = read_json_file(dir / "log.json").value("epoch_loss", std::vector<double>{});
    }
    throw;
  }
  if (fs::exists(dir / "log.json")) {
    log.epoch_loss = read_json_file(dir / "log.json").value("epoch_loss", std::vector<double>{});
  }
  return std::make_unique<ExternalModel>(config.model_identifier, command, dir, work_dir_);
}

std::unique_ptr<TrainedModel> ExternalCommandBackend::load(const json& a) {
  return std::make_unique<ExternalModel>(a.at("model_identifier").get<std::string>(),
                                         a.at("command").get<std::string>(), a.at("dir").get<std::string>(),
                                         work_dir_);
}

}  // namespace ombudsman::classifier
