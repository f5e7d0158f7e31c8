#include "ombudsman/classifier/splits.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <cmath>
#include <set>

#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/random.hpp"

using nlohmann::json;

namespace ombudsman::classifier {

void to_json(json& j, const SplitManifest& m) {
  j = json{{"dataset_hash", m.dataset_hash}, {"seed", m.seed},           {"ratio", {m.train_ratio, 1.0 - m.train_ratio}},
           {"train_ids", m.train_ids},       {"test_ids", m.test_ids},   {"run_seeds", m.run_seeds},
           {"folds", m.folds}};
}

void from_json(const json& j, SplitManifest& m) {
  m.dataset_hash = j.at("dataset_hash").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.train_ratio = j.at("ratio").at(0).get<double>();
  m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  m.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  m.run_seeds = j.at("run_seeds").get<std::vector<std::uint64_t>>();
  m.folds = j.value("folds", std::vector<std::vector<std::string>>{});
}

SplitManifest load_manifest(const std::filesystem::path& path) { return read_json_file(path).get<SplitManifest>(); }

void save_manifest(const std::filesystem::path& path, const SplitManifest& m) { write_json_file(path, m); }

namespace {

// Ids per class (0, 1), each sorted and then shuffled under the seed.
std::array<std::vector<std::string>, 2> shuffled_classes(const std::vector<LabeledExample>& dataset,
                                                         std::uint64_t seed) {
  if (dataset.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot split an empty dataset");
  std::array<std::vector<std::string>, 2> cls;
  std::set<std::string> seen;
  for (const auto& e : dataset) {
    if (!seen.insert(e.post_id).second) throw Error(ErrorCode::kInvalidArgument, "duplicate post_id " + e.post_id);
    cls[e.label == 1 ? 1 : 0].push_back(e.post_id);
  }
  if (cls[0].empty() || cls[1].empty()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset has a single class; both labels are required");
  }
  SeededRng rng(derive_seed(seed, "split"));
  for (auto& ids : cls) {
    std::sort(ids.begin(), ids.end());
    shuffle_in_place(std::span<std::string>(ids), rng);
  }
  return cls;
}

std::vector<std::uint64_t> run_seeds(std::uint64_t seed, std::size_t runs) {
  std::vector<std::uint64_t> out;
  for (std::size_t r = 0; r < runs; ++r) out.push_back(derive_seed(seed, "run-" + std::to_string(r)));
  return out;
}

}  // namespace

SplitManifest make_splits(const std::vector<LabeledExample>& dataset, double train_ratio, std::uint64_t seed,
                          std::size_t runs) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train ratio must lie in (0,1)");
  }
  if (runs == 0) throw Error(ErrorCode::kInvalidArgument, "at least one run is required");
  auto cls = shuffled_classes(dataset, seed);

  const auto total = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(dataset.size())));
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> frac{};
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    double exact = train_ratio * static_cast<double>(cls[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  while (assigned < total) {
    int c = frac[1] > frac[0] ? 1 : 0;
    if (quota[c] == cls[c].size()) c = 1 - c;
    ++quota[c];
    frac[c] = -1.0;
    ++assigned;
  }

  SplitManifest m;
  m.dataset_hash = dataset_hash(dataset);
  m.seed = seed;
  m.train_ratio = train_ratio;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < cls[c].size(); ++i) (i < quota[c] ? m.train_ids : m.test_ids).push_back(cls[c][i]);
  }
  std::sort(m.train_ids.begin(), m.train_ids.end());
  std::sort(m.test_ids.begin(), m.test_ids.end());
  m.run_seeds = run_seeds(seed, runs);
  return m;
}

SplitManifest make_kfold_splits(const std::vector<LabeledExample>& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > dataset.size()) {
    throw Error(ErrorCode::kInvalidArgument, "k must lie in [2, N] for k-fold splits");
  }
  auto cls = shuffled_classes(dataset, seed);
  SplitManifest m;
  m.dataset_hash = dataset_hash(dataset);
  m.seed = seed;
  m.train_ratio = 1.0 - 1.0 / static_cast<double>(k);
  m.folds.resize(k);
  std::size_t slot = 0;
  for (const auto& ids : cls) {
    for (const auto& id : ids) m.folds[slot++ % k].push_back(id);
  }
  for (auto& f : m.folds) std::sort(f.begin(), f.end());
  m.test_ids = m.folds[0];
  for (std::size_t f = 1; f < k; ++f) m.train_ids.insert(m.train_ids.end(), m.folds[f].begin(), m.folds[f].end());
  std::sort(m.train_ids.begin(), m.train_ids.end());
  m.run_seeds = run_seeds(seed, k);
  return m;
}

}  // namespace ombudsman::classifier
