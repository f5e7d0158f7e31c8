#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/classifier/dataset.hpp"

namespace ombudsman::classifier {

inline constexpr std::size_t kDefaultRuns = 5;

struct SplitManifest {
  std::string dataset_hash;
  std::uint64_t seed = 0;
  double train_ratio = 0.7;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::uint64_t> run_seeds;
  // Non-empty only for the k-fold protocol: test ids of each fold.
  std::vector<std::vector<std::string>> folds;

  bool operator==(const SplitManifest&) const = default;
};

void to_json(nlohmann::json& j, const SplitManifest& m);
void from_json(const nlohmann::json& j, SplitManifest& m);

SplitManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const SplitManifest& m);

// Stratified holdout: |train| = floor(ratio * N). Per-class quotas are
// floor(ratio * n_class), with leftover slots going to the classes with the
// largest fractional parts (class 0 first on ties). Members are drawn per
// class from a seeded shuffle of the ids in sorted order.
// Throws Error(kInvalidArgument) for an empty or single-class dataset.
SplitManifest make_splits(const std::vector<LabeledExample>& dataset, double train_ratio, std::uint64_t seed,
                          std::size_t runs = kDefaultRuns);

// Stratified k-fold: every id lands in exactly one fold; train_ids/test_ids
// describe fold 0.
SplitManifest make_kfold_splits(const std::vector<LabeledExample>& dataset, std::size_t k, std::uint64_t seed);

}  // namespace ombudsman::classifier
