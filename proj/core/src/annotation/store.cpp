#include "ombudsman/annotation/store.hpp"

#include <mutex>
#include <set>

#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"

namespace fs = std::filesystem;

namespace ombudsman::annotation {

namespace {

std::string pair_name(const AnnotationRecord& r) { return r.post_id + "/" + r.annotator_id; }

}  // namespace

AnnotationStore::AnnotationStore(fs::path path) : path_(std::move(path)) {
  if (!fs::exists(path_)) return;
  std::vector<std::string> dups;
  for (const auto& row : read_jsonl(path_)) {
    auto r = row.get<AnnotationRecord>();
    auto key = std::make_pair(r.post_id, r.annotator_id);
    if (index_.contains(key)) {
      dups.push_back(pair_name(r));
      continue;
    }
    index_[key] = records_.size();
    records_.push_back(std::move(r));
  }
  if (!dups.empty()) {
    throw Error(ErrorCode::kConflict, path_.string() + " holds duplicate (post_id, annotator_id) records", dups);
  }
}

void AnnotationStore::add(const AnnotationRecord& record) { add_all({record}); }

void AnnotationStore::add_all(const std::vector<AnnotationRecord>& records) {
  std::unique_lock lock(mutex_);
  std::vector<std::string> conflicts;
  std::set<std::pair<std::string, std::string>> batch;
  for (const auto& r : records) {
    if (r.post_id.empty() || r.annotator_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "annotation record needs post_id and annotator_id");
    }
    auto key = std::make_pair(r.post_id, r.annotator_id);
    if (index_.contains(key) || !batch.insert(key).second) conflicts.push_back(pair_name(r));
  }
  if (!conflicts.empty()) {
    throw Error(ErrorCode::kConflict,
                "label already recorded for " + conflicts.front() +
                    (conflicts.size() > 1 ? " and " + std::to_string(conflicts.size() - 1) + " more" : ""),
                conflicts);
  }
  std::vector<json> rows(records.begin(), records.end());
  if (!path_.empty()) append_jsonl(path_, rows);
  for (const auto& r : records) {
    index_[{r.post_id, r.annotator_id}] = records_.size();
    records_.push_back(r);
  }
}

std::vector<AnnotationRecord> AnnotationStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::vector<AnnotationRecord> AnnotationStore::records_for(const std::string& post_id) const {
  std::shared_lock lock(mutex_);
  std::vector<AnnotationRecord> out;
  for (const auto& r : records_) {
    if (r.post_id == post_id) out.push_back(r);
  }
  return out;
}

bool AnnotationStore::contains(const std::string& post_id, const std::string& annotator_id) const {
  std::shared_lock lock(mutex_);
  return index_.contains({post_id, annotator_id});
}

std::size_t AnnotationStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace ombudsman::annotation
