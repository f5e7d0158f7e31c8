#pragma once

#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "ombudsman/annotation/records.hpp"

namespace ombudsman::annotation {

// JSONL-backed record store. One record per (post_id, annotator_id): a
// second submission is rejected with Error(kConflict), never overwritten.
// Reads are concurrent; writes are serialized and appended to the file
// before add() returns.
class AnnotationStore {
 public:
  // Loads existing records; a duplicate pair in the file is a kConflict.
  explicit AnnotationStore(std::filesystem::path path);

  void add(const AnnotationRecord& record);
  // All-or-nothing: if any record conflicts (with the store or within the
  // batch) nothing is written and every conflicting pair is listed.
  void add_all(const std::vector<AnnotationRecord>& records);

  std::vector<AnnotationRecord> records() const;
  std::vector<AnnotationRecord> records_for(const std::string& post_id) const;
  bool contains(const std::string& post_id, const std::string& annotator_id) const;
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::vector<AnnotationRecord> records_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

}  // namespace ombudsman::annotation
