#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ombudsman/annotation/store.hpp"
#include "ombudsman/corpus/post.hpp"
#include "ombudsman/scanner/scan.hpp"

namespace ombudsman::scanner {

struct ServiceContext {
  ReportStore* reports = nullptr;
  annotation::AnnotationStore* annotations = nullptr;
  // Posts open for annotation (cascade survivors); labels may also target
  // any post that appears in a stored scan.
  std::vector<corpus::Post> annotation_posts;
  // post_id -> assigned annotator ids, used by GET /api/queue?annotator=.
  std::map<std::string, std::vector<std::string>> assignments;
};

// JSON over HTTP:
//   GET  /api/scans                   scan summaries
//   GET  /api/scans/{id}/queue        flagged items, score desc then id asc;
//                                     ?label_state=labeled|unlabeled,
//                                     ?platform=, ?offset=, ?limit=
//   GET  /api/scans/{id}/report       the full ScanReport
//   GET  /api/queue                   items awaiting labels and expert
//                                     disputes; ?annotator= narrows to that
//                                     annotator's open assignments
//   POST /api/labels                  an AnnotationRecord; 201, or 404 for
//                                     an unknown post, 409 for a repeat
//   GET  /api/agreement               AgreementReport over stored records
//   GET  /api/adjudications           current adjudication result
// Errors are {"error": {"code", "message", "details"}}.
class Service {
 public:
  explicit Service(ServiceContext context);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. Throws Error(kIo) if binding fails.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop().
  void listen_blocking(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ombudsman::scanner
