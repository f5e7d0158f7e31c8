#pragma once

#include <vector>

#include "ombudsman/annotation/records.hpp"
#include "ombudsman/classifier/dataset.hpp"
#include "ombudsman/corpus/post.hpp"

namespace ombudsman::annotation {

// One example per adjudicated post, in adjudication order, with text and
// provenance from the corpus. Throws Error(kNotFound) listing any post ids
// the corpus lacks.
std::vector<classifier::LabeledExample> export_labeled(const std::vector<AdjudicatedLabel>& adjudicated,
                                                       const std::vector<corpus::Post>& corpus);

}  // namespace ombudsman::annotation
