#pragma once

#include <vector>

#include "ombudsman/classifier/dataset.hpp"
#include "ombudsman/masking/mask.hpp"

namespace ombudsman::masking {

// Fills masked_text and locations for every example. Literal mask tokens in
// the source text are escaped first.
void mask_dataset(std::vector<classifier::LabeledExample>& dataset, NerBackend& ner,
                  std::string_view mask_token = kDefaultMaskToken);

}  // namespace ombudsman::masking
