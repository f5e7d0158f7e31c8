#include "ombudsman/masking/dataset_mask.hpp"

namespace ombudsman::masking {

void mask_dataset(std::vector<classifier::LabeledExample>& dataset, NerBackend& ner, std::string_view mask_token) {
  for (auto& e : dataset) {
    auto escaped = escape_mask_literals(e.text, mask_token);
    auto spans = extract_locations(escaped, ner, mask_token);
    e.locations.clear();
    for (const auto& s : spans) e.locations.push_back(s.surface);
    e.masked_text = mask_locations(escaped, spans, mask_token).text;
  }
}

}  // namespace ombudsman::masking
