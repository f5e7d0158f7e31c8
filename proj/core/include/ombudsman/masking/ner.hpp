#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman::masking {

enum class EntityCategory { kLocation, kGeopolitical, kOther };

std::string_view to_string(EntityCategory c);

// Code-point offsets into the text: surface == text[start:end).
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
  EntityCategory category = EntityCategory::kLocation;

  bool operator==(const EntitySpan&) const = default;
};

void to_json(nlohmann::json& j, const EntitySpan& s);
void from_json(const nlohmann::json& j, EntitySpan& s);

// Raw detector. Detections may overlap and may include non-location
// categories; extract_locations() filters and merges.
class NerBackend {
 public:
  virtual ~NerBackend() = default;
  // "<name>@<version>", recorded wherever masked output is persisted.
  virtual std::string identifier() const = 0;
  virtual std::vector<EntitySpan> detect(std::string_view text) = 0;
};

// Deterministic gazetteer + pattern recognizer shipped with the library:
// US states (names and unambiguous postal codes), major US cities, countries,
// regions, named rivers and lakes, and "<Capitalized> river|lake|creek|bay"
// constructions. Case-sensitive, with ALL-CAPS variants accepted.
class GazetteerNer final : public NerBackend {
 public:
  static constexpr std::string_view kName = "gazetteer-ner";
  static constexpr std::string_view kVersion = "1";

  GazetteerNer();
  std::string identifier() const override;
  std::vector<EntitySpan> detect(std::string_view text) override;

 private:
  struct Phrase {
    std::vector<std::string> tokens;
    EntityCategory category;
  };
  std::vector<Phrase> phrases_;  // longest first
};

// Remote recognizer: POST {"text", "model"} -> {"entities": [{"start", "end", "label"}]}
// with code-point offsets and spaCy-style labels (GPE, LOC, ...).
class HttpNerBackend final : public NerBackend {
 public:
  HttpNerBackend(std::string endpoint, std::string model_identifier, int timeout_seconds = 60);
  std::string identifier() const override { return model_; }
  std::vector<EntitySpan> detect(std::string_view text) override;

 private:
  std::string endpoint_;
  std::string model_;
  int timeout_seconds_;
};

// Builds from {"type": "gazetteer", "version": "1"} or
// {"type": "http", "endpoint": ..., "model_identifier": ...}.
std::shared_ptr<NerBackend> make_ner_backend(const nlohmann::json& section);
std::vector<std::string> ner_section_violations(const nlohmann::json& section);

}  // namespace ombudsman::masking
