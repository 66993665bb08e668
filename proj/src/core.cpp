#include "opinion_forge/core.hpp"

#include <algorithm>

#include "opinion_forge/util.hpp"

namespace opinion_forge {

std::string to_string(Task t) { return t == Task::ASTE ? "ASTE" : "ACOS"; }

Task task_from_string(std::string_view s) {
  if (s == "ASTE") return Task::ASTE;
  if (s == "ACOS") return Task::ACOS;
  throw LabelError("unknown task: " + std::string(s));
}

std::string to_string(SentimentPolarity s) {
  switch (s) {
    case SentimentPolarity::Positive: return "positive";
    case SentimentPolarity::Negative: return "negative";
    case SentimentPolarity::Neutral: return "neutral";
  }
  throw LabelError("corrupt polarity value");
}

SentimentPolarity polarity_from_string(std::string_view s) {
  if (s == "positive") return SentimentPolarity::Positive;
  if (s == "negative") return SentimentPolarity::Negative;
  if (s == "neutral") return SentimentPolarity::Neutral;
  throw LabelError("unknown sentiment polarity: " + std::string(s));
}

Sentence Sentence::from_text(std::string id, std::string text) {
  if (id.empty()) throw UsageError("sentence id must be non-empty");
  Sentence s;
  s.id = std::move(id);
  s.tokens = split_ws(text);
  s.text = std::move(text);
  return s;
}

AspectCategory AspectCategory::parse(std::string_view s) {
  auto hash = s.find('#');
  if (hash == std::string_view::npos || s.find('#', hash + 1) != std::string_view::npos) {
    throw LabelError("category must be entity#attribute: " + std::string(s));
  }
  std::string entity = to_lower(normalize_ws(s.substr(0, hash)));
  std::string attribute = to_lower(normalize_ws(s.substr(hash + 1)));
  if (entity.empty() || attribute.empty() || contains_ws(entity) || contains_ws(attribute)) {
    throw LabelError("bad category: " + std::string(s));
  }
  return AspectCategory{std::move(entity), std::move(attribute)};
}

Term canonicalize_term(const Term& t) {
  if (t.implicit) return Term::Implicit();
  std::string surface = to_lower(normalize_ws(t.surface));
  if (surface.empty()) throw InvalidTerm("explicit term is empty after normalization");
  return Term::Explicit(std::move(surface), t.span);
}

OpinionTriple canonicalize(const OpinionTriple& t) {
  if (t.aspect.implicit || t.opinion.implicit) {
    throw InvalidTerm("ASTE triples cannot contain implicit terms");
  }
  return OpinionTriple{canonicalize_term(t.aspect), t.sentiment, canonicalize_term(t.opinion)};
}

OpinionQuad canonicalize(const OpinionQuad& q) {
  return OpinionQuad{canonicalize_term(q.aspect), AspectCategory::parse(q.category.str()),
                     q.sentiment, canonicalize_term(q.opinion)};
}

namespace {
template <typename T>
void sorted_insert(std::vector<T>& items, T value) {
  auto it = std::lower_bound(items.begin(), items.end(), value);
  if (it != items.end() && *it == value) return;
  items.insert(it, std::move(value));
}
}  // namespace

void AnnotationSet::insert(const OpinionTriple& t) {
  if (task_ != Task::ASTE) throw UsageError("cannot insert a triple into an ACOS set");
  sorted_insert(triples_, canonicalize(t));
}

void AnnotationSet::insert(const OpinionQuad& q) {
  if (task_ != Task::ACOS) throw UsageError("cannot insert a quad into an ASTE set");
  sorted_insert(quads_, canonicalize(q));
}

bool AnnotationSet::contains(const OpinionTriple& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), canonicalize(t));
}

bool AnnotationSet::contains(const OpinionQuad& q) const {
  return std::binary_search(quads_.begin(), quads_.end(), canonicalize(q));
}

std::string to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Ok: return "ok";
    case ParseStatus::Repaired: return "repaired";
    case ParseStatus::Failed: return "failed";
  }
  throw LabelError("corrupt parse status value");
}

ParseStatus parse_status_from_string(std::string_view s) {
  if (s == "ok") return ParseStatus::Ok;
  if (s == "repaired") return ParseStatus::Repaired;
  if (s == "failed") return ParseStatus::Failed;
  throw LabelError("unknown parse status: " + std::string(s));
}

nlohmann::json opinion_to_json(const OpinionTriple& t) {
  return nlohmann::json{{"aspect", t.aspect.surface},
                        {"sentiment", to_string(t.sentiment)},
                        {"opinion", t.opinion.surface}};
}

nlohmann::json opinion_to_json(const OpinionQuad& q) {
  nlohmann::json j{{"category", q.category.str()}, {"sentiment", to_string(q.sentiment)}};
  j["aspect"] = q.aspect.implicit ? nlohmann::json(nullptr) : nlohmann::json(q.aspect.surface);
  j["opinion"] = q.opinion.implicit ? nlohmann::json(nullptr) : nlohmann::json(q.opinion.surface);
  return j;
}

namespace {
std::string require_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + key);
  if (!it->is_string()) throw ParseError(std::string(key) + " is not a string");
  return it->get<std::string>();
}

Term term_or_null(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + key);
  if (it->is_null()) return Term::Implicit();
  if (!it->is_string()) throw ParseError(std::string(key) + " is not a string or null");
  return Term::Explicit(it->get<std::string>());
}
}  // namespace

OpinionTriple triple_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("opinion is not a JSON object");
  OpinionTriple t;
  t.aspect = Term::Explicit(require_string(j, "aspect"));
  t.opinion = Term::Explicit(require_string(j, "opinion"));
  try {
    t.sentiment = polarity_from_string(to_lower(normalize_ws(require_string(j, "sentiment"))));
  } catch (const LabelError& e) {
    throw ParseError(e.what());
  }
  return canonicalize(t);
}

OpinionQuad quad_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("opinion is not a JSON object");
  OpinionQuad q;
  q.aspect = term_or_null(j, "aspect");
  q.opinion = term_or_null(j, "opinion");
  try {
    q.sentiment = polarity_from_string(to_lower(normalize_ws(require_string(j, "sentiment"))));
    q.category = AspectCategory::parse(require_string(j, "category"));
  } catch (const LabelError& e) {
    throw ParseError(e.what());
  }
  return canonicalize(q);
}

nlohmann::json annotation_set_to_json(const AnnotationSet& set) {
  nlohmann::json arr = nlohmann::json::array();
  if (set.task() == Task::ASTE) {
    for (const auto& t : set.triples()) arr.push_back(opinion_to_json(t));
  } else {
    for (const auto& q : set.quads()) arr.push_back(opinion_to_json(q));
  }
  return arr;
}

AnnotationSet annotation_set_from_json(Task task, const nlohmann::json& arr) {
  if (!arr.is_array()) throw ParseError("annotations must be a JSON list");
  AnnotationSet set(task);
  for (const auto& j : arr) {
    if (task == Task::ASTE) {
      set.insert(triple_from_json(j));
    } else {
      set.insert(quad_from_json(j));
    }
  }
  return set;
}

std::string serialize_opinions(const AnnotationSet& set) {
  return annotation_set_to_json(set).dump();
}

nlohmann::json record_to_json(const AnnotationRecord& r) {
  return nlohmann::json{{"sentence_id", r.sentence_id},
                        {"annotator_id", r.annotator_id},
                        {"task", to_string(r.annotations.task())},
                        {"annotations", annotation_set_to_json(r.annotations)},
                        {"raw_output", r.raw_output},
                        {"prompt_hash", r.prompt_hash},
                        {"parse_status", to_string(r.parse_status)},
                        {"flags", r.flags}};
}

AnnotationRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  AnnotationRecord r;
  r.sentence_id = require_string(j, "sentence_id");
  r.annotator_id = require_string(j, "annotator_id");
  Task task = task_from_string(require_string(j, "task"));
  auto ann = j.find("annotations");
  if (ann == j.end()) throw ParseError("missing field: annotations");
  r.annotations = annotation_set_from_json(task, *ann);
  r.raw_output = require_string(j, "raw_output");
  r.prompt_hash = require_string(j, "prompt_hash");
  r.parse_status = parse_status_from_string(require_string(j, "parse_status"));
  if (auto it = j.find("flags"); it != j.end() && it->is_array()) {
    for (const auto& f : *it) r.flags.push_back(f.get<std::string>());
  }
  if (r.parse_status == ParseStatus::Failed && !r.annotations.empty()) {
    throw IntegrityError("failed record carries annotations: " + r.sentence_id);
  }
  return r;
}

}  // namespace opinion_forge
