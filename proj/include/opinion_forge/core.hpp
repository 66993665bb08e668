#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion_forge/errors.hpp"

namespace opinion_forge {

enum class Task { ASTE, ACOS };

std::string to_string(Task t);
Task task_from_string(std::string_view s);  // throws LabelError

enum class SentimentPolarity { Positive, Negative, Neutral };

// Serialized forms are exactly "positive" | "negative" | "neutral".
std::string to_string(SentimentPolarity s);
SentimentPolarity polarity_from_string(std::string_view s);  // throws LabelError

// Half-open token range [start, end).
struct TokenSpan {
  size_t start = 0;
  size_t end = 0;
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// One input text with a stable id and its whitespace tokenization.
struct Sentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;

  // Tokenizes by whitespace; id must be non-empty.
  static Sentence from_text(std::string id, std::string text);
};

// An aspect or opinion term. Explicit terms carry a surface string and an
// optional provenance span; implicit terms carry nothing (ACOS only).
//
// Equality compares the surface text only — spans are provenance, two terms
// with the same canonical surface are the same term.
struct Term {
  bool implicit = false;
  std::string surface;
  std::optional<TokenSpan> span;

  static Term Implicit() { return Term{true, {}, {}}; }
  static Term Explicit(std::string s, std::optional<TokenSpan> sp = std::nullopt) {
    return Term{false, std::move(s), sp};
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.implicit == b.implicit && (a.implicit || a.surface == b.surface);
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.implicit != b.implicit) return a.implicit ? std::strong_ordering::less
                                                    : std::strong_ordering::greater;
    if (a.implicit) return std::strong_ordering::equal;
    return a.surface <=> b.surface;
  }
};

// Coarse label entity#attribute, lowercase, no whitespace.
struct AspectCategory {
  std::string entity;
  std::string attribute;

  // Parses "entity#attribute", lowercasing both sides. Throws LabelError on
  // missing '#', empty side, or embedded whitespace.
  static AspectCategory parse(std::string_view s);

  std::string str() const { return entity + "#" + attribute; }

  friend bool operator==(const AspectCategory&, const AspectCategory&) = default;
  friend std::strong_ordering operator<=>(const AspectCategory& a, const AspectCategory& b) {
    if (auto c = a.entity <=> b.entity; c != 0) return c;
    return a.attribute <=> b.attribute;
  }
};

// ASTE annotation: both terms are always explicit.
struct OpinionTriple {
  Term aspect;
  SentimentPolarity sentiment = SentimentPolarity::Neutral;
  Term opinion;

  friend bool operator==(const OpinionTriple& a, const OpinionTriple& b) {
    return a.aspect == b.aspect && a.sentiment == b.sentiment && a.opinion == b.opinion;
  }
  friend std::strong_ordering operator<=>(const OpinionTriple& a, const OpinionTriple& b) {
    if (auto c = a.aspect <=> b.aspect; c != 0) return c;
    if (auto c = static_cast<int>(a.sentiment) <=> static_cast<int>(b.sentiment); c != 0) return c;
    return a.opinion <=> b.opinion;
  }
};

// ACOS annotation: aspect and opinion may each be implicit.
struct OpinionQuad {
  Term aspect;
  AspectCategory category;
  SentimentPolarity sentiment = SentimentPolarity::Neutral;
  Term opinion;

  friend bool operator==(const OpinionQuad& a, const OpinionQuad& b) {
    return a.aspect == b.aspect && a.category == b.category && a.sentiment == b.sentiment &&
           a.opinion == b.opinion;
  }
  friend std::strong_ordering operator<=>(const OpinionQuad& a, const OpinionQuad& b) {
    if (auto c = a.aspect <=> b.aspect; c != 0) return c;
    if (auto c = a.category <=> b.category; c != 0) return c;
    if (auto c = static_cast<int>(a.sentiment) <=> static_cast<int>(b.sentiment); c != 0) return c;
    return a.opinion <=> b.opinion;
  }
};

// Trim, collapse inner whitespace, lowercase. Implicit terms pass through;
// spans are preserved. Throws InvalidTerm when the surface normalizes to "".
Term canonicalize_term(const Term& t);

// Canonicalizes both terms; rejects implicit terms (ASTE has none).
OpinionTriple canonicalize(const OpinionTriple& t);

// Canonicalizes terms and lowercases the category.
OpinionQuad canonicalize(const OpinionQuad& q);

// A deduplicated set of canonical opinions for one sentence. Opinions are
// canonicalized on insert and kept in sorted order; inserting an opinion that
// is already present (canonical equality) is a no-op.
class AnnotationSet {
 public:
  AnnotationSet() = default;
  explicit AnnotationSet(Task task) : task_(task) {}

  Task task() const { return task_; }

  void insert(const OpinionTriple& t);  // UsageError unless task == ASTE
  void insert(const OpinionQuad& q);    // UsageError unless task == ACOS

  const std::vector<OpinionTriple>& triples() const { return triples_; }
  const std::vector<OpinionQuad>& quads() const { return quads_; }

  size_t size() const { return task_ == Task::ASTE ? triples_.size() : quads_.size(); }
  bool empty() const { return size() == 0; }

  bool contains(const OpinionTriple& t) const;
  bool contains(const OpinionQuad& q) const;

  friend bool operator==(const AnnotationSet& a, const AnnotationSet& b) {
    return a.task_ == b.task_ && a.triples_ == b.triples_ && a.quads_ == b.quads_;
  }

 private:
  Task task_ = Task::ASTE;
  std::vector<OpinionTriple> triples_;
  std::vector<OpinionQuad> quads_;
};

enum class ParseStatus { Ok, Repaired, Failed };

std::string to_string(ParseStatus s);
ParseStatus parse_status_from_string(std::string_view s);

// One annotator's opinions for one sentence plus provenance.
// parse_status == Failed implies annotations is empty.
struct AnnotationRecord {
  std::string sentence_id;
  std::string annotator_id;
  AnnotationSet annotations;
  std::string raw_output;
  std::string prompt_hash;  // hex SHA-256 of the rendered prompt
  ParseStatus parse_status = ParseStatus::Ok;
  std::vector<std::string> flags;  // drop reasons, fallback/novel markers
};

// Canonical JSON forms. ASTE: {"aspect", "opinion", "sentiment"}; ACOS adds
// "category" and uses null for implicit terms.
nlohmann::json opinion_to_json(const OpinionTriple& t);
nlohmann::json opinion_to_json(const OpinionQuad& q);
OpinionTriple triple_from_json(const nlohmann::json& j);  // throws ParseError
OpinionQuad quad_from_json(const nlohmann::json& j);      // throws ParseError

nlohmann::json annotation_set_to_json(const AnnotationSet& set);
AnnotationSet annotation_set_from_json(Task task, const nlohmann::json& arr);

// Compact single-line serialization of the whole set (canonical order).
std::string serialize_opinions(const AnnotationSet& set);

nlohmann::json record_to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const nlohmann::json& j);

}  // namespace opinion_forge
