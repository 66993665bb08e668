#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "opinion_forge/core.hpp"
#include "opinion_forge/dataset.hpp"

namespace opinion_forge {

// Which elements of an opinion take part in the match. E/A/ac and the &ac
// combinations only exist for ACOS; joint is the full triple or quad.
enum class Projection {
  S,
  At,
  Op,
  E,
  A,
  Ac,
  SAt,
  SOp,
  AtOp,
  SAc,
  AtAc,
  OpAc,
  AtSOp,
  Joint,
};

std::string to_string(Projection p);
Projection projection_from_string(std::string_view s);  // throws LabelError
bool projection_valid_for(Projection p, Task task);
const std::vector<Projection>& projections_for(Task task);

// Implicit terms project to this sentinel.
inline constexpr const char* kImplicitLabel = "\xe2\x8a\xa5";  // UTF-8 up tack

// Ordered tuple of the canonical field values named by the projection.
// Invalid projection/task pairs raise UsageError.
std::vector<std::string> project(const OpinionTriple& t, Projection p);
std::vector<std::string> project(const OpinionQuad& q, Projection p);

// The set's opinions projected into a set of tuples (duplicates collapse).
std::set<std::vector<std::string>> project_set(const AnnotationSet& set, Projection p);

struct PrfRow {
  size_t gold = 0;
  size_t pred = 0;
  size_t matched = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged exact match over one projection. Both maps must cover the
// same sentence ids (IntegrityError otherwise). Empty denominators yield 0.
PrfRow exact_match_prf(const std::map<std::string, AnnotationSet>& gold,
                       const std::map<std::string, AnnotationSet>& pred, Projection p);

std::map<std::string, AnnotationSet> sets_by_sentence(const std::vector<AnnotationRecord>& run);
std::map<std::string, AnnotationSet> gold_by_sentence(const std::vector<DatasetEntry>& entries);

// Elements that agreement is computed over. At/Op/AtS/OpS are token-level;
// Ac (ACOS) is sentence-level.
enum class AgreementElement { At, Op, AtS, OpS, Ac };

std::string to_string(AgreementElement e);
const std::vector<AgreementElement>& agreement_elements_for(Task task);

struct TokenLabeling {
  std::vector<std::string> labels;  // one per sentence token
  size_t unlocatable = 0;           // explicit terms with no token match
};

// Per-token nominal labels for one annotation set. At/Op yield "I"/"O";
// AtS/OpS yield the covering span's sentiment (canonical set order wins on
// conflicts). Implicit terms label nothing; explicit terms without a stored
// span are located by first case-insensitive token-subsequence match, and
// count as unlocatable when absent.
TokenLabeling token_labels(const Sentence& s, const AnnotationSet& set, AgreementElement element);

// Krippendorff's nominal alpha from per-unit label lists (one label per
// coder; coder identity itself does not enter the statistic). Units with
// fewer than two labels are excluded; if none remain, UndefinedAgreement.
// When only one label value occurs at all, alpha is 1 by convention.
double krippendorff_alpha(const std::vector<std::vector<std::string>>& units);

struct AgreementRow {
  AgreementElement element;
  double alpha = 0.0;
  size_t units = 0;   // units contributing (>= 2 labels)
  size_t coders = 0;  // number of annotator runs
};

// Pre-adjudication inter-annotator agreement across k >= 2 runs covering the
// split. Token-level elements use (sentence, token) units; Ac uses sentence
// units labelled with the sorted multiset of category strings.
std::vector<AgreementRow> agreement_suite(const std::vector<std::vector<AnnotationRecord>>& runs,
                                          const std::vector<DatasetEntry>& entries,
                                          const std::vector<AgreementElement>& elements);

// Report rows and their CSV / aligned-table renderings.
struct MetricRow {
  std::string dataset;
  std::string annotator;
  Projection projection = Projection::Joint;
  PrfRow prf;
};

std::string metrics_to_csv(const std::vector<MetricRow>& rows);
std::string metrics_to_table(const std::vector<MetricRow>& rows);

struct AgreementReport {
  std::string dataset;
  size_t coders = 0;
  std::vector<AgreementRow> rows;
};

std::string agreement_to_csv(const AgreementReport& report);
std::string agreement_to_table(const AgreementReport& report);

}  // namespace opinion_forge
