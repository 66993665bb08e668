#include "opinion_forge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "opinion_forge/util.hpp"

namespace opinion_forge {

namespace {

struct ProjectionInfo {
  Projection p;
  const char* name;
  bool acos_only;
};

constexpr ProjectionInfo kProjections[] = {
    {Projection::S, "s", false},          {Projection::At, "at", false},
    {Projection::Op, "op", false},        {Projection::E, "E", true},
    {Projection::A, "A", true},           {Projection::Ac, "ac", true},
    {Projection::SAt, "s&at", false},     {Projection::SOp, "s&op", false},
    {Projection::AtOp, "at&op", false},   {Projection::SAc, "s&ac", true},
    {Projection::AtAc, "at&ac", true},    {Projection::OpAc, "op&ac", true},
    {Projection::AtSOp, "at&s&op", false}, {Projection::Joint, "joint", false},
};

const ProjectionInfo& info_for(Projection p) {
  for (const auto& info : kProjections) {
    if (info.p == p) return info;
  }
  throw UsageError("corrupt projection value");
}

std::string term_label(const Term& t) {
  return t.implicit ? std::string(kImplicitLabel) : t.surface;
}

}  // namespace

std::string to_string(Projection p) { return info_for(p).name; }

Projection projection_from_string(std::string_view s) {
  for (const auto& info : kProjections) {
    if (s == info.name) return info.p;
  }
  throw LabelError("unknown projection: " + std::string(s));
}

bool projection_valid_for(Projection p, Task task) {
  return task == Task::ACOS || !info_for(p).acos_only;
}

const std::vector<Projection>& projections_for(Task task) {
  static const std::vector<Projection> aste = [] {
    std::vector<Projection> out;
    for (const auto& info : kProjections) {
      if (!info.acos_only) out.push_back(info.p);
    }
    return out;
  }();
  static const std::vector<Projection> acos = [] {
    std::vector<Projection> out;
    for (const auto& info : kProjections) out.push_back(info.p);
    return out;
  }();
  return task == Task::ASTE ? aste : acos;
}

std::vector<std::string> project(const OpinionTriple& t, Projection p) {
  switch (p) {
    case Projection::S: return {to_string(t.sentiment)};
    case Projection::At: return {term_label(t.aspect)};
    case Projection::Op: return {term_label(t.opinion)};
    case Projection::SAt: return {to_string(t.sentiment), term_label(t.aspect)};
    case Projection::SOp: return {to_string(t.sentiment), term_label(t.opinion)};
    case Projection::AtOp: return {term_label(t.aspect), term_label(t.opinion)};
    case Projection::AtSOp:
    case Projection::Joint:
      return {term_label(t.aspect), to_string(t.sentiment), term_label(t.opinion)};
    default:
      throw UsageError("projection " + to_string(p) + " is not defined for ASTE");
  }
}

std::vector<std::string> project(const OpinionQuad& q, Projection p) {
  switch (p) {
    case Projection::S: return {to_string(q.sentiment)};
    case Projection::At: return {term_label(q.aspect)};
    case Projection::Op: return {term_label(q.opinion)};
    case Projection::E: return {q.category.entity};
    case Projection::A: return {q.category.attribute};
    case Projection::Ac: return {q.category.str()};
    case Projection::SAt: return {to_string(q.sentiment), term_label(q.aspect)};
    case Projection::SOp: return {to_string(q.sentiment), term_label(q.opinion)};
    case Projection::AtOp: return {term_label(q.aspect), term_label(q.opinion)};
    case Projection::SAc: return {to_string(q.sentiment), q.category.str()};
    case Projection::AtAc: return {term_label(q.aspect), q.category.str()};
    case Projection::OpAc: return {term_label(q.opinion), q.category.str()};
    case Projection::AtSOp:
      return {term_label(q.aspect), to_string(q.sentiment), term_label(q.opinion)};
    case Projection::Joint:
      return {term_label(q.aspect), to_string(q.sentiment), term_label(q.opinion),
              q.category.str()};
  }
  throw UsageError("corrupt projection value");
}

std::set<std::vector<std::string>> project_set(const AnnotationSet& set, Projection p) {
  if (!projection_valid_for(p, set.task())) {
    throw UsageError("projection " + to_string(p) + " invalid for " + to_string(set.task()));
  }
  std::set<std::vector<std::string>> out;
  if (set.task() == Task::ASTE) {
    for (const auto& t : set.triples()) out.insert(project(t, p));
  } else {
    for (const auto& q : set.quads()) out.insert(project(q, p));
  }
  return out;
}

PrfRow exact_match_prf(const std::map<std::string, AnnotationSet>& gold,
                       const std::map<std::string, AnnotationSet>& pred, Projection p) {
  if (gold.size() != pred.size()) {
    throw IntegrityError("gold and pred cover different sentence counts");
  }
  PrfRow row;
  auto git = gold.begin();
  auto pit = pred.begin();
  for (; git != gold.end(); ++git, ++pit) {
    if (git->first != pit->first) {
      throw IntegrityError("gold/pred sentence id mismatch at " + git->first);
    }
    auto g = project_set(git->second, p);
    auto q = project_set(pit->second, p);
    row.gold += g.size();
    row.pred += q.size();
    for (const auto& tuple : q) {
      if (g.count(tuple)) ++row.matched;
    }
  }
  row.precision = row.pred ? static_cast<double>(row.matched) / static_cast<double>(row.pred) : 0.0;
  row.recall = row.gold ? static_cast<double>(row.matched) / static_cast<double>(row.gold) : 0.0;
  row.f1 = (row.precision + row.recall) > 0.0
               ? 2.0 * row.precision * row.recall / (row.precision + row.recall)
               : 0.0;
  return row;
}

std::map<std::string, AnnotationSet> sets_by_sentence(const std::vector<AnnotationRecord>& run) {
  std::map<std::string, AnnotationSet> out;
  for (const auto& r : run) {
    if (!out.emplace(r.sentence_id, r.annotations).second) {
      throw IntegrityError("duplicate sentence_id in run: " + r.sentence_id);
    }
  }
  return out;
}

std::map<std::string, AnnotationSet> gold_by_sentence(const std::vector<DatasetEntry>& entries) {
  std::map<std::string, AnnotationSet> out;
  for (const auto& e : entries) {
    if (!out.emplace(e.sentence.id, e.gold).second) {
      throw IntegrityError("duplicate sentence_id in split: " + e.sentence.id);
    }
  }
  return out;
}

std::string to_string(AgreementElement e) {
  switch (e) {
    case AgreementElement::At: return "at";
    case AgreementElement::Op: return "op";
    case AgreementElement::AtS: return "at&s";
    case AgreementElement::OpS: return "op&s";
    case AgreementElement::Ac: return "ac";
  }
  throw LabelError("corrupt agreement element");
}

const std::vector<AgreementElement>& agreement_elements_for(Task task) {
  static const std::vector<AgreementElement> aste = {
      AgreementElement::At, AgreementElement::Op, AgreementElement::AtS, AgreementElement::OpS};
  static const std::vector<AgreementElement> acos = {
      AgreementElement::At, AgreementElement::Op, AgreementElement::Ac, AgreementElement::AtS,
      AgreementElement::OpS};
  return task == Task::ASTE ? aste : acos;
}

namespace {

std::optional<TokenSpan> span_for(const Term& t, const Sentence& s) {
  if (t.span) return t.span;
  auto want = split_ws(t.surface);
  if (want.empty() || want.size() > s.tokens.size()) return std::nullopt;
  for (size_t start = 0; start + want.size() <= s.tokens.size(); ++start) {
    bool match = true;
    for (size_t i = 0; i < want.size(); ++i) {
      if (to_lower(s.tokens[start + i]) != to_lower(want[i])) {
        match = false;
        break;
      }
    }
    if (match) return TokenSpan{start, start + want.size()};
  }
  return std::nullopt;
}

void apply_term(const Term& term, const std::string& label, const Sentence& s,
                TokenLabeling& out) {
  if (term.implicit) return;  // no tokens to label
  auto sp = span_for(term, s);
  if (!sp) {
    ++out.unlocatable;
    return;
  }
  for (size_t i = sp->start; i < sp->end && i < out.labels.size(); ++i) {
    if (out.labels[i] == "O") out.labels[i] = label;  // first annotation wins
  }
}

}  // namespace

TokenLabeling token_labels(const Sentence& s, const AnnotationSet& set,
                           AgreementElement element) {
  if (element == AgreementElement::Ac) {
    throw UsageError("ac is sentence-level; token_labels handles span elements only");
  }
  TokenLabeling out;
  out.labels.assign(s.tokens.size(), "O");
  bool aspect_side = element == AgreementElement::At || element == AgreementElement::AtS;
  bool with_sentiment = element == AgreementElement::AtS || element == AgreementElement::OpS;
  auto visit = [&](const Term& term, SentimentPolarity sentiment) {
    apply_term(term, with_sentiment ? to_string(sentiment) : std::string("I"), s, out);
  };
  if (set.task() == Task::ASTE) {
    for (const auto& t : set.triples()) visit(aspect_side ? t.aspect : t.opinion, t.sentiment);
  } else {
    for (const auto& q : set.quads()) visit(aspect_side ? q.aspect : q.opinion, q.sentiment);
  }
  return out;
}

double krippendorff_alpha(const std::vector<std::vector<std::string>>& units) {
  // Coincidence matrix o[c][k]: a unit with m labels adds 1/(m-1) per ordered
  // label pair. n_c are its row sums; alpha follows the nominal-data form.
  std::map<std::string, size_t> index;
  std::vector<std::vector<double>> o;
  auto label_id = [&](const std::string& v) {
    auto [it, fresh] = index.emplace(v, index.size());
    if (fresh) {
      for (auto& row : o) row.push_back(0.0);
      o.emplace_back(index.size(), 0.0);
    }
    return it->second;
  };
  size_t usable_units = 0;
  for (const auto& unit : units) {
    size_t m = unit.size();
    if (m < 2) continue;
    ++usable_units;
    double w = 1.0 / static_cast<double>(m - 1);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        o[label_id(unit[i])][label_id(unit[j])] += w;
      }
    }
  }
  if (usable_units == 0) {
    throw UndefinedAgreement("no unit carries two or more labels");
  }
  double n = 0.0, sum_nc_sq = 0.0, off_diag = 0.0;
  for (size_t c = 0; c < o.size(); ++c) {
    double row = 0.0;
    for (size_t k = 0; k < o.size(); ++k) {
      row += o[c][k];
      if (c != k) off_diag += o[c][k];
    }
    n += row;
    sum_nc_sq += row * row;
  }
  double denom = n * n - sum_nc_sq;
  if (denom == 0.0) return 1.0;  // single label value in the data
  return 1.0 - (n - 1.0) * off_diag / denom;
}

std::vector<AgreementRow> agreement_suite(const std::vector<std::vector<AnnotationRecord>>& runs,
                                          const std::vector<DatasetEntry>& entries,
                                          const std::vector<AgreementElement>& elements) {
  if (runs.size() < 2) throw UndefinedAgreement("agreement needs at least 2 annotator runs");
  std::vector<std::map<std::string, AnnotationSet>> by_run;
  for (const auto& run : runs) {
    auto m = sets_by_sentence(run);
    if (m.size() != entries.size()) {
      throw IntegrityError("run does not cover the split");
    }
    for (const auto& e : entries) {
      if (!m.count(e.sentence.id)) {
        throw IntegrityError("run missing sentence: " + e.sentence.id);
      }
    }
    by_run.push_back(std::move(m));
  }
  Task task = entries.empty() ? Task::ASTE : entries.front().gold.task();
  std::vector<AgreementRow> out;
  for (auto element : elements) {
    std::vector<std::vector<std::string>> units;
    if (element == AgreementElement::Ac) {
      if (task != Task::ACOS) throw UsageError("ac agreement requires ACOS");
      for (const auto& e : entries) {
        std::vector<std::string> labels;
        for (const auto& m : by_run) {
          std::vector<std::string> cats;
          for (const auto& q : m.at(e.sentence.id).quads()) cats.push_back(q.category.str());
          std::sort(cats.begin(), cats.end());
          labels.push_back(join(cats, "|"));
        }
        units.push_back(std::move(labels));
      }
    } else {
      for (const auto& e : entries) {
        std::vector<TokenLabeling> per_coder;
        per_coder.reserve(by_run.size());
        for (const auto& m : by_run) {
          per_coder.push_back(token_labels(e.sentence, m.at(e.sentence.id), element));
        }
        for (size_t tok = 0; tok < e.sentence.tokens.size(); ++tok) {
          std::vector<std::string> labels;
          labels.reserve(per_coder.size());
          for (const auto& tl : per_coder) labels.push_back(tl.labels[tok]);
          units.push_back(std::move(labels));
        }
      }
    }
    AgreementRow row;
    row.element = element;
    row.coders = runs.size();
    row.units = units.size();
    row.alpha = krippendorff_alpha(units);
    out.push_back(row);
  }
  return out;
}

namespace {
std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace

std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
  std::string out = "dataset,annotator,projection,gold,pred,matched,precision,recall,f1\n";
  for (const auto& r : rows) {
    out += r.dataset + "," + r.annotator + "," + to_string(r.projection) + "," +
           std::to_string(r.prf.gold) + "," + std::to_string(r.prf.pred) + "," +
           std::to_string(r.prf.matched) + "," + fmt6(r.prf.precision) + "," +
           fmt6(r.prf.recall) + "," + fmt6(r.prf.f1) + "\n";
  }
  return out;
}

std::string metrics_to_table(const std::vector<MetricRow>& rows) {
  size_t w_ds = 7, w_an = 9, w_pr = 10;
  for (const auto& r : rows) {
    w_ds = std::max(w_ds, r.dataset.size());
    w_an = std::max(w_an, r.annotator.size());
    w_pr = std::max(w_pr, to_string(r.projection).size());
  }
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %-*s  %-*s  %8s  %8s  %8s  %10s  %10s  %10s\n",
                static_cast<int>(w_ds), "dataset", static_cast<int>(w_an), "annotator",
                static_cast<int>(w_pr), "projection", "gold", "pred", "matched", "precision",
                "recall", "f1");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-*s  %-*s  %-*s  %8zu  %8zu  %8zu  %10.6f  %10.6f  %10.6f\n",
                  static_cast<int>(w_ds), r.dataset.c_str(), static_cast<int>(w_an),
                  r.annotator.c_str(), static_cast<int>(w_pr), to_string(r.projection).c_str(),
                  r.prf.gold, r.prf.pred, r.prf.matched, r.prf.precision, r.prf.recall, r.prf.f1);
    out << line;
  }
  return out.str();
}

std::string agreement_to_csv(const AgreementReport& report) {
  std::string out = "dataset,element,coders,units,alpha\n";
  for (const auto& r : report.rows) {
    out += report.dataset + "," + to_string(r.element) + "," + std::to_string(report.coders) +
           "," + std::to_string(r.units) + "," + fmt6(r.alpha) + "\n";
  }
  return out;
}

std::string agreement_to_table(const AgreementReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s  %-8s  %6s  %8s  %10s\n", "dataset", "element",
                "coders", "units", "alpha");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-10s  %-8s  %6zu  %8zu  %10.6f\n",
                  report.dataset.c_str(), to_string(r.element).c_str(), report.coders, r.units,
                  r.alpha);
    out << line;
  }
  return out.str();
}

}  // namespace opinion_forge
