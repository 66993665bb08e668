#include "opinion_forge/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include "opinion_forge/util.hpp"

namespace opinion_forge {

namespace {

// Minimal recursive-descent reader for the ASTE triple list literal,
// e.g. [([1,2], [0], 'POS'), ([5], [4], 'NEG')].
class TripleListReader {
 public:
  explicit TripleListReader(std::string_view text) : text_(text) {}

  std::vector<std::tuple<std::vector<size_t>, std::vector<size_t>, std::string>> read() {
    std::vector<std::tuple<std::vector<size_t>, std::vector<size_t>, std::string>> out;
    skip_ws();
    expect('[');
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      finish();
      return out;
    }
    while (true) {
      out.push_back(read_triple());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      expect(']');
      break;
    }
    finish();
    return out;
  }

 private:
  std::tuple<std::vector<size_t>, std::vector<size_t>, std::string> read_triple() {
    expect('(');
    skip_ws();
    auto a = read_index_list();
    skip_ws();
    expect(',');
    skip_ws();
    auto o = read_index_list();
    skip_ws();
    expect(',');
    skip_ws();
    auto tag = read_quoted();
    skip_ws();
    expect(')');
    return {std::move(a), std::move(o), std::move(tag)};
  }

  std::vector<size_t> read_index_list() {
    expect('[');
    std::vector<size_t> idx;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return idx;
    }
    while (true) {
      idx.push_back(read_uint());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      expect(']');
      break;
    }
    return idx;
  }

  size_t read_uint() {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      throw ParseError("expected index at offset " + std::to_string(pos_));
    }
    size_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<size_t>(text_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  std::string read_quoted() {
    char quote = peek();
    if (quote != '\'' && quote != '"') {
      throw ParseError("expected quoted tag at offset " + std::to_string(pos_));
    }
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) out.push_back(text_[pos_++]);
    expect(quote);
    return out;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "' at offset " + std::to_string(pos_));
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError("trailing characters after triple list at offset " + std::to_string(pos_));
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
};

SentimentPolarity tag_to_polarity(const std::string& tag) {
  if (tag == "POS") return SentimentPolarity::Positive;
  if (tag == "NEG") return SentimentPolarity::Negative;
  if (tag == "NEU") return SentimentPolarity::Neutral;
  throw LabelError("unknown polarity tag: " + tag);
}

std::string tag_from_polarity(SentimentPolarity s) {
  switch (s) {
    case SentimentPolarity::Positive: return "POS";
    case SentimentPolarity::Negative: return "NEG";
    case SentimentPolarity::Neutral: return "NEU";
  }
  throw LabelError("corrupt polarity value");
}

// Validates contiguity/range and rebuilds the surface from the tokens.
Term term_from_indices(const std::vector<size_t>& idx, const Sentence& s) {
  if (idx.empty()) throw SpanError("empty index list in " + s.id);
  for (size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] != idx[i - 1] + 1) {
      throw SpanError("non-contiguous token indices in " + s.id);
    }
  }
  if (idx.back() >= s.tokens.size()) {
    throw SpanError("token index out of range in " + s.id);
  }
  TokenSpan span{idx.front(), idx.back() + 1};
  std::vector<std::string> parts(s.tokens.begin() + static_cast<ptrdiff_t>(span.start),
                                 s.tokens.begin() + static_cast<ptrdiff_t>(span.end));
  return Term::Explicit(join(parts, " "), span);
}

std::pair<long, long> parse_span_field(const std::string& field, const std::string& id) {
  auto comma = field.find(',');
  if (comma == std::string::npos) throw ParseError("bad span field '" + field + "' in " + id);
  try {
    size_t pos1 = 0, pos2 = 0;
    long start = std::stol(field.substr(0, comma), &pos1);
    long end = std::stol(field.substr(comma + 1), &pos2);
    if (pos1 != comma || pos2 != field.size() - comma - 1) {
      throw ParseError("bad span field '" + field + "' in " + id);
    }
    return {start, end};
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad span field '" + field + "' in " + id);
  }
}

Term term_from_acos_span(long start, long end, const Sentence& s) {
  if (start == -1 && end == -1) return Term::Implicit();
  if (start < 0 || end <= start || static_cast<size_t>(end) > s.tokens.size()) {
    throw SpanError("span out of range in " + s.id);
  }
  TokenSpan span{static_cast<size_t>(start), static_cast<size_t>(end)};
  std::vector<std::string> parts(s.tokens.begin() + start, s.tokens.begin() + end);
  return Term::Explicit(join(parts, " "), span);
}

// First case-insensitive contiguous token match of a canonical surface.
std::optional<TokenSpan> locate_surface(const std::vector<std::string>& tokens,
                                        const std::string& surface) {
  auto want = split_ws(surface);
  if (want.empty() || want.size() > tokens.size()) return std::nullopt;
  for (size_t start = 0; start + want.size() <= tokens.size(); ++start) {
    bool match = true;
    for (size_t i = 0; i < want.size(); ++i) {
      if (to_lower(tokens[start + i]) != to_lower(want[i])) {
        match = false;
        break;
      }
    }
    if (match) return TokenSpan{start, start + want.size()};
  }
  return std::nullopt;
}

TokenSpan require_span(const Term& t, const Sentence& s) {
  if (t.span) return *t.span;
  auto found = locate_surface(s.tokens, t.surface);
  if (!found) throw SpanError("term '" + t.surface + "' not locatable in " + s.id);
  return *found;
}

std::string span_field(const Term& t, const Sentence& s) {
  if (t.implicit) return "-1,-1";
  auto sp = require_span(t, s);
  return std::to_string(sp.start) + "," + std::to_string(sp.end);
}

}  // namespace

std::pair<Sentence, AnnotationSet> parse_aste_line(const std::string& line,
                                                   const std::string& id) {
  const std::string sep = "####";
  auto first = line.find(sep);
  if (first == std::string::npos) throw ParseError("missing #### separator in " + id);
  if (line.find(sep, first + sep.size()) != std::string::npos) {
    throw ParseError("more than one #### separator in " + id);
  }
  Sentence sentence = Sentence::from_text(id, line.substr(0, first));
  AnnotationSet gold(Task::ASTE);
  TripleListReader reader(std::string_view(line).substr(first + sep.size()));
  for (auto& [a_idx, o_idx, tag] : reader.read()) {
    OpinionTriple t;
    t.aspect = term_from_indices(a_idx, sentence);
    t.opinion = term_from_indices(o_idx, sentence);
    t.sentiment = tag_to_polarity(tag);
    gold.insert(t);
  }
  return {std::move(sentence), std::move(gold)};
}

std::pair<Sentence, AnnotationSet> parse_acos_line(const std::string& line,
                                                   const std::string& id) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (fields.size() < 2) throw ParseError("expected sentence and at least one quad in " + id);
  Sentence sentence = Sentence::from_text(id, fields[0]);
  AnnotationSet gold(Task::ACOS);
  for (size_t i = 1; i < fields.size(); ++i) {
    auto parts = split_ws(fields[i]);
    if (parts.size() != 4) {
      throw ParseError("quad field " + std::to_string(i) + " has " +
                       std::to_string(parts.size()) + " parts (want 4) in " + id);
    }
    auto [a_start, a_end] = parse_span_field(parts[0], id);
    auto [o_start, o_end] = parse_span_field(parts[3], id);
    if (parts[2].size() != 1 || parts[2][0] < '0' || parts[2][0] > '2') {
      throw LabelError("polarity outside {0,1,2} in " + id + ": " + parts[2]);
    }
    static const SentimentPolarity by_digit[3] = {SentimentPolarity::Negative,
                                                  SentimentPolarity::Neutral,
                                                  SentimentPolarity::Positive};
    OpinionQuad q;
    q.aspect = term_from_acos_span(a_start, a_end, sentence);
    q.opinion = term_from_acos_span(o_start, o_end, sentence);
    q.sentiment = by_digit[parts[2][0] - '0'];
    q.category = AspectCategory::parse(parts[1]);
    gold.insert(q);
  }
  return {std::move(sentence), std::move(gold)};
}

std::string format_aste_line(const Sentence& s, const AnnotationSet& gold) {
  if (gold.task() != Task::ASTE) throw UsageError("format_aste_line needs an ASTE set");
  std::ostringstream out;
  out << s.text << "####[";
  bool first = true;
  for (const auto& t : gold.triples()) {
    if (!first) out << ", ";
    first = false;
    auto emit_indices = [&](const TokenSpan& sp) {
      out << '[';
      for (size_t i = sp.start; i < sp.end; ++i) {
        if (i != sp.start) out << ',';
        out << i;
      }
      out << ']';
    };
    out << '(';
    emit_indices(require_span(t.aspect, s));
    out << ", ";
    emit_indices(require_span(t.opinion, s));
    out << ", '" << tag_from_polarity(t.sentiment) << "')";
  }
  out << ']';
  return out.str();
}

std::string format_acos_line(const Sentence& s, const AnnotationSet& gold) {
  if (gold.task() != Task::ACOS) throw UsageError("format_acos_line needs an ACOS set");
  if (gold.empty()) throw UsageError("the ACOS line format cannot carry an empty gold set");
  std::ostringstream out;
  out << s.text;
  for (const auto& q : gold.quads()) {
    out << '\t' << span_field(q.aspect, s) << ' ' << q.category.str() << ' ';
    switch (q.sentiment) {
      case SentimentPolarity::Negative: out << '0'; break;
      case SentimentPolarity::Neutral: out << '1'; break;
      case SentimentPolarity::Positive: out << '2'; break;
    }
    out << ' ' << span_field(q.opinion, s);
  }
  return out.str();
}

DatasetSplit load_split(const std::filesystem::path& path, Task task, const std::string& name,
                        const std::string& domain) {
  std::string content = read_file(path);
  DatasetSplit split{name, task, domain, {}};
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && pos >= content.size()) break;  // trailing newline
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "%s-%06zu", name.c_str(), line_no);
    try {
      auto [sentence, gold] = task == Task::ASTE ? parse_aste_line(line, id_buf)
                                                 : parse_acos_line(line, id_buf);
      split.entries.push_back({std::move(sentence), std::move(gold)});
    } catch (const Error& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  return split;
}

DevPartition partition_dev(const std::vector<DatasetEntry>& dev, uint64_t seed) {
  if (dev.size() < 2) throw TooSmall("dev split needs at least 2 entries to partition");
  std::vector<size_t> order(dev.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Hand-rolled Fisher-Yates: mt19937_64's output sequence is pinned by the
  // standard, std::shuffle's use of it is not.
  std::mt19937_64 rng(seed);
  for (size_t i = order.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  DevPartition part;
  part.seed = seed;
  size_t pool_size = dev.size() / 2;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < pool_size ? part.icl_pool : part.eval_half).push_back(dev[order[i]]);
  }
  return part;
}

void write_run(const std::vector<AnnotationRecord>& records, const std::filesystem::path& path) {
  if (!records.empty()) {
    const std::string& annotator = records.front().annotator_id;
    Task task = records.front().annotations.task();
    for (const auto& r : records) {
      if (r.annotator_id != annotator || r.annotations.task() != task) {
        throw IntegrityError("run records must share one annotator and task");
      }
    }
  }
  std::vector<const AnnotationRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->sentence_id < b->sentence_id; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->sentence_id == sorted[i - 1]->sentence_id) {
      throw IntegrityError("duplicate sentence_id in run: " + sorted[i]->sentence_id);
    }
  }
  std::string out;
  for (const auto* r : sorted) {
    out += record_to_json(*r).dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<AnnotationRecord> read_run(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<AnnotationRecord> records;
  size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    } catch (const Error& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.sentence_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw IntegrityError("duplicate sentence_id in " + path.string());
  }
  return records;
}

}  // namespace opinion_forge
