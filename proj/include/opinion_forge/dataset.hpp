#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "opinion_forge/core.hpp"

namespace opinion_forge {

struct DatasetEntry {
  Sentence sentence;
  AnnotationSet gold;
};

struct DatasetSplit {
  std::string name;    // train | dev | test
  Task task = Task::ASTE;
  std::string domain;  // lap14, res14, restaurant, ...
  std::vector<DatasetEntry> entries;
};

// One ASTE line: "<text>####[([a_idx...], [o_idx...], 'TAG'), ...]" with TAG
// in {POS, NEG, NEU}. Index lists are contiguous ascending token indices;
// surfaces are reconstructed from the tokens and carry their spans.
// Errors: ParseError (structure), SpanError (indices), LabelError (tag).
std::pair<Sentence, AnnotationSet> parse_aste_line(const std::string& line, const std::string& id);

// One ACOS line: "<text>\t<quad>\t<quad>..." where a quad is
// "A_SPAN CATEGORY POLARITY O_SPAN", spans "start,end" (end exclusive) with
// "-1,-1" meaning implicit, polarity 0/1/2 -> negative/neutral/positive.
std::pair<Sentence, AnnotationSet> parse_acos_line(const std::string& line, const std::string& id);

// Inverse of the parsers, for fixture generation and round-trip checks.
// Terms without spans are located in the sentence (first case-insensitive
// token-subsequence match); unlocatable explicit terms raise SpanError.
std::string format_aste_line(const Sentence& s, const AnnotationSet& gold);
std::string format_acos_line(const Sentence& s, const AnnotationSet& gold);  // needs >= 1 quad

// Loads a whole split file. Sentence ids are "<name>-NNNNNN" (1-based line
// numbers); blank lines are rejected as malformed. Parse errors are rethrown
// with the file path and line number attached.
DatasetSplit load_split(const std::filesystem::path& path, Task task, const std::string& name,
                        const std::string& domain);

// Dev-half partition: icl_pool feeds demonstrations, eval_half scores prompts.
struct DevPartition {
  std::vector<DatasetEntry> icl_pool;
  std::vector<DatasetEntry> eval_half;
  uint64_t seed = 0;
};

// Seeded Fisher-Yates shuffle, then floor(n/2) entries to the pool and
// ceil(n/2) to the eval half. Same seed, same partition. |dev| < 2 -> TooSmall.
DevPartition partition_dev(const std::vector<DatasetEntry>& dev, uint64_t seed);

// Run files: one JSON record per line, UTF-8, sorted by sentence_id, written
// atomically. Records must share one task and annotator_id; duplicate
// sentence ids raise IntegrityError.
void write_run(const std::vector<AnnotationRecord>& records, const std::filesystem::path& path);
std::vector<AnnotationRecord> read_run(const std::filesystem::path& path);

}  // namespace opinion_forge
