#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "opinion_forge/core.hpp"
#include "opinion_forge/dataset.hpp"
#include "opinion_forge/gateway.hpp"

namespace opinion_forge {

struct FieldSpec {
  std::string name;
  std::string description;
};

// A declarative prompt program: instruction, described input/output schema,
// and k in-context demonstrations. Rendering is pure and byte-stable.
struct PromptProgram {
  Task task = Task::ASTE;
  std::string instruction;
  std::vector<FieldSpec> input_fields;
  std::string output_schema;
  std::vector<DatasetEntry> demos;
  size_t k = 0;  // must equal demos.size()
};

// Task-specific program with the stock instruction and schema, no demos.
PromptProgram make_default_program(Task task);

// The stock instruction text (also shipped under prompts/).
std::string default_instruction(Task task);
std::string default_adjudication_instruction();

// Fixed output-format contract appended to every system message.
std::string output_contract(Task task);

// Deterministic seeded sample without replacement. Samples under the same
// seed are prefix-stable: the k=5 sample is the first five entries of the
// k=10 sample. k > |pool| raises InsufficientPool.
std::vector<DatasetEntry> sample_demos(const std::vector<DatasetEntry>& pool, size_t k,
                                       uint64_t seed);

struct RenderedPrompt {
  MessageList messages;
  std::string prompt_hash;  // hex SHA-256 of the rendered bytes
};

// [system: instruction + schema + contract], k x (user: demo text,
// assistant: fenced gold JSON), [user: target text].
RenderedPrompt render_prompt(const PromptProgram& program, const Sentence& target);

// Hash of everything but the target sentence; identifies the program itself.
std::string program_hash(const PromptProgram& program);

// Serialized gold as an annotator is expected to answer.
std::string fenced_opinions(const AnnotationSet& set);

// Raises IntegrityError when a demo id appears in the forbidden id set
// (eval-half or test-split leakage).
void assert_no_demo_leak(const std::vector<DatasetEntry>& demos,
                         const std::vector<std::string>& forbidden_ids);

struct IclSelectionReport {
  std::string annotator_id;
  std::vector<std::pair<size_t, double>> per_k_f1;  // ascending k
  size_t chosen_k = 0;
};

// Argmax F1 with ties broken toward the smaller k.
size_t pick_chosen_k(const std::vector<std::pair<size_t, double>>& per_k_f1);

// Runs one candidate program over the eval half and returns its records.
using ProgramRunner = std::function<std::vector<AnnotationRecord>(
    const PromptProgram& program, const std::vector<DatasetEntry>& eval_half)>;

struct IclSelection {
  IclSelectionReport report;
  std::map<size_t, std::vector<AnnotationRecord>> runs_by_k;
  std::map<size_t, std::vector<std::string>> demo_ids_by_k;
};

// Evaluates each k on the eval half with joint exact-match micro F1 and picks
// the winner. SelectionError when every run failed to parse throughout.
IclSelection select_icl_count(const std::string& annotator_id, const PromptProgram& base,
                              const DevPartition& partition, const ProgramRunner& run,
                              const std::vector<size_t>& ks = {5, 10, 15}, uint64_t seed = 0);

}  // namespace opinion_forge
