#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "attrpref/errors.hpp"

namespace attrpref {

inline constexpr int kDefaultLevelCount = 5;

enum class AttributeCategory { sociolinguistic_norm, schwartz_value };

// One of the 19 modeled attribute dimensions (9 sociolinguistic norms plus
// 10 Schwartz values).
struct AttributeSpec {
    std::string name;         // canonical lowercase, e.g. "verbosity"
    std::string description;  // prompt-ready definition
    AttributeCategory category = AttributeCategory::sociolinguistic_norm;
    int level_count = kDefaultLevelCount;
};

const std::vector<AttributeSpec>& all_attributes();
std::vector<std::string> sociolinguistic_norm_names();
std::vector<std::string> schwartz_value_names();

// Case-insensitive lookup; throws InputError for unknown names.
const AttributeSpec& find_attribute(const std::string& name);

enum class SynthesisBackend { rule_based, external_llm };

// Two variants of one base text that differ only in one attribute's
// intensity level, with level_lo < level_hi.
struct CounterfactualPair {
    std::string attribute;
    std::string base_id;
    int level_lo = 0;
    int level_hi = 0;
    std::string text_lo;
    std::string text_hi;
    SynthesisBackend backend = SynthesisBackend::rule_based;
};

// ---------------------------------------------------------------------------
// Rule-based backend: deterministic graded transforms. Exact level ordering
// by construction, which is exactly the training signal the distillation
// loss needs.

// Attributes with a registered rule transform.
const std::vector<std::string>& rule_backend_attributes();
bool rule_backend_supports(const std::string& attribute);

// Applies the attribute's transform at the given level (1..level_count).
// Deterministic in (base, attribute, level, seed); the seed only rotates
// which lexicon entries are used, never the level semantics.
std::string synthesize_rule_based(const std::string& base, const AttributeSpec& attribute,
                                  int level, std::uint64_t seed);

// Marker lexicon for an attribute (the phrases its transforms insert). For
// attributes without a rule transform this is a generic phrase family used
// by the synthetic-domain generator.
const std::vector<std::string>& attribute_markers(const std::string& attribute);

// Counts word-boundary occurrences of any of the phrases (case-insensitive).
int count_markers(const std::string& text, const std::vector<std::string>& phrases);

// Level-graded fragment for any of the 19 attributes; used by the
// synthetic-domain generator to realize planted intensities. Falls back to
// marker-phrase insertion when no rule transform exists.
std::string realize_attribute_level(const std::string& base, const AttributeSpec& attribute,
                                    int level, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pair assembly

struct LevelVariant {
    std::string base_id;
    std::string attribute;
    int level = 0;
    std::string text;
    SynthesisBackend backend = SynthesisBackend::rule_based;
};

// All C(k,2) pairs per (base_id, attribute) group, level_lo < level_hi,
// output ordered by (base_id, attribute, level_lo, level_hi). Duplicate
// (base_id, attribute, level) or identical texts within a pair are input
// errors.
std::vector<CounterfactualPair> assemble_pairs(std::vector<LevelVariant> variants);

// JSONL I/O for counterfactual pairs. Writers emit a header line with the
// format version and generator seed.
void write_pairs_jsonl(const std::string& path, const std::vector<CounterfactualPair>& pairs,
                       std::uint64_t seed);
std::vector<CounterfactualPair> read_pairs_jsonl(const std::string& path);

// ---------------------------------------------------------------------------
// External teacher backend (JSON-over-HTTP chat completion)

struct TeacherConfig {
    std::string endpoint;      // e.g. "http://host:port"
    std::string path = "/v1/chat/completions";
    std::string model;
    double temperature = 0.7;
    int max_tokens = 512;
    std::string api_key_env = "TEACHER_API_KEY";
    int max_retries = 3;
    int backoff_initial_ms = 250;
    double backoff_factor = 2.0;
    int max_in_flight = 4;
    int timeout_seconds = 30;
};

// Transport abstraction; complete() performs one attempt and throws
// TransportError on failure.
class TeacherClient {
public:
    virtual ~TeacherClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

std::unique_ptr<TeacherClient> make_http_teacher_client(const TeacherConfig& config);

// Serialized JSONL audit sink; every request, response and rejection is
// recorded. Entries carry no wall-clock so audit files are reproducible
// under mock transports.
class AuditLog {
public:
    AuditLog() = default;
    explicit AuditLog(std::string path) : path_(std::move(path)) {}
    void append(const std::string& json_line);
    const std::vector<std::string>& entries() const { return entries_; }
    void flush() const;

private:
    std::string path_;
    std::vector<std::string> entries_;
    mutable std::mutex mu_;
};

// Prompt template: UTF-8 text, leading '#' lines are header comments,
// placeholders {base}, {attribute_description}, {level}, {level_rubric},
// {level_count}.
std::string load_prompt_template(const std::string& path);
std::string render_prompt(const std::string& tpl, const AttributeSpec& attribute,
                          const std::string& base, int level);

// One completion per requested level. Transport failures retry with
// exponential backoff; validation failures become rejected-sample audit
// records instead of errors, so a bad sample never blocks the pipeline.
// Requests run with at most config.max_in_flight in flight.
std::vector<std::pair<int, std::string>> synthesize_external(
    const std::string& base_id, const std::string& base, const AttributeSpec& attribute,
    const std::vector<int>& levels, TeacherClient& client, const TeacherConfig& config,
    const std::string& prompt_template, AuditLog* audit);

}  // namespace attrpref
