#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "attrpref/params.hpp"
#include "attrpref/rng.hpp"
#include "attrpref/tape.hpp"
#include "attrpref/tensor.hpp"

namespace attrpref {

// Hashed-n-gram text encoder. Stands in for a pretrained LM: maps a text (or
// an instruction-response pair) to a fixed-dimension hidden vector through a
// trainable projection of hashed token n-gram counts.
struct EncoderConfig {
    int hidden_dim = 128;
    std::set<int> ngram_orders = {1, 2, 3};
    std::size_t hash_buckets = std::size_t{1} << 18;
    bool lowercase = true;

    void validate() const {
        if (hidden_dim < 8) throw ConfigError("hidden_dim must be >= 8");
        if (hash_buckets < static_cast<std::size_t>(hidden_dim)) {
            throw ConfigError("hash_buckets must be >= hidden_dim");
        }
        if (ngram_orders.empty()) throw ConfigError("ngram_orders must be nonempty");
        for (int k : ngram_orders) {
            if (k < 1) throw ConfigError("ngram orders must be >= 1");
        }
    }

    bool operator==(const EncoderConfig&) const = default;
};

enum class SourceRole { content_pair, attribute_predictor };

struct HiddenState {
    TensorValue vector;
    SourceRole source_role = SourceRole::content_pair;
};

// Lowercases (per config) and splits into tokens of [a-z0-9'] runs.
std::vector<std::string> tokenize(std::string_view text, const EncoderConfig& config);

// Hashed token n-gram counts, L2-normalized, entries sorted by bucket.
// Throws InputError when the text has no tokens after normalization.
SparseVec featurize(std::string_view text, const EncoderConfig& config);

// Features of x (+) SEP (+) y. The separator is a reserved token the
// tokenizer can never produce, so the pair encoding is injective over the
// (x, y) boundary. x may be empty (attribute predictors encode y alone).
SparseVec featurize_pair(std::string_view x, std::string_view y,
                         const EncoderConfig& config);

// Encoder parameters: projection "<prefix>E" [d, buckets] and bias
// "<prefix>b" [d]. Gaussian init scaled for unit-norm sparse inputs.
void init_encoder_params(ParamSet& params, const EncoderConfig& config,
                         SplitRng rng, const std::string& prefix = "");

// h = tanh(E phi + b) with gradient flow to E and b.
Var encode_on_tape(Tape& tape, Var e, Var b, const SparseVec& phi);

// Evaluation path without a tape (used for frozen predictors and inference).
TensorValue encode_eval(const ParamSet& params, const EncoderConfig& config,
                        const SparseVec& phi, const std::string& prefix = "");

// Full contract: encode an (x, y) pair with the given parameter set.
HiddenState encode(std::string_view x, std::string_view y, const ParamSet& params,
                   const EncoderConfig& config, SourceRole role,
                   const std::string& prefix = "");

}  // namespace attrpref
