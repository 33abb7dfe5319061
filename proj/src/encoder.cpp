#include "attrpref/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace attrpref {

namespace {

// Reserved pair separator; tokenize() only emits [a-z0-9']+ runs so this can
// never collide with a real token.
const std::string kSepToken = "\x1e<sep>\x1e";

bool is_token_char(unsigned char c) {
    return std::isalnum(c) != 0 || c == '\'';
}

std::uint32_t bucket_of(const std::string& gram, std::size_t buckets) {
    return static_cast<std::uint32_t>(SplitRng::fnv1a(gram) % buckets);
}

SparseVec features_from_tokens(const std::vector<std::string>& tokens,
                               const EncoderConfig& config) {
    std::unordered_map<std::uint32_t, double> counts;
    std::string gram;
    for (int order : config.ngram_orders) {
        const std::size_t k = static_cast<std::size_t>(order);
        if (tokens.size() < k) continue;
        for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
            gram.clear();
            gram += std::to_string(order);
            for (std::size_t j = 0; j < k; ++j) {
                gram += '\x1f';
                gram += tokens[i + j];
            }
            counts[bucket_of(gram, config.hash_buckets)] += 1.0;
        }
    }

    SparseVec out;
    out.entries.assign(counts.begin(), counts.end());
    std::sort(out.entries.begin(), out.entries.end());
    double norm = 0.0;
    for (const auto& [idx, w] : out.entries) norm += w * w;
    norm = std::sqrt(norm);
    for (auto& [idx, w] : out.entries) w /= norm;
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const EncoderConfig& config) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_token_char(c)) {
            current.push_back(config.lowercase
                                  ? static_cast<char>(std::tolower(c))
                                  : static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

SparseVec featurize(std::string_view text, const EncoderConfig& config) {
    config.validate();
    const std::vector<std::string> tokens = tokenize(text, config);
    if (tokens.empty()) {
        throw InputError("featurize: text is empty after normalization");
    }
    return features_from_tokens(tokens, config);
}

SparseVec featurize_pair(std::string_view x, std::string_view y,
                         const EncoderConfig& config) {
    config.validate();
    std::vector<std::string> tokens = tokenize(x, config);
    tokens.push_back(kSepToken);
    std::vector<std::string> ytokens = tokenize(y, config);
    if (ytokens.empty()) {
        throw InputError("featurize_pair: response is empty after normalization");
    }
    tokens.insert(tokens.end(), std::make_move_iterator(ytokens.begin()),
                  std::make_move_iterator(ytokens.end()));
    return features_from_tokens(tokens, config);
}

void init_encoder_params(ParamSet& params, const EncoderConfig& config,
                         SplitRng rng, const std::string& prefix) {
    config.validate();
    const std::size_t d = static_cast<std::size_t>(config.hidden_dim);
    TensorValue proj({d, config.hash_buckets});
    SplitRng proj_rng = rng.stream("encoder_proj");
    // ||phi|| = 1, so row dot phi has stddev ~= row entry scale; 0.5 keeps
    // tanh in its active region at init.
    for (std::size_t i = 0; i < proj.size(); ++i) {
        proj[i] = 0.5 * proj_rng.next_gaussian();
    }
    params.emplace(prefix + "E", std::move(proj));
    params.emplace(prefix + "b", TensorValue({d}));
}

Var encode_on_tape(Tape& tape, Var e, Var b, const SparseVec& phi) {
    return tape.tanh(tape.add(tape.sparse_matvec(e, phi), b));
}

TensorValue encode_eval(const ParamSet& params, const EncoderConfig& config,
                        const SparseVec& phi, const std::string& prefix) {
    const TensorValue& proj = params.at(prefix + "E");
    const TensorValue& bias = params.at(prefix + "b");
    const std::size_t d = static_cast<std::size_t>(config.hidden_dim);
    if (proj.rank() != 2 || proj.dim(0) != d || proj.dim(1) != config.hash_buckets ||
        bias.size() != d) {
        throw ConfigError("encoder parameters do not match the encoder config");
    }
    TensorValue out({d});
    for (const auto& [j, w] : phi.entries) {
        for (std::size_t i = 0; i < d; ++i) {
            out[i] += proj.data()[i * config.hash_buckets + j] * w;
        }
    }
    for (std::size_t i = 0; i < d; ++i) out[i] = std::tanh(out[i] + bias[i]);
    out.check_finite("encoder output");
    return out;
}

HiddenState encode(std::string_view x, std::string_view y, const ParamSet& params,
                   const EncoderConfig& config, SourceRole role,
                   const std::string& prefix) {
    const SparseVec phi = featurize_pair(x, y, config);
    return HiddenState{encode_eval(params, config, phi, prefix), role};
}

}  // namespace attrpref
