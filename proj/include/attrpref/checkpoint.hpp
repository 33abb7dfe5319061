#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "attrpref/params.hpp"

namespace attrpref {

// Flat checkpoint container: 4-byte magic, u64-LE header length, JSON header
// {format_version, kind, meta, params:[{name, shape, offset}]}, then the
// little-endian f64 payload. Offsets are byte offsets into the payload.
// The same container carries bare checkpoints, attribute-predictor bundles
// and preference-model bundles (distinguished by `kind` + `meta`).
struct CheckpointFile {
    int format_version = 1;
    std::string kind;
    nlohmann::json meta;
    ParamSet params;
};

std::vector<std::byte> serialize_checkpoint(const ParamSet& params,
                                            const std::string& kind,
                                            const nlohmann::json& meta);

void save_checkpoint(const std::string& path, const ParamSet& params,
                     const std::string& kind, const nlohmann::json& meta);

CheckpointFile parse_checkpoint(const std::vector<std::byte>& bytes,
                                const std::string& origin);

CheckpointFile load_checkpoint(const std::string& path);

}  // namespace attrpref
