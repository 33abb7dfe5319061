#include "attrpref/checkpoint.hpp"

#include <cstdint>
#include <cstring>

#include "attrpref/digest.hpp"
#include "attrpref/errors.hpp"

namespace attrpref {

namespace {

constexpr char kMagic[4] = {'A', 'P', 'C', 'K'};

void put_u64_le(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
    }
}

std::uint64_t get_u64_le(const std::byte* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(p[i])) << (8 * i);
    }
    return v;
}

void put_f64_le(std::vector<std::byte>& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    put_u64_le(out, bits);
}

double get_f64_le(const std::byte* p) {
    const std::uint64_t bits = get_u64_le(p);
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
}

}  // namespace

std::vector<std::byte> serialize_checkpoint(const ParamSet& params,
                                            const std::string& kind,
                                            const nlohmann::json& meta) {
    nlohmann::json header;
    header["format_version"] = 1;
    header["kind"] = kind;
    header["meta"] = meta;
    nlohmann::json manifest = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, p] : params) {
        nlohmann::json entry;
        entry["name"] = name;
        entry["shape"] = p.shape();
        entry["offset"] = offset;
        manifest.push_back(std::move(entry));
        offset += 8 * p.size();
    }
    header["params"] = std::move(manifest);
    const std::string header_str = header.dump();

    std::vector<std::byte> out;
    out.reserve(4 + 8 + header_str.size() + offset);
    for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
    put_u64_le(out, header_str.size());
    for (char c : header_str) out.push_back(static_cast<std::byte>(c));
    for (const auto& [name, p] : params) {
        for (double v : p.values()) put_f64_le(out, v);
    }
    return out;
}

void save_checkpoint(const std::string& path, const ParamSet& params,
                     const std::string& kind, const nlohmann::json& meta) {
    const std::vector<std::byte> bytes = serialize_checkpoint(params, kind, meta);
    write_file_bytes(path, bytes.data(), bytes.size());
}

CheckpointFile parse_checkpoint(const std::vector<std::byte>& bytes,
                                const std::string& origin) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw IoError("not a checkpoint file: " + origin);
    }
    const std::uint64_t header_len = get_u64_le(bytes.data() + 4);
    if (12 + header_len > bytes.size()) {
        throw IoError("truncated checkpoint header: " + origin);
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(
            reinterpret_cast<const char*>(bytes.data() + 12),
            reinterpret_cast<const char*>(bytes.data() + 12 + header_len));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad checkpoint header in " + origin + ": " + e.what());
    }

    CheckpointFile out;
    out.format_version = header.at("format_version").get<int>();
    if (out.format_version != 1) {
        throw IoError("unsupported checkpoint format version in " + origin);
    }
    out.kind = header.at("kind").get<std::string>();
    out.meta = header.value("meta", nlohmann::json::object());

    const std::byte* payload = bytes.data() + 12 + header_len;
    const std::size_t payload_len = bytes.size() - 12 - header_len;
    for (const auto& entry : header.at("params")) {
        const std::string name = entry.at("name").get<std::string>();
        const std::vector<std::size_t> shape =
            entry.at("shape").get<std::vector<std::size_t>>();
        const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
        const std::size_t count = TensorValue::element_count(shape);
        if (offset + 8 * count > payload_len) {
            throw IoError("checkpoint payload out of range for '" + name + "' in " + origin);
        }
        std::vector<double> data(count);
        for (std::size_t i = 0; i < count; ++i) {
            data[i] = get_f64_le(payload + offset + 8 * i);
        }
        out.params.emplace(name, TensorValue(shape, std::move(data)));
    }
    return out;
}

CheckpointFile load_checkpoint(const std::string& path) {
    return parse_checkpoint(read_file_bytes(path), path);
}

}  // namespace attrpref
