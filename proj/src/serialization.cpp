#include "edgelab/serialization.hpp"

#include "edgelab/errors.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <bit>
#include <cstdint>
#include <cstdio>

namespace edgelab {

using nlohmann::json;

json to_json(const LatticePatch& patch) {
    return json{{"extent_x1", patch.extent_x1()}, {"extent_x2", patch.extent_x2()},
                {"bc_x1", to_string(patch.bc_x1())},  {"bc_x2", to_string(patch.bc_x2())},
                {"first_x1", patch.first_x1()},       {"first_x2", patch.first_x2()}};
}

LatticePatch patch_from_json(const json& j) {
    return LatticePatch(j.at("extent_x1").get<int>(), j.at("extent_x2").get<int>(),
                        boundary_from_string(j.at("bc_x1").get<std::string>()),
                        boundary_from_string(j.at("bc_x2").get<std::string>()),
                        j.value("first_x1", 1), j.value("first_x2", 1));
}

json to_json(const ModelSpec& spec) {
    return json{{"kind", to_string(spec.kind)},
                {"flux", spec.flux.str()},
                {"disorder_strength", spec.disorder_strength},
                {"rng_seed", spec.rng_seed},
                {"onsite_gap", spec.onsite_gap}};
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    spec.flux = Flux::parse(j.at("flux").get<std::string>());
    spec.disorder_strength = j.at("disorder_strength").get<double>();
    spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    spec.onsite_gap = j.at("onsite_gap").get<double>();
    return spec;
}

std::string base64_encode(const std::vector<unsigned char>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  int(bytes.size()));
    out.resize(std::size_t(n));
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0)
        throw ValidationError("bad_base64", "base64 length must be a multiple of 4");
    std::vector<unsigned char> out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  int(text.size()));
    if (n < 0)
        throw ValidationError("bad_base64", "invalid base64 payload");
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=')
        ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=')
        ++pad;
    out.resize(std::size_t(n) - pad);
    return out;
}

namespace {

void put_le(std::vector<unsigned char>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b)
        out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

double get_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
        bits |= std::uint64_t(p[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

} // namespace

std::string serialize(const HermitianOperator& op) {
    const Index n = op.dim();
    std::vector<unsigned char> bytes;
    bytes.reserve(std::size_t(n * n * 16));
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            put_le(bytes, op.matrix()(r, c).real());
            put_le(bytes, op.matrix()(r, c).imag());
        }
    }
    json j;
    j["format"] = "edgelab-operator-1";
    j["patch"] = to_json(op.patch());
    if (op.spec()) {
        j["spec"] = to_json(*op.spec());
        j["seed"] = op.spec()->rng_seed;
    } else {
        j["spec"] = "derived";
        j["seed"] = nullptr;
    }
    j["dim"] = n;
    j["matrix"] = base64_encode(bytes);
    return j.dump() + "\n";
}

HermitianOperator deserialize(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("bad_operator_file", e.what());
    }
    if (j.value("format", "") != "edgelab-operator-1")
        throw ValidationError("bad_operator_file", "unknown operator format");
    LatticePatch patch = patch_from_json(j.at("patch"));
    std::optional<ModelSpec> spec;
    if (j.at("spec").is_object())
        spec = model_spec_from_json(j.at("spec"));
    const auto n = j.at("dim").get<Index>();
    const auto bytes = base64_decode(j.at("matrix").get<std::string>());
    if (Index(bytes.size()) != n * n * 16)
        throw ValidationError("bad_operator_file", "matrix payload has the wrong size");
    Eigen::MatrixXcd m(n, n);
    const unsigned char* p = bytes.data();
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            m(r, c) = cplx(get_le(p), get_le(p + 8));
            p += 16;
        }
    }
    return HermitianOperator(std::move(m), patch, spec);
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

} // namespace edgelab
