#pragma once

#include "edgelab/lattice.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace edgelab {

nlohmann::json to_json(const LatticePatch& patch);
LatticePatch patch_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

/// Standard base64 (RFC 4648, with padding).
std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

/**
 Canonical operator serialization.

 A JSON object with the header fields "format", "patch", "spec" (or the
 string "derived"), "seed", "dim", and "matrix": the row-major entries as
 little-endian IEEE-754 (re, im) double pairs, base64 encoded. The output
 is a pure function of the operator, so equal operators serialize to
 equal bytes.
 */
std::string serialize(const HermitianOperator& op);
HermitianOperator deserialize(const std::string& text);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

} // namespace edgelab
