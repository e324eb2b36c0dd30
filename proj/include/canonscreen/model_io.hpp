#pragma once

#include <filesystem>
#include <string>

#include "canonscreen/cca.hpp"

namespace canonscreen {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON envelope; matrices are base64 little-endian float64
/// blobs with explicit shapes, so a round-trip is bit-exact.
std::string model_to_json(const CanonicalModel& model);

/// Throws UnsupportedVersion for an unknown format_version and CorruptModel
/// for anything malformed.
CanonicalModel model_from_json(const std::string& text);

void save_model(const CanonicalModel& model, const std::filesystem::path& path);
CanonicalModel load_model(const std::filesystem::path& path);

}  // namespace canonscreen
