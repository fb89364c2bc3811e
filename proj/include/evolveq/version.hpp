#pragma once

namespace evolveq {

inline constexpr const char* version_string = "0.1.0";

/// Bumped whenever a report field is added, removed, or changes meaning.
inline constexpr int schema_version = 1;

} // namespace evolveq
