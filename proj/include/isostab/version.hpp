#pragma once

namespace isostab {

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace isostab
