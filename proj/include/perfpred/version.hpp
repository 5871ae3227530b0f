#pragma once

namespace perfpred {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace perfpred
