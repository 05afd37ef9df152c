#pragma once

namespace syncgame {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace syncgame
