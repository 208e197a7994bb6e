#pragma once

namespace turbolink {

inline constexpr const char* kVersion = "0.1.0";

#ifdef TURBOLINK_GIT_HASH
inline constexpr const char* kGitHash = TURBOLINK_GIT_HASH;
#else
inline constexpr const char* kGitHash = "unknown";
#endif

}  // namespace turbolink
