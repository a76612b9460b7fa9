// bat/include/bat/version.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_VERSION_H_
#define BAT_VERSION_H_

namespace bat {

inline constexpr const char *kVersion = "0.1.0";

}  // namespace bat

#endif  // BAT_VERSION_H_
