// bat/include/bat/format.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_FORMAT_H_
#define BAT_FORMAT_H_

#include <cstdio>
#include <string>

namespace bat {

// Every number we print goes through here: 9 significant digits keeps golden
// outputs stable across platforms.
inline std::string FormatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace bat

#endif  // BAT_FORMAT_H_
