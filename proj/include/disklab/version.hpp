#pragma once

#include <string>

namespace disklab {

inline constexpr const char* kVersion = "0.1.0";

struct BuildInfo {
  std::string version;
  std::string compiler;
  std::string eigen;
  std::string boost;
  /// _OPENMP date macro, 0 without OpenMP.
  long openmp = 0;
  int max_threads = 1;
};

BuildInfo build_info();

}  // namespace disklab
