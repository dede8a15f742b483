#pragma once

#include <string>

namespace bnpspec {

struct BuildInfo {
  std::string version;
  std::string compiler;
  std::string fftw;
  std::string eigen;
  int openmp = 0;  // _OPENMP date macro
  int max_threads = 1;
};

BuildInfo build_info();

}  // namespace bnpspec
