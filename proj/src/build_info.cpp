#include "bnpspec/build_info.hpp"

#include <fftw3.h>
#include <omp.h>

#include <Eigen/Core>

namespace bnpspec {

BuildInfo build_info() {
  BuildInfo b;
  b.version = BNPSPEC_VERSION;
  b.compiler = __VERSION__;
  b.fftw = fftw_version;
  b.eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
            std::to_string(EIGEN_MINOR_VERSION);
  b.openmp = _OPENMP;
  b.max_threads = omp_get_max_threads();
  return b;
}

}  // namespace bnpspec
