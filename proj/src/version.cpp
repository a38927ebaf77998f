#include "disklab/version.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace disklab {

BuildInfo build_info() {
  BuildInfo b;
  b.version = kVersion;
#if defined(__clang__)
  b.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  b.compiler = "gcc " __VERSION__;
#else
  b.compiler = "unknown";
#endif
  b.eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
            std::to_string(EIGEN_MINOR_VERSION);
  b.boost = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
            std::to_string(BOOST_VERSION % 100);
#ifdef _OPENMP
  b.openmp = _OPENMP;
  b.max_threads = omp_get_max_threads();
#endif
  return b;
}

}  // namespace disklab
