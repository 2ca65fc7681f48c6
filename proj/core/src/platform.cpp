#include "msflow/platform.hpp"

#include "msflow/solver.hpp"

#include <cstdlib>
#include <iostream>

#include <unistd.h>

namespace msflow {

void ensure_working_blas(char** argv) {
  if (lsq_factorization_self_test()) return;
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) {
    std::cerr << "warning: sparse QR self-test failed; the least-squares preconditioner will fall back\n";
    return;
  }
  ::setenv("OPENBLAS_CORETYPE", "Haswell", 1);
  ::execv("/proc/self/exe", argv);
  std::cerr << "warning: sparse QR self-test failed and re-exec was not possible\n";
}

}  // namespace msflow
