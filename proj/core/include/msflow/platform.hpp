#pragma once

namespace msflow {

/// Runs the sparse QR self-test. If it fails and OPENBLAS_CORETYPE is unset, sets it to a
/// conservative kernel family and re-executes the current binary with the same arguments.
/// Returns normally when the factorisation works or no re-exec was possible.
void ensure_working_blas(char** argv);

}  // namespace msflow
