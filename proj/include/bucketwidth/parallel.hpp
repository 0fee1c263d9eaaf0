#pragma once

namespace bucketwidth {

/// Selects between the serial reference path of a kernel and its OpenMP
/// version. Both paths return identical results.
enum class ExecPolicy { serial, parallel };

/// Number of OpenMP threads a parallel kernel will use (1 without OpenMP).
int worker_count();

}  // namespace bucketwidth
