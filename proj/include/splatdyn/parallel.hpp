// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace splatdyn {

/// Environment variable overriding the worker thread count.
inline constexpr const char *kThreadsEnvVar = "SPLATDYN_THREADS";

/// Applies SPLATDYN_THREADS if set; returns the thread count in effect.
inline int configure_threads_from_env() {
#ifdef _OPENMP
    if (const char *env = std::getenv(kThreadsEnvVar)) {
        try {
            const int n = std::stoi(env);
            if (n > 0) omp_set_num_threads(n);
        } catch (...) {
        }
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Minimum loop length before a parallel region is opened.
inline constexpr long kParallelGrain = 256;

}  // namespace splatdyn
