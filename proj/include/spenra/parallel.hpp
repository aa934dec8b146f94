#pragma once

namespace spenra {

/// Caps the worker count used by batch evaluations. Values < 1 restore the
/// default (all available cores). Results never depend on the worker count:
/// every parallel loop writes per-index results that are reduced serially.
void set_thread_limit(int threads);
[[nodiscard]] int thread_limit();

}  // namespace spenra
