#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace spenra {

struct QuadratureResult {
    double value;
    double abs_error;  ///< sum of per-panel |K15 - G7| estimates
    std::size_t panels;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of f over
/// [breakpoints.front(), breakpoints.back()]. The initial panels are the
/// intervals between consecutive (sorted) breakpoints; the panel with the
/// largest error estimate is bisected until the total estimate is within
/// abs_tol. Throws QuadratureNonConvergence past max_panels.
[[nodiscard]] QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                                  std::span<const double> breakpoints, double abs_tol,
                                                  std::size_t max_panels = 10000);

}  // namespace spenra
