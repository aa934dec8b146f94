#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spenra {

struct NelderMeadOptions {
    std::size_t max_iterations = 500;
    /// Stop once max f - min f over the simplex vertices falls to this value.
    double f_tolerance = 1e-6;
    /// Edge length of the initial axis-aligned simplex.
    double initial_step = 0.4;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f;
    std::size_t iterations;
    std::size_t evaluations;
    bool converged;
};

/// Derivative-free minimization with the dimension-adaptive coefficients of
/// Gao and Han (reflection 1, expansion 1+2/n, contraction 0.75-1/(2n),
/// shrink 1-1/n). Non-finite objective values are treated as +infinity.
[[nodiscard]] NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                           std::span<const double> start, const NelderMeadOptions& options = {});

}  // namespace spenra
