#include "spenra/nelder_mead.hpp"

#include "spenra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spenra {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::span<const double> start,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "Nelder-Mead needs at least one dimension");

    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double gamma = 1.0 + 2.0 / dn;
    const double rho = 0.75 - 1.0 / (2.0 * dn);
    const double sigma = n > 1 ? 1.0 - 1.0 / dn : 0.5;

    std::size_t evaluations = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    std::size_t iter = 0;
    bool converged = false;

    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = std::move(simplex[order[i]]);
            f2[i] = fv[order[i]];
        }
        simplex = std::move(s2);
        fv = std::move(f2);
    };

    sort_simplex();
    while (iter < options.max_iterations) {
        if (std::isfinite(fv[n]) && fv[n] - fv[0] <= options.f_tolerance) {
            converged = true;
            break;
        }
        ++iter;
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        for (auto& c : centroid) c /= dn;

        const auto& worst = simplex[n];
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - worst[j]);
        const double fr = eval(xr);

        if (fr < fv[0]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            for (std::size_t j = 0; j < n; ++j) {
                xc[j] = outside ? centroid[j] + rho * (xr[j] - centroid[j])
                                : centroid[j] + rho * (worst[j] - centroid[j]);
            }
            const double fc = eval(xc);
            if (fc < (outside ? fr : fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j]);
                    }
                    fv[i] = eval(simplex[i]);
                }
            }
        }
        sort_simplex();
    }
    return {simplex[0], fv[0], iter, evaluations, converged};
}

}  // namespace spenra
