#include "spenra/quadrature.hpp"

#include "spenra/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <queue>
#include <vector>

namespace spenra {
namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct LessError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    const double value = Rule::integrate(f, a, b, 0, 0.0, &error);
    return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, std::span<const double> breakpoints,
                                    double abs_tol, std::size_t max_panels) {
    if (breakpoints.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "quadrature needs at least two breakpoints");
    }
    if (!(abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");

    std::priority_queue<Panel, std::vector<Panel>, LessError> heap;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) {
            throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly increasing");
        }
        const Panel panel = evaluate(f, breakpoints[i], breakpoints[i + 1]);
        total_error += panel.error;
        heap.push(panel);
    }

    while (total_error > abs_tol) {
        if (heap.size() >= max_panels) {
            throw Error(ErrorCode::QuadratureNonConvergence,
                        "error estimate " + std::to_string(total_error) + " above tolerance after " +
                            std::to_string(heap.size()) + " panels");
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = evaluate(f, worst.a, mid);
        const Panel right = evaluate(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Sum panels in ascending position for a reproducible result.
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double value = 0.0;
    double error = 0.0;
    for (const auto& p : panels) {
        value += p.value;
        error += p.error;
    }
    return {value, error, panels.size()};
}

}  // namespace spenra
