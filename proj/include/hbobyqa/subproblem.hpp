#pragma once

#include "hbobyqa/basis.hpp"
#include "hbobyqa/problem.hpp"

namespace hbobyqa {

/// Approximately minimizes m(center + s) over |s|_2 <= delta and
/// lower <= center + s <= upper.
///
/// Two candidates are computed: the generalized Cauchy point along the
/// projected steepest-descent path, and a truncated conjugate-gradient
/// continuation from it that fixes variables as they reach the box. The one
/// with the lower model value is returned. center must lie in the box.
Vector solve_subproblem(const QuadraticModel& m, const Vector& center, double delta,
                        const Bounds& bounds);

/// Gradient of m at center with the components removed whose descent
/// direction leaves the box immediately.
Vector projected_gradient(const QuadraticModel& m, const Vector& center, const Bounds& bounds);

/// 0.5 |g_p| min(delta, |g_p| / (1 + |H|_2)) for the projected gradient g_p.
double cauchy_decrease_bound(const QuadraticModel& m, const Vector& center, double delta,
                             const Bounds& bounds);

}  // namespace hbobyqa
