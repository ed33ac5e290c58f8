#include "pinchfl/numerics.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pinchfl::numerics {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

// Boost's adaptive driver works to a relative tolerance; bisect on the
// single-panel Kronrod error estimate instead to honor an absolute one.
double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    double err = 0.0, l1 = 0.0;
    const double whole = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
    // Below this floor the error estimate is rounding noise.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    if (err <= tol || err <= floor || depth == 0) return whole;
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * tol, depth - 1) + adapt(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (!(b > a)) return 0.0;
    return adapt(f, a, b, abs_tol, 40);
}

}  // namespace pinchfl::numerics
