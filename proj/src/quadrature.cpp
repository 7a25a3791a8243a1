#include "smd/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace smd {

namespace {

struct Panel {
    double value;   // Simpson estimate on the panel
    double fa, fm, fb;
};

double simpson(double fa, double fm, double fb, double width) {
    return width / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, const Panel& p,
             double eps, int depth) {
    if (depth > 60)
        throw std::runtime_error("quadrature failed to converge (recursion depth exceeded)");
    const double m = 0.5 * (a + b);
    const double fml = f(0.5 * (a + m));
    const double fmr = f(0.5 * (m + b));
    Panel left{simpson(p.fa, fml, p.fm, m - a), p.fa, fml, p.fm};
    Panel right{simpson(p.fm, fmr, p.fb, b - m), p.fm, fmr, p.fb};
    const double refined = left.value + right.value;
    // factor 15 from the Richardson error estimate of the Simpson pair
    if (std::abs(refined - p.value) <= 15.0 * eps || (b - a) < 1e-300)
        return refined + (refined - p.value) / 15.0;
    return adapt(f, a, m, left, 0.5 * eps, depth + 1) +
           adapt(f, m, b, right, 0.5 * eps, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, double scale_floor) {
    if (a == b) return 0.0;
    const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    Panel whole{simpson(fa, fm, fb, b - a), fa, fm, fb};
    const double scale = std::max(std::abs(whole.value), scale_floor);
    double result = adapt(f, a, b, whole, tol * scale, 0);
    if (!std::isfinite(result))
        throw std::runtime_error("quadrature produced a non-finite value");
    return result;
}

}  // namespace smd
