#include "lifespan/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace lifespan {

double simpson(const std::function<double(double)>& f, double a, double b, int n_intervals) {
    if (b <= a) return 0.0;
    int n = n_intervals < 2 ? 2 : n_intervals;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double gauss5(const std::function<double(double)>& f, double a, double b) {
    static const double xs[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                 0.538469310105683, 0.906179845938664};
    static const double ws[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                 0.478628670499366, 0.236926885056189};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += ws[i] * f(mid + half * xs[i]);
    return acc * half;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> w) {
    if (x.size() != y.size() || (!w.empty() && w.size() != x.size()))
        throw std::invalid_argument("fit_line: size mismatch");
    LinearFit fit;
    fit.count = x.size();
    if (x.size() < 2) return fit;

    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sxx += wi * (x[i] - mx) * (x[i] - mx);
        sxy += wi * (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    if (x.size() > 2) {
        double ss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double wi = w.empty() ? 1.0 : w[i];
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss += wi * r * r;
        }
        fit.slope_stderr = std::sqrt(ss / (sw * (double(x.size()) - 2.0) / double(x.size())) / sxx);
    }
    return fit;
}

double bisect(const std::function<double(double)>& g, double lo, double hi, double rel_tol) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0) == (ghi > 0)) throw std::invalid_argument("bisect: no sign change in bracket");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) return mid;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace lifespan
