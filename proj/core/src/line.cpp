#include "wgt/line.hpp"

#include <cmath>
#include <string>

#include "wgt/errors.hpp"

namespace wgt {

LineFunction make_line(double x0, double dx, int n) {
    if (n < 2) throw validation_error("make_line: need at least 2 samples");
    if (dx <= 0.0) throw validation_error("make_line: dx must be positive");
    LineFunction f;
    f.x0 = x0;
    f.dx = dx;
    f.samples.assign(n, cdouble(0.0));
    return f;
}

cdouble integral(const LineFunction& f) {
    if (f.size() < 2) throw validation_error("integral: need at least 2 samples");
    cdouble sum(0.0);
    for (int i = 0; i < f.size(); ++i) {
        const double w = (i == 0 || i == f.size() - 1) ? 0.5 : 1.0;
        sum += w * f.samples[i];
    }
    return sum * f.dx;
}

double l2_norm(const LineFunction& f) {
    if (f.size() < 2) throw validation_error("l2_norm: need at least 2 samples");
    double sum = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const double w = (i == 0 || i == f.size() - 1) ? 0.5 : 1.0;
        sum += w * std::norm(f.samples[i]);
    }
    return std::sqrt(sum * f.dx);
}

cdouble gamma_point(const LineFunction& f, double omega) {
    if (omega <= 0.0)
        throw validation_error("gamma_point: omega = " + std::to_string(omega) +
                               " must be positive");
    cdouble sum(0.0);
    for (int i = 0; i < f.size(); ++i) {
        const double w = (i == 0 || i == f.size() - 1) ? 0.5 : 1.0;
        sum += w * f.samples[i] * std::polar(1.0, omega * f.x(i));
    }
    return cdouble(0.0, 0.5 / omega) * sum * f.dx;
}

}  // namespace wgt
