#include "levyme/special_fn.hpp"

#include <cmath>

namespace levyme {

Complex mittag_leffler(const MLParams& p, Complex z, bool* cancellation_warning) {
    if (p.alpha <= 0.0 || p.beta <= 0.0) throw DomainError("mittag_leffler: alpha, beta must be > 0");
    if (cancellation_warning) *cancellation_warning = false;
    if (z == Complex{}) return Complex(reciprocal_gamma(p.beta), 0.0);

    // Terms via log magnitudes so z^n never overflows; Kahan on both parts.
    const double logr = std::log(std::abs(z));
    const double arg = std::arg(z);
    double sum_re = 0.0, sum_im = 0.0, c_re = 0.0, c_im = 0.0;
    double max_term = 0.0;
    int consecutive_small = 0;
    const int cap = 5000;
    for (int n = 0; n < cap; ++n) {
        const double logmag = n * logr - std::lgamma(p.alpha * n + p.beta);
        const double mag = std::exp(logmag);
        const double ph = n * arg;
        const double t_re = mag * std::cos(ph);
        const double t_im = mag * std::sin(ph);
        max_term = std::max(max_term, mag);

        double y = t_re - c_re;
        double t = sum_re + y;
        c_re = (t - sum_re) - y;
        sum_re = t;
        y = t_im - c_im;
        t = sum_im + y;
        c_im = (t - sum_im) - y;
        sum_im = t;

        const double snorm = std::hypot(sum_re, sum_im);
        if (mag < 1e-16 * std::max(snorm, 1e-300)) {
            if (++consecutive_small >= 3) break;
        } else {
            consecutive_small = 0;
        }
        if (n == cap - 1) throw NoConvergenceError("mittag_leffler: series cap reached");
    }
    const Complex out(sum_re, sum_im);
    if (cancellation_warning && max_term * 1e-16 > 1e-8 * std::max(std::abs(out), 1e-300))
        *cancellation_warning = true;
    return out;
}

CMatrix mittag_leffler_matrix(const MLParams& p, const CMatrix& M, const Spectrum& spec) {
    AnalyticFn f{[p](Complex z) { return mittag_leffler(p, z); }, FnDomain::Entire};
    return matfn_spectral(M, spec, f);
}

double regularized_gamma_p(double beta, double y) {
    if (beta <= 0.0) throw DomainError("incomplete gamma: beta must be > 0");
    if (y < 0.0) throw DomainError("incomplete gamma: y must be >= 0");
    if (y == 0.0) return 0.0;

    const double lg = std::lgamma(beta);
    if (y < beta + 1.0) {
        // series: P = y^beta e^{-y} / Gamma(beta+1) * sum_n y^n / prod (beta+1..beta+n)
        double term = 1.0 / beta;
        double sum = term;
        double a = beta;
        for (int n = 0; n < 10000; ++n) {
            a += 1.0;
            term *= y / a;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16)
                return sum * std::exp(-y + beta * std::log(y) - lg);
        }
        throw NoConvergenceError("incomplete gamma: series cap reached");
    }
    // Lentz continued fraction for the upper function Q, P = 1 - Q.
    const double tiny = 1e-300;
    double b = y + 1.0 - beta;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -i * (i - beta);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            const double q = std::exp(-y + beta * std::log(y) - lg) * h;
            return 1.0 - q;
        }
    }
    throw NoConvergenceError("incomplete gamma: continued fraction cap reached");
}

double lower_incomplete_gamma(double beta, double y) {
    return regularized_gamma_p(beta, y) * std::tgamma(beta);
}

double reciprocal_gamma(double x) {
    if (x > 0.5) return 1.0 / std::tgamma(x);
    // reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi; exact zeros at poles
    const double r = x - std::round(x);
    if (x <= 0.0 && r == 0.0) return 0.0;
    return std::tgamma(1.0 - x) * std::sin(M_PI * x) / M_PI;
}

} // namespace levyme
