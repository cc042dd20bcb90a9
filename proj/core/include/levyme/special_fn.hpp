#pragma once

#include <complex>

#include "levyme/linalg.hpp"

namespace levyme {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
    double alpha;
    double beta;
};

/// E_{alpha,beta}(z) = sum_n z^n / Gamma(alpha n + beta) by global Taylor
/// summation with compensated accumulation. Accurate at double precision for
/// |z| <= ~50; beyond that the alternating tail cancels catastrophically and
/// `cancellation_warning` (when supplied) is set instead of silently degrading.
Complex mittag_leffler(const MLParams& p, Complex z, bool* cancellation_warning = nullptr);

/// E_{alpha,beta}(M) through the spectral evaluator (simple spectrum required).
CMatrix mittag_leffler_matrix(const MLParams& p, const CMatrix& M, const Spectrum& spec);

/// Lower incomplete gamma gamma(y; beta) = int_0^y x^{beta-1} e^{-x} dx,
/// unnormalized. Series below beta+1, Lentz continued fraction above.
double lower_incomplete_gamma(double beta, double y);

/// Regularized version P(beta, y) = gamma(y; beta) / Gamma(beta); safe for
/// large beta where the unnormalized value overflows.
double regularized_gamma_p(double beta, double y);

/// 1/Gamma(x) for real x, zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

} // namespace levyme
