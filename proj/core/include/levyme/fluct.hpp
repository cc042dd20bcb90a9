#pragma once

#include "levyme/scale.hpp"

namespace levyme {

/// Query bundle for the exit/identity operations; the CLI populates this from
/// flags, library callers can pass arguments directly.
struct ExitQuery {
    double x = 0.0;     // up-barrier distance / evaluation point
    double y = 0.0;     // down-barrier distance
    double a = 0.0;     // upper reflecting/terminating barrier
    double b = 0.0;     // upper barrier of the two-barrier density
    double theta = 0.0; // exponential tilt of the overshoot
    double u = 0.0;     // log-strike of the option identity
    double beta = 0.0;  // tilt of X_T - inf X_T in the option identity
};

/// P(sup_{t<T} X_t > x) = P(tau_x^+ < T).
double p_up_before_horizon(const ScaleEval& ev, double x);

/// P(tau_x^+ < tau_{-y}^- and tau_x^+ < T).
double p_two_sided_up(const ScaleEval& ev, double x, double y);

/// E_x[e^{-theta R_{eta_a}}; eta_a < T] for the process reflected at 0.
double reflected_passage(const ScaleEval& ev, double x, double a, double theta);

/// E_x[e^{theta X_{tau_0^-}}; tau_0^- < tau_a^+ and tau_0^- < T].
double down_exit_two_sided(const ScaleEval& ev, double x, double a, double theta);

/// E_x[e^{theta X_{tau_0^-}}; tau_0^- < T].
double down_exit_one_sided(const ScaleEval& ev, double x, double theta);

/// Density of X_T on (-a, b) killed at both barriers.
double two_barrier_density(const ScaleEval& ev, double a, double b, double x);

/// First Wiener-Hopf factor as a vector: alpha (-T)^{-1} e^{-Phi(-T) x}
/// (the tail measure of the supremum on (x, inf)).
RealVector wh_sup_factor(const ScaleEval& ev, double x);

/// Second factor as a vector: (Phi(-T)^{-1} W_{-T}(x) - int_0^x W_{-T}) (-T) t,
/// nondecreasing in x (the CDF of -inf X_T up to the vector normalization).
RealVector wh_inf_factor_cdf(const ScaleEval& ev, double x);

/// P(sup in (x1, x2], sup - X_T in (y1, y2]) assembled from the two factors.
double wh_rect_prob(const ScaleEval& ev, double x1, double x2, double y1, double y2);

struct WhDensity {
    double density;   // joint density at (x, y)
    double atom_at_y0; // density in x of the atom on {y = 0} (zero unless c > 0)
};

/// Joint law of (sup, sup - X_T): alpha e^{-Phi x}[c delta_0(dy) + (W' - Phi W)(y) dy] t.
WhDensity wh_joint_density(const ScaleEval& ev, double x, double y);

/// CDF of -inf X_T at y (scalar form of wh_inf_factor_cdf against alpha/t).
double wh_inf_cdf(const ScaleEval& ev, double y);

/// Total mass of the joint density + atom over [0, Lx] x [0, Ly], completed by
/// the exact strip and tail remainders; equals alpha.l up to quadrature error.
double wh_total_mass(const ScaleEval& ev, double Lx, double Ly);

/// E e^{-u sup - v(sup - X_T)} = alpha (uI + Phi)^{-1} (vI - Phi) (psi(v)I + T)^{-1} t.
double wh_bivariate_transform(const ScaleEval& ev, double u, double v);

/// e^u E[(e^{-u} - e^{inf X_T})^+ e^{beta (X_T - inf X_T)}].
double option_price(const ScaleEval& ev, double u, double beta);

/// P(tau_x^+ < first observation of a negative level), observations forming a
/// renewal process with the horizon's phase-type law. Refuses horizons whose
/// representation is not phase-type as given.
double ph_observation_ruin(const ScaleEval& ev, double x);

} // namespace levyme
