#pragma once

#include <variant>

#include "levyme/linalg.hpp"
#include "levyme/me_dist.hpp"

namespace levyme {

/// Brownian motion with drift: psi(theta) = sigma^2 theta^2 / 2 + gamma theta.
/// sigma = 0 with gamma > 0 is the pure-drift degenerate member.
struct BrownianDrift {
    double sigma;
    double gamma;
};

/// Cramer-Lundberg process with ME-distributed claim sizes, optionally
/// perturbed by Brownian motion:
/// psi(theta) = sigma^2 theta^2 / 2 + c theta - rate (1 - E e^{-theta J}).
struct CramerLundbergME {
    double premium;   // c > 0 when sigma = 0
    double jump_rate; // Poisson intensity >= 0
    MERep jump;       // claim-size distribution (non-defective)
    double sigma = 0.0;
};

/// Strictly stable, spectrally negative, normalized so psi(theta) = theta^alpha.
struct Stable {
    double alpha; // in (1, 2]
};

/// Matrix first-passage exponent Phi(-T) with its construction metadata.
struct PhiMatrix {
    RealMatrix value;
    double residual = 0.0; // ||psi(Phi(-T)) + T||_inf
};

/// One of the three spectrally-negative families, exposing the Laplace
/// exponent, its derivative, and the first-passage exponent Phi.
class LevyModel {
  public:
    static LevyModel brownian(double sigma, double gamma);
    static LevyModel cramer_lundberg(double premium, double jump_rate, MERep jump,
                                     double sigma = 0.0);
    static LevyModel stable(double alpha);

    bool is_stable() const { return std::holds_alternative<Stable>(v_); }
    bool is_brownian() const { return std::holds_alternative<BrownianDrift>(v_); }
    bool is_cramer_lundberg() const { return std::holds_alternative<CramerLundbergME>(v_); }
    const Stable& as_stable() const { return std::get<Stable>(v_); }
    const BrownianDrift& as_brownian() const { return std::get<BrownianDrift>(v_); }
    const CramerLundbergME& as_cramer_lundberg() const { return std::get<CramerLundbergME>(v_); }

    /// Bounded variation <=> no Brownian component.
    bool bounded_variation() const;
    /// The linear drift d of a bounded-variation member.
    double linear_drift() const;
    /// W(0+) = 1/d for bounded variation with drift d > 0, else 0.
    double w_at_zero() const;

    Complex psi(Complex theta) const;
    Complex psi_prime(Complex theta) const;

    /// For the rational families: psi(z) - q = N_q(z) / D(z) with
    /// N_q(z) = N0(z) - q D(z). Returns {N0, D} ascending-coefficient
    /// polynomials. Throws DomainError for the stable family.
    std::pair<CVector, CVector> rational_numerator_denominator() const;

    /// psi applied to a real matrix with spectrum in the right half-plane.
    RealMatrix psi_matrix(const RealMatrix& M) const;

  private:
    explicit LevyModel(std::variant<BrownianDrift, CramerLundbergME, Stable> v);
    std::variant<BrownianDrift, CramerLundbergME, Stable> v_;
    CVector rat_n0_, rat_d_; // cached rational polynomials (empty for stable)
};

/// Unique solution of psi(.) = q in the right half-plane (Re q > 0), or the
/// right-most real root for real q >= 0. Real case by bisection + Newton;
/// complex case by Newton homotopy along |q| -> q with a half-plane guard.
Complex phi_scalar(const LevyModel& m, Complex q);

/// Phi(-T) for an ME horizon: spectral evaluation when -T has a simple
/// spectrum, Cauchy-contour evaluation otherwise (Erlang-style horizons).
/// Validates the residual ||psi(Phi(-T)) + T||_inf <= 1e-7 max(1, ||T||_inf).
PhiMatrix phi_matrix(const LevyModel& m, const MERep& horizon);

/// Same, for a raw generator matrix T whose -T has eigenvalues in C_+.
PhiMatrix phi_matrix(const LevyModel& m, const RealMatrix& T);

} // namespace levyme
