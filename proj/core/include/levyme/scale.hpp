#pragma once

#include <memory>

#include "levyme/levy_model.hpp"
#include "levyme/me_dist.hpp"

namespace levyme {

/// Second scale function value Z_{-T}(theta, x). The matrix is complex in
/// general; it is real (and exposed as such) whenever theta is real.
struct ZValue {
    Complex theta;
    double x = 0.0;
    CMatrix value;

    RealMatrix real(double tol = 1e-9) const { return real_checked(value, tol); }
};

/// Bundled evaluation context: model + horizon with everything expensive
/// precomputed (spectrum of -T, Lagrange projectors, Phi(-T), per-eigenvalue
/// root sets for the rational families). Construction is the only costly step;
/// evaluations afterwards are pure and cheap.
class ScaleEval {
  public:
    ScaleEval(LevyModel model, MERep horizon);

    const LevyModel& model() const { return model_; }
    const MERep& horizon() const { return horizon_; }
    int dim() const { return horizon_.dim(); }
    /// Eigenvalues of -T (right half-plane).
    const CVector& eigenvalues() const { return lam_; }
    bool spectrum_simple() const { return simple_; }
    const RealMatrix& phi_value() const { return phi_.value; }
    const PhiMatrix& phi() const { return phi_; }
    double w_at_zero() const { return c_; }
    Complex phi_of(int k) const { return phi_lam_[k]; }

    /// Spectral weights alpha P_k l and alpha P_k t; together with a scalar
    /// function of the eigenvalues these assemble alpha f(-T) l etc.
    const CVector& weights_l() const { return akl_; }
    const CVector& weights_t() const { return akt_; }

    // -- scalar scale functions (any q in C_+ or real q >= 0) --
    Complex w_scalar(Complex q, double x) const;
    /// Closure evaluating x -> W_q(x) with the root set solved once; use this
    /// when the same q is evaluated at many arguments (quadrature loops).
    std::function<Complex(double)> w_evaluator(Complex q) const;
    Complex w_scalar_prime(Complex q, double x) const;  // d/dx, right derivative
    Complex int_w_scalar(Complex q, double x) const;    // int_0^x W_q
    /// int_0^x e^{-theta y} W_q(y) dy by adaptive quadrature (the production
    /// route for Z, uniform across families).
    Complex int_w_scalar_exp(Complex q, Complex theta, double x) const;
    Complex z_scalar(Complex q, Complex theta, double x) const;

    /// Exponentially small remainder int_x^inf (W'_q - Phi(q) W_q)(y) dy in a
    /// cancellation-free form (asymptotic series for the stable family, root
    /// sum without the Phi(q) mode for the rational ones). Completes improper
    /// Wiener-Hopf integrals that a finite box cannot reach.
    Complex wh_inf_tail_scalar(Complex q, double x) const;

    // -- matrix scale functions (simple spectrum required) --
    RealMatrix w_matrix(double x) const;
    RealMatrix w_prime_matrix(double x) const;
    RealMatrix int_w_matrix(double x) const;
    /// e^{-Phi(-T)x} W_{-T}(x), the growth-normalized variant for large x.
    RealMatrix w_matrix_normalized(double x) const;
    ZValue z_matrix(Complex theta, double x) const;

    /// Convolution-series evaluation W_{-T}(x) = sum_k (-T)^k W_0^{*(k+1)}(x)
    /// on a trapezoid grid of step h (h <= 1e-3). Discretization error O(h^2);
    /// independent of the closed-form path, which is why it serves as oracle.
    RealMatrix w_matrix_series(double x, double h) const;

    /// Assembles alpha g(-T) l (resp. alpha g(-T) t) from per-eigenvalue
    /// scalar values; `vals[k]` must correspond to eigenvalues()[k].
    double combine_l(const CVector& vals) const;
    double combine_t(const CVector& vals) const;

  private:
    struct RootSet {
        CVector z; // roots of psi(.) = q
        CVector w; // weights D(z_i)/N_q'(z_i)
    };
    RootSet solve_roots(Complex q) const;
    const RootSet& cached_roots(int k) const;

    LevyModel model_;
    MERep horizon_;
    CVector lam_;
    bool simple_ = false;
    std::vector<CMatrix> proj_;
    CVector akl_, akt_;
    CVector phi_lam_;
    PhiMatrix phi_;
    double c_ = 0.0;
    std::vector<RootSet> roots_; // per eigenvalue, rational families only
};

} // namespace levyme
