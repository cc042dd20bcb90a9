#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "levyme/linalg.hpp"

namespace levyme {

/// One exponential term c * e^{-lambda x} of a density; Re(lambda) > 0.
struct ExpTerm {
    Complex c;
    Complex lambda;
};

/// A conjugation-closed list of exponential terms. The represented density is
/// sum_k c_k e^{-lambda_k x}, which must be real and (numerically) nonnegative.
struct ExpTermList {
    std::vector<ExpTerm> terms;

    void validate() const; // throws ConjugationViolationError / InvalidRepresentationError
};

/// Parses the coefficient CSV (header re_c,im_c,re_lambda,im_lambda[,pair];
/// pair=1 rows stand for the term plus its conjugate).
ExpTermList load_exp_terms_csv(const std::string& path);
ExpTermList parse_exp_terms_csv(const std::string& content);

/// Matrix-exponential distribution with density alpha e^{Tx} t. The
/// representation may be defective (total mass alpha l < 1), which encodes
/// killing/discounting. Immutable after construction.
class MERep {
  public:
    /// Validates: eigenvalues of T strictly in the left half-plane, total mass
    /// in (0, 1], and density >= -1e-9 (relative) on the grid {0, 0.01, .., 20}.
    /// A certified ME positivity check is undecidable; the grid is the guard.
    static MERep make(RealVector alpha, RealMatrix T, RealVector t);

    static MERep exponential(double rate);
    static MERep erlang(int stages, double rate);

    int dim() const { return T_.dim(); }
    const RealVector& alpha() const { return alpha_; }
    const RealMatrix& T() const { return T_; }
    const RealVector& exit_vector() const { return t_; }
    const RealVector& l() const { return l_; } // (-T)^{-1} t
    bool canonical() const { return canonical_; }
    double defect() const { return defect_; } // total mass alpha . l
    const Spectrum& spectrum() const { return spec_; } // of T

    double density(double x) const;
    double cdf(double x) const;
    Complex laplace(Complex s) const; // E e^{-sT}, Re s >= 0
    double mean() const;              // requires defect ~ 1

    /// Distribution of min(T, e_delta): (alpha, T - delta I, t + delta l).
    MERep kill_min(double delta) const;
    /// Discounting variant (alpha, T - delta I, t); defective.
    MERep kill_discount(double delta) const;

    /// Similarity transform onto the canonical form (t = -T 1, alpha 1 = 1)
    /// when the representation is non-defective and a well-conditioned pivot
    /// exists; otherwise returns the representation unchanged.
    MERep canonicalize() const;

    /// Inverse-CDF sampling: doubling bracket, bisection to 1e-10, Newton
    /// polish. Requires a non-defective representation.
    double sample(std::mt19937_64& rng) const;

    /// True when alpha is a (sub)probability vector and T a sub-intensity
    /// matrix, i.e. the representation is phase-type as given.
    bool is_phase_type(double tol = 1e-12) const;

  private:
    MERep() = default;
    void build_caches();

    RealVector alpha_, t_, l_;
    RealMatrix T_;
    bool canonical_ = false;
    double defect_ = 0.0;
    Spectrum spec_;

    // When T has a simple spectrum, density/cdf collapse to exponential sums.
    bool spectral_ok_ = false;
    CVector lam_;         // eigenvalues of T
    CVector wt_density_;  // alpha P_k t
    CVector wt_cdf_;      // alpha P_k l
};

/// Builds a real representation from exponential terms: 1x1 blocks for real
/// rates, 2x2 rotation blocks [[-a, b], [-b, -a]] for conjugate pairs.
MERep me_from_exp_terms(const ExpTermList& terms);

} // namespace levyme
