#pragma once

#include <complex>
#include <functional>
#include <initializer_list>
#include <optional>
#include <vector>

#include "levyme/errors.hpp"

namespace levyme {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;
using CVector = std::vector<Complex>;

/// Dense square matrix, row-major. Sized for small problems (p <= ~20);
/// everything here is O(p^3) or worse and makes no attempt to scale past that.
template <typename T>
class Mat {
  public:
    Mat() = default;
    explicit Mat(int dim) : dim_(dim), data_(static_cast<size_t>(dim) * dim, T{}) {}
    Mat(int dim, std::initializer_list<T> vals) : dim_(dim), data_(vals) {
        if (static_cast<int>(data_.size()) != dim * dim)
            throw DomainError("Mat: initializer size does not match dimension");
    }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = T{1};
        return m;
    }

    int dim() const { return dim_; }
    T& operator()(int i, int j) { return data_[static_cast<size_t>(i) * dim_ + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * dim_ + j]; }
    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    Mat& operator+=(const Mat& o) {
        check_dim(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_dim(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Mat& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, T s) { return a *= s; }
    friend Mat operator*(T s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        a.check_dim(b);
        const int n = a.dim_;
        Mat c(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    double inf_norm() const {
        double best = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double row = 0.0;
            for (int j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
            best = std::max(best, row);
        }
        return best;
    }

  private:
    void check_dim(const Mat& o) const {
        if (dim_ != o.dim_) throw DomainError("Mat: dimension mismatch");
    }
    int dim_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Mat<double>;
using CMatrix = Mat<Complex>;

CMatrix to_complex(const RealMatrix& m);

/// Largest |Im| entry of m.
double max_abs_imag(const CMatrix& m);

/// Drops imaginary parts after asserting they are below tol*max(1, ||m||).
/// Conjugate-symmetric spectral data must produce real results; anything else
/// indicates a broken upstream computation.
RealMatrix real_checked(const CMatrix& m, double tol = 1e-9);

/// Eigenvalues of a matrix with multiplicity, plus the minimum pairwise
/// distance. `source` is kept so matrix functions can be formed later.
struct Spectrum {
    CVector eigenvalues;
    double separation = 0.0; // min pairwise |lambda_i - lambda_j|; +inf for p = 1
    std::optional<CMatrix> source;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    bool simple(double tol = 1e-7) const;
    double max_abs() const;
};

enum class FnDomain {
    Entire,
    RightHalfPlane,
    CutPlaneNoNonpositiveReals,
};

/// A scalar analytic function together with the domain the caller vouches for.
struct AnalyticFn {
    std::function<Complex(Complex)> eval;
    FnDomain domain = FnDomain::Entire;

    bool contains(Complex z) const;
};

// ---- solvers ----------------------------------------------------------------

/// X with A X = B via partially pivoted LU. Throws SingularMatrixError when a
/// pivot falls below 1e-13 * ||A||_inf.
CMatrix lu_solve(const CMatrix& A, const CMatrix& B);
CVector lu_solve(const CMatrix& A, const CVector& b);
RealMatrix lu_solve(const RealMatrix& A, const RealMatrix& B);
RealVector lu_solve(const RealMatrix& A, const RealVector& b);

Complex determinant(const CMatrix& A);
double determinant(const RealMatrix& A);

// ---- characteristic polynomial and roots ------------------------------------

/// Monic characteristic polynomial of M by Faddeev-LeVerrier, coefficients
/// ascending: p(z) = c[0] + c[1] z + ... + c[p] z^p with c[p] = 1.
CVector char_poly(const CMatrix& M);
CVector char_poly(const RealMatrix& M);

/// Faddeev-LeVerrier byproduct: adj(z I - M) = sum_k B[k] z^{p-1-k}.
struct AdjugatePoly {
    CVector coeffs;              // characteristic polynomial, ascending
    std::vector<CMatrix> adj;    // adj[k] multiplies z^{p-1-k}
};
AdjugatePoly adjugate_poly(const CMatrix& M);

Complex poly_eval(const CVector& coeffs, Complex z);
CVector poly_derivative(const CVector& coeffs);

/// All roots of a monic polynomial by Aberth-Ehrlich simultaneous iteration
/// with Newton polish. Throws NoConvergenceError after 200 sweeps and
/// MultipleRootsError when the separation is below 1e-7 * max|root|.
Spectrum roots(const CVector& poly);

/// char_poly + roots, with the source matrix attached.
Spectrum compute_spectrum(const CMatrix& M);
Spectrum compute_spectrum(const RealMatrix& M);

// ---- matrix functions --------------------------------------------------------

/// Lagrange-Sylvester projectors P_k = prod_{j != k} (M - lambda_j I) / (lambda_k - lambda_j).
/// Requires a simple spectrum.
std::vector<CMatrix> lagrange_projectors(const CMatrix& M, const Spectrum& spec);

/// f(M) = sum_k f(lambda_k) P_k. Eigenvector-free evaluation for matrices with
/// simple spectra; throws MultipleRootsError otherwise and DomainViolationError
/// when an eigenvalue leaves f's declared domain.
CMatrix matfn_spectral(const CMatrix& M, const Spectrum& spec, const AnalyticFn& f);

/// Power-series evaluation sum_k a_k M^k. `coeff` maps the index k to a_k.
/// Stops once three consecutive terms fall below tol relative to the running
/// sum; throws NoConvergenceError after term_cap terms, DomainViolationError
/// when ||M||_inf reaches the stated radius of convergence.
CMatrix matfn_series(const CMatrix& M, const std::function<Complex(int)>& coeff,
                     double radius = std::numeric_limits<double>::infinity(),
                     double tol = 1e-14, int term_cap = 10000);

/// Trapezoid discretization of the Cauchy integral on a circle enclosing the
/// spectrum. Node count doubles until the entrywise change drops below 1e-9.
/// Works for confluent spectra as well, which is why it also serves as the
/// fallback when matfn_spectral refuses.
CMatrix matfn_contour(const CMatrix& M, const Spectrum& spec, const AnalyticFn& f, int nodes = 64);

/// e^M for a real matrix via scaling and squaring; valid for any spectrum.
RealMatrix expm(const RealMatrix& M);

} // namespace levyme
