#include "levyme/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace levyme {

CMatrix to_complex(const RealMatrix& m) {
    CMatrix c(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) c(i, j) = Complex(m(i, j), 0.0);
    return c;
}

double max_abs_imag(const CMatrix& m) {
    double best = 0.0;
    for (const auto& v : m.data()) best = std::max(best, std::abs(v.imag()));
    return best;
}

RealMatrix real_checked(const CMatrix& m, double tol) {
    const double scale = std::max(1.0, m.inf_norm());
    if (max_abs_imag(m) > tol * scale)
        throw NumericError("real_checked: imaginary residue " + std::to_string(max_abs_imag(m)) +
                           " exceeds tolerance");
    RealMatrix r(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) r(i, j) = m(i, j).real();
    return r;
}

bool Spectrum::simple(double tol) const {
    if (size() <= 1) return true;
    return separation >= tol * std::max(1.0, max_abs());
}

double Spectrum::max_abs() const {
    double best = 0.0;
    for (auto l : eigenvalues) best = std::max(best, std::abs(l));
    return best;
}

bool AnalyticFn::contains(Complex z) const {
    switch (domain) {
        case FnDomain::Entire: return true;
        case FnDomain::RightHalfPlane: return z.real() > 0.0;
        case FnDomain::CutPlaneNoNonpositiveReals:
            return !(z.imag() == 0.0 && z.real() <= 0.0);
    }
    return false;
}

// ---- LU ----------------------------------------------------------------------

namespace {

template <typename T>
struct Lu {
    Mat<T> lu;
    std::vector<int> perm;
    int sign = 1;
};

template <typename T>
Lu<T> lu_factor(const Mat<T>& A) {
    const int n = A.dim();
    Lu<T> f{A, std::vector<int>(n), 1};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    const double pivot_floor = 1e-13 * std::max(1.0, A.inf_norm());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(f.lu(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < pivot_floor) throw SingularMatrixError("lu_factor: pivot below tolerance");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        for (int i = k + 1; i < n; ++i) {
            const T m = f.lu(i, k) / f.lu(k, k);
            f.lu(i, k) = m;
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    return f;
}

template <typename T>
std::vector<T> lu_apply(const Lu<T>& f, const std::vector<T>& b) {
    const int n = f.lu.dim();
    std::vector<T> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

template <typename T>
Mat<T> lu_solve_impl(const Mat<T>& A, const Mat<T>& B) {
    if (A.dim() != B.dim()) throw DomainError("lu_solve: dimension mismatch");
    const auto f = lu_factor(A);
    const int n = A.dim();
    Mat<T> X(n);
    std::vector<T> col(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = B(i, j);
        const auto x = lu_apply(f, col);
        for (int i = 0; i < n; ++i) X(i, j) = x[i];
    }
    return X;
}

template <typename T>
T det_impl(const Mat<T>& A) {
    try {
        const auto f = lu_factor(A);
        T d = static_cast<double>(f.sign);
        for (int i = 0; i < A.dim(); ++i) d *= f.lu(i, i);
        return d;
    } catch (const SingularMatrixError&) {
        return T{};
    }
}

} // namespace

CMatrix lu_solve(const CMatrix& A, const CMatrix& B) { return lu_solve_impl(A, B); }
RealMatrix lu_solve(const RealMatrix& A, const RealMatrix& B) { return lu_solve_impl(A, B); }

CVector lu_solve(const CMatrix& A, const CVector& b) {
    if (static_cast<int>(b.size()) != A.dim()) throw DomainError("lu_solve: dimension mismatch");
    return lu_apply(lu_factor(A), b);
}

RealVector lu_solve(const RealMatrix& A, const RealVector& b) {
    if (static_cast<int>(b.size()) != A.dim()) throw DomainError("lu_solve: dimension mismatch");
    return lu_apply(lu_factor(A), b);
}

Complex determinant(const CMatrix& A) { return det_impl(A); }
double determinant(const RealMatrix& A) { return det_impl(A); }

// ---- characteristic polynomial -----------------------------------------------

AdjugatePoly adjugate_poly(const CMatrix& M) {
    const int p = M.dim();
    AdjugatePoly out;
    out.coeffs.assign(p + 1, Complex{});
    out.coeffs[p] = 1.0;
    out.adj.reserve(p);
    CMatrix B = CMatrix::identity(p);
    out.adj.push_back(B);
    for (int k = 1; k <= p; ++k) {
        CMatrix MB = M * B;
        Complex tr{};
        for (int i = 0; i < p; ++i) tr += MB(i, i);
        const Complex a = -tr / static_cast<double>(k); // coefficient of z^{p-k}
        out.coeffs[p - k] = a;
        if (k < p) {
            B = MB;
            for (int i = 0; i < p; ++i) B(i, i) += a;
            out.adj.push_back(B);
        }
    }
    return out;
}

CVector char_poly(const CMatrix& M) { return adjugate_poly(M).coeffs; }
CVector char_poly(const RealMatrix& M) { return char_poly(to_complex(M)); }

Complex poly_eval(const CVector& c, Complex z) {
    Complex v{};
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * z + c[k];
    return v;
}

CVector poly_derivative(const CVector& c) {
    if (c.size() <= 1) return {Complex{}};
    CVector d(c.size() - 1);
    for (size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    return d;
}

// ---- Aberth-Ehrlich ------------------------------------------------------------

namespace {

// One full Aberth run; `tol` is the step tolerance relative to the coefficient
// scale. Multiple roots converge only linearly, so strict callers fail fast and
// the cluster-tolerant caller relaxes tol instead.
bool aberth(const CVector& monic, CVector& z, double tol, int sweeps) {
    const int n = static_cast<int>(monic.size()) - 1;
    double radius = 0.0;
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(monic[k]));
    radius = 1.0 + radius;

    z.resize(n);
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * M_PI * k / n + 0.4;
        z[k] = radius * (0.35 + 0.65 * (k + 1.0) / n) * Complex(std::cos(ang), std::sin(ang));
    }

    const CVector dpoly = poly_derivative(monic);
    const double scale = std::max(1.0, radius);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool converged = true;
        for (int k = 0; k < n; ++k) {
            const Complex pk = poly_eval(monic, z[k]);
            if (std::abs(pk) == 0.0) continue;
            const Complex dk = poly_eval(dpoly, z[k]);
            Complex newton = (dk != Complex{}) ? pk / dk : Complex(1e-3, 1e-3);
            Complex repel{};
            for (int j = 0; j < n; ++j)
                if (j != k) {
                    const Complex diff = z[k] - z[j];
                    if (std::abs(diff) > 1e-300) repel += 1.0 / diff;
                }
            const Complex denom = 1.0 - newton * repel;
            const Complex step = (std::abs(denom) > 1e-300) ? newton / denom : newton;
            z[k] -= step;
            if (std::abs(step) > tol * scale) converged = false;
        }
        if (converged) return true;
    }
    return false;
}

double min_separation(const CVector& z) {
    double sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < z.size(); ++i)
        for (size_t j = i + 1; j < z.size(); ++j) sep = std::min(sep, std::abs(z[i] - z[j]));
    return sep;
}

} // namespace

Spectrum roots(const CVector& poly) {
    const int n = static_cast<int>(poly.size()) - 1;
    if (n < 1) throw DomainError("roots: degree must be >= 1");
    if (std::abs(poly[n]) == 0.0) throw DomainError("roots: leading coefficient is zero");
    CVector c = poly;
    for (auto& v : c) v /= poly[n];

    Spectrum out;
    if (n == 1) {
        out.eigenvalues = {-c[0]};
        out.separation = std::numeric_limits<double>::infinity();
        return out;
    }
    if (!aberth(c, out.eigenvalues, 1e-13, 200))
        throw NoConvergenceError("roots: Aberth iteration did not converge (near-multiple roots?)");

    const CVector dpoly = poly_derivative(c);
    for (auto& zk : out.eigenvalues)
        for (int it = 0; it < 3; ++it) {
            const Complex dk = poly_eval(dpoly, zk);
            if (std::abs(dk) < 1e-300) break;
            zk -= poly_eval(c, zk) / dk;
        }

    double maxabs = 0.0;
    for (auto v : out.eigenvalues) maxabs = std::max(maxabs, std::abs(v));
    out.separation = min_separation(out.eigenvalues);
    if (out.separation < 1e-7 * std::max(1.0, maxabs))
        throw MultipleRootsError("roots: separation " + std::to_string(out.separation) +
                                 " below tolerance");
    return out;
}

namespace {

Spectrum spectrum_of(const CMatrix& M) {
    const int p = M.dim();
    Spectrum s;
    if (p == 1) {
        s.eigenvalues = {M(0, 0)};
        s.separation = std::numeric_limits<double>::infinity();
    } else {
        const CVector c = char_poly(M);
        try {
            s = roots(c);
        } catch (const Error&) {
            // Clustered/confluent spectrum: rerun with a relaxed step
            // tolerance and snap clusters to their mean, which is far more
            // accurate than the individual perturbed roots. Only the contour
            // and series evaluators accept such spectra downstream.
            CVector z;
            aberth(c, z, 1e-8, 400);
            const double snap = 1e-6 * std::max(1.0, [&] {
                double m = 0.0;
                for (auto v : z) m = std::max(m, std::abs(v));
                return m;
            }());
            std::vector<bool> done(z.size(), false);
            for (size_t i = 0; i < z.size(); ++i) {
                if (done[i]) continue;
                std::vector<size_t> cluster{i};
                for (size_t j = i + 1; j < z.size(); ++j)
                    if (!done[j] && std::abs(z[j] - z[i]) < snap) cluster.push_back(j);
                Complex mean{};
                for (auto idx : cluster) mean += z[idx];
                mean /= static_cast<double>(cluster.size());
                for (auto idx : cluster) {
                    z[idx] = mean;
                    done[idx] = true;
                }
            }
            s.eigenvalues = std::move(z);
            s.separation = 0.0;
        }
    }
    s.source = M;
    return s;
}

} // namespace

Spectrum compute_spectrum(const CMatrix& M) { return spectrum_of(M); }
Spectrum compute_spectrum(const RealMatrix& M) { return spectrum_of(to_complex(M)); }

// ---- matrix functions ----------------------------------------------------------

std::vector<CMatrix> lagrange_projectors(const CMatrix& M, const Spectrum& spec) {
    const int p = M.dim();
    if (spec.size() != p) throw DomainError("lagrange_projectors: spectrum size mismatch");
    if (!spec.simple()) throw MultipleRootsError("lagrange_projectors: spectrum not simple");
    std::vector<CMatrix> proj;
    proj.reserve(p);
    for (int k = 0; k < p; ++k) {
        CMatrix P = CMatrix::identity(p);
        for (int j = 0; j < p; ++j) {
            if (j == k) continue;
            CMatrix f = M;
            for (int i = 0; i < p; ++i) f(i, i) -= spec.eigenvalues[j];
            P = P * f;
            P *= 1.0 / (spec.eigenvalues[k] - spec.eigenvalues[j]);
        }
        proj.push_back(std::move(P));
    }
    return proj;
}

CMatrix matfn_spectral(const CMatrix& M, const Spectrum& spec, const AnalyticFn& f) {
    if (!spec.simple()) throw MultipleRootsError("matfn_spectral: spectrum not simple");
    for (auto l : spec.eigenvalues)
        if (!f.contains(l)) throw DomainViolationError("matfn_spectral: eigenvalue outside function domain");
    const auto proj = lagrange_projectors(M, spec);
    CMatrix out(M.dim());
    for (int k = 0; k < spec.size(); ++k) {
        CMatrix term = proj[k];
        term *= f.eval(spec.eigenvalues[k]);
        out += term;
    }
    return out;
}

CMatrix matfn_series(const CMatrix& M, const std::function<Complex(int)>& coeff, double radius,
                     double tol, int term_cap) {
    if (std::isfinite(radius) && M.inf_norm() >= radius)
        throw DomainViolationError("matfn_series: ||M|| reaches radius of convergence");
    const int p = M.dim();
    CMatrix sum(p);
    CMatrix power = CMatrix::identity(p);
    int consecutive_small = 0;
    for (int k = 0; k < term_cap; ++k) {
        if (k > 0) power = power * M;
        CMatrix term = power;
        term *= coeff(k);
        sum += term;
        const double tn = term.inf_norm();
        if (tn < tol * std::max(1.0, sum.inf_norm())) {
            if (++consecutive_small >= 3) return sum;
        } else {
            consecutive_small = 0;
        }
    }
    throw NoConvergenceError("matfn_series: term cap reached");
}

namespace {

CMatrix contour_sum(const CMatrix& M, const AnalyticFn& f, Complex center, double r, int N,
                    double rot) {
    const int p = M.dim();
    CMatrix acc(p);
    const CMatrix I = CMatrix::identity(p);
    for (int k = 0; k < N; ++k) {
        const double ang = 2.0 * M_PI * k / N + rot;
        const Complex zk = center + r * Complex(std::cos(ang), std::sin(ang));
        CMatrix A = I;
        A *= zk;
        A -= M;
        CMatrix R = lu_solve(A, I);
        R *= f.eval(zk) * (zk - center);
        acc += R;
    }
    acc *= 1.0 / N;
    return acc;
}

double dist_to_boundary(Complex c, FnDomain d) {
    switch (d) {
        case FnDomain::Entire: return std::numeric_limits<double>::infinity();
        case FnDomain::RightHalfPlane: return c.real();
        case FnDomain::CutPlaneNoNonpositiveReals:
            // distance to the ray {Re <= 0, Im = 0}
            return c.real() <= 0.0 ? std::abs(c.imag()) : std::abs(c);
    }
    return 0.0;
}

} // namespace

CMatrix matfn_contour(const CMatrix& M, const Spectrum& spec, const AnalyticFn& f, int nodes) {
    if (nodes < 4 || nodes % 2 != 0) throw DomainError("matfn_contour: node count must be even and >= 4");
    Complex center{};
    for (auto l : spec.eigenvalues) center += l;
    center /= static_cast<double>(spec.size());
    double maxdist = 0.0;
    for (auto l : spec.eigenvalues) maxdist = std::max(maxdist, std::abs(l - center));
    double r = 1.5 * maxdist;
    const double bdist = dist_to_boundary(center, f.domain);
    if (r < 1e-8 * std::max(1.0, std::abs(center))) {
        // Degenerate circle (tightly clustered spectrum); widen it as far as
        // the domain allows so the resolvent stays well conditioned.
        r = std::isfinite(bdist) ? 0.5 * bdist : std::max(1.0, 0.5 * std::abs(center));
    }
    if (r <= 0.0 || r >= bdist)
        throw ContourLeavesDomainError("matfn_contour: circle leaves the declared domain");
    if (!f.contains(center)) throw ContourLeavesDomainError("matfn_contour: center outside domain");

    auto eval_nodes = [&](int N) {
        try {
            return contour_sum(M, f, center, r, N, 0.0);
        } catch (const SingularMatrixError&) {
            // a node hit the spectrum; rotate once and retry
            return contour_sum(M, f, center, r, N, M_PI / N);
        }
    };

    CMatrix prev = eval_nodes(nodes);
    for (int N = nodes * 2; N <= 8192; N *= 2) {
        CMatrix cur = eval_nodes(N);
        CMatrix diff = cur;
        diff -= prev;
        if (diff.inf_norm() < 1e-9 * std::max(1.0, cur.inf_norm())) return cur;
        prev = std::move(cur);
    }
    throw NoConvergenceError("matfn_contour: node doubling did not converge");
}

RealMatrix expm(const RealMatrix& M) {
    const int p = M.dim();
    const double norm = M.inf_norm();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    RealMatrix A = M;
    A *= scale;
    RealMatrix sum = RealMatrix::identity(p);
    RealMatrix term = RealMatrix::identity(p);
    for (int k = 1; k <= 30; ++k) {
        term = term * A;
        term *= 1.0 / k;
        sum += term;
        if (term.inf_norm() < 1e-18 * std::max(1.0, sum.inf_norm())) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

} // namespace levyme
