#include "levyme/scale.hpp"

#include <cmath>

#include "levyme/quadrature.hpp"
#include "levyme/special_fn.hpp"

namespace levyme {

namespace {

Complex principal_pow(Complex z, double a) {
    if (z == Complex{}) return {};
    return std::exp(a * std::log(z));
}

} // namespace

ScaleEval::ScaleEval(LevyModel model, MERep horizon)
    : model_(std::move(model)), horizon_(std::move(horizon)) {
    const int p = horizon_.dim();
    lam_.reserve(p);
    for (auto l : horizon_.spectrum().eigenvalues) lam_.push_back(-l);
    simple_ = horizon_.spectrum().simple();
    c_ = model_.w_at_zero();
    phi_ = phi_matrix(model_, horizon_);

    phi_lam_.resize(p);
    for (int k = 0; k < p; ++k) phi_lam_[k] = phi_scalar(model_, lam_[k]);

    if (simple_) {
        RealMatrix negT = horizon_.T();
        negT *= -1.0;
        Spectrum spec = horizon_.spectrum();
        spec.eigenvalues = lam_;
        spec.source = to_complex(negT);
        proj_ = lagrange_projectors(to_complex(negT), spec);
        akl_.assign(p, Complex{});
        akt_.assign(p, Complex{});
        for (int k = 0; k < p; ++k)
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    akl_[k] += horizon_.alpha()[i] * proj_[k](i, j) * horizon_.l()[j];
                    akt_[k] += horizon_.alpha()[i] * proj_[k](i, j) * horizon_.exit_vector()[j];
                }
        if (!model_.is_stable()) {
            roots_.reserve(p);
            for (int k = 0; k < p; ++k) roots_.push_back(solve_roots(lam_[k]));
            // W(0+) consistency: sum of weights must reproduce the drift constant
            for (int k = 0; k < p; ++k) {
                Complex w0{};
                for (auto w : roots_[k].w) w0 += w;
                if (std::abs(w0 - c_) > 1e-8 * std::max(1.0, std::abs(c_)))
                    throw NumericError("ScaleEval: root weights violate W(0+) = c");
            }
        }
    }
}

ScaleEval::RootSet ScaleEval::solve_roots(Complex q) const {
    auto [n0, d] = model_.rational_numerator_denominator();
    // N_q(z) = N0(z) - q D(z)
    CVector nq = n0;
    if (nq.size() < d.size()) nq.resize(d.size(), Complex{});
    for (size_t i = 0; i < d.size(); ++i) nq[i] -= q * d[i];
    while (nq.size() > 1 && std::abs(nq.back()) == 0.0) nq.pop_back();
    if (nq.size() < 2) throw DomainError("scale roots: degenerate numerator");

    Spectrum rts;
    try {
        rts = roots(nq);
    } catch (const MultipleRootsError&) {
        throw ConfluentRootsError("scale: psi(.) = q has (near-)multiple roots");
    }
    const CVector nqd = poly_derivative(nq);
    RootSet out;
    out.z = rts.eigenvalues;
    out.w.reserve(out.z.size());
    for (auto z : out.z) out.w.push_back(poly_eval(d, z) / poly_eval(nqd, z));
    return out;
}

const ScaleEval::RootSet& ScaleEval::cached_roots(int k) const { return roots_[k]; }

// ---- scalar scale functions -------------------------------------------------------

Complex ScaleEval::w_scalar(Complex q, double x) const {
    if (x < 0.0) return {}; // zero for negative arguments by convention
    if (model_.is_stable()) {
        const double a = model_.as_stable().alpha;
        if (x == 0.0) return {};
        return std::pow(x, a - 1.0) * mittag_leffler({a, a}, q * std::pow(x, a));
    }
    // rational: reuse the cached root set when q is an eigenvalue of -T
    for (size_t k = 0; k < lam_.size(); ++k)
        if (!roots_.empty() && q == lam_[k]) {
            const auto& rs = roots_[k];
            Complex s{};
            for (size_t i = 0; i < rs.z.size(); ++i) s += rs.w[i] * std::exp(rs.z[i] * x);
            return s;
        }
    const RootSet rs = solve_roots(q);
    Complex s{};
    for (size_t i = 0; i < rs.z.size(); ++i) s += rs.w[i] * std::exp(rs.z[i] * x);
    return s;
}

std::function<Complex(double)> ScaleEval::w_evaluator(Complex q) const {
    if (model_.is_stable()) {
        const double a = model_.as_stable().alpha;
        return [a, q](double x) -> Complex {
            if (x <= 0.0) return {};
            return std::pow(x, a - 1.0) * mittag_leffler({a, a}, q * std::pow(x, a));
        };
    }
    RootSet rs = solve_roots(q);
    return [rs = std::move(rs)](double x) -> Complex {
        if (x < 0.0) return {};
        Complex s{};
        for (size_t i = 0; i < rs.z.size(); ++i) s += rs.w[i] * std::exp(rs.z[i] * x);
        return s;
    };
}

Complex ScaleEval::w_scalar_prime(Complex q, double x) const {
    if (model_.is_stable()) {
        const double a = model_.as_stable().alpha;
        if (x <= 0.0) {
            if (a == 2.0 && x == 0.0) return mittag_leffler({a, a - 1.0}, Complex{});
            throw SingularAtZeroError("w': x^{alpha-2} singular at 0 for the stable family");
        }
        return std::pow(x, a - 2.0) * mittag_leffler({a, a - 1.0}, q * std::pow(x, a));
    }
    if (x < 0.0) return {};
    for (size_t k = 0; k < lam_.size(); ++k)
        if (!roots_.empty() && q == lam_[k]) {
            const auto& rs = roots_[k];
            Complex s{};
            for (size_t i = 0; i < rs.z.size(); ++i)
                s += rs.w[i] * rs.z[i] * std::exp(rs.z[i] * x);
            return s;
        }
    const RootSet rs = solve_roots(q);
    Complex s{};
    for (size_t i = 0; i < rs.z.size(); ++i) s += rs.w[i] * rs.z[i] * std::exp(rs.z[i] * x);
    return s;
}

Complex ScaleEval::int_w_scalar(Complex q, double x) const {
    if (x <= 0.0) return {};
    if (model_.is_stable()) {
        const double a = model_.as_stable().alpha;
        if (q == Complex{}) return std::pow(x, a) * reciprocal_gamma(a + 1.0);
        return (mittag_leffler({a, 1.0}, q * std::pow(x, a)) - 1.0) / q;
    }
    auto sum_over = [&](const RootSet& rs) {
        Complex s{};
        for (size_t i = 0; i < rs.z.size(); ++i) {
            if (std::abs(rs.z[i]) < 1e-12)
                s += rs.w[i] * x;
            else
                s += rs.w[i] * (std::exp(rs.z[i] * x) - 1.0) / rs.z[i];
        }
        return s;
    };
    for (size_t k = 0; k < lam_.size(); ++k)
        if (!roots_.empty() && q == lam_[k]) return sum_over(roots_[k]);
    return sum_over(solve_roots(q));
}

Complex ScaleEval::int_w_scalar_exp(Complex q, Complex theta, double x) const {
    if (x <= 0.0) return {};
    return integrate([&](double y) { return std::exp(-theta * y) * w_scalar(q, y); }, 0.0, x,
                     1e-13, 1e-13);
}

Complex ScaleEval::z_scalar(Complex q, Complex theta, double x) const {
    if (x == 0.0) return 1.0;
    const Complex integral = int_w_scalar_exp(q, theta, x);
    return std::exp(theta * x) * (1.0 - (model_.psi(theta) - q) * integral);
}

Complex ScaleEval::wh_inf_tail_scalar(Complex q, double x) const {
    const Complex phi = phi_scalar(model_, q);
    if (model_.is_stable()) {
        const double a = model_.as_stable().alpha;
        const Complex w = q * std::pow(x, a);
        // G(w) = E_{a,1}(w) - w^{1-1/a} E_{a,a}(w); exponential modes cancel
        // exactly, so evaluate directly while Taylor is safe and switch to the
        // algebraic asymptotic series afterwards.
        if (std::abs(w) < 40.0) {
            const Complex g =
                mittag_leffler({a, 1.0}, w) - principal_pow(w, 1.0 - 1.0 / a) * mittag_leffler({a, a}, w);
            return phi / q * g;
        }
        Complex sum{};
        double best = std::numeric_limits<double>::infinity();
        Complex best_sum{};
        Complex wk = 1.0 / w;
        const Complex head = principal_pow(w, 1.0 - 1.0 / a);
        for (int k = 1; k <= 40; ++k) {
            Complex term = -wk * reciprocal_gamma(1.0 - a * k);
            if (k >= 2) term += head * wk * reciprocal_gamma(a - a * k);
            sum += term;
            const double mag = std::abs(term);
            if (mag < best) {
                best = mag;
                best_sum = sum;
            } else if (mag > 4.0 * best) {
                break; // divergent tail of the asymptotic series
            }
            wk /= w;
        }
        return phi / q * best_sum;
    }
    // rational: tail = -sum_{z_i != Phi(q)} w_i e^{z_i x} (z_i - Phi(q)) / z_i;
    // the growing Phi(q) mode drops out symbolically.
    auto tail_over = [&](const RootSet& rs) {
        Complex s{};
        for (size_t i = 0; i < rs.z.size(); ++i) {
            if (std::abs(rs.z[i] - phi) < 1e-8 * std::max(1.0, std::abs(phi))) continue;
            if (std::abs(rs.z[i]) < 1e-14) continue; // z = 0 mode has zero weight in the tail
            s -= rs.w[i] * std::exp(rs.z[i] * x) * (rs.z[i] - phi) / rs.z[i];
        }
        return s;
    };
    for (size_t k = 0; k < lam_.size(); ++k)
        if (!roots_.empty() && q == lam_[k]) return tail_over(roots_[k]);
    return tail_over(solve_roots(q));
}

// ---- matrix scale functions -------------------------------------------------------

namespace {

RealMatrix combine_spectral(const std::vector<CMatrix>& proj, const CVector& vals) {
    CMatrix acc(proj[0].dim());
    for (size_t k = 0; k < proj.size(); ++k) {
        CMatrix term = proj[k];
        term *= vals[k];
        acc += term;
    }
    return real_checked(acc, 1e-9);
}

} // namespace

RealMatrix ScaleEval::w_matrix(double x) const {
    if (!simple_) throw MultipleRootsError("w_matrix: horizon spectrum is not simple");
    if (x < 0.0) return RealMatrix(dim());
    CVector vals(dim());
    for (int k = 0; k < dim(); ++k) vals[k] = w_scalar(lam_[k], x);
    return combine_spectral(proj_, vals);
}

RealMatrix ScaleEval::w_prime_matrix(double x) const {
    if (!simple_) throw MultipleRootsError("w_prime_matrix: horizon spectrum is not simple");
    CVector vals(dim());
    for (int k = 0; k < dim(); ++k) vals[k] = w_scalar_prime(lam_[k], x);
    return combine_spectral(proj_, vals);
}

RealMatrix ScaleEval::int_w_matrix(double x) const {
    if (!simple_) throw MultipleRootsError("int_w_matrix: horizon spectrum is not simple");
    CVector vals(dim());
    for (int k = 0; k < dim(); ++k) vals[k] = int_w_scalar(lam_[k], x);
    return combine_spectral(proj_, vals);
}

RealMatrix ScaleEval::w_matrix_normalized(double x) const {
    RealMatrix e = phi_.value;
    e *= -x;
    return expm(e) * w_matrix(x);
}

ZValue ScaleEval::z_matrix(Complex theta, double x) const {
    if (!simple_) throw MultipleRootsError("z_matrix: horizon spectrum is not simple");
    if (x < 0.0) throw DomainError("z_matrix: x must be >= 0");
    if (theta.real() < 0.0) throw DomainError("z_matrix: need Re(theta) >= 0");
    ZValue out;
    out.theta = theta;
    out.x = x;
    if (x == 0.0) {
        out.value = CMatrix::identity(dim());
        return out;
    }
    CMatrix acc(dim());
    for (int k = 0; k < dim(); ++k) {
        CMatrix term = proj_[k];
        term *= z_scalar(lam_[k], theta, x);
        acc += term;
    }
    out.value = std::move(acc);
    return out;
}

RealMatrix ScaleEval::w_matrix_series(double x, double h) const {
    if (h > 1e-3) throw DomainError("w_matrix_series: grid step must be <= 1e-3");
    if (x < 0.0) throw DomainError("w_matrix_series: x must be >= 0");
    const int p = dim();
    const int n = static_cast<int>(std::round(x / h));
    const double step = (n > 0) ? x / n : h;

    // W_0 sampled on the grid once (closed form in all three families), then
    // convolution powers by iterated trapezoid.
    std::vector<double> w0(n + 1), conv(n + 1);
    if (model_.is_stable()) {
        const double a = model_.as_stable().alpha;
        const double rg = reciprocal_gamma(a);
        for (int i = 0; i <= n; ++i) w0[i] = (i == 0) ? 0.0 : std::pow(i * step, a - 1.0) * rg;
    } else {
        const RootSet rs0 = solve_roots(Complex{});
        for (int i = 0; i <= n; ++i) {
            Complex s{};
            for (size_t r = 0; r < rs0.z.size(); ++r) s += rs0.w[r] * std::exp(rs0.z[r] * (i * step));
            w0[i] = s.real();
        }
    }
    conv = w0;

    RealMatrix negT = horizon_.T();
    negT *= -1.0;
    RealMatrix power = RealMatrix::identity(p);
    RealMatrix sum(p);
    std::vector<double> next(n + 1);
    for (int k = 0;; ++k) {
        RealMatrix term = power;
        term *= conv[n];
        sum += term;
        if (term.inf_norm() < 1e-12 * std::max(1.0, sum.inf_norm()) && k >= 2) break;
        if (k > 400) throw NoConvergenceError("w_matrix_series: series cap reached");
        // conv <- conv * w0 (trapezoid); empty interval integrates to zero
        next[0] = 0.0;
        for (int j = 1; j <= n; ++j) {
            double acc = 0.5 * (conv[0] * w0[j] + conv[j] * w0[0]);
            for (int i = 1; i < j; ++i) acc += conv[i] * w0[j - i];
            next[j] = acc * step;
        }
        std::swap(conv, next);
        power = power * negT;
    }
    return sum;
}

double ScaleEval::combine_l(const CVector& vals) const {
    Complex s{};
    for (int k = 0; k < dim(); ++k) s += vals[k] * akl_[k];
    if (std::abs(s.imag()) > 1e-8 * std::max(1.0, std::abs(s)))
        throw NumericError("combine_l: imaginary residue too large");
    return s.real();
}

double ScaleEval::combine_t(const CVector& vals) const {
    Complex s{};
    for (int k = 0; k < dim(); ++k) s += vals[k] * akt_[k];
    if (std::abs(s.imag()) > 1e-8 * std::max(1.0, std::abs(s)))
        throw NumericError("combine_t: imaginary residue too large");
    return s.real();
}

} // namespace levyme
