#include "levyme/levy_model.hpp"

#include <cmath>

namespace levyme {

namespace {

Complex principal_pow(Complex z, double a) {
    if (z == Complex{}) return {};
    return std::exp(a * std::log(z)); // std::log is the principal branch
}

bool on_cut(Complex z) { return z.imag() == 0.0 && z.real() <= 0.0; }

} // namespace

LevyModel::LevyModel(std::variant<BrownianDrift, CramerLundbergME, Stable> v) : v_(std::move(v)) {
    if (const auto* cl = std::get_if<CramerLundbergME>(&v_)) {
        // N0 / D for psi(z): psi(z) = s2/2 z^2 + c z - r (1 - A(z)/D(z))
        // => N0(z) = (s2/2 z^2 + c z - r) D(z) + r A(z)
        const auto ap = adjugate_poly(to_complex(cl->jump.T()));
        const int pj = cl->jump.dim();
        rat_d_ = ap.coeffs; // det(zI - T_J), monic degree pj
        CVector A(pj, Complex{});
        for (int k = 0; k < pj; ++k) {
            // adj[k] multiplies z^{pj-1-k}
            Complex v{};
            for (int i = 0; i < pj; ++i)
                for (int j = 0; j < pj; ++j)
                    v += cl->jump.alpha()[i] * ap.adj[k](i, j) * cl->jump.exit_vector()[j];
            A[pj - 1 - k] = v;
        }
        CVector quad{-cl->jump_rate, cl->premium, 0.5 * cl->sigma * cl->sigma};
        while (!quad.empty() && std::abs(quad.back()) == 0.0) quad.pop_back();
        CVector n0(quad.size() + rat_d_.size() - 1, Complex{});
        for (size_t i = 0; i < quad.size(); ++i)
            for (size_t j = 0; j < rat_d_.size(); ++j) n0[i + j] += quad[i] * rat_d_[j];
        for (size_t j = 0; j < A.size(); ++j) n0[j] += cl->jump_rate * A[j];
        rat_n0_ = std::move(n0);
    } else if (const auto* bm = std::get_if<BrownianDrift>(&v_)) {
        rat_d_ = {Complex(1.0, 0.0)};
        rat_n0_ = {Complex{}, Complex(bm->gamma, 0.0), Complex(0.5 * bm->sigma * bm->sigma, 0.0)};
        while (rat_n0_.size() > 1 && std::abs(rat_n0_.back()) == 0.0) rat_n0_.pop_back();
    }
}

LevyModel LevyModel::brownian(double sigma, double gamma) {
    if (sigma < 0.0) throw DomainError("brownian: sigma must be >= 0");
    if (sigma == 0.0 && gamma <= 0.0)
        throw DomainError("brownian: needs sigma > 0 or gamma > 0 (paths must not be non-increasing)");
    return LevyModel(BrownianDrift{sigma, gamma});
}

LevyModel LevyModel::cramer_lundberg(double premium, double jump_rate, MERep jump, double sigma) {
    if (jump_rate < 0.0 || sigma < 0.0) throw DomainError("cramer_lundberg: bad parameters");
    if (sigma == 0.0 && premium <= 0.0)
        throw DomainError("cramer_lundberg: premium must be > 0 when sigma = 0");
    if (jump.defect() < 1.0 - 1e-9)
        throw DomainError("cramer_lundberg: claim-size distribution must be non-defective");
    return LevyModel(CramerLundbergME{premium, jump_rate, std::move(jump), sigma});
}

LevyModel LevyModel::stable(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("stable: alpha must be in (1, 2]");
    return LevyModel(Stable{alpha});
}

bool LevyModel::bounded_variation() const {
    if (const auto* bm = std::get_if<BrownianDrift>(&v_)) return bm->sigma == 0.0;
    if (const auto* cl = std::get_if<CramerLundbergME>(&v_)) return cl->sigma == 0.0;
    return false;
}

double LevyModel::linear_drift() const {
    if (!bounded_variation()) throw DomainError("linear_drift: unbounded variation");
    if (const auto* bm = std::get_if<BrownianDrift>(&v_)) return bm->gamma;
    return std::get<CramerLundbergME>(v_).premium;
}

double LevyModel::w_at_zero() const { return bounded_variation() ? 1.0 / linear_drift() : 0.0; }

Complex LevyModel::psi(Complex theta) const {
    if (const auto* bm = std::get_if<BrownianDrift>(&v_))
        return 0.5 * bm->sigma * bm->sigma * theta * theta + bm->gamma * theta;
    if (const auto* cl = std::get_if<CramerLundbergME>(&v_)) {
        const Complex lap = (cl->jump_rate > 0.0) ? cl->jump.laplace(theta) : Complex{};
        return 0.5 * cl->sigma * cl->sigma * theta * theta + cl->premium * theta -
               cl->jump_rate * (1.0 - lap);
    }
    const auto& st = std::get<Stable>(v_);
    if (on_cut(theta) && theta != Complex{})
        throw BranchCutError("psi: stable exponent undefined on the negative real axis");
    return principal_pow(theta, st.alpha);
}

Complex LevyModel::psi_prime(Complex theta) const {
    if (const auto* bm = std::get_if<BrownianDrift>(&v_))
        return bm->sigma * bm->sigma * theta + bm->gamma;
    if (const auto* cl = std::get_if<CramerLundbergME>(&v_)) {
        // d/dtheta E e^{-theta J} = -alpha (theta I - T)^{-2} t
        Complex dlap{};
        if (cl->jump_rate > 0.0) {
            const int pj = cl->jump.dim();
            CMatrix A = to_complex(cl->jump.T());
            A *= -1.0;
            for (int i = 0; i < pj; ++i) A(i, i) += theta;
            CVector tc(cl->jump.exit_vector().begin(), cl->jump.exit_vector().end());
            const CVector x = lu_solve(A, lu_solve(A, tc));
            for (int i = 0; i < pj; ++i) dlap -= cl->jump.alpha()[i] * x[i];
        }
        return cl->sigma * cl->sigma * theta + cl->premium + cl->jump_rate * dlap;
    }
    const auto& st = std::get<Stable>(v_);
    if (on_cut(theta) && theta != Complex{})
        throw BranchCutError("psi_prime: stable exponent undefined on the negative real axis");
    return st.alpha * principal_pow(theta, st.alpha - 1.0);
}

std::pair<CVector, CVector> LevyModel::rational_numerator_denominator() const {
    if (is_stable()) throw DomainError("rational form unavailable for the stable family");
    return {rat_n0_, rat_d_};
}

// ---- scalar Phi ------------------------------------------------------------------

namespace {

double phi_real(const LevyModel& m, double q) {
    // psi is convex on [0, inf) with psi(inf) = inf; the right-most root of
    // psi = q lies right of the minimizer theta*.
    auto psir = [&m](double th) { return m.psi(Complex(th, 0.0)).real(); };
    auto dpsir = [&m](double th) { return m.psi_prime(Complex(th, 0.0)).real(); };

    double theta_star = 0.0;
    if (dpsir(0.0) < 0.0) {
        double hi = 1.0;
        while (dpsir(hi) < 0.0) {
            hi *= 2.0;
            if (hi > 1e12) throw NoConvergenceError("phi_scalar: psi' never turns positive");
        }
        double lo = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (dpsir(mid) < 0.0 ? lo : hi) = mid;
        }
        theta_star = 0.5 * (lo + hi);
    }
    if (q == 0.0 && dpsir(0.0) >= 0.0) return 0.0;

    double hi = std::max(1.0, 2.0 * theta_star);
    while (psir(hi) <= q) {
        hi *= 2.0;
        if (hi > 1e14) throw NoConvergenceError("phi_scalar: bracketing failed");
    }
    double lo = theta_star;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (psir(mid) <= q ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 5; ++i) {
        const double d = dpsir(x);
        if (d <= 0.0) break;
        x -= (psir(x) - q) / d;
    }
    return x;
}

Complex phi_homotopy(const LevyModel& m, Complex q, int steps) {
    const double q0 = std::abs(q);
    Complex theta(phi_real(m, q0), 0.0);
    for (int s = 1; s <= steps; ++s) {
        const Complex target = q0 + (static_cast<double>(s) / steps) * (q - q0);
        bool done = false;
        for (int it = 0; it < 60 && !done; ++it) {
            const Complex r = m.psi(theta) - target;
            done = std::abs(r) < 1e-13 * std::max(1.0, std::abs(target));
            if (done) break;
            const Complex d = m.psi_prime(theta);
            if (std::abs(d) < 1e-300) throw NoConvergenceError("phi_scalar: stalled Newton");
            theta -= r / d;
        }
        if (!done && std::abs(m.psi(theta) - target) > 1e-10 * std::max(1.0, std::abs(target)))
            throw NoConvergenceError("phi_scalar: Newton did not converge");
        if (theta.real() <= 0.0)
            throw LeftHalfPlaneError("phi_scalar: homotopy left the right half-plane");
    }
    return theta;
}

} // namespace

Complex phi_scalar(const LevyModel& m, Complex q) {
    if (q.imag() == 0.0) {
        if (q.real() < 0.0) throw DomainError("phi_scalar: real q must be >= 0");
        return Complex(phi_real(m, q.real()), 0.0);
    }
    if (q.real() <= 0.0) throw DomainError("phi_scalar: need Re(q) > 0");
    try {
        return phi_homotopy(m, q, 16);
    } catch (const LeftHalfPlaneError&) {
        return phi_homotopy(m, q, 64);
    }
}

// ---- matrix Phi ------------------------------------------------------------------

PhiMatrix phi_matrix(const LevyModel& m, const RealMatrix& T) {
    RealMatrix negT = T;
    negT *= -1.0;
    const Spectrum spec = compute_spectrum(negT);
    for (auto l : spec.eigenvalues)
        if (l.real() <= 0.0)
            throw DomainError("phi_matrix: -T must have eigenvalues in the right half-plane");

    const AnalyticFn phi_fn{[&m](Complex z) { return phi_scalar(m, z); },
                            FnDomain::RightHalfPlane};
    const CMatrix Mc = to_complex(negT);
    CMatrix raw = spec.simple() ? matfn_spectral(Mc, spec, phi_fn)
                                : matfn_contour(Mc, spec, phi_fn);

    PhiMatrix out;
    out.value = real_checked(raw, 1e-8);
    const RealMatrix psi_of = m.psi_matrix(out.value);
    RealMatrix resid = psi_of;
    resid += T;
    out.residual = resid.inf_norm();
    if (out.residual > 1e-7 * std::max(1.0, T.inf_norm()))
        throw ResidualTooLargeError("phi_matrix: residual " + std::to_string(out.residual));
    return out;
}

PhiMatrix phi_matrix(const LevyModel& m, const MERep& horizon) { return phi_matrix(m, horizon.T()); }

RealMatrix LevyModel::psi_matrix(const RealMatrix& M) const {
    const int p = M.dim();
    if (const auto* bm = std::get_if<BrownianDrift>(&v_)) {
        RealMatrix out = M * M;
        out *= 0.5 * bm->sigma * bm->sigma;
        RealMatrix lin = M;
        lin *= bm->gamma;
        out += lin;
        return out;
    }
    if (const auto* cl = std::get_if<CramerLundbergME>(&v_)) {
        RealMatrix out = M * M;
        out *= 0.5 * cl->sigma * cl->sigma;
        RealMatrix lin = M;
        lin *= cl->premium;
        out += lin;
        if (cl->jump_rate > 0.0) {
            // L_J(M) with L_J(z) = alpha_J (z I - T_J)^{-1} t_J. Stack the
            // blocks U_i = sum_j [(zI-T)^{-1}]_{ij}(M) t_j, solving
            // (I_m ox M - T_J ox I_p) U = t_J ox I_p.
            const auto& J = cl->jump;
            const int mj = J.dim();
            RealMatrix K(mj * p);
            for (int bi = 0; bi < mj; ++bi)
                for (int bj = 0; bj < mj; ++bj)
                    for (int r = 0; r < p; ++r)
                        for (int s = 0; s < p; ++s) {
                            double v = 0.0;
                            if (bi == bj) v += M(r, s);
                            if (r == s) v -= J.T()(bi, bj);
                            K(bi * p + r, bj * p + s) = v;
                        }
            RealMatrix rhs(mj * p);
            for (int bi = 0; bi < mj; ++bi)
                for (int r = 0; r < p; ++r) rhs(bi * p + r, r) = J.exit_vector()[bi];
            const RealMatrix U = lu_solve(K, rhs);
            RealMatrix lap(p);
            for (int bi = 0; bi < mj; ++bi)
                for (int r = 0; r < p; ++r)
                    for (int s = 0; s < p; ++s) lap(r, s) += J.alpha()[bi] * U(bi * p + r, s);
            RealMatrix jump_part = RealMatrix::identity(p);
            jump_part *= -1.0;
            jump_part += lap;
            jump_part *= cl->jump_rate; // rate (L_J(M) - I)
            out += jump_part;
        }
        return out;
    }
    const auto& st = std::get<Stable>(v_);
    const Spectrum spec = compute_spectrum(M);
    const AnalyticFn pow_fn{[&st](Complex z) { return principal_pow(z, st.alpha); },
                            FnDomain::CutPlaneNoNonpositiveReals};
    const CMatrix Mc = to_complex(M);
    CMatrix raw = spec.simple() ? matfn_spectral(Mc, spec, pow_fn)
                                : matfn_contour(Mc, spec, pow_fn);
    return real_checked(raw, 1e-8);
}

} // namespace levyme
