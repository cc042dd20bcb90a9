#include "levyme/me_dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace levyme {

namespace {

RealMatrix neg(const RealMatrix& m) {
    RealMatrix out = m;
    out *= -1.0;
    return out;
}

RealVector mat_vec(const RealMatrix& m, const RealVector& v) {
    RealVector out(m.dim(), 0.0);
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

double dot(const RealVector& a, const RealVector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

void ExpTermList::validate() const {
    if (terms.empty()) throw InvalidRepresentationError("ExpTermList: no terms");
    for (const auto& t : terms)
        if (t.lambda.real() <= 0.0)
            throw InvalidRepresentationError("ExpTermList: Re(lambda) must be > 0");

    // conjugate closure
    std::vector<bool> matched(terms.size(), false);
    for (size_t i = 0; i < terms.size(); ++i) {
        if (matched[i] || std::abs(terms[i].lambda.imag()) < 1e-14) continue;
        bool found = false;
        for (size_t j = 0; j < terms.size(); ++j) {
            if (j == i || matched[j]) continue;
            if (std::abs(terms[j].lambda - std::conj(terms[i].lambda)) <
                    1e-9 * std::max(1.0, std::abs(terms[i].lambda)) &&
                std::abs(terms[j].c - std::conj(terms[i].c)) <
                    1e-9 * std::max(1.0, std::abs(terms[i].c))) {
                matched[i] = matched[j] = true;
                found = true;
                break;
            }
        }
        if (!found) throw ConjugationViolationError("ExpTermList: unmatched complex term");
    }

    Complex mass{};
    for (const auto& t : terms) mass += t.c / t.lambda;
    if (std::abs(mass.imag()) > 1e-9 * std::max(1.0, std::abs(mass)))
        throw InvalidRepresentationError("ExpTermList: total mass is not real");

    for (double x = 0.0; x <= 20.0 + 1e-12; x += 0.01) {
        Complex f{};
        for (const auto& t : terms) f += t.c * std::exp(-t.lambda * x);
        if (f.real() < -1e-9 * std::max(1.0, std::abs(terms[0].c)))
            throw InvalidRepresentationError("ExpTermList: density negative at x = " +
                                             std::to_string(x));
    }
}

ExpTermList parse_exp_terms_csv(const std::string& content) {
    ExpTermList out;
    std::istringstream in(content);
    std::string line;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("re_c", 0) != 0)
                throw DomainError("exp-terms CSV: expected header starting with re_c (line 1)");
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DomainError("exp-terms CSV: bad number '" + cell + "' at line " +
                                  std::to_string(lineno));
            }
        }
        if (vals.size() != 4 && vals.size() != 5)
            throw DomainError("exp-terms CSV: expected 4 or 5 columns at line " +
                              std::to_string(lineno));
        ExpTerm term{Complex(vals[0], vals[1]), Complex(vals[2], vals[3])};
        out.terms.push_back(term);
        if (vals.size() == 5 && vals[4] != 0.0)
            out.terms.push_back({std::conj(term.c), std::conj(term.lambda)});
    }
    out.validate();
    return out;
}

ExpTermList load_exp_terms_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open exp-terms file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_exp_terms_csv(buf.str());
}

// ---- MERep ---------------------------------------------------------------------

MERep MERep::make(RealVector alpha, RealMatrix T, RealVector t) {
    const int p = T.dim();
    if (static_cast<int>(alpha.size()) != p || static_cast<int>(t.size()) != p)
        throw InvalidRepresentationError("MERep: vector/matrix size mismatch");
    for (double v : alpha)
        if (!std::isfinite(v)) throw InvalidRepresentationError("MERep: non-finite alpha");
    for (double v : t)
        if (!std::isfinite(v)) throw InvalidRepresentationError("MERep: non-finite t");

    MERep rep;
    rep.alpha_ = std::move(alpha);
    rep.T_ = std::move(T);
    rep.t_ = std::move(t);
    rep.build_caches();
    return rep;
}

void MERep::build_caches() {
    const int p = T_.dim();
    spec_ = compute_spectrum(T_);
    for (auto l : spec_.eigenvalues)
        if (l.real() >= -1e-12)
            throw InvalidRepresentationError(
                "MERep: ME generator must have eigenvalues with negative real part");

    l_ = lu_solve(neg(T_), t_);
    defect_ = dot(alpha_, l_);
    if (!(defect_ > 1e-12) || defect_ > 1.0 + 1e-9)
        throw InvalidRepresentationError("MERep: total mass " + std::to_string(defect_) +
                                         " outside (0, 1]");
    defect_ = std::min(defect_, 1.0);

    RealVector Tone = mat_vec(T_, RealVector(p, 1.0));
    canonical_ = true;
    double asum = 0.0;
    for (int i = 0; i < p; ++i) {
        if (std::abs(t_[i] + Tone[i]) > 1e-9 * std::max(1.0, std::abs(t_[i]))) canonical_ = false;
        asum += alpha_[i];
    }
    if (std::abs(asum - 1.0) > 1e-9) canonical_ = false;

    spectral_ok_ = spec_.simple();
    if (spectral_ok_) {
        const CMatrix Tc = to_complex(T_);
        const auto proj = lagrange_projectors(Tc, spec_);
        lam_ = spec_.eigenvalues;
        wt_density_.assign(p, Complex{});
        wt_cdf_.assign(p, Complex{});
        for (int k = 0; k < p; ++k) {
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    wt_density_[k] += alpha_[i] * proj[k](i, j) * t_[j];
                    wt_cdf_[k] += alpha_[i] * proj[k](i, j) * l_[j];
                }
        }
    }

    // density guard on the verification grid
    double worst = 0.0, scale = 1.0;
    if (spectral_ok_) {
        for (double x = 0.0; x <= 20.0 + 1e-12; x += 0.01) {
            const double f = density(x);
            worst = std::min(worst, f);
            scale = std::max(scale, std::abs(f));
        }
    } else {
        const RealMatrix step = expm(T_ * 0.01);
        RealMatrix e = RealMatrix::identity(p);
        for (int k = 0; k <= 2000; ++k) {
            double f = 0.0;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) f += alpha_[i] * e(i, j) * t_[j];
            worst = std::min(worst, f);
            scale = std::max(scale, std::abs(f));
            e = e * step;
        }
    }
    if (worst < -1e-9 * scale)
        throw InvalidRepresentationError("MERep: density negative on verification grid (" +
                                         std::to_string(worst) + ")");
}

MERep MERep::exponential(double rate) {
    if (rate <= 0.0) throw InvalidRepresentationError("exponential: rate must be > 0");
    RealMatrix T(1);
    T(0, 0) = -rate;
    return make({1.0}, T, {rate});
}

MERep MERep::erlang(int stages, double rate) {
    if (stages < 1 || rate <= 0.0) throw InvalidRepresentationError("erlang: bad parameters");
    RealMatrix T(stages);
    RealVector alpha(stages, 0.0), t(stages, 0.0);
    alpha[0] = 1.0;
    for (int i = 0; i < stages; ++i) {
        T(i, i) = -rate;
        if (i + 1 < stages) T(i, i + 1) = rate;
    }
    t[stages - 1] = rate;
    return make(std::move(alpha), std::move(T), std::move(t));
}

double MERep::density(double x) const {
    if (x < 0.0) throw DomainError("density: x must be >= 0");
    if (spectral_ok_) {
        Complex s{};
        for (size_t k = 0; k < lam_.size(); ++k) s += wt_density_[k] * std::exp(lam_[k] * x);
        double v = s.real();
        if (v < 0.0 && v > -1e-9) v = 0.0;
        return v;
    }
    const RealMatrix e = expm(T_ * x);
    double v = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) v += alpha_[i] * e(i, j) * t_[j];
    if (v < 0.0 && v > -1e-9) v = 0.0;
    return v;
}

double MERep::cdf(double x) const {
    if (x < 0.0) throw DomainError("cdf: x must be >= 0");
    double v;
    if (spectral_ok_) {
        Complex s{};
        for (size_t k = 0; k < lam_.size(); ++k) s += wt_cdf_[k] * std::exp(lam_[k] * x);
        v = defect_ - s.real();
    } else {
        const RealMatrix e = expm(T_ * x);
        double tail = 0.0;
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j) tail += alpha_[i] * e(i, j) * l_[j];
        v = defect_ - tail;
    }
    return std::clamp(v, 0.0, 1.0);
}

Complex MERep::laplace(Complex s) const {
    if (s.real() < 0.0) throw DomainError("laplace: Re(s) must be >= 0");
    // alpha (sI - T)^{-1} t
    CMatrix A = to_complex(T_);
    A *= -1.0;
    for (int i = 0; i < dim(); ++i) A(i, i) += s;
    CVector tc(t_.begin(), t_.end());
    const CVector x = lu_solve(A, tc);
    Complex out{};
    for (int i = 0; i < dim(); ++i) out += alpha_[i] * x[i];
    return out;
}

double MERep::mean() const {
    // E T = alpha (-T)^{-2} t = alpha (-T)^{-1} l
    const RealVector m = lu_solve(neg(T_), l_);
    return dot(alpha_, m);
}

MERep MERep::kill_min(double delta) const {
    if (delta <= 0.0) throw DomainError("kill_min: delta must be > 0");
    RealMatrix T = T_;
    for (int i = 0; i < dim(); ++i) T(i, i) -= delta;
    RealVector t = t_;
    for (int i = 0; i < dim(); ++i) t[i] += delta * l_[i];
    return make(alpha_, std::move(T), std::move(t));
}

MERep MERep::kill_discount(double delta) const {
    if (delta <= 0.0) throw DomainError("kill_discount: delta must be > 0");
    RealMatrix T = T_;
    for (int i = 0; i < dim(); ++i) T(i, i) -= delta;
    return make(alpha_, std::move(T), t_);
}

MERep MERep::canonicalize() const {
    if (canonical_) return *this;
    if (defect_ < 1.0 - 1e-9) return *this; // defective: alpha 1 = 1 unreachable
    const int p = dim();
    int piv = 0;
    for (int i = 1; i < p; ++i)
        if (std::abs(l_[i]) > std::abs(l_[piv])) piv = i;
    if (std::abs(l_[piv]) < 1e-8) return *this;

    // S = I + (l - 1) e_piv^T maps 1 to l; S^{-1} = I - (l - 1) e_piv^T / l_piv.
    RealMatrix S = RealMatrix::identity(p), Sinv = RealMatrix::identity(p);
    for (int i = 0; i < p; ++i) {
        S(i, piv) += l_[i] - 1.0;
        Sinv(i, piv) -= (l_[i] - 1.0) / l_[piv];
    }
    RealVector alpha(p, 0.0);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) alpha[j] += alpha_[i] * S(i, j);
    RealMatrix T = Sinv * T_ * S;
    RealVector t = mat_vec(T, RealVector(p, 1.0));
    for (auto& v : t) v = -v;
    return make(std::move(alpha), std::move(T), std::move(t));
}

double MERep::sample(std::mt19937_64& rng) const {
    if (defect_ < 1.0 - 1e-9)
        throw DefectiveSampleError("sample: representation is defective (mass " +
                                   std::to_string(defect_) + ")");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    while (u <= 0.0 || u >= 1.0) u = unif(rng);

    double hi = 1.0;
    for (int i = 0; i < 80 && cdf(hi) < u; ++i) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < u ? lo : hi) = mid;
        if (hi - lo < 1e-10 * std::max(1.0, hi)) break;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double d = density(x);
        if (d <= 1e-14) break;
        const double step = (cdf(x) - u) / d;
        const double nx = x - step;
        if (nx <= lo || nx >= hi) break;
        x = nx;
    }
    return x;
}

bool MERep::is_phase_type(double tol) const {
    double asum = 0.0;
    for (double a : alpha_) {
        if (a < -tol) return false;
        asum += a;
    }
    if (asum > 1.0 + 1e-9) return false;
    for (int i = 0; i < dim(); ++i) {
        if (T_(i, i) >= 0.0) return false;
        double row = 0.0;
        for (int j = 0; j < dim(); ++j) {
            if (j != i && T_(i, j) < -tol) return false;
            row += T_(i, j);
        }
        if (row > tol * std::max(1.0, std::abs(T_(i, i)))) return false;
        if (t_[i] < -tol) return false;
    }
    return true;
}

MERep me_from_exp_terms(const ExpTermList& list) {
    list.validate();
    // consume real terms as 1x1 blocks, conjugate pairs as 2x2 rotation blocks
    std::vector<const ExpTerm*> reals;
    std::vector<const ExpTerm*> upper; // one representative per conjugate pair
    std::vector<bool> used(list.terms.size(), false);
    for (size_t i = 0; i < list.terms.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(list.terms[i].lambda.imag()) < 1e-14) {
            reals.push_back(&list.terms[i]);
            used[i] = true;
            continue;
        }
        for (size_t j = i + 1; j < list.terms.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(list.terms[j].lambda - std::conj(list.terms[i].lambda)) <
                1e-9 * std::max(1.0, std::abs(list.terms[i].lambda))) {
                used[i] = used[j] = true;
                upper.push_back(list.terms[i].lambda.imag() > 0 ? &list.terms[i] : &list.terms[j]);
                break;
            }
        }
    }

    const int p = static_cast<int>(reals.size()) + 2 * static_cast<int>(upper.size());
    RealMatrix T(p);
    RealVector alpha(p, 0.0), t(p, 0.0);
    int pos = 0;
    for (const auto* term : reals) {
        const double lam = term->lambda.real();
        T(pos, pos) = -lam;
        t[pos] = lam;
        alpha[pos] = term->c.real() / lam;
        ++pos;
    }
    for (const auto* term : upper) {
        const double a = term->lambda.real(), b = term->lambda.imag();
        T(pos, pos) = -a;
        T(pos, pos + 1) = b;
        T(pos + 1, pos) = -b;
        T(pos + 1, pos + 1) = -a;
        // alpha e^{Tx} t over this block = 2 e^{-ax}(Re c cos bx + Im c sin bx)
        t[pos] = 1.0;
        alpha[pos] = 2.0 * term->c.real();
        alpha[pos + 1] = -2.0 * term->c.imag();
        pos += 2;
    }
    return MERep::make(std::move(alpha), std::move(T), std::move(t));
}

} // namespace levyme
