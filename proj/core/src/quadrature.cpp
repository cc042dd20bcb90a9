#include "levyme/quadrature.hpp"

#include <array>
#include <cmath>

namespace levyme {

namespace {

constexpr int kGlOrder = 15;

struct GlRule {
    std::array<double, kGlOrder> node{};
    std::array<double, kGlOrder> weight{};
};

// Nodes/weights on [-1, 1] by Newton iteration on Legendre P_n.
GlRule build_rule() {
    GlRule r;
    const int n = kGlOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.node[i] = x;
        r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const GlRule& rule() {
    static const GlRule r = build_rule();
    return r;
}

template <typename V, typename F>
V panel(const F& f, double a, double b) {
    const auto& r = rule();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    V acc{};
    for (int i = 0; i < kGlOrder; ++i) {
        V v = f(mid + half * r.node[i]);
        v *= r.weight[i];
        acc += v;
    }
    acc *= half;
    return acc;
}

struct CAcc {
    Complex v{};
    CAcc& operator+=(const CAcc& o) {
        v += o.v;
        return *this;
    }
    CAcc& operator*=(double s) {
        v *= s;
        return *this;
    }
    double norm() const { return std::abs(v); }
};

struct MAcc {
    RealMatrix v;
    MAcc& operator+=(const MAcc& o) {
        if (v.dim() == 0)
            v = o.v;
        else
            v += o.v;
        return *this;
    }
    MAcc& operator*=(double s) {
        v *= s;
        return *this;
    }
    double norm() const { return v.inf_norm(); }
};

template <typename V, typename F>
void adapt(const F& f, double a, double b, const V& whole, double abs_tol, double rel_tol,
           int depth, V& total, double total_scale) {
    const double mid = 0.5 * (a + b);
    V left = panel<V>(f, a, mid);
    V right = panel<V>(f, mid, b);
    V sum = left;
    sum += right;
    V diff = sum;
    V neg = whole;
    neg *= -1.0;
    diff += neg;
    const double err = diff.norm();
    if (err <= std::max(abs_tol, rel_tol * total_scale) || depth <= 0) {
        if (depth <= 0 && err > 16.0 * std::max(abs_tol, rel_tol * total_scale))
            throw QuadratureFailureError("integrate: depth exhausted with error " +
                                         std::to_string(err));
        total += sum;
        return;
    }
    adapt(f, a, mid, left, abs_tol * 0.5, rel_tol, depth - 1, total, total_scale);
    adapt(f, mid, b, right, abs_tol * 0.5, rel_tol, depth - 1, total, total_scale);
}

template <typename V, typename F>
V integrate_impl(const F& f, double a, double b, double abs_tol, double rel_tol, int max_depth) {
    V whole = panel<V>(f, a, b);
    V total{};
    adapt(f, a, b, whole, abs_tol, rel_tol, max_depth, total, std::max(1e-300, whole.norm()));
    return total;
}

} // namespace

Complex integrate(const std::function<Complex(double)>& f, double a, double b, double abs_tol,
                  double rel_tol, int max_depth) {
    if (a == b) return {};
    auto wrap = [&f](double x) { return CAcc{f(x)}; };
    return integrate_impl<CAcc>(wrap, a, b, abs_tol, rel_tol, max_depth).v;
}

double integrate_real(const std::function<double(double)>& f, double a, double b, double abs_tol,
                      double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    auto wrap = [&f](double x) { return CAcc{Complex(f(x), 0.0)}; };
    return integrate_impl<CAcc>(wrap, a, b, abs_tol, rel_tol, max_depth).v.real();
}

RealMatrix integrate_matrix(const std::function<RealMatrix(double)>& f, double a, double b,
                            double abs_tol, double rel_tol, int max_depth) {
    auto wrap = [&f](double x) { return MAcc{f(x)}; };
    return integrate_impl<MAcc>(wrap, a, b, abs_tol, rel_tol, max_depth).v;
}

} // namespace levyme
