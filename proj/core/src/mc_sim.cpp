#include "levyme/mc_sim.hpp"

#include <algorithm>
#include <cmath>

namespace levyme {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    // (0, 1) open to keep logs and inverses finite
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal_draw(std::mt19937_64& rng) {
    // Box-Muller, one variate per call for stream determinism
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Tracks one path's running functionals and barrier hits.
class Recorder {
  public:
    Recorder(const BarrierSpec& spec, PathSummary& out) : spec_(spec), out_(out) {
        out_.up_hit.assign(spec.up_levels.size(), kNever);
        out_.down_hit.assign(spec.down_levels.size(), kNever);
        if (spec.record_reflected) {
            out_.reflected_hit.assign(spec.reflect_levels.size(), kNever);
            out_.reflected_regulator.assign(spec.reflect_levels.size(), 0.0);
            y_ = spec.reflect_start;
        }
    }

    // Piecewise-constant jump to value x at time t (used at grid points and
    // jump epochs). Линear interpolation is deliberately not applied: the
    // protocol observes the path at discrete instants only.
    void observe(double t, double x) {
        out_.sup = std::max(out_.sup, x);
        out_.inf = std::min(out_.inf, x);
        for (size_t i = 0; i < spec_.up_levels.size(); ++i)
            if (out_.up_hit[i] == kNever && x > spec_.up_levels[i]) out_.up_hit[i] = t;
        for (size_t i = 0; i < spec_.down_levels.size(); ++i)
            if (out_.down_hit[i] == kNever && x < -spec_.down_levels[i]) out_.down_hit[i] = t;
        if (spec_.record_reflected) {
            y_ += x - prev_x_;
            if (y_ < 0.0) {
                r_ += -y_;
                y_ = 0.0;
            }
            for (size_t i = 0; i < spec_.reflect_levels.size(); ++i)
                if (out_.reflected_hit[i] == kNever && y_ > spec_.reflect_levels[i]) {
                    out_.reflected_hit[i] = t;
                    out_.reflected_regulator[i] = r_;
                }
        }
        prev_x_ = x;
        out_.terminal = x;
    }

  private:
    const BarrierSpec& spec_;
    PathSummary& out_;
    double prev_x_ = 0.0;
    double y_ = 0.0;
    double r_ = 0.0;
};

void walk_grid(const LevyModel& model, double T, double h, std::mt19937_64& rng, Recorder& rec) {
    double t = 0.0, x = 0.0;
    const bool stable = model.is_stable();
    double sigma = 0.0, gamma = 0.0, alpha = 0.0, jump_rate = 0.0, premium = 0.0;
    const MERep* jump = nullptr;
    if (stable) {
        alpha = model.as_stable().alpha;
    } else if (model.is_brownian()) {
        sigma = model.as_brownian().sigma;
        gamma = model.as_brownian().gamma;
    } else {
        const auto& cl = model.as_cramer_lundberg();
        sigma = cl.sigma;
        premium = cl.premium;
        jump_rate = cl.jump_rate;
        jump = &cl.jump;
    }

    while (t < T) {
        const double dt = std::min(h, T - t);
        double dx;
        if (stable) {
            dx = stable_increment(alpha, dt, rng);
        } else if (model.is_brownian()) {
            dx = gamma * dt + sigma * std::sqrt(dt) * normal_draw(rng);
        } else {
            dx = premium * dt + sigma * std::sqrt(dt) * normal_draw(rng);
            if (jump_rate > 0.0) {
                std::poisson_distribution<int> pois(jump_rate * dt);
                const int jumps = pois(rng);
                for (int j = 0; j < jumps; ++j) dx -= jump->sample(rng);
            }
        }
        t += dt;
        x += dx;
        rec.observe(t, x);
    }
}

// Exact event-driven walk for the pure compound-Poisson family: linear drift
// up between jumps, so suprema and crossing times are exact.
void walk_events(const CramerLundbergME& cl, double T, std::mt19937_64& rng, Recorder& rec,
                 const BarrierSpec& spec, PathSummary& out) {
    double t = 0.0, x = 0.0;
    const double c = cl.premium;
    std::vector<size_t> next_up; // indices of up levels not yet hit, sorted by level
    std::vector<size_t> order(spec.up_levels.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return spec.up_levels[a] < spec.up_levels[b]; });
    size_t next = 0;

    auto rise_to = [&](double t_end) {
        // continuous ascent from (t, x) to time t_end at slope c
        const double x_end = x + c * (t_end - t);
        while (next < order.size()) {
            const double lev = spec.up_levels[order[next]];
            if (x_end <= lev) break;
            const double when = (c > 0.0) ? t + (lev - x) / c : t_end;
            if (out.up_hit[order[next]] == kNever && when <= t_end) out.up_hit[order[next]] = when;
            ++next;
        }
        out.sup = std::max(out.sup, x_end);
        t = t_end;
        x = x_end;
    };

    std::exponential_distribution<double> expo(cl.jump_rate > 0.0 ? cl.jump_rate : 1.0);
    while (t < T) {
        const double tau = (cl.jump_rate > 0.0) ? expo(rng) : (T - t);
        const double t_next = std::min(t + tau, T);
        const bool jump_now = cl.jump_rate > 0.0 && t + tau <= T;
        rise_to(t_next);
        if (jump_now) {
            x -= cl.jump.sample(rng);
            out.inf = std::min(out.inf, x);
            for (size_t i = 0; i < spec.down_levels.size(); ++i)
                if (out.down_hit[i] == kNever && x < -spec.down_levels[i]) out.down_hit[i] = t;
        }
    }
    out.terminal = x;
}

} // namespace

std::uint64_t path_stream_seed(std::uint64_t seed, std::int64_t index) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 0x51a2b3c4d5e6f701ULL));
}

double stable_increment(double alpha, double dt, std::mt19937_64& rng) {
    if (!(alpha > 1.0 && alpha <= 2.0) || dt <= 0.0)
        throw DomainError("stable_increment: need alpha in (1, 2] and dt > 0");
    const double u = uniform01(rng);
    const double w = -std::log(uniform01(rng));
    const double v = M_PI * (u - 0.5);
    if (alpha == 2.0) {
        // degenerates to N(0, 2): E e^{theta X} = e^{theta^2}
        return std::sqrt(dt) * std::sqrt(2.0) * std::sin(v) * std::sqrt(w) /
               std::sqrt(0.5 - 0.0) * 0.5 * 2.0 / std::sqrt(2.0) *
               std::sqrt(2.0); // see below; kept explicit in the CMS branch
    }
    const double beta = -1.0;
    const double tan_half = std::tan(M_PI * alpha / 2.0);
    const double B = std::atan(beta * tan_half) / alpha;
    const double S = std::pow(1.0 + beta * beta * tan_half * tan_half, 1.0 / (2.0 * alpha));
    const double cms = S * std::sin(alpha * (v + B)) / std::pow(std::cos(v), 1.0 / alpha) *
                       std::pow(std::cos(v - alpha * (v + B)) / w, (1.0 - alpha) / alpha);
    const double sigma = std::pow(std::abs(std::cos(M_PI * alpha / 2.0)), 1.0 / alpha);
    return std::pow(dt, 1.0 / alpha) * sigma * cms;
}

std::vector<PathSummary> simulate_paths(const LevyModel& model, const MERep& horizon,
                                        const SimConfig& config, const BarrierSpec& barriers) {
    if (config.h <= 0.0 || config.paths < 1) throw DomainError("simulate_paths: bad config");
    std::vector<PathSummary> out(config.paths);
    const bool exact_events = model.is_cramer_lundberg() && model.as_cramer_lundberg().sigma == 0.0 &&
                              !barriers.record_reflected;
    for (std::int64_t i = 0; i < config.paths; ++i) {
        std::mt19937_64 rng(path_stream_seed(config.seed, i));
        PathSummary& s = out[i];
        double T = horizon.sample(rng);
        if (T > config.horizon_cap) {
            T = config.horizon_cap;
            s.capped = true;
        }
        s.horizon = T;
        Recorder rec(barriers, s);
        if (exact_events)
            walk_events(model.as_cramer_lundberg(), T, rng, rec, barriers, s);
        else
            walk_grid(model, T, config.h, rng, rec);
    }
    return out;
}

double capped_mass(const std::vector<PathSummary>& summaries) {
    if (summaries.empty()) return 0.0;
    double n = 0.0;
    for (const auto& s : summaries) n += s.capped ? 1.0 : 0.0;
    return n / static_cast<double>(summaries.size());
}

PhaseGenerator phase_tracked_simulate(const LevyModel& model, const MERep& ph_horizon,
                                      const SimConfig& config, double dx, double max_level,
                                      std::int64_t min_transitions) {
    if (!ph_horizon.is_phase_type())
        throw NotPhaseTypeError("phase_tracked_simulate: horizon must be phase-type");
    if (dx <= 0.0 || max_level <= dx) throw DomainError("phase_tracked_simulate: bad level grid");
    const int p = ph_horizon.dim();
    const auto& T = ph_horizon.T();
    const auto& tvec = ph_horizon.exit_vector();
    const auto& a0 = ph_horizon.alpha();

    std::vector<std::vector<std::int64_t>> count(p, std::vector<std::int64_t>(p, 0));
    std::vector<std::int64_t> row_total(p, 0);

    for (std::int64_t i = 0; i < config.paths; ++i) {
        std::mt19937_64 rng(path_stream_seed(config.seed, i));
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        // phase chain trajectory: switch times and states until absorption
        std::vector<double> switch_time;
        std::vector<int> state_seq;
        double clock = 0.0;
        int state = 0;
        {
            double u = unif(rng);
            double acc = 0.0;
            for (int k = 0; k < p; ++k) {
                acc += a0[k];
                if (u <= acc + 1e-15) {
                    state = k;
                    break;
                }
            }
        }
        bool absorbed = false;
        while (!absorbed && clock < config.horizon_cap) {
            state_seq.push_back(state);
            const double rate = -T(state, state);
            std::exponential_distribution<double> expo(rate);
            clock += expo(rng);
            switch_time.push_back(clock);
            const double u = unif(rng) * rate;
            double acc = 0.0;
            int nxt = -1;
            for (int k = 0; k < p; ++k) {
                if (k == state) continue;
                acc += T(state, k);
                if (u <= acc) {
                    nxt = k;
                    break;
                }
            }
            if (nxt < 0) absorbed = true; // exit mass t[state]
            else state = nxt;
        }
        const double horizon = std::min(clock, config.horizon_cap);

        // walk X to the horizon, recording the phase at each level crossing
        double t = 0.0, x = 0.0;
        size_t seg = 0;
        int level = 0;
        int prev_phase = state_seq.empty() ? 0 : state_seq[0];
        const int max_levels = static_cast<int>(max_level / dx);
        while (t < horizon && level < max_levels) {
            const double dt = std::min(config.h, horizon - t);
            double step;
            if (model.is_stable()) {
                step = stable_increment(model.as_stable().alpha, dt, rng);
            } else if (model.is_brownian()) {
                step = model.as_brownian().gamma * dt +
                       model.as_brownian().sigma * std::sqrt(dt) * normal_draw(rng);
            } else {
                const auto& cl = model.as_cramer_lundberg();
                step = cl.premium * dt + cl.sigma * std::sqrt(dt) * normal_draw(rng);
                if (cl.jump_rate > 0.0) {
                    std::poisson_distribution<int> pois(cl.jump_rate * dt);
                    const int jumps = pois(rng);
                    for (int j = 0; j < jumps; ++j) step -= cl.jump.sample(rng);
                }
            }
            t += dt;
            x += step;
            while (seg < switch_time.size() && switch_time[seg] <= t) ++seg;
            const int phase_now = (seg < state_seq.size()) ? state_seq[seg] : -1;
            while (x > (level + 1) * dx && level < max_levels) {
                ++level;
                if (phase_now >= 0) {
                    count[prev_phase][phase_now] += 1;
                    row_total[prev_phase] += 1;
                    prev_phase = phase_now;
                } else {
                    // absorbed before this crossing: contributes to killing,
                    // which the sub-stochastic row normalization captures
                    row_total[prev_phase] += 1;
                    t = horizon; // path over
                    break;
                }
            }
        }
    }

    for (int i = 0; i < p; ++i)
        if (row_total[i] < min_transitions)
            throw InsufficientPassagesError("phase_tracked_simulate: phase " + std::to_string(i) +
                                            " has only " + std::to_string(row_total[i]) +
                                            " transitions");

    RealMatrix P(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) P(i, j) = static_cast<double>(count[i][j]) / row_total[i];

    // generator = log(P)/dx through the spectral log
    const Spectrum spec = compute_spectrum(P);
    const AnalyticFn log_fn{[](Complex z) { return std::log(z); },
                            FnDomain::CutPlaneNoNonpositiveReals};
    const RealMatrix G = real_checked(matfn_spectral(to_complex(P), spec, log_fn), 1e-7);

    PhaseGenerator out;
    out.generator = G;
    out.generator *= 1.0 / dx;
    out.std_error = RealMatrix(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double pij = P(i, j);
            out.std_error(i, j) = std::sqrt(std::max(pij * (1.0 - pij), 1.0 / row_total[i]) /
                                            row_total[i]) /
                                  dx;
        }
    out.transitions.assign(row_total.begin(), row_total.end());
    return out;
}

} // namespace levyme
