#pragma once

// Monte Carlo layer: exact Hawkes thinning, rescaled integrated intensities,
// and the full-truncation Euler scheme for the multifactor lift of the
// square-root model with variance jumps. Paths draw from per-path mt19937_64
// streams, so populations are reproducible and independent of thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "svolterra/grid.hpp"
#include "svolterra/kernels.hpp"
#include "svolterra/model.hpp"
#include "svolterra/rng.hpp"
#include "svolterra/transforms.hpp"

namespace svolterra {

namespace detail {

// Runs body(state, i) for i in [0, paths) across up to `threads` workers.
// Each worker owns one state from make_state(); indices are handed out in
// contiguous blocks. Work must depend only on i, never on scheduling.
template <class MakeState, class Body>
void parallel_paths(int paths, int threads, MakeState&& make_state, Body&& body) {
    if (paths < 1) throw std::invalid_argument("parallel_paths: paths must be >= 1");
    const int nt = std::max(1, std::min(threads, paths));
    if (nt == 1) {
        auto state = make_state();
        for (int i = 0; i < paths; ++i) body(state, i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    constexpr int block = 64;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        workers.emplace_back([&] {
            auto state = make_state();
            try {
                while (true) {
                    const int lo = next.fetch_add(block);
                    if (lo >= paths) break;
                    const int hi = std::min(paths, lo + block);
                    for (int i = lo; i < hi; ++i) body(state, i);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

// ------------------------------------------------------------------ Hawkes

struct HawkesOptions {
    double lookahead = 0.25;       // envelope refresh window; any value > 0 is exact
    long max_events = 20'000'000;  // hard stop for near-critical settings
};

struct HawkesPath {
    std::vector<double> events;
    double integrated_intensity = 0.0;  // int_0^T lambda, closed form given the events
};

namespace detail {

// Running excitation sum_j K(t - t_j). ExpSum kernels keep one decayed
// accumulator per term; other bounded kernels re-sum over past events.
struct Excitation {
    const KernelSpec& k;
    const ExpSum* es;
    const std::vector<double>& events;
    std::vector<double> state;
    double at = 0.0;

    Excitation(const KernelSpec& kernel, const std::vector<double>& ev)
        : k(kernel), es(std::get_if<ExpSum>(&kernel.v)), events(ev) {
        if (es) state.assign(es->terms.size(), 0.0);
    }
    void advance(double t) {
        if (es && t > at)
            for (std::size_t i = 0; i < state.size(); ++i)
                state[i] *= std::exp(-es->terms[i].rate * (t - at));
        at = t;
    }
    void add_event() {  // event at the current time; decays from here on
        if (es)
            for (double& s : state) s += 1.0;
    }
    double value() const {
        if (es) {
            double v = 0.0;
            for (std::size_t i = 0; i < state.size(); ++i) v += es->terms[i].weight * state[i];
            return v;
        }
        double v = 0.0;
        for (double tj : events)
            if (tj < at) v += eval_kernel(k, at - tj);
        return v;
    }
};

}  // namespace detail

// Ogata thinning. The dominating rate over [t, t + w] is sup of g0 on the
// window plus the excitation at its left edge, valid because every bounded
// kernel here is non-increasing and rejected candidates leave lambda alone.
inline HawkesPath simulate_hawkes_stream(const InputCurve& g0, const KernelSpec& k, double T,
                                         std::mt19937_64& rng, const HawkesOptions& opt = {}) {
    validate(k);
    if (!bounded_at_zero(k))
        throw std::invalid_argument(
            "simulate_hawkes: kernel unbounded at 0+; thinning needs a bounded kernel, e.g. "
            "kernel_shifted(base, h)");
    if (!(T > 0.0)) throw std::invalid_argument("simulate_hawkes: T must be > 0");
    if (!(opt.lookahead > 0.0)) throw std::invalid_argument("simulate_hawkes: lookahead must be > 0");

    HawkesPath out;
    detail::Excitation ex(k, out.events);
    double t = 0.0;
    while (t < T) {
        const double w = std::min(opt.lookahead, T - t);
        ex.advance(t);
        const double bar = curve_sup(g0, k, t, t + w) + ex.value();
        if (!(bar > 0.0)) {
            t += w;
            continue;
        }
        const double step = sample_exponential(rng) / bar;
        if (step >= w) {
            t += w;
            continue;
        }
        t += step;
        ex.advance(t);
        const double lam = curve_value(g0, k, t) + ex.value();
        if (sample_uniform(rng) * bar <= lam) {
            out.events.push_back(t);
            ex.add_event();
            if (static_cast<long>(out.events.size()) > opt.max_events)
                throw std::runtime_error("simulate_hawkes: event budget exhausted");
        }
    }
    out.integrated_intensity = curve_integral(g0, k, T);
    for (double tj : out.events) out.integrated_intensity += ik_value(k, T - tj);
    return out;
}

inline HawkesPath simulate_hawkes(const InputCurve& g0, const KernelSpec& k, double T,
                                  std::uint64_t seed, const HawkesOptions& opt = {}) {
    auto rng = make_stream(seed, 0);
    return simulate_hawkes_stream(g0, k, T, rng, opt);
}

struct HawkesMcOptions {
    int paths = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    HawkesOptions sim{};
};

// Streams a Hawkes population through sink(path_index, path). Path p uses
// stream (seed, p); the sink must tolerate concurrent calls with distinct p.
template <class Sink>
void for_each_hawkes_path(const InputCurve& g0, const KernelSpec& k, double T,
                          const HawkesMcOptions& o, Sink&& sink) {
    detail::parallel_paths(
        o.paths, o.threads, [] { return 0; },
        [&](int&, int i) {
            auto rng = make_stream(o.seed, static_cast<std::uint64_t>(i));
            const HawkesPath p = simulate_hawkes_stream(g0, k, T, rng, o.sim);
            sink(i, p);
        });
}

// Compensator value Lambda(t_j) at each event. Increments are Exp(1) by the
// time-change theorem, but pooling completed increments across fixed-horizon
// paths is length-biased; distributional tests should condition on the counts
// (for a homogeneous Poisson null, event times / T are iid uniform).
inline std::vector<double> hawkes_time_change(const InputCurve& g0, const KernelSpec& k,
                                              const std::vector<double>& events) {
    std::vector<double> lam(events.size());
    for (std::size_t j = 0; j < events.size(); ++j) {
        double v = curve_integral(g0, k, events[j]);
        for (std::size_t i = 0; i < j; ++i) v += ik_value(k, events[j] - events[i]);
        lam[j] = v;
    }
    return lam;
}

// X^n(t) = (1/n) int_0^t lambda_{ns} ds = n^{-2} int_0^{nt} lambda_u du for an
// intensity realized on [0, n * out.horizon]. Exact given the event list: the
// baseline integrates in closed form and each event contributes IK(nt - t_j).
inline std::vector<double> rescaled_integrated_intensity(const std::vector<double>& events,
                                                         const InputCurve& g0, const KernelSpec& k,
                                                         int n, const Grid& out) {
    if (n < 1) throw std::invalid_argument("rescaled_integrated_intensity: n must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(out.steps) + 1, 0.0);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    for (int i = 0; i <= out.steps; ++i) {
        const double s = static_cast<double>(n) * out.node(i);
        double v = curve_integral(g0, k, s);
        for (double tj : events) {
            if (tj >= s) break;  // events are sorted
            v += ik_value(k, s - tj);
        }
        x[static_cast<std::size_t>(i)] = v / n2;
    }
    return x;
}

// ------------------------------------------------------------------ lift

// One Euler path of the lifted model, carrying the semimartingale pieces of
// the driver separately: Z(t_k) = b x(t_k) + sum of mc + md(t_k), so that
// functionals of dX, dM^c, dM^d can be discretized against the increments.
struct PathBundle {
    std::vector<double> x;    // integrated variance, nodes 0..n, nondecreasing
    std::vector<double> y;    // spot variance before truncation, nodes 0..n
    std::vector<double> mc;   // continuous-martingale increments, cells 0..n-1
    std::vector<double> md;   // compensated-jump martingale, nodes 0..n
    std::vector<double> dz;   // full driver increments, cells 0..n-1
    std::vector<std::pair<double, double>> jump_list;  // (cell left time, size)
    double log_s = 0.0;            // log S_T - log S_0
    long truncated_steps = 0;      // cells where y < 0 was clamped
    bool coarse_jump_steps = false;  // some Poisson mean exceeded 0.1
};

// Driver values at the nodes, reassembled from the pieces.
inline std::vector<double> path_z_values(const PathBundle& p, double b) {
    std::vector<double> z(p.x.size());
    double mcum = 0.0;
    z[0] = b * p.x[0] + p.md[0];
    for (std::size_t k = 1; k < p.x.size(); ++k) {
        mcum += p.mc[k - 1];
        z[k] = b * p.x[k] + mcum + p.md[k];
    }
    return z;
}

namespace detail {

struct JumpSampler {
    double total = 0.0;  // nu(R+)
    double mean1 = 0.0;  // int zeta nu
    std::vector<double> cum;  // atom cumulative probabilities
    std::vector<double> sizes;
    double exp_rate = 0.0;
    bool exponential = false;

    double sample(std::mt19937_64& g) const {  // one draw per jump
        if (exponential) return sample_exponential(g) / exp_rate;
        const double u = sample_uniform(g);
        for (std::size_t i = 0; i + 1 < cum.size(); ++i)
            if (u < cum[i]) return sizes[i];
        return sizes.back();
    }
};

inline JumpSampler make_jump_sampler(const JumpMeasure& nu) {
    JumpSampler s;
    s.total = jump_total_mass(nu);
    s.mean1 = jump_first_moment(nu);
    if (const auto* a = std::get_if<JumpAtoms>(&nu.v)) {
        double acc = 0.0;
        for (const auto& at : a->atoms) {
            acc += at.mass / s.total;
            s.cum.push_back(acc);
            s.sizes.push_back(at.zeta);
        }
    } else if (const auto* e = std::get_if<JumpExponential>(&nu.v)) {
        s.exponential = true;
        s.exp_rate = e->rho;
    }
    return s;
}

struct LiftWorkspace {
    Grid grid{1.0, 1};
    std::vector<double> g0_nodes;
    std::vector<double> w;      // factor weights
    std::vector<double> decay;  // 1 - rate * dt, explicit Euler
    double b = 0.0, c = 0.0, rho = 0.0, rho_perp = 1.0;
    JumpSampler jumps;
    bool has_jumps = false;
    double dt = 0.0, sqrt_dt = 0.0;
};

inline LiftWorkspace make_lift_workspace(const HestonModel& m, const Grid& g) {
    validate(m);
    const auto* es = std::get_if<ExpSum>(&m.kernel.v);
    if (!es)
        throw std::invalid_argument(
            "simulate_lift: kernel must be an ExpSum; fit one with expsum_approx");
    LiftWorkspace ws;
    ws.grid = g;
    ws.dt = g.dt();
    ws.sqrt_dt = std::sqrt(ws.dt);
    ws.g0_nodes.resize(static_cast<std::size_t>(g.steps) + 1);
    for (int i = 0; i <= g.steps; ++i) ws.g0_nodes[i] = curve_value(m.g0, m.kernel, g.node(i));
    for (const auto& t : es->terms) {
        if (!(t.rate * ws.dt < 1.0))
            throw std::invalid_argument("simulate_lift: need rate * dt < 1 for the factor update");
        ws.w.push_back(t.weight);
        ws.decay.push_back(1.0 - t.rate * ws.dt);
    }
    ws.b = m.triplet.b;
    ws.c = m.triplet.c;
    ws.rho = m.rho;
    ws.rho_perp = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));
    ws.jumps = make_jump_sampler(m.triplet.nu);
    ws.has_jumps = ws.jumps.total > 0.0;
    return ws;
}

// Full-truncation step: rates and variances see y+ = max(y, 0), the factor
// drift keeps the signed value. Draw order per cell is pinned: one normal
// pair, then the Poisson count, then one draw per jump size.
inline void run_lift_path(const LiftWorkspace& ws, std::mt19937_64& rng, PathBundle& p) {
    const int n = ws.grid.steps;
    const std::size_t nn = static_cast<std::size_t>(n);
    p.x.assign(nn + 1, 0.0);
    p.y.assign(nn + 1, 0.0);
    p.mc.assign(nn, 0.0);
    p.md.assign(nn + 1, 0.0);
    p.dz.assign(nn, 0.0);
    p.jump_list.clear();
    p.log_s = 0.0;
    p.truncated_steps = 0;
    p.coarse_jump_steps = false;

    std::vector<double> u(ws.w.size(), 0.0);
    p.y[0] = ws.g0_nodes[0];
    for (int k = 0; k < n; ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        const double yk = p.y[kk];
        const double yp = std::max(0.0, yk);
        if (yk < 0.0) ++p.truncated_steps;

        const auto [z1, z2] = sample_normal_pair(rng);
        double jsum = 0.0;
        if (ws.has_jumps) {
            const double mean = ws.jumps.total * yp * ws.dt;
            if (mean > 0.1) p.coarse_jump_steps = true;
            const long cnt = sample_poisson(rng, mean);
            for (long j = 0; j < cnt; ++j) {
                const double zeta = ws.jumps.sample(rng);
                jsum += zeta;
                p.jump_list.emplace_back(ws.grid.node(k), zeta);
            }
        }
        const double dx = yp * ws.dt;
        const double dmc = std::sqrt(ws.c * yp) * ws.sqrt_dt * z1;
        const double dmd = jsum - ws.jumps.mean1 * dx;
        const double dz = ws.b * dx + dmc + dmd;

        p.x[kk + 1] = p.x[kk] + dx;
        p.mc[kk] = dmc;
        p.md[kk + 1] = p.md[kk] + dmd;
        p.dz[kk] = dz;
        p.log_s += -0.5 * dx + std::sqrt(yp) * ws.sqrt_dt * (ws.rho * z1 + ws.rho_perp * z2);

        double v = ws.g0_nodes[kk + 1];
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = ws.decay[i] * u[i] + dz;
            v += ws.w[i] * u[i];
        }
        p.y[kk + 1] = v;
    }
}

}  // namespace detail

struct LiftMcOptions {
    int paths = 1;
    std::uint64_t seed = 0;
    int threads = 1;
};

// Streams the population through sink(path_index, bundle). Path p always uses
// stream (seed, p), so results do not depend on the thread count; the sink
// must tolerate concurrent calls with distinct indices.
template <class Sink>
void for_each_lift_path(const HestonModel& m, const Grid& g, const LiftMcOptions& o, Sink&& sink) {
    const detail::LiftWorkspace ws = detail::make_lift_workspace(m, g);
    detail::parallel_paths(
        o.paths, o.threads, [] { return PathBundle{}; },
        [&](PathBundle& p, int i) {
            auto rng = make_stream(o.seed, static_cast<std::uint64_t>(i));
            detail::run_lift_path(ws, rng, p);
            sink(i, p);
        });
}

// Materialized population; memory is O(paths * steps). Prefer the streaming
// driver for large runs.
inline std::vector<PathBundle> simulate_lift(const HestonModel& m, const Grid& g,
                                             std::uint64_t seed, int n_paths, int threads = 1) {
    std::vector<PathBundle> pop(static_cast<std::size_t>(n_paths));
    LiftMcOptions o;
    o.paths = n_paths;
    o.seed = seed;
    o.threads = threads;
    for_each_lift_path(m, g, o,
                       [&pop](int i, const PathBundle& p) { pop[static_cast<std::size_t>(i)] = p; });
    return pop;
}

// ------------------------------------------------------------- statistics

struct McStats {
    std::complex<double> mean;
    double se = 0.0;
    long n = 0;
};

inline McStats mc_mean_complex(const std::vector<std::complex<double>>& vals) {
    if (vals.empty()) throw std::invalid_argument("mc_mean_complex: empty sample");
    NeumaierSum re, im;
    for (const auto& v : vals) {
        re.add(v.real());
        im.add(v.imag());
    }
    const double n = static_cast<double>(vals.size());
    const std::complex<double> mean(re.value() / n, im.value() / n);
    NeumaierSum dev;
    for (const auto& v : vals) dev.add(std::norm(v - mean));
    const double var = vals.size() > 1 ? dev.value() / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n), static_cast<long>(vals.size())};
}

// E[exp(int f0(T-s) dX + int f1(T-s) dM^c + int f2(T-s) dM^d)] by left-point
// Stieltjes sums against the bundle increments. Null functions mean 0.
inline McStats mc_functional(const std::vector<PathBundle>& pop, const Grid& g,
                             const std::function<std::complex<double>(double)>& f0,
                             const std::function<std::complex<double>(double)>& f1,
                             const std::function<std::complex<double>(double)>& f2) {
    if (pop.empty()) throw std::invalid_argument("mc_functional: empty population");
    const std::size_t n = static_cast<std::size_t>(g.steps);
    std::vector<std::complex<double>> a0(n), a1(n), a2(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double trev = g.horizon - g.node(static_cast<int>(k));
        a0[k] = f0 ? f0(trev) : 0.0;
        a1[k] = f1 ? f1(trev) : 0.0;
        a2[k] = f2 ? f2(trev) : 0.0;
    }
    std::vector<std::complex<double>> vals(pop.size());
    for (std::size_t p = 0; p < pop.size(); ++p) {
        const PathBundle& b = pop[p];
        std::complex<double> r = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            r += a0[k] * (b.x[k + 1] - b.x[k]) + a1[k] * b.mc[k] + a2[k] * (b.md[k + 1] - b.md[k]);
        vals[p] = std::exp(r);
    }
    return mc_mean_complex(vals);
}

// ----------------------------------------------------------------- modulus

// Largest oscillation of x over any window of `window` grid cells: the sup of
// |x_i - x_j| over |i - j| <= window, by sliding monotonic deques in O(n).
inline double window_range_max(const std::vector<double>& x, int window) {
    if (x.empty()) throw std::invalid_argument("window_range_max: empty path");
    if (window < 1) throw std::invalid_argument("window_range_max: window must be >= 1");
    std::deque<int> mx, mn;
    double best = 0.0;
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        while (!mx.empty() && x[static_cast<std::size_t>(mx.back())] <= xi) mx.pop_back();
        mx.push_back(i);
        while (!mn.empty() && x[static_cast<std::size_t>(mn.back())] >= xi) mn.pop_back();
        mn.push_back(i);
        while (mx.front() < i - window) mx.pop_front();
        while (mn.front() < i - window) mn.pop_front();
        best = std::max(best, x[static_cast<std::size_t>(mx.front())] -
                                  x[static_cast<std::size_t>(mn.front())]);
    }
    return best;
}

struct ModulusCheck {
    double delta = 0.0;  // effective window, a whole number of grid cells
    double lhs = 0.0;    // empirical E[w_{Xbar,T}(delta)]
    double rhs = 0.0;    // explicit bound at the same delta
    bool holds = false;
};

// Explicit bound on the expected modulus of continuity of Xbar = X - G0 over
// [0, T]: 3 (kappa^2 + kappa) (1 + E[X_T^2]) (int_0^delta K + int_0^T (K(s) -
// K(s + delta)) ds), with kappa = |b| + c + int zeta^2 nu. Both kernel
// integrals reduce to IK values.
inline ModulusCheck modulus_bound_from_moments(double mean_w, double mean_xt2,
                                               const AffineTriplet& tr, const KernelSpec& k,
                                               double T, double delta) {
    const double kap = affine_kappa(tr);
    const double kernel_factor =
        2.0 * ik_value(k, delta) + ik_value(k, T) - ik_value(k, T + delta);
    ModulusCheck out;
    out.delta = delta;
    out.lhs = mean_w;
    out.rhs = 3.0 * (kap * kap + kap) * (1.0 + mean_xt2) * kernel_factor;
    out.holds = out.lhs <= out.rhs;
    return out;
}

// Empirical check on a materialized population. G0 is accumulated by the same
// left-point rule as the paths' X, so a deterministic population has Xbar = 0
// exactly. delta is rounded to a whole number of cells and reported back.
inline ModulusCheck modulus_bound_check(const std::vector<PathBundle>& pop, const HestonModel& m,
                                        const Grid& g, double delta) {
    if (pop.empty()) throw std::invalid_argument("modulus_bound_check: empty population");
    const int wnd = std::max(1, static_cast<int>(std::llround(delta / g.dt())));
    const double deff = wnd * g.dt();
    const std::size_t n = static_cast<std::size_t>(g.steps);
    std::vector<double> g0int(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        g0int[i + 1] = g0int[i] + curve_value(m.g0, m.kernel, g.node(static_cast<int>(i))) * g.dt();
    NeumaierSum wsum, x2sum;
    std::vector<double> xbar(n + 1);
    for (const PathBundle& p : pop) {
        for (std::size_t i = 0; i <= n; ++i) xbar[i] = p.x[i] - g0int[i];
        wsum.add(window_range_max(xbar, wnd));
        x2sum.add(p.x[n] * p.x[n]);
    }
    const double np = static_cast<double>(pop.size());
    return modulus_bound_from_moments(wsum.value() / np, x2sum.value() / np, m.triplet, m.kernel,
                                      g.horizon, deff);
}

}  // namespace svolterra
