#include "msrv/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "msrv/errors.hpp"
#include "msrv/ksum.hpp"
#include "msrv/quadrature.hpp"
#include "msrv/rng.hpp"

namespace msrv {

// ---------------------------------------------------------------------------
// configuration

void SimConfig::validate() const {
    if (n < 2) throw config_error("simulation needs n >= 2");
    if (!(horizon > 0.0)) throw config_error("horizon must be positive");
    if (replications < 1) throw config_error("replications must be >= 1");

    if (const auto* cv = std::get_if<ConstantVol>(&model)) {
        if (!(cv->sigma2 > 0.0)) throw config_error("sigma2 must be positive");
    } else if (const auto* lv = std::get_if<LinearVol>(&model)) {
        if (!(lv->sigma2 > 0.0)) throw config_error("sigma2 must be positive");
        if (!(lv->slope > -1.0))
            throw config_error("linear-vol slope must be > -1 to keep variance positive");
    } else if (const auto* mv = std::get_if<MeanRevVol>(&model)) {
        if (!(mv->rate > 0.0) || !(mv->long_run > 0.0) || !(mv->v0 > 0.0))
            throw config_error("mean-reverting variance needs positive rate, level, v0");
        if (mv->vol_of_vol < 0.0) throw config_error("vol_of_vol must be >= 0");
        if (std::abs(mv->correlation) > 1.0)
            throw config_error("correlation must lie in [-1, 1]");
    }

    if (noise.scale < 0.0) throw config_error("noise scale must be >= 0");
    if (noise.kind == NoiseKind::student_t && !(noise.df > 4.0))
        throw config_error("student-t noise needs df > 4 for a finite 4th moment");

    if (const auto* pg = std::get_if<PowerGrid>(&grid)) {
        if (!(pg->exponent >= 1.0))
            throw config_error("power-grid exponent must be >= 1");
    }
}

double policy_aqvt_derivative(const GridPolicy& policy, double t, double horizon) {
    if (std::holds_alternative<EquidistantGrid>(policy)) return 1.0;
    const double p = std::get<PowerGrid>(policy).exponent;
    if (t <= 0.0) return p == 1.0 ? 1.0 : 0.0;
    return p * std::pow(t / horizon, (p - 1.0) / p);
}

namespace {

SamplingGrid make_grid(const GridPolicy& policy, std::size_t n, double horizon) {
    if (std::holds_alternative<EquidistantGrid>(policy))
        return SamplingGrid::equidistant(n, horizon);
    const double p = std::get<PowerGrid>(policy).exponent;
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        times[i] = horizon * std::pow(static_cast<double>(i) / n, p);
    times.front() = 0.0;
    times.back() = horizon;
    return SamplingGrid(std::move(times));
}

// ∫ σ²(s) ds over [a, b] for the deterministic models.
double variance_integral(const VolModel& model, double a, double b, double horizon) {
    if (const auto* cv = std::get_if<ConstantVol>(&model)) return cv->sigma2 * (b - a);
    const auto& lv = std::get<LinearVol>(model);
    return lv.sigma2 * ((b - a) + lv.slope * (b * b - a * a) / (2.0 * horizon));
}

double spot_variance(const VolModel& model, double t, double horizon) {
    if (const auto* cv = std::get_if<ConstantVol>(&model)) return cv->sigma2;
    const auto& lv = std::get<LinearVol>(model);
    return lv.sigma2 * (1.0 + lv.slope * t / horizon);
}

double noise_e2(const NoiseSpec& spec) {
    return spec.kind == NoiseKind::none ? 0.0 : spec.scale * spec.scale;
}

double noise_e4(const NoiseSpec& spec) {
    const double a4 = std::pow(spec.scale, 4);
    switch (spec.kind) {
        case NoiseKind::none: return 0.0;
        case NoiseKind::gaussian: return 3.0 * a4;
        case NoiseKind::two_point: return a4;
        case NoiseKind::student_t:
            return 3.0 * a4 * (spec.df - 2.0) / (spec.df - 4.0);
    }
    return 0.0;
}

double draw_noise(const NoiseSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case NoiseKind::none: return 0.0;
        case NoiseKind::gaussian: return spec.scale * rng.gaussian();
        case NoiseKind::two_point: return spec.scale * rng.two_point();
        case NoiseKind::student_t:
            return spec.scale * rng.student_t(spec.df) /
                   std::sqrt(spec.df / (spec.df - 2.0));
    }
    return 0.0;
}

constexpr int kStochasticVolSubsteps = 10;

} // namespace

PathBundle gen_path(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);

    SamplingGrid grid = make_grid(config.grid, config.n, config.horizon);
    const auto times = grid.times();
    const std::size_t n = grid.n();
    const double horizon = grid.horizon();

    std::vector<double> latent(n + 1);
    latent[0] = 0.0;
    double true_qv = 0.0;
    double true_eta_sq = 0.0;

    if (std::holds_alternative<MeanRevVol>(config.model)) {
        const auto& mv = std::get<MeanRevVol>(config.model);
        const double rho = mv.correlation;
        const double rho_perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        double v = mv.v0;
        double x = 0.0;
        KahanSum qv_acc, eta_acc;
        for (std::size_t i = 1; i <= n; ++i) {
            const double dt = (times[i] - times[i - 1]) / kStochasticVolSubsteps;
            double t = times[i - 1];
            for (int s = 0; s < kStochasticVolSubsteps; ++s) {
                const double zw = rng.gaussian();
                const double zp = rng.gaussian();
                const double vp = std::max(v, 0.0);
                x += config.drift * dt +
                     std::sqrt(vp * dt) * (rho * zw + rho_perp * zp);
                qv_acc.add(vp * dt);
                eta_acc.add(policy_aqvt_derivative(config.grid, t, horizon) * vp * vp * dt);
                // full truncation: both drift and diffusion use v⁺
                v += mv.rate * (mv.long_run - vp) * dt +
                     mv.vol_of_vol * std::sqrt(vp * dt) * zw;
                t += dt;
            }
            latent[i] = x;
        }
        true_qv = qv_acc.value();
        true_eta_sq = eta_acc.value();
    } else {
        // Gaussian increments are exact for deterministic volatility.
        double x = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const double iv =
                variance_integral(config.model, times[i - 1], times[i], horizon);
            x += config.drift * (times[i] - times[i - 1]) +
                 std::sqrt(iv) * rng.gaussian();
            latent[i] = x;
        }
        true_qv = variance_integral(config.model, 0.0, horizon, horizon);
        true_eta_sq = quadrature(
            [&](double t) {
                const double s2 = spot_variance(config.model, t, horizon);
                return policy_aqvt_derivative(config.grid, t, horizon) * s2 * s2;
            },
            0.0, horizon, 256);
    }

    std::vector<double> noise(n + 1, 0.0);
    if (config.noise.kind != NoiseKind::none) {
        for (std::size_t i = 0; i <= n; ++i) noise[i] = draw_noise(config.noise, rng);
    }

    std::vector<double> observed(n + 1);
    for (std::size_t i = 0; i <= n; ++i) observed[i] = latent[i] + noise[i];

    PathBundle bundle{std::move(grid), std::move(latent), std::move(noise),
                      std::move(observed), true_qv, true_eta_sq,
                      noise_e2(config.noise), noise_e4(config.noise)};
    return bundle;
}

// ---------------------------------------------------------------------------
// decomposition

ErrorDecomposition decompose_error(const PathBundle& bundle,
                                   const WeightScheme& scheme) {
    scheme.validate();
    const auto& x = bundle.latent;
    const auto& e = bundle.noise;
    const std::size_t n = bundle.grid.n();
    if (static_cast<std::size_t>(scheme.max_scale()) > n)
        throw input_error("decompose_error: largest scale exceeds n");

    KahanSum e2_acc;
    for (double v : e) e2_acc.add(v * v);
    const double sum_e2 = e2_acc.value();

    KahanSum signal, zeta, vsum, cond2, msrv_acc;
    for (std::size_t s = 0; s < scheme.scales.size(); ++s) {
        const int k = scheme.scales[s];
        const double a = scheme.weights[s];
        const double kd = k;

        KahanSum xx, uu, xe, yy;
        for (std::size_t i = static_cast<std::size_t>(k); i <= n; ++i) {
            const double dx = x[i] - x[i - k];
            const double de = e[i] - e[i - k];
            const double dy = dx + de;
            xx.add(dx * dx);
            uu.add(e[i] * e[i - k]);
            xe.add(dx * de);
            yy.add(dy * dy);
        }
        KahanSum edge;
        for (int i = 0; i < k; ++i) edge.add(e[i] * e[i]);
        for (std::size_t i = n - k + 1; i <= n; ++i) edge.add(e[i] * e[i]);

        signal.add(a * xx.value() / kd);
        zeta.add(a * (-2.0 / kd) * uu.value());
        vsum.add(a * (2.0 * xe.value() / kd - edge.value() / kd));
        cond2.add(a / kd);
        msrv_acc.add(a * yy.value() / kd);
    }

    ErrorDecomposition d;
    d.signal = signal.value();
    d.zeta = zeta.value();
    d.true_e2 = bundle.true_e2;
    d.remainder = vsum.value() - 2.0 * bundle.true_e2;
    d.epsilon_cancel_residual = 2.0 * cond2.value() * sum_e2;
    d.msrv_value = msrv_acc.value();
    return d;
}

// ---------------------------------------------------------------------------
// M policies

int resolve_m(const MPolicy& policy, std::size_t n) {
    const auto cap = [&](long m) {
        const long hi = std::max<long>(2, static_cast<long>(n) / 2 - 1);
        return static_cast<int>(std::clamp<long>(m, 2, hi));
    };
    switch (policy.kind) {
        case MPolicyKind::sqrt_n:
            return cap(static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))));
        case MPolicyKind::fixed:
            if (policy.fixed_m < 2) throw std::invalid_argument("fixed M must be >= 2");
            return cap(policy.fixed_m);
        case MPolicyKind::c_times_sqrt_n:
            if (!(policy.c > 0.0)) throw std::invalid_argument("policy c must be > 0");
            return cap(std::lround(policy.c * std::sqrt(static_cast<double>(n))));
        case MPolicyKind::plugin:
            throw std::logic_error("plugin policy is resolved per series");
    }
    return 2;
}

MSelection select_m_plugin(const TickSeries& series, const HSpec& spec) {
    const std::size_t n = series.n();
    MSelection sel;
    sel.moments = estimate_noise_moments(series);

    const int m0 = resolve_m(MPolicy::sqrt_n(), n);
    const auto scheme0 = h_family_weights(spec, m0);
    sel.qv_initial = msrv(series, scheme0);

    const double horizon = series.grid.horizon();
    const double h_total = empirical_aqvt(series.grid, horizon);
    const double qv_plus = std::max(sel.qv_initial, 0.0);
    // constant-volatility plug-in: σ⁴ ≈ (qv/T)², weighted by the empirical H'
    sel.eta_sq_hat = (qv_plus / horizon) * (qv_plus / horizon) * h_total;

    const auto ints = h_variance_integrals(spec);
    const double e2 = sel.moments.e2;
    const double A = 4.0 * e2 * e2 * ints.h_sq;
    const double B = (4.0 / 3.0) * horizon * sel.eta_sq_hat * ints.tri_kernel;
    const double C =
        4.0 * sel.moments.var_e2 * ints.lower_x + 8.0 * e2 * ints.min_xy * qv_plus;

    if (!(A > 0.0) || !(B > 0.0)) {
        sel.m = m0;
        sel.c = m0 / std::sqrt(static_cast<double>(n));
        sel.fallback = true;
        return sel;
    }

    double c = plug_in_c(A, B, C);
    if (c < kPlugInCMin || c > kPlugInCMax) {
        c = std::clamp(c, kPlugInCMin, kPlugInCMax);
        sel.clamped = true;
    }
    sel.c = c;
    long m = std::max<long>(2, std::lround(c * std::sqrt(static_cast<double>(n))));
    m = std::min<long>(m, std::max<long>(2, static_cast<long>(n) / 2 - 1));
    sel.m = static_cast<int>(m);
    return sel;
}

// ---------------------------------------------------------------------------
// parallel harness

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    KahanSum sx, sy;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
        sx.add(lx.back());
        sy.add(ly.back());
    }
    if (lx.size() < 2) throw input_error("slope fit needs at least 2 positive points");
    const double mx = sx.value() / lx.size();
    const double my = sy.value() / ly.size();
    KahanSum sxx, sxy;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx.add((lx[i] - mx) * (lx[i] - mx));
        sxy.add((lx[i] - mx) * (ly[i] - my));
    }
    return sxy.value() / sxx.value();
}

// ---------------------------------------------------------------------------
// experiments

namespace {

std::uint64_t size_master(std::uint64_t seed, std::size_t n) {
    return splitmix64(seed ^ splitmix64(0xA5F152CDull + n));
}

std::uint64_t rep_seed(std::uint64_t master, std::size_t rep) {
    return splitmix64(master ^ splitmix64(rep + 0x51ed2701a9b5d4f3ull));
}

int tsrv_scale(std::size_t n) {
    const auto k = static_cast<long>(
        std::ceil(std::pow(static_cast<double>(n), 2.0 / 3.0)));
    return static_cast<int>(std::clamp<long>(k, 2, static_cast<long>(n)));
}

struct Moments2 {
    double mean = 0.0;
    double rmse = 0.0;
    double variance = 0.0;
};

Moments2 error_moments(std::span<const double> estimates,
                       std::span<const double> truths) {
    KahanSum err, sq, est;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double e = estimates[i] - truths[i];
        err.add(e);
        sq.add(e * e);
        est.add(estimates[i]);
    }
    const double r = static_cast<double>(estimates.size());
    Moments2 m;
    m.mean = err.value() / r;
    m.rmse = std::sqrt(sq.value() / r);
    const double est_mean = est.value() / r;
    KahanSum dev;
    for (double v : estimates) dev.add((v - est_mean) * (v - est_mean));
    m.variance = dev.value() / r;
    return m;
}

} // namespace

ConvergenceResult run_convergence_experiment(const SimConfig& config,
                                             std::span<const std::size_t> n_list,
                                             const MPolicy& policy,
                                             std::span<const std::string> estimators) {
    config.validate();
    if (n_list.size() < 4)
        throw std::invalid_argument("convergence experiment needs at least 4 sizes");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("n_list must be strictly increasing");

    bool want_rv = false, want_tsrv = false, want_msrv = false;
    for (const auto& name : estimators) {
        if (name == "rv") want_rv = true;
        else if (name == "tsrv") want_tsrv = true;
        else if (name == "msrv") want_msrv = true;
        else throw std::invalid_argument("unknown estimator: " + name);
    }
    if (!want_rv && !want_tsrv && !want_msrv)
        throw std::invalid_argument("no estimators selected");

    ConvergenceResult result;
    result.low_replication_warning = config.replications < 50;
    const std::size_t reps = config.replications;
    const HSpec spec = hstar();

    std::map<std::string, std::vector<double>> rmse_by_estimator;
    std::vector<double> rv_abs_bias;

    for (const std::size_t n : n_list) {
        SimConfig local = config;
        local.n = n;
        const std::uint64_t master = size_master(config.seed, n);
        const int k_tsrv = tsrv_scale(n);

        WeightScheme scheme;
        if (want_msrv && policy.kind != MPolicyKind::plugin)
            scheme = h_family_weights(spec, resolve_m(policy, n));

        std::vector<double> rv_v(reps), ts_v(reps), ms_v(reps), qv_v(reps);
        parallel_for(reps, config.threads, [&](std::size_t r) {
            const PathBundle bundle = gen_path(local, rep_seed(master, r));
            const TickSeries series = bundle.observed_series();
            qv_v[r] = bundle.true_qv;
            if (want_rv) rv_v[r] = rv(series);
            if (want_tsrv) ts_v[r] = tsrv(series, k_tsrv);
            if (want_msrv) {
                if (policy.kind == MPolicyKind::plugin) {
                    const auto sel = select_m_plugin(series, spec);
                    ms_v[r] = msrv(series, h_family_weights(spec, sel.m));
                } else {
                    ms_v[r] = msrv(series, scheme);
                }
            }
        });

        const auto record = [&](const std::string& name, const std::vector<double>& v) {
            const Moments2 m = error_moments(v, qv_v);
            result.cells.push_back({name, n, m.mean, m.rmse});
            rmse_by_estimator[name].push_back(m.rmse);
            if (name == "rv") rv_abs_bias.push_back(std::abs(m.mean));
            for (std::size_t r = 0; r < reps; ++r)
                result.reps.push_back({name, n, r, v[r], qv_v[r]});
        };
        if (want_rv) record("rv", rv_v);
        if (want_tsrv) record("tsrv", ts_v);
        if (want_msrv) record("msrv", ms_v);
    }

    std::vector<double> xs(n_list.begin(), n_list.end());
    for (auto& [name, rmses] : rmse_by_estimator)
        result.rmse_slope[name] = loglog_slope(xs, rmses);
    if (want_rv) result.rv_bias_slope = loglog_slope(xs, rv_abs_bias);
    return result;
}

CoverageResult run_coverage_experiment(const SimConfig& config, std::size_t n,
                                       double level, const MPolicy& policy) {
    config.validate();
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("coverage level must lie in (0,1)");

    SimConfig local = config;
    local.n = n;
    const std::size_t reps = config.replications;
    const std::uint64_t master = size_master(config.seed, n);
    const HSpec spec = hstar();
    const double horizon = config.horizon;

    const bool plugin_m = policy.kind == MPolicyKind::plugin;
    const int m_fixed = plugin_m ? 0 : resolve_m(policy, n);
    WeightScheme scheme;
    if (!plugin_m) scheme = h_family_weights(spec, m_fixed);

    CoverageResult result;
    result.level = level;
    result.replications = reps;
    result.low_replication_warning = reps < 200;
    result.m_used = m_fixed;
    result.reps.resize(reps);

    parallel_for(reps, config.threads, [&](std::size_t r) {
        const PathBundle bundle = gen_path(local, rep_seed(master, r));
        const TickSeries series = bundle.observed_series();

        int m = m_fixed;
        double estimate;
        if (plugin_m) {
            const auto sel = select_m_plugin(series, spec);
            m = sel.m;
            estimate = msrv(series, h_family_weights(spec, m));
        } else {
            estimate = msrv(series, scheme);
        }
        const double c_eff = m / std::sqrt(static_cast<double>(n));

        CoverageRep rep;
        rep.rep = r;
        rep.estimate = estimate;
        rep.true_qv = bundle.true_qv;

        NoiseMoments oracle;
        oracle.e2 = bundle.true_e2;
        oracle.e4 = bundle.true_e4;
        oracle.var_e2 = std::max(0.0, bundle.true_e4 - bundle.true_e2 * bundle.true_e2);
        const auto vr_oracle = total_asymptotic_variance(
            spec, c_eff, oracle, horizon, bundle.true_eta_sq, bundle.true_qv);
        rep.oracle_interval = confidence_interval(estimate, vr_oracle.nu_sq, n, level);
        rep.oracle_covered = rep.oracle_interval.lower <= bundle.true_qv &&
                             bundle.true_qv <= rep.oracle_interval.upper;

        const NoiseMoments est_moments = estimate_noise_moments(series);
        const double qv_plus = std::max(estimate, 0.0);
        const double h_total = empirical_aqvt(series.grid, horizon);
        const double eta_hat = (qv_plus / horizon) * (qv_plus / horizon) * h_total;
        const auto vr_plugin = total_asymptotic_variance(spec, c_eff, est_moments,
                                                         horizon, eta_hat, qv_plus);
        if (vr_plugin.nu_sq > 0.0) {
            rep.plugin_interval = confidence_interval(estimate, vr_plugin.nu_sq, n, level);
            rep.plugin_covered = rep.plugin_interval.lower <= bundle.true_qv &&
                                 bundle.true_qv <= rep.plugin_interval.upper;
        }
        result.reps[r] = rep;
    });

    std::size_t oracle_hits = 0, plugin_hits = 0;
    for (const auto& rep : result.reps) {
        oracle_hits += rep.oracle_covered ? 1 : 0;
        plugin_hits += rep.plugin_covered ? 1 : 0;
    }
    const double rd = static_cast<double>(reps);
    result.oracle_rate = oracle_hits / rd;
    result.plugin_rate = plugin_hits / rd;
    result.oracle_se = std::sqrt(result.oracle_rate * (1.0 - result.oracle_rate) / rd);
    result.plugin_se = std::sqrt(result.plugin_rate * (1.0 - result.plugin_rate) / rd);
    return result;
}

CompareResult compare_estimators(const SimConfig& config, std::size_t n) {
    config.validate();
    SimConfig local = config;
    local.n = n;
    const std::size_t reps = config.replications;
    const std::uint64_t master = size_master(config.seed, n);
    const HSpec spec = hstar();
    const int k = tsrv_scale(n);

    CompareResult result;
    result.tsrv_k = k;
    result.reps.resize(reps);

    parallel_for(reps, config.threads, [&](std::size_t r) {
        const PathBundle bundle = gen_path(local, rep_seed(master, r));
        const TickSeries series = bundle.observed_series();
        CompareRep rep;
        rep.rep = r;
        rep.true_qv = bundle.true_qv;
        rep.rv_value = rv(series);
        rep.tsrv_value = tsrv(series, k);
        const auto sel = select_m_plugin(series, spec);
        rep.m_used = sel.m;
        rep.c_used = sel.c;
        rep.msrv_value = msrv(series, h_family_weights(spec, sel.m));
        result.reps[r] = rep;
    });

    std::vector<double> qv(reps), rv_v(reps), ts_v(reps), ms_v(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        qv[r] = result.reps[r].true_qv;
        rv_v[r] = result.reps[r].rv_value;
        ts_v[r] = result.reps[r].tsrv_value;
        ms_v[r] = result.reps[r].msrv_value;
    }
    const auto cell = [&](const std::string& name, const std::vector<double>& v) {
        const Moments2 m = error_moments(v, qv);
        result.cells.push_back({name, m.mean, m.variance, m.rmse});
    };
    cell("rv", rv_v);
    cell("tsrv", ts_v);
    cell("msrv", ms_v);
    return result;
}

} // namespace msrv
