#include "msrv/report.hpp"

#include <algorithm>
#include <cmath>

#include "msrv/csv_io.hpp"
#include "msrv/version.hpp"

namespace msrv {

nlohmann::json weights_to_json(const WeightScheme& scheme) {
    return nlohmann::json{
        {"scales", scheme.scales},
        {"weights", scheme.weights},
        {"provenance", to_string(scheme.provenance)},
        {"residuals",
         {{"cond1", scheme.cond1_residual}, {"cond2", scheme.cond2_residual}}},
        {"gamma_sq", gamma_sq(scheme)},
    };
}

nlohmann::json variance_to_json(const VarianceReport& report) {
    return nlohmann::json{
        {"noise_term", report.noise_term},
        {"discretization_term", report.discretization_term},
        {"remainder_cross_terms", report.remainder_cross_terms},
        {"nu_sq", report.nu_sq},
        {"c_used", report.c_used},
        {"eta_sq", report.eta_sq},
        {"qv_plugin", report.qv_plugin},
    };
}

nlohmann::json EstimateReport::to_json() const {
    nlohmann::json j{
        {"schema_version", kReportSchemaVersion},
        {"input", {{"n", n}, {"horizon", horizon}, {"gap_bound_exceeded", gap_warning}}},
        {"estimates",
         {{"rv", rv_value},
          {"tsrv", {{"k", tsrv_k}, {"value", tsrv_value}}},
          {"msrv",
           {{"value", msrv_value},
            {"m", m},
            {"c_used", c_used},
            {"m_policy", m_policy},
            {"scheme", scheme == SchemeKind::hstar ? "hstar" : "optimal"},
            {"negative", msrv_negative},
            {"noise_bias_subtracted", noise_bias_subtracted}}}}},
        {"noise",
         {{"e2", moments.e2},
          {"e4", moments.e4},
          {"var_e2", moments.var_e2},
          {"clamped", moments.clamped},
          {"provenance", "estimated"}}},
        {"variance", variance_to_json(variance)},
        {"eta_provenance", eta_provenance},
        {"ci",
         {{"level", level},
          {"lower", ci.lower},
          {"upper", ci.upper},
          {"half_width", ci.half_width()}}},
        {"flags",
         {{"plugin_fallback", plugin_fallback}, {"plugin_clamped", plugin_clamped}}},
    };
    return j;
}

EstimateReport run_estimate(const TickSeries& series, const EstimateOptions& options) {
    const std::size_t n = series.n();
    const double horizon = series.grid.horizon();
    const HSpec spec = hstar();

    EstimateReport report;
    report.n = n;
    report.horizon = horizon;
    report.gap_warning = series.grid.gap_bound_exceeded();
    report.level = options.level;
    report.scheme = options.scheme;

    report.rv_value = rv(series);
    report.tsrv_k = options.tsrv_k > 0
                        ? options.tsrv_k
                        : static_cast<int>(std::clamp<long>(
                              std::lround(std::ceil(std::pow(
                                  static_cast<double>(n), 2.0 / 3.0))),
                              2, static_cast<long>(n)));
    report.tsrv_value = tsrv(series, report.tsrv_k);

    double eta_hat = 0.0;
    if (options.m_policy.kind == MPolicyKind::plugin) {
        const auto sel = select_m_plugin(series, spec);
        report.m = sel.m;
        report.c_used = sel.m / std::sqrt(static_cast<double>(n));
        report.moments = sel.moments;
        report.plugin_fallback = sel.fallback;
        report.plugin_clamped = sel.clamped;
        report.m_policy = "plugin";
        eta_hat = sel.eta_sq_hat;
    } else {
        report.m = resolve_m(options.m_policy, n);
        report.c_used = report.m / std::sqrt(static_cast<double>(n));
        report.moments = estimate_noise_moments(series);
        report.m_policy = options.m_policy.kind == MPolicyKind::fixed
                              ? "fixed:" + std::to_string(options.m_policy.fixed_m)
                              : "c:" + format_double(options.m_policy.c);
    }

    WeightScheme scheme;
    if (options.scheme == SchemeKind::hstar) {
        scheme = h_family_weights(spec, report.m);
    } else {
        std::vector<int> scales(report.m);
        for (int i = 0; i < report.m; ++i) scales[i] = i + 1;
        scheme = optimal_discrete_weights(scales);
    }

    double estimate = msrv(series, scheme);
    if (options.subtract_noise_bias) {
        estimate -= 2.0 * report.moments.e2;
        report.noise_bias_subtracted = true;
    }
    report.msrv_value = estimate;
    report.msrv_negative = estimate < 0.0;

    const double qv_plus = std::max(estimate, 0.0);
    if (options.m_policy.kind != MPolicyKind::plugin) {
        const double h_total = empirical_aqvt(series.grid, horizon);
        eta_hat = (qv_plus / horizon) * (qv_plus / horizon) * h_total;
    }
    report.eta_provenance = "estimated";

    report.variance = total_asymptotic_variance(spec, report.c_used, report.moments,
                                                horizon, eta_hat, qv_plus);
    if (report.variance.nu_sq > 0.0) {
        report.ci = confidence_interval(estimate, report.variance.nu_sq, n,
                                        options.level);
    } else {
        report.ci = {estimate, estimate};
    }
    return report;
}

} // namespace msrv
