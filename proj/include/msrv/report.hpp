#pragma once

#include <optional>
#include <string>

#include "msrv/estimators.hpp"
#include "msrv/inference.hpp"
#include "msrv/simulate.hpp"

#include <json.hpp>

namespace msrv {

enum class SchemeKind { hstar, optimal };

struct EstimateOptions {
    double level = 0.95;
    MPolicy m_policy = MPolicy::plugin();
    SchemeKind scheme = SchemeKind::hstar;
    int tsrv_k = 0; // 0 → ceil(n^(2/3))
    /// Subtract 2·ê2 from the multi-scale point estimate (small-sample bias
    /// option; the weights already cancel the noise bias asymptotically).
    bool subtract_noise_bias = false;
};

struct EstimateReport {
    std::size_t n = 0;
    double horizon = 0.0;
    double rv_value = 0.0;
    int tsrv_k = 0;
    double tsrv_value = 0.0;
    double msrv_value = 0.0;
    int m = 0;
    double c_used = 0.0;
    std::string m_policy;
    SchemeKind scheme = SchemeKind::hstar;
    bool msrv_negative = false;
    bool noise_bias_subtracted = false;
    NoiseMoments moments;
    std::string eta_provenance; // estimated | supplied
    VarianceReport variance;
    double level = 0.0;
    Interval ci;
    bool gap_warning = false;
    bool plugin_fallback = false;
    bool plugin_clamped = false;

    nlohmann::json to_json() const;
};

EstimateReport run_estimate(const TickSeries& series, const EstimateOptions& options);

nlohmann::json weights_to_json(const WeightScheme& scheme);
nlohmann::json variance_to_json(const VarianceReport& report);

} // namespace msrv
