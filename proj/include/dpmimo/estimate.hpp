#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace dpmimo {

struct MetricEstimate {
    std::string metric;
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

// Bernoulli proportion with its binomial standard error.
inline MetricEstimate proportion(std::string metric, std::int64_t hits, std::int64_t n)
{
    if (n <= 0)
        return {std::move(metric), 0.0, 0.0, 0};
    double p = static_cast<double>(hits) / static_cast<double>(n);
    return {std::move(metric), p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

} // namespace dpmimo
