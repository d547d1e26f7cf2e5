#include "relaycode/systematic.hpp"

#include <cmath>
#include <limits>

namespace relaycode {

double binomial(unsigned n, unsigned k) {
    if (k > n) return 0.0;
    if (n <= 60) {
        // Fits in uint64: C(60, 30) ~ 1.18e17.
        std::uint64_t acc = 1;
        for (unsigned t = 1; t <= std::min(k, n - k); ++t) acc = acc * (n - t + 1) / t;
        return static_cast<double>(acc);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

FirstStageDistribution first_stage_distribution(const ChannelParams& params) {
    params.validate();
    const double receiver_only = (1.0 - params.p1) * params.p2;
    const double relay_only = (1.0 - params.p2) * params.p1 * params.p3;
    const double both = (1.0 - params.p2) * (1.0 - params.p1 * params.p3);
    const double neither = params.p1 * params.p2;

    auto pow_or_one = [](double base, unsigned e) {
        return e == 0 ? 1.0 : std::pow(base, static_cast<double>(e));
    };

    FirstStageDistribution dist;
    const unsigned m = params.m;
    for (const NetworkState& s : enumerate_states(m)) {
        const unsigned lost = m - s.i - s.j + s.k;
        const double coeff = binomial(m, s.i - s.k) * binomial(m - (s.i - s.k), s.j - s.k) *
                             binomial(m - s.i - s.j + 2 * s.k, s.k);
        dist[s] = coeff * pow_or_one(receiver_only, s.i - s.k) *
                  pow_or_one(relay_only, s.j - s.k) * pow_or_one(both, s.k) *
                  pow_or_one(neither, lost);
    }
    return dist;
}

double t_sys(const ChannelParams& params) {
    const FirstStageDistribution dist = first_stage_distribution(params);
    const CompletionTimeTable times = solve_completion_times(params);
    double tail = 0.0;
    for (const auto& [state, q] : dist) {
        if (q <= 0.0) continue;
        const double t = times.at(state);
        if (std::isinf(t))
            throw NeverCompletesError("coded stage cannot complete from state (" +
                                      std::to_string(state.i) + "," + std::to_string(state.j) +
                                      "," + std::to_string(state.k) + ")");
        tail += q * t;
    }
    return static_cast<double>(params.m) + tail;
}

UncodedGain expected_uncoded_gain(const ChannelParams& params) {
    params.validate();
    const double fraction = params.p1 * (1.0 - params.p2) * (1.0 - params.p3);
    return {static_cast<double>(params.m) * fraction, fraction};
}

}  // namespace relaycode
