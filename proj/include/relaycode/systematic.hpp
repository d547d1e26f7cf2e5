#pragma once

#include <map>

#include "relaycode/markov.hpp"

namespace relaycode {

/// Probability of ending the first (uncoded) stage in each network state.
using FirstStageDistribution = std::map<NetworkState, double>;

struct UncodedGain {
    double expected_gain;  // E[U_sys - U_non_sys]
    double fraction;       // expected_gain / M
};

/// Binomial coefficient as a double; exact integers for n <= 60, log-gamma
/// above.
double binomial(unsigned n, unsigned k);

/// Each of the M uncoded broadcasts ends in one of four per-packet outcomes
/// (receiver only, relay only, both, neither); the stage-one state
/// distribution is the induced multinomial.
FirstStageDistribution first_stage_distribution(const ChannelParams& params);

/// Mean completion time with a systematic relay: M first-stage slots plus
/// the distribution-weighted completion times of the coded stage.
double t_sys(const ChannelParams& params);

/// E[U_sys - U_non_sys] = M * P1 * (1 - P2) * (1 - P3).
UncodedGain expected_uncoded_gain(const ChannelParams& params);

}  // namespace relaycode
