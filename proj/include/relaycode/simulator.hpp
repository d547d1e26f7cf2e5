#pragma once

#include <cstdint>
#include <optional>

#include "relaycode/coding.hpp"
#include "relaycode/markov.hpp"

namespace relaycode {

enum class RelayPolicy { systematic, non_systematic };

/// Infinite-field mode tracks (i, j, k) dof bookkeeping; finite mode runs
/// real coding vectors through Gaussian elimination.
struct FieldMode {
    bool infinite = true;
    unsigned exponent = 4;    // GF(2^exponent) when finite
    unsigned polynomial = 0;  // 0 = default polynomial for the exponent

    static FieldMode infinite_field() { return {true, 0, 0}; }
    static FieldMode finite(unsigned exponent, unsigned polynomial = 0) {
        return {false, exponent, polynomial};
    }
};

struct SimConfig {
    ChannelParams params{0.2, 0.2, 0.2, 8};
    RelayPolicy relay_policy = RelayPolicy::non_systematic;
    FieldMode field_mode = FieldMode::infinite_field();
    bool relay_lag = false;  // default: relay transmission includes same-slot receptions
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    std::size_t payload_symbols = 1;
};

struct TrialResult {
    std::uint64_t completion_slots;
    unsigned u_count;               // distinct original indices delivered uncoded
    std::size_t relay_queue_final;  // packets held by the relay at termination
};

struct BatchResult {
    double mean_completion;
    double stderr_completion;  // NaN when trials == 1
    double mean_u;
    double stderr_u;
    std::uint64_t trials;
};

/// Deterministic per-trial/per-stream seed derivation, independent of
/// execution order. Stream 0 drives link outcomes, stream 1 coefficients.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                          std::uint64_t stream);

/// One slotted run of the two-stage protocol. Aborts with
/// NeverCompletesError after 10^7 slots.
TrialResult run_trial(const SimConfig& config, std::uint64_t trial_index);

BatchResult run_batch(const SimConfig& config);

/// Estimated E[U_sys - U_non_sys] from matched batches. The configs must be
/// identical apart from relay_policy; equal master seeds give common random
/// numbers on the link outcomes.
double measure_uncoded_gap(const SimConfig& systematic_config,
                           const SimConfig& non_systematic_config);

}  // namespace relaycode
