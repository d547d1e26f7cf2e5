#include "relaycode/simulator.hpp"

#include <cmath>
#include <limits>

namespace relaycode {

namespace {

constexpr std::uint64_t kSlotCap = 10'000'000;

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct LinkDraw {
    bool sr;  // source -> relay delivered
    bool sd;  // source -> receiver delivered
    bool rd;  // relay -> receiver delivered
};

class LinkSampler {
public:
    LinkSampler(const ChannelParams& params, std::uint64_t seed) : params_(params), rng_(seed) {}

    LinkDraw next() {
        LinkDraw d;
        d.sr = unit_(rng_) >= params_.p2;
        d.sd = unit_(rng_) >= params_.p1;
        d.rd = unit_(rng_) >= params_.p3;
        return d;
    }

private:
    ChannelParams params_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

[[noreturn]] void throw_slot_cap() {
    throw NeverCompletesError("no completion within 10^7 slots");
}

// One coded-stage slot on (i, j, k), relay transmission including the
// same-slot reception; exactly the chain's delta tables.
NetworkState step_zero_lag(NetworkState s, const LinkDraw& d, unsigned m) {
    const CaseFamily family = classify_state(s, m);
    return apply_delta(s, delta_for(family, pattern_index(d.sr, d.sd, d.rd)), m);
}

// One coded-stage slot with the relay transmitting from its pre-slot
// knowledge, then the source broadcast landing.
NetworkState step_lag(NetworkState s, const LinkDraw& d, unsigned m) {
    if (d.rd && s.k < s.j && s.i < m) {
        ++s.i;
        ++s.k;
    }
    const bool full = (s.i + s.j - s.k == m);
    const bool at_receiver = d.sd && s.i < m;
    const bool at_relay = d.sr && s.j < m;
    if (at_receiver && at_relay) {
        ++s.i;
        ++s.j;
        s.k += full ? 2 : 1;
    } else if (at_receiver) {
        ++s.i;
        if (full) ++s.k;
    } else if (at_relay) {
        ++s.j;
        if (full) ++s.k;
    }
    return s;
}

TrialResult run_infinite(const SimConfig& config, std::uint64_t trial_index) {
    const unsigned m = config.params.m;
    LinkSampler links(config.params, derive_seed(config.master_seed, trial_index, 0));

    NetworkState state{0, 0, 0};
    unsigned u_count = 0;
    std::size_t relay_queue = 0;

    if (config.relay_policy == RelayPolicy::systematic) {
        // Stage one with per-index tracking; receiver knowledge is exactly
        // its set of uncoded originals here.
        std::vector<char> at_receiver(m, 0), at_relay(m, 0);
        std::optional<unsigned> pending;  // lag mode: uncoded index awaiting forward
        for (unsigned t = 1; t <= m; ++t) {
            const LinkDraw d = links.next();
            const unsigned idx = t - 1;
            std::optional<unsigned> forward;
            if (config.relay_lag) {
                forward = pending;
                pending = d.sr ? std::optional<unsigned>(idx) : std::nullopt;
            } else {
                if (d.sr) forward = idx;
            }
            if (d.sr) {
                ++relay_queue;
                if (!at_relay[idx]) {
                    at_relay[idx] = 1;
                    ++state.j;
                    if (at_receiver[idx]) ++state.k;
                }
            }
            auto deliver = [&](unsigned p) {
                if (at_receiver[p]) return;
                at_receiver[p] = 1;
                ++state.i;
                ++u_count;
                if (at_relay[p]) ++state.k;
            };
            if (d.sd) deliver(idx);
            if (d.rd && forward) deliver(*forward);
            if (state.i == m) return {t, u_count, relay_queue};
        }
        for (std::uint64_t t = m + 1; t <= kSlotCap; ++t) {
            const LinkDraw d = links.next();
            if (config.relay_lag && pending) {
                // Leftover stage-one forward occupies this slot's relay
                // transmission; the source broadcast still lands.
                NetworkState s = state;
                if (d.rd && !at_receiver[*pending]) {
                    at_receiver[*pending] = 1;
                    ++s.i;
                    ++u_count;
                    ++s.k;  // forwarded index is known to the relay
                }
                pending.reset();
                const bool full = (s.i + s.j - s.k == m);
                const bool recv = d.sd && s.i < m;
                const bool rel = d.sr && s.j < m;
                if (recv && rel) {
                    ++s.i;
                    ++s.j;
                    s.k += full ? 2 : 1;
                } else if (recv) {
                    ++s.i;
                    if (full) ++s.k;
                } else if (rel) {
                    ++s.j;
                    if (full) ++s.k;
                }
                state = s;
            } else {
                state = config.relay_lag ? step_lag(state, d, m) : step_zero_lag(state, d, m);
            }
            if (d.sr) ++relay_queue;
            if (state.i == m) return {t, u_count, relay_queue};
        }
        throw_slot_cap();
    }

    // Non-systematic relay: the delta tables describe every slot, both
    // stages. Uncoded arrivals are exactly the stage-one direct successes.
    for (std::uint64_t t = 1; t <= kSlotCap; ++t) {
        const LinkDraw d = links.next();
        if (t <= m && d.sd) ++u_count;
        if (d.sr) ++relay_queue;
        state = config.relay_lag ? step_lag(state, d, m) : step_zero_lag(state, d, m);
        if (state.i == m) return {t, u_count, relay_queue};
    }
    throw_slot_cap();
}

Packet unit_packet(const std::vector<std::vector<Symbol>>& originals, std::size_t index,
                   std::size_t m) {
    Packet pkt;
    pkt.coding_vector.assign(m, 0);
    pkt.coding_vector[index] = 1;
    pkt.payload = originals[index];
    return pkt;
}

Packet combine(const GaloisField& gf, const std::vector<Packet>& memory, std::size_t m,
               std::size_t payload_symbols, std::mt19937_64& rng) {
    std::uniform_int_distribution<unsigned> coef(0, gf.size() - 1);
    Packet out;
    out.coding_vector.assign(m, 0);
    out.payload.assign(payload_symbols, 0);
    for (int attempt = 0; attempt < 2; ++attempt) {
        bool any = false;
        for (const Packet& pkt : memory) {
            const Symbol c = static_cast<Symbol>(coef(rng));
            if (c == 0) continue;
            any = true;
            for (std::size_t t = 0; t < m; ++t)
                out.coding_vector[t] = gf.add(out.coding_vector[t], gf.mul(c, pkt.coding_vector[t]));
            for (std::size_t t = 0; t < payload_symbols; ++t)
                out.payload[t] = gf.add(out.payload[t], gf.mul(c, pkt.payload[t]));
        }
        if (any) break;
    }
    return out;
}

TrialResult run_finite(const SimConfig& config, std::uint64_t trial_index) {
    const unsigned m = config.params.m;
    const std::size_t payload_symbols = config.payload_symbols;
    const unsigned poly = config.field_mode.polynomial
                              ? config.field_mode.polynomial
                              : GaloisField::default_polynomial(config.field_mode.exponent);
    const GaloisField gf(config.field_mode.exponent, poly);

    LinkSampler links(config.params, derive_seed(config.master_seed, trial_index, 0));
    std::mt19937_64 coef_rng(derive_seed(config.master_seed, trial_index, 1));
    std::uniform_int_distribution<unsigned> symbol(0, gf.size() - 1);

    std::vector<std::vector<Symbol>> originals(m);
    for (auto& p : originals) {
        p.resize(payload_symbols);
        for (auto& s : p) s = static_cast<Symbol>(symbol(coef_rng));
    }

    Decoder receiver(gf, m, payload_symbols);
    std::vector<Packet> relay_memory;
    std::optional<Packet> pending;  // systematic lag: uncoded packet awaiting forward

    const bool systematic = config.relay_policy == RelayPolicy::systematic;
    for (std::uint64_t t = 1; t <= kSlotCap; ++t) {
        const LinkDraw d = links.next();
        const bool stage1 = t <= m;
        Packet src = stage1 ? unit_packet(originals, t - 1, m)
                            : encode(gf, originals, random_coding_vector(gf, m, coef_rng));

        std::optional<Packet> relay_tx;
        if (config.relay_lag) {
            if (systematic && pending) {
                relay_tx = std::move(pending);
                pending.reset();
            } else if ((!systematic || !stage1) && !relay_memory.empty()) {
                relay_tx = combine(gf, relay_memory, m, payload_symbols, coef_rng);
            }
            if (d.sr) {
                relay_memory.push_back(src);
                if (systematic && stage1) pending = src;
            }
        } else {
            if (d.sr) relay_memory.push_back(src);
            if (systematic && stage1) {
                if (d.sr) relay_tx = src;  // forwarded verbatim, once
            } else if (!relay_memory.empty()) {
                relay_tx = combine(gf, relay_memory, m, payload_symbols, coef_rng);
            }
        }

        if (d.sd) receiver.receive(src);
        if (d.rd && relay_tx) receiver.receive(*relay_tx);
        if (receiver.complete())
            return {t, static_cast<unsigned>(receiver.uncoded_indices().size()),
                    relay_memory.size()};
    }
    throw_slot_cap();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                          std::uint64_t stream) {
    return mix64(mix64(mix64(master_seed) + trial_index) + stream);
}

TrialResult run_trial(const SimConfig& config, std::uint64_t trial_index) {
    config.params.validate();
    if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
    return config.field_mode.infinite ? run_infinite(config, trial_index)
                                      : run_finite(config, trial_index);
}

BatchResult run_batch(const SimConfig& config) {
    config.params.validate();
    if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");

    const std::uint64_t n = config.trials;
    double sum_t = 0, sumsq_t = 0, sum_u = 0, sumsq_u = 0;
    for (std::uint64_t trial = 0; trial < n; ++trial) {
        const TrialResult r = run_trial(config, trial);
        const double t = static_cast<double>(r.completion_slots);
        const double u = static_cast<double>(r.u_count);
        sum_t += t;
        sumsq_t += t * t;
        sum_u += u;
        sumsq_u += u * u;
    }

    BatchResult out;
    out.trials = n;
    out.mean_completion = sum_t / static_cast<double>(n);
    out.mean_u = sum_u / static_cast<double>(n);
    if (n == 1) {
        out.stderr_completion = std::numeric_limits<double>::quiet_NaN();
        out.stderr_u = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double nd = static_cast<double>(n);
        auto se = [nd](double sum, double sumsq, double mean) {
            const double var = std::max(0.0, (sumsq - nd * mean * mean) / (nd - 1.0));
            return std::sqrt(var / nd);
        };
        out.stderr_completion = se(sum_t, sumsq_t, out.mean_completion);
        out.stderr_u = se(sum_u, sumsq_u, out.mean_u);
    }
    return out;
}

double measure_uncoded_gap(const SimConfig& systematic_config,
                           const SimConfig& non_systematic_config) {
    if (systematic_config.relay_policy != RelayPolicy::systematic ||
        non_systematic_config.relay_policy != RelayPolicy::non_systematic)
        throw std::invalid_argument("configs must carry systematic and non-systematic policies");
    const auto& a = systematic_config;
    const auto& b = non_systematic_config;
    if (a.params.p1 != b.params.p1 || a.params.p2 != b.params.p2 || a.params.p3 != b.params.p3 ||
        a.params.m != b.params.m || a.trials != b.trials ||
        a.field_mode.infinite != b.field_mode.infinite || a.relay_lag != b.relay_lag)
        throw std::invalid_argument("configs must be identical apart from the relay policy");
    return run_batch(a).mean_u - run_batch(b).mean_u;
}

}  // namespace relaycode
