#include "relaycode/markov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace relaycode {

void ChannelParams::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p1) || !prob(p2) || !prob(p3))
        throw std::invalid_argument("erasure probabilities must lie in [0, 1]");
    if (m < 1) throw std::invalid_argument("packet count must be at least 1");
}

std::size_t pattern_index(bool source_to_relay, bool source_to_receiver, bool relay_to_receiver) {
    static constexpr std::size_t lut[2][2][2] = {
        // sr = false
        {{7, 5}, {4, 6}},  // [sd][rd], cases 8, 6, 5, 7
        // sr = true
        {{3, 0}, {1, 2}},  // cases 4, 1, 2, 3
    };
    return lut[source_to_relay][source_to_receiver][relay_to_receiver];
}

std::vector<NetworkState> enumerate_states(unsigned m) {
    std::vector<NetworkState> out;
    for (unsigned i = 0; i <= m; ++i)
        for (unsigned j = 0; j <= m; ++j)
            for (unsigned k = 0; k <= std::min(i, j); ++k)
                if (i + j - k <= m) out.push_back({i, j, k});
    return out;
}

double pattern_probability(const LinkPattern& pattern, const ChannelParams& params) {
    params.validate();
    const double sr = pattern.source_to_relay ? 1.0 - params.p2 : params.p2;
    const double sd = pattern.source_to_receiver ? 1.0 - params.p1 : params.p1;
    const double rd = pattern.relay_to_receiver ? 1.0 - params.p3 : params.p3;
    return sr * sd * rd;
}

CaseFamily classify_state(NetworkState s, unsigned m) {
    if (!s.valid(m)) throw InvalidStateError("state violates i+j-k <= M or 0 <= k <= min(i,j)");
    if (s.i == m) return CaseFamily::absorbing;
    if (s.i + s.j - s.k == m) {
        if (s.k < std::min(s.i, s.j)) return CaseFamily::combined_full;
        return CaseFamily::relay_complete;  // k = i < M, hence j = M
    }
    if (s.k == s.j) return CaseFamily::relay_covered;  // k = j <= i
    return CaseFamily::relay_useful;                   // k < min(i,j) or k = i < j
}

StateDelta delta_for(CaseFamily family, std::size_t pattern) {
    if (pattern >= 8) throw std::out_of_range("pattern index must be 0..7");
    using Table = std::array<StateDelta, 8>;
    static constexpr Table combined_full = {{
        {1, 1, 2}, {1, 1, 2}, {2, 1, 3}, {0, 1, 1}, {1, 0, 1}, {1, 0, 1}, {2, 0, 2}, {0, 0, 0}}};
    static constexpr Table relay_complete = {{
        {1, 0, 1}, {1, 0, 1}, {2, 0, 2}, {0, 0, 0}, {1, 0, 1}, {1, 0, 1}, {2, 0, 2}, {0, 0, 0}}};
    static constexpr Table relay_useful = {{
        {1, 1, 1}, {1, 1, 1}, {2, 1, 2}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}, {2, 0, 1}, {0, 0, 0}}};
    static constexpr Table relay_covered = {{
        {1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {0, 1, 0}, {1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}}};
    switch (family) {
        case CaseFamily::combined_full: return combined_full[pattern];
        case CaseFamily::relay_complete: return relay_complete[pattern];
        case CaseFamily::relay_useful: return relay_useful[pattern];
        case CaseFamily::relay_covered: return relay_covered[pattern];
        case CaseFamily::absorbing: throw AbsorbingStateError();
    }
    throw std::logic_error("unknown case family");
}

NetworkState apply_delta(NetworkState s, StateDelta d, unsigned m) {
    NetworkState out;
    out.i = std::min(s.i + d.di, m);
    out.j = std::min(s.j + d.dj, m);
    out.k = std::min({s.k + d.dk, out.i, out.j});
    return out;
}

TransitionTable transition_table(const ChannelParams& params) {
    params.validate();
    TransitionTable table;
    for (const NetworkState& s : enumerate_states(params.m)) {
        auto& row = table[s];
        if (s.absorbing(params.m)) {
            row.emplace_back(s, 1.0);
            continue;
        }
        const CaseFamily family = classify_state(s, params.m);
        std::map<NetworkState, double> acc;
        for (std::size_t c = 0; c < kLinkPatterns.size(); ++c) {
            const NetworkState succ = apply_delta(s, delta_for(family, c), params.m);
            acc[succ] += pattern_probability(kLinkPatterns[c], params);
        }
        for (const auto& [succ, p] : acc)
            if (p > 0.0) row.emplace_back(succ, p);
    }
    return table;
}

std::set<NetworkState> reachable_states(const TransitionTable& table) {
    std::set<NetworkState> seen;
    std::deque<NetworkState> queue{{0, 0, 0}};
    seen.insert({0, 0, 0});
    while (!queue.empty()) {
        const NetworkState s = queue.front();
        queue.pop_front();
        for (const auto& [succ, p] : table.at(s))
            if (p > 0.0 && seen.insert(succ).second) queue.push_back(succ);
    }
    return seen;
}

CompletionTimeTable solve_completion_times(const ChannelParams& params) {
    const TransitionTable table = transition_table(params);
    const std::set<NetworkState> reachable = reachable_states(table);

    std::vector<NetworkState> order = enumerate_states(params.m);
    std::sort(order.begin(), order.end(), [](const NetworkState& a, const NetworkState& b) {
        return a.i + a.j + a.k > b.i + b.j + b.k;
    });

    CompletionTimeTable times;
    for (const NetworkState& s : order) {
        if (s.absorbing(params.m)) {
            times[s] = 0.0;
            continue;
        }
        double self_prob = 0.0;
        double weighted = 0.0;
        for (const auto& [succ, p] : table.at(s)) {
            if (succ == s)
                self_prob += p;
            else
                weighted += p * times.at(succ);
        }
        const double denom = 1.0 - self_prob;
        if (denom <= 1e-15) {
            if (reachable.count(s))
                throw NeverCompletesError("state (" + std::to_string(s.i) + "," +
                                          std::to_string(s.j) + "," + std::to_string(s.k) +
                                          ") has no exit: the receiver cannot gain a dof");
            times[s] = std::numeric_limits<double>::infinity();
            continue;
        }
        times[s] = (1.0 + weighted) / denom;
    }
    return times;
}

double t_non_sys(const ChannelParams& params) {
    return solve_completion_times(params).at({0, 0, 0});
}

}  // namespace relaycode
