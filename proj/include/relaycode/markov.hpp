#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaycode {

class InvalidStateError : public std::invalid_argument {
public:
    explicit InvalidStateError(const std::string& what) : std::invalid_argument(what) {}
};

class AbsorbingStateError : public std::logic_error {
public:
    AbsorbingStateError() : std::logic_error("absorbing state has no transition deltas") {}
};

class NeverCompletesError : public std::runtime_error {
public:
    explicit NeverCompletesError(const std::string& what) : std::runtime_error(what) {}
};

/// Erasure probabilities of the three links plus the generation size M.
/// p1: source->receiver, p2: source->relay, p3: relay->receiver.
struct ChannelParams {
    double p1;
    double p2;
    double p3;
    unsigned m;

    void validate() const;
};

/// (i, j, k): dofs at the receiver, at the relay, and shared between them.
struct NetworkState {
    unsigned i;
    unsigned j;
    unsigned k;

    auto operator<=>(const NetworkState&) const = default;

    bool valid(unsigned m) const {
        return i <= m && j <= m && k <= i && k <= j && i + j - k <= m;
    }
    bool absorbing(unsigned m) const { return i == m; }
};

/// One slot's link outcomes: true = packet delivered.
struct LinkPattern {
    bool source_to_relay;
    bool source_to_receiver;
    bool relay_to_receiver;
};

/// The eight link-outcome patterns, indexed 0..7 in the canonical case order.
inline constexpr std::array<LinkPattern, 8> kLinkPatterns = {{
    {true, false, true},    // case 1
    {true, true, false},    // case 2
    {true, true, true},     // case 3
    {true, false, false},   // case 4
    {false, true, false},   // case 5
    {false, false, true},   // case 6
    {false, true, true},    // case 7
    {false, false, false},  // case 8
}};

/// Case-index lookup keyed by the three success flags (sr, sd, rd).
std::size_t pattern_index(bool source_to_relay, bool source_to_receiver, bool relay_to_receiver);

/// The five structural families of states. Transition deltas depend only on
/// the family and the link pattern.
enum class CaseFamily {
    combined_full,   // i+j-k = M and k < min(i,j): every new dof is shared
    relay_complete,  // j = M: the relay acts as a second source
    absorbing,       // i = M
    relay_useful,    // i+j-k < M and the relay holds a dof unknown to the receiver
    relay_covered,   // i+j-k < M and k = j: the receiver already spans the relay
};

struct StateDelta {
    unsigned di;
    unsigned dj;
    unsigned dk;
};

std::vector<NetworkState> enumerate_states(unsigned m);

double pattern_probability(const LinkPattern& pattern, const ChannelParams& params);

CaseFamily classify_state(NetworkState s, unsigned m);

/// The tabulated (di, dj, dk) for a family and pattern index 0..7.
/// Throws AbsorbingStateError for CaseFamily::absorbing.
StateDelta delta_for(CaseFamily family, std::size_t pattern);

NetworkState apply_delta(NetworkState s, StateDelta d, unsigned m);

using TransitionTable = std::map<NetworkState, std::vector<std::pair<NetworkState, double>>>;
using CompletionTimeTable = std::map<NetworkState, double>;

TransitionTable transition_table(const ChannelParams& params);

/// States reachable from (0,0,0) under the table.
std::set<NetworkState> reachable_states(const TransitionTable& table);

/// Expected slots-to-absorption for every valid state. Exact single pass:
/// all non-self successors strictly increase i+j+k, so states are processed
/// in decreasing order of that sum with each self-loop closed by division.
/// Throws NeverCompletesError if a reachable transient state has no exit.
CompletionTimeTable solve_completion_times(const ChannelParams& params);

/// Mean completion time with a non-systematic relay: T at (0,0,0).
double t_non_sys(const ChannelParams& params);

}  // namespace relaycode
