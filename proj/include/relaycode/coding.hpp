#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "relaycode/field.hpp"

namespace relaycode {

class DimensionMismatchError : public std::invalid_argument {
public:
    explicit DimensionMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

class InsufficientRankError : public std::logic_error {
public:
    InsufficientRankError() : std::logic_error("decoder rank below packet count") {}
};

/// A coded packet: coding vector over the M originals plus payload symbols.
struct Packet {
    std::vector<Symbol> coding_vector;
    std::vector<Symbol> payload;

    /// True when the coding vector is a unit vector e_i; sets *index to i.
    bool is_uncoded(std::size_t* index = nullptr) const;
};

/// payload = sum_i coefficients[i] * originals[i]; the coding vector carries
/// the coefficients verbatim.
Packet encode(const GaloisField& gf, const std::vector<std::vector<Symbol>>& originals,
              const std::vector<Symbol>& coefficients);

/// Uniform random coding vector; an all-zero draw is resampled once.
std::vector<Symbol> random_coding_vector(const GaloisField& gf, std::size_t m,
                                         std::mt19937_64& rng);

/// (M-U)^3 + U*(M-U), the Gaussian-elimination-plus-back-substitution
/// operation count proxy when U of the M received packets are uncoded.
std::uint64_t decoding_cost(std::uint64_t m, std::uint64_t u);

/// Rank-tracking decoder. Maintains a reduced-echelon basis so that
/// innovativeness is decided online, per received packet.
class Decoder {
public:
    Decoder(const GaloisField& gf, std::size_t packet_count, std::size_t payload_symbols);

    /// Folds pkt into the basis. Returns true iff the packet was innovative
    /// (rank increased). Unit-vector arrivals are recorded in
    /// uncoded_indices() whether innovative or not: delivery happened.
    bool receive(const Packet& pkt);

    std::size_t rank() const { return rows_.size(); }
    bool complete() const { return rank() == packet_count_; }
    std::size_t packet_count() const { return packet_count_; }
    const std::set<std::size_t>& uncoded_indices() const { return uncoded_indices_; }

    /// Recovers the M original payloads. Requires rank == M.
    std::vector<std::vector<Symbol>> decode() const;

private:
    struct Row {
        std::vector<Symbol> vec;
        std::vector<Symbol> payload;
        std::size_t pivot;
    };

    const GaloisField* gf_;
    std::size_t packet_count_;
    std::size_t payload_symbols_;
    std::vector<Row> rows_;  // sorted by pivot column
    std::set<std::size_t> uncoded_indices_;
};

}  // namespace relaycode
