#include "relaycode/coding.hpp"

#include <algorithm>

namespace relaycode {

bool Packet::is_uncoded(std::size_t* index) const {
    std::size_t found = coding_vector.size();
    for (std::size_t i = 0; i < coding_vector.size(); ++i) {
        if (coding_vector[i] == 0) continue;
        if (coding_vector[i] != 1 || found != coding_vector.size()) return false;
        found = i;
    }
    if (found == coding_vector.size()) return false;
    if (index) *index = found;
    return true;
}

Packet encode(const GaloisField& gf, const std::vector<std::vector<Symbol>>& originals,
              const std::vector<Symbol>& coefficients) {
    if (originals.size() != coefficients.size())
        throw DimensionMismatchError("coefficient count differs from packet count");
    Packet pkt;
    pkt.coding_vector = coefficients;
    const std::size_t len = originals.empty() ? 0 : originals.front().size();
    pkt.payload.assign(len, 0);
    for (std::size_t i = 0; i < originals.size(); ++i) {
        if (originals[i].size() != len)
            throw DimensionMismatchError("payload lengths differ across originals");
        if (coefficients[i] == 0) continue;
        for (std::size_t s = 0; s < len; ++s)
            pkt.payload[s] = gf.add(pkt.payload[s], gf.mul(coefficients[i], originals[i][s]));
    }
    return pkt;
}

std::vector<Symbol> random_coding_vector(const GaloisField& gf, std::size_t m,
                                         std::mt19937_64& rng) {
    std::uniform_int_distribution<unsigned> coef(0, gf.size() - 1);
    std::vector<Symbol> v(m);
    for (int attempt = 0; attempt < 2; ++attempt) {
        bool any = false;
        for (auto& c : v) {
            c = static_cast<Symbol>(coef(rng));
            any |= (c != 0);
        }
        if (any) break;
    }
    return v;
}

std::uint64_t decoding_cost(std::uint64_t m, std::uint64_t u) {
    if (u > m) throw std::invalid_argument("uncoded count exceeds packet count");
    const std::uint64_t c = m - u;
    return c * c * c + u * c;
}

Decoder::Decoder(const GaloisField& gf, std::size_t packet_count, std::size_t payload_symbols)
    : gf_(&gf), packet_count_(packet_count), payload_symbols_(payload_symbols) {}

bool Decoder::receive(const Packet& pkt) {
    if (pkt.coding_vector.size() != packet_count_ || pkt.payload.size() != payload_symbols_)
        throw DimensionMismatchError("packet dimensions do not match decoder");

    std::size_t unit_index;
    if (pkt.is_uncoded(&unit_index)) uncoded_indices_.insert(unit_index);

    std::vector<Symbol> vec = pkt.coding_vector;
    std::vector<Symbol> payload = pkt.payload;

    // Reduce against the existing basis.
    for (const Row& row : rows_) {
        const Symbol c = vec[row.pivot];
        if (c == 0) continue;
        for (std::size_t t = 0; t < packet_count_; ++t)
            vec[t] = gf_->add(vec[t], gf_->mul(c, row.vec[t]));
        for (std::size_t t = 0; t < payload_symbols_; ++t)
            payload[t] = gf_->add(payload[t], gf_->mul(c, row.payload[t]));
    }

    const auto nz = std::find_if(vec.begin(), vec.end(), [](Symbol s) { return s != 0; });
    if (nz == vec.end()) return false;  // within the span

    const std::size_t pivot = static_cast<std::size_t>(nz - vec.begin());
    const Symbol scale = gf_->inv(*nz);
    for (auto& s : vec) s = gf_->mul(s, scale);
    for (auto& s : payload) s = gf_->mul(s, scale);

    // Clear the new pivot column above, keeping the basis reduced.
    for (Row& row : rows_) {
        const Symbol c = row.vec[pivot];
        if (c == 0) continue;
        for (std::size_t t = 0; t < packet_count_; ++t)
            row.vec[t] = gf_->add(row.vec[t], gf_->mul(c, vec[t]));
        for (std::size_t t = 0; t < payload_symbols_; ++t)
            row.payload[t] = gf_->add(row.payload[t], gf_->mul(c, payload[t]));
    }

    Row fresh{std::move(vec), std::move(payload), pivot};
    rows_.insert(std::upper_bound(rows_.begin(), rows_.end(), fresh,
                                  [](const Row& a, const Row& b) { return a.pivot < b.pivot; }),
                 std::move(fresh));
    return true;
}

std::vector<std::vector<Symbol>> Decoder::decode() const {
    if (!complete()) throw InsufficientRankError();
    // Full-rank reduced basis is the identity; rows are pivot-sorted.
    std::vector<std::vector<Symbol>> out(packet_count_);
    for (std::size_t i = 0; i < packet_count_; ++i) out[i] = rows_[i].payload;
    return out;
}

}  // namespace relaycode
