#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace relaycode {

using Symbol = std::uint16_t;

class ZeroInverseError : public std::domain_error {
public:
    ZeroInverseError() : std::domain_error("zero has no multiplicative inverse") {}
};

/// Arithmetic in GF(2^m), 1 <= m <= 16, via log/antilog tables built at
/// construction. Immutable afterwards, so concurrent reads are safe.
class GaloisField {
public:
    GaloisField(unsigned m, unsigned reduction_polynomial);

    /// GF(2^4) with x^4 + x + 1.
    static GaloisField default_field() { return GaloisField(4, 0x13); }

    /// A commonly used irreducible polynomial of degree m.
    static unsigned default_polynomial(unsigned m);

    static bool is_irreducible(unsigned poly, unsigned degree);

    unsigned m() const { return m_; }
    unsigned size() const { return 1u << m_; }
    unsigned reduction_polynomial() const { return poly_; }

    Symbol add(Symbol a, Symbol b) const { return static_cast<Symbol>(a ^ b); }

    Symbol mul(Symbol a, Symbol b) const {
        if (a == 0 || b == 0) return 0;
        return alog_[(log_[a] + log_[b]) % (size() - 1)];
    }

    Symbol inv(Symbol a) const {
        if (a == 0) throw ZeroInverseError();
        return alog_[(size() - 1 - log_[a]) % (size() - 1)];
    }

    Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

private:
    unsigned m_;
    unsigned poly_;
    std::vector<Symbol> alog_;
    std::vector<unsigned> log_;
};

}  // namespace relaycode
