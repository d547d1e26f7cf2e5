#include "relaycode/field.hpp"

namespace relaycode {

namespace {

unsigned gf2_degree(unsigned p) {
    unsigned d = 0;
    while (p >> (d + 1)) ++d;
    return d;
}

// Remainder of a mod b, both polynomials over GF(2).
unsigned gf2_mod(unsigned a, unsigned b) {
    const unsigned db = gf2_degree(b);
    while (a && gf2_degree(a) >= db) a ^= b << (gf2_degree(a) - db);
    return a;
}

// Carry-less multiply of a and b reduced by poly (degree m).
unsigned clmul_mod(unsigned a, unsigned b, unsigned poly, unsigned m) {
    unsigned acc = 0;
    while (b) {
        if (b & 1u) acc ^= a;
        b >>= 1;
        a <<= 1;
        if (a & (1u << m)) a ^= poly;
    }
    return acc;
}

}  // namespace

bool GaloisField::is_irreducible(unsigned poly, unsigned degree) {
    if (gf2_degree(poly) != degree) return false;
    if (degree == 1) return true;
    // Trial division by every polynomial of degree 1 .. degree/2.
    for (unsigned d = 1; d <= degree / 2; ++d)
        for (unsigned div = 1u << d; div < (2u << d); ++div)
            if (gf2_mod(poly, div) == 0) return false;
    return true;
}

unsigned GaloisField::default_polynomial(unsigned m) {
    static const unsigned table[17] = {
        0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x83,
        0x11D,  0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003,
        0x1100B};
    if (m < 1 || m > 16) throw std::invalid_argument("field exponent must be in [1, 16]");
    return table[m];
}

GaloisField::GaloisField(unsigned m, unsigned reduction_polynomial)
    : m_(m), poly_(reduction_polynomial) {
    if (m < 1 || m > 16) throw std::invalid_argument("field exponent must be in [1, 16]");
    if (!is_irreducible(poly_, m_))
        throw std::invalid_argument("reduction polynomial is not irreducible of the stated degree");

    const unsigned q = 1u << m_;
    alog_.assign(q - 1, 0);
    log_.assign(q, 0);

    // Find a multiplicative generator; the polynomial need not be primitive,
    // so x is not guaranteed to work.
    for (unsigned g = (q == 2) ? 1u : 2u; g < q; ++g) {
        unsigned e = 1;
        unsigned order = 0;
        do {
            e = clmul_mod(e, g, poly_, m_);
            ++order;
        } while (e != 1 && order < q);
        if (order == q - 1) {
            unsigned v = 1;
            for (unsigned i = 0; i < q - 1; ++i) {
                alog_[i] = static_cast<Symbol>(v);
                log_[v] = i;
                v = clmul_mod(v, g, poly_, m_);
            }
            return;
        }
    }
    throw std::logic_error("no generator found; polynomial check failed");
}

}  // namespace relaycode
