#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mubqkd {

// Two elements from fields with different (p, N, modulus).
struct FieldMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Symmetric structure matrices A^(k): p^m (*) p^n = (+)_k A[k](m,n) * p^k,
// where (*) and (+) are field multiplication and addition. They encode how
// products of power-of-p basis elements decompose over that basis.
struct StructureMatrices {
    std::vector<std::vector<std::vector<int>>> a;  // a[k][m][n], entries in [0, p)

    const std::vector<std::vector<int>>& operator[](int k) const { return a[k]; }
    int count() const { return static_cast<int>(a.size()); }
};

/// Finite field GF(p^N) with elements represented as little-endian digit
/// vectors over GF(p): label e = sum_n e_n p^n. Arithmetic is exact integer
/// arithmetic on labels; the modulus is a monic irreducible polynomial of
/// degree N stored as N+1 digits (constant term first, leading 1 last).
///
/// The default modulus is the lexicographically smallest monic irreducible
/// polynomial, found by exhaustive search, so constructions are reproducible.
/// Orders above 2^16 are rejected to keep exhaustive property checks feasible.
class FieldCtx {
public:
    FieldCtx(int p, int degree);
    FieldCtx(int p, int degree, std::vector<int> modulus);

    int characteristic() const { return p_; }
    int degree() const { return n_; }
    int order() const { return d_; }
    const std::vector<int>& modulus() const { return modulus_; }

    bool operator==(const FieldCtx& other) const {
        return p_ == other.p_ && n_ == other.n_ && modulus_ == other.modulus_;
    }
    bool operator!=(const FieldCtx& other) const { return !(*this == other); }

    // label <-> digit-vector round trip
    std::vector<int> digits(int e) const;
    int label(const std::vector<int>& digits) const;
    int digit(int e, int k) const;
    int monomial(int k) const;  // label of x^k, 0 <= k < N

    // arithmetic on labels in [0, d)
    int add(int a, int b) const;
    int sub(int a, int b) const;
    int neg(int a) const;
    int mul(int a, int b) const;
    int inv(int a) const;  // std::domain_error on 0
    int div(int a, int b) const;
    int pow(int a, long long e) const;

    const StructureMatrices& structure_matrices() const { return structure_; }

private:
    void check_element(int e) const;
    void init();

    int p_ = 0;
    int n_ = 0;
    int d_ = 0;
    std::vector<int> modulus_;
    StructureMatrices structure_;
};

/// Field element as digit vector plus context. Mixing elements from
/// different contexts throws FieldMismatch.
class GfElement {
public:
    GfElement(const FieldCtx& ctx, int label);
    GfElement(const FieldCtx& ctx, const std::vector<int>& digits);

    int label() const { return label_; }
    const std::vector<int>& digits() const { return digits_; }
    const FieldCtx& ctx() const { return *ctx_; }

    friend GfElement operator+(const GfElement& a, const GfElement& b);
    friend GfElement operator-(const GfElement& a, const GfElement& b);
    friend GfElement operator*(const GfElement& a, const GfElement& b);
    friend GfElement operator/(const GfElement& a, const GfElement& b);
    friend bool operator==(const GfElement& a, const GfElement& b);

private:
    const FieldCtx* ctx_;
    int label_;
    std::vector<int> digits_;
};

bool is_prime(int p);

// f_k(r): label of A^(k) r_vec mod p. Bijective for every k.
int structure_map(const FieldCtx& ctx, int k, int r);

}  // namespace mubqkd
