#include "mubqkd/galois.hpp"

#include <algorithm>

namespace mubqkd {

namespace {

constexpr int kMaxOrder = 1 << 16;

// Polynomials over GF(p) as little-endian coefficient vectors.

std::vector<int> poly_mul(const std::vector<int>& a, const std::vector<int>& b, int p) {
    std::vector<int> out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % p;
    }
    return out;
}

// Remainder of a modulo a monic divisor.
std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& monic, int p) {
    const int deg = static_cast<int>(monic.size()) - 1;
    for (int i = static_cast<int>(a.size()) - 1; i >= deg; --i) {
        const int c = a[i];
        if (c == 0) continue;
        for (int j = 0; j <= deg; ++j) {
            int& t = a[i - deg + j];
            t = ((t - c * monic[j]) % p + p) % p;
        }
    }
    a.resize(deg);
    return a;
}

bool poly_is_zero(const std::vector<int>& a) {
    return std::all_of(a.begin(), a.end(), [](int c) { return c == 0; });
}

std::vector<int> index_to_poly(long long idx, int len, int p) {
    std::vector<int> out(len);
    for (int i = 0; i < len; ++i) {
        out[i] = static_cast<int>(idx % p);
        idx /= p;
    }
    return out;
}

// Trial division by every monic polynomial of degree 1..deg/2.
bool poly_is_irreducible(const std::vector<int>& monic, int p) {
    const int deg = static_cast<int>(monic.size()) - 1;
    if (deg == 1) return true;
    for (int k = 1; 2 * k <= deg; ++k) {
        long long count = 1;
        for (int i = 0; i < k; ++i) count *= p;
        for (long long idx = 0; idx < count; ++idx) {
            std::vector<int> div = index_to_poly(idx, k, p);
            div.push_back(1);
            if (poly_is_zero(poly_mod(monic, div, p))) return false;
        }
    }
    return true;
}

std::vector<int> smallest_irreducible(int p, int deg) {
    long long count = 1;
    for (int i = 0; i < deg; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
        std::vector<int> cand = index_to_poly(idx, deg, p);
        cand.push_back(1);
        if (poly_is_irreducible(cand, p)) return cand;
    }
    throw std::logic_error("no irreducible polynomial found");  // unreachable
}

}  // namespace

bool is_prime(int p) {
    if (p < 2) return false;
    for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

FieldCtx::FieldCtx(int p, int degree) : p_(p), n_(degree) {
    init();
    modulus_ = smallest_irreducible(p_, n_);
    structure_ = StructureMatrices{};
    structure_.a.assign(n_, std::vector<std::vector<int>>(n_, std::vector<int>(n_, 0)));
    for (int m = 0; m < n_; ++m)
        for (int n = 0; n < n_; ++n) {
            const int prod = mul(monomial(m), monomial(n));
            for (int k = 0; k < n_; ++k) structure_.a[k][m][n] = digit(prod, k);
        }
}

FieldCtx::FieldCtx(int p, int degree, std::vector<int> modulus) : p_(p), n_(degree) {
    init();
    if (static_cast<int>(modulus.size()) != n_ + 1)
        throw std::invalid_argument("modulus must have degree+1 digits");
    for (int c : modulus)
        if (c < 0 || c >= p_) throw std::invalid_argument("modulus digit out of range");
    if (modulus.back() != 1) throw std::invalid_argument("modulus must be monic");
    if (!poly_is_irreducible(modulus, p_))
        throw std::invalid_argument("modulus is reducible over GF(p)");
    modulus_ = std::move(modulus);
    structure_ = StructureMatrices{};
    structure_.a.assign(n_, std::vector<std::vector<int>>(n_, std::vector<int>(n_, 0)));
    for (int m = 0; m < n_; ++m)
        for (int n = 0; n < n_; ++n) {
            const int prod = mul(monomial(m), monomial(n));
            for (int k = 0; k < n_; ++k) structure_.a[k][m][n] = digit(prod, k);
        }
}

void FieldCtx::init() {
    if (!is_prime(p_)) throw std::invalid_argument("characteristic must be prime");
    if (n_ < 1) throw std::invalid_argument("extension degree must be >= 1");
    long long d = 1;
    for (int i = 0; i < n_; ++i) {
        d *= p_;
        if (d > kMaxOrder) throw std::invalid_argument("field order exceeds 2^16");
    }
    d_ = static_cast<int>(d);
}

void FieldCtx::check_element(int e) const {
    if (e < 0 || e >= d_) throw std::domain_error("element label out of range");
}

std::vector<int> FieldCtx::digits(int e) const {
    check_element(e);
    std::vector<int> out(n_);
    for (int i = 0; i < n_; ++i) {
        out[i] = e % p_;
        e /= p_;
    }
    return out;
}

int FieldCtx::label(const std::vector<int>& digits) const {
    if (static_cast<int>(digits.size()) != n_)
        throw std::invalid_argument("digit vector has wrong length");
    int e = 0;
    for (int i = n_ - 1; i >= 0; --i) {
        if (digits[i] < 0 || digits[i] >= p_) throw std::domain_error("digit out of range");
        e = e * p_ + digits[i];
    }
    return e;
}

int FieldCtx::digit(int e, int k) const {
    check_element(e);
    for (int i = 0; i < k; ++i) e /= p_;
    return e % p_;
}

int FieldCtx::monomial(int k) const {
    if (k < 0 || k >= n_) throw std::domain_error("monomial degree out of range");
    int e = 1;
    for (int i = 0; i < k; ++i) e *= p_;
    return e;
}

int FieldCtx::add(int a, int b) const {
    check_element(a);
    check_element(b);
    int out = 0, place = 1;
    for (int i = 0; i < n_; ++i) {
        out += ((a % p_ + b % p_) % p_) * place;
        a /= p_;
        b /= p_;
        place *= p_;
    }
    return out;
}

int FieldCtx::neg(int a) const {
    check_element(a);
    int out = 0, place = 1;
    for (int i = 0; i < n_; ++i) {
        out += ((p_ - a % p_) % p_) * place;
        a /= p_;
        place *= p_;
    }
    return out;
}

int FieldCtx::sub(int a, int b) const { return add(a, neg(b)); }

int FieldCtx::mul(int a, int b) const {
    check_element(a);
    check_element(b);
    const std::vector<int> prod = poly_mod(poly_mul(digits(a), digits(b), p_), modulus_, p_);
    int out = 0;
    for (int i = n_ - 1; i >= 0; --i) out = out * p_ + prod[i];
    return out;
}

int FieldCtx::pow(int a, long long e) const {
    check_element(a);
    if (e < 0) throw std::domain_error("negative exponent");
    int out = 1, base = a;
    while (e > 0) {
        if (e & 1) out = mul(out, base);
        base = mul(base, base);
        e >>= 1;
    }
    return out;
}

int FieldCtx::inv(int a) const {
    check_element(a);
    if (a == 0) throw std::domain_error("division by zero in GF(p^N)");
    return pow(a, d_ - 2);  // nonzero elements form a cyclic group of order d-1
}

int FieldCtx::div(int a, int b) const { return mul(a, inv(b)); }

GfElement::GfElement(const FieldCtx& ctx, int label)
    : ctx_(&ctx), label_(label), digits_(ctx.digits(label)) {}

GfElement::GfElement(const FieldCtx& ctx, const std::vector<int>& digits)
    : ctx_(&ctx), label_(ctx.label(digits)), digits_(digits) {}

namespace {
void require_same_ctx(const GfElement& a, const GfElement& b) {
    if (a.ctx() != b.ctx())
        throw FieldMismatch("operands belong to different field contexts");
}
}  // namespace

GfElement operator+(const GfElement& a, const GfElement& b) {
    require_same_ctx(a, b);
    return {a.ctx(), a.ctx().add(a.label(), b.label())};
}

GfElement operator-(const GfElement& a, const GfElement& b) {
    require_same_ctx(a, b);
    return {a.ctx(), a.ctx().sub(a.label(), b.label())};
}

GfElement operator*(const GfElement& a, const GfElement& b) {
    require_same_ctx(a, b);
    return {a.ctx(), a.ctx().mul(a.label(), b.label())};
}

GfElement operator/(const GfElement& a, const GfElement& b) {
    require_same_ctx(a, b);
    return {a.ctx(), a.ctx().div(a.label(), b.label())};
}

bool operator==(const GfElement& a, const GfElement& b) {
    return a.ctx() == b.ctx() && a.label() == b.label();
}

int structure_map(const FieldCtx& ctx, int k, int r) {
    const auto& a = ctx.structure_matrices()[k];
    const std::vector<int> rd = ctx.digits(r);
    std::vector<int> out(ctx.degree(), 0);
    for (int m = 0; m < ctx.degree(); ++m) {
        int s = 0;
        for (int n = 0; n < ctx.degree(); ++n) s += a[m][n] * rd[n];
        out[m] = s % ctx.characteristic();
    }
    return ctx.label(out);
}

}  // namespace mubqkd
