#include "drinfeld/fq.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace drinfeld {

namespace {

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Dense polynomial arithmetic over F_p, coefficients little-endian.
using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    trim(r);
    return r;
}

// a mod m, m monic.
Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
    trim(a);
    while (a.size() >= m.size()) {
        std::uint32_t lead = a.back();
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i) {
            std::uint32_t sub = (lead * m[i]) % p;
            std::uint32_t& c = a[shift + i];
            c = (c + p - sub) % p;
        }
        trim(a);
    }
    return a;
}

Poly decode(std::uint32_t v, std::uint32_t p) {
    Poly r;
    while (v) {
        r.push_back(v % p);
        v /= p;
    }
    return r;
}

std::uint32_t encode(const Poly& a, std::uint32_t p) {
    std::uint32_t v = 0;
    for (std::size_t i = a.size(); i-- > 0;) v = v * p + a[i];
    return v;
}

// A monic polynomial (with leading 1 appended) indexed by the base-p value of
// its lower coefficients. Degree d, value v < p^d.
Poly monic_from_value(std::uint32_t v, std::uint32_t d, std::uint32_t p) {
    Poly f = decode(v, p);
    f.resize(d, 0);
    f.push_back(1);
    return f;
}

bool is_irreducible(const Poly& f, std::uint32_t p) {
    std::uint32_t d = static_cast<std::uint32_t>(f.size()) - 1;
    if (d == 1) return true;
    // Trial division by all monic polynomials of degree 1..d/2.
    for (std::uint32_t e = 1; 2 * e <= d; ++e) {
        std::uint64_t count = 1;
        for (std::uint32_t i = 0; i < e; ++i) count *= p;
        for (std::uint64_t v = 0; v < count; ++v) {
            Poly g = monic_from_value(static_cast<std::uint32_t>(v), e, p);
            if (poly_mod(f, g, p).empty()) return false;
        }
    }
    return true;
}

Poly least_irreducible(std::uint32_t p, std::uint32_t d) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t v = 0; v < count; ++v) {
        Poly f = monic_from_value(static_cast<std::uint32_t>(v), d, p);
        if (is_irreducible(f, p)) return f;
    }
    throw domain_error("no irreducible polynomial found (impossible)");
}

} // namespace

FqContext::FqContext(std::uint32_t p, std::uint32_t s) : p_(p), s_(s) {
    if (!is_prime(p)) throw usage_error("FqContext: p must be prime");
    if (s == 0) throw usage_error("FqContext: s must be >= 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < s; ++i) {
        q *= p;
        if (q > (1u << 20)) throw usage_error("FqContext: q too large for table-based arithmetic");
    }
    q_ = static_cast<std::uint32_t>(q);

    Poly modulus = least_irreducible(p, s);
    mod_.assign(modulus.begin(), modulus.end() - 1);
    mod_.resize(s, 0);

    mul_t_.assign(static_cast<std::size_t>(q_) * q_, Fq(0));
    for (std::uint32_t a = 0; a < q_; ++a) {
        Poly pa = decode(a, p);
        for (std::uint32_t b = a; b < q_; ++b) {
            Poly pb = decode(b, p);
            std::uint32_t v = encode(poly_mod(poly_mul(pa, pb, p), modulus, p), p);
            mul_t_[static_cast<std::size_t>(a) * q_ + b] = Fq(v);
            mul_t_[static_cast<std::size_t>(b) * q_ + a] = Fq(v);
        }
    }

    inv_t_.assign(q_, Fq(0));
    for (std::uint32_t a = 1; a < q_; ++a) {
        for (std::uint32_t b = 1; b < q_; ++b) {
            if (mul_t_[static_cast<std::size_t>(a) * q_ + b].value() == 1) {
                inv_t_[a] = Fq(b);
                break;
            }
        }
    }

    frob_t_.assign(q_, Fq(0));
    for (std::uint32_t a = 0; a < q_; ++a) {
        Fq r(1);
        for (std::uint32_t i = 0; i < p; ++i) r = mul_t_[static_cast<std::size_t>(r.value()) * q_ + a];
        // r = a^p computed as 1*a*...*a (p factors)
        frob_t_[a] = r;
    }
}

const FqContext& FqContext::get(std::uint32_t p, std::uint32_t s) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<FqContext>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, s);
    auto it = registry.find(key);
    if (it == registry.end())
        it = registry.emplace(key, std::unique_ptr<FqContext>(new FqContext(p, s))).first;
    return *it->second;
}

std::vector<std::uint32_t> FqContext::coords(Fq a) const {
    check(a);
    std::vector<std::uint32_t> c(s_, 0);
    std::uint32_t v = a.value();
    for (std::uint32_t i = 0; i < s_ && v; ++i) {
        c[i] = v % p_;
        v /= p_;
    }
    return c;
}

Fq FqContext::from_coords(const std::vector<std::uint32_t>& c) const {
    if (c.size() != s_) throw usage_error("Fq coords: wrong coordinate count");
    std::uint32_t v = 0;
    for (std::size_t i = c.size(); i-- > 0;) {
        if (c[i] >= p_) throw usage_error("Fq coords: coordinate out of range");
        v = v * p_ + c[i];
    }
    return Fq(v);
}

Fq FqContext::add(Fq a, Fq b) const {
    check(a);
    check(b);
    // Digitwise mod-p addition of the packed coordinates.
    std::uint32_t va = a.value(), vb = b.value(), r = 0, mult = 1;
    for (std::uint32_t i = 0; i < s_; ++i) {
        r += ((va + vb) % p_) * mult;
        va /= p_;
        vb /= p_;
        mult *= p_;
    }
    return Fq(r);
}

Fq FqContext::neg(Fq a) const {
    check(a);
    std::uint32_t va = a.value(), r = 0, mult = 1;
    for (std::uint32_t i = 0; i < s_; ++i) {
        std::uint32_t d = va % p_;
        r += (d ? p_ - d : 0) * mult;
        va /= p_;
        mult *= p_;
    }
    return Fq(r);
}

Fq FqContext::inv(Fq a) const {
    check(a);
    if (a.is_zero()) throw domain_error("Fq: inversion of zero");
    return inv_t_[a.value()];
}

Fq FqContext::pow(Fq a, std::int64_t k) const {
    check(a);
    if (k < 0) {
        a = inv(a);
        k = -k;
    }
    if (a.is_zero()) return k == 0 ? one() : zero();
    // Exponents only matter mod q-1 for nonzero elements.
    std::uint64_t e = static_cast<std::uint64_t>(k) % (q_ - 1);
    Fq r = one(), base = a;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

Fq FqContext::frobenius_iter(Fq a, std::uint64_t r) const {
    r %= s_; // p^s-power Frobenius is the identity
    for (std::uint64_t i = 0; i < r; ++i) a = frobenius(a);
    return a;
}

} // namespace drinfeld
