#pragma once

#include <cstdint>
#include <vector>

#include "drinfeld/errors.hpp"

namespace drinfeld {

/// Element of a finite field F_q, q = p^s. The value packs the s coordinates
/// over F_p in base p (digit i = coefficient of w^i in the polynomial basis).
/// Arithmetic goes through the owning FqContext.
class Fq {
  public:
    constexpr Fq() = default;
    constexpr explicit Fq(std::uint32_t v) : v_(v) {}
    constexpr std::uint32_t value() const { return v_; }
    constexpr bool is_zero() const { return v_ == 0; }
    friend constexpr bool operator==(Fq a, Fq b) { return a.v_ == b.v_; }
    friend constexpr bool operator!=(Fq a, Fq b) { return a.v_ != b.v_; }

  private:
    std::uint32_t v_{0};
};

/// Arithmetic context for F_q = F_p[w]/(modulus). The modulus is the monic
/// irreducible of degree s whose coefficient vector (c_0,...,c_{s-1}), read as
/// the base-p integer sum c_i p^i, is least — a fixed deterministic choice so
/// that reports are reproducible across runs and machines.
///
/// Contexts are interned: FqContext::get(p, s) returns a reference that stays
/// valid for the lifetime of the process, so elements and series only need to
/// carry the pointer. All tables are built once at construction; the context
/// is immutable afterwards and safe to share between threads.
class FqContext {
  public:
    static const FqContext& get(std::uint32_t p, std::uint32_t s);

    std::uint32_t p() const { return p_; }
    std::uint32_t s() const { return s_; }
    std::uint32_t q() const { return q_; }
    /// Coefficients c_0..c_{s-1} of the modulus (x^s is implied).
    const std::vector<std::uint32_t>& modulus() const { return mod_; }

    Fq zero() const { return Fq(0); }
    Fq one() const { return Fq(1); }
    /// Image of an integer under Z -> F_p (prime subfield).
    Fq from_int(std::int64_t n) const {
        std::int64_t r = n % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return Fq(static_cast<std::uint32_t>(r));
    }
    Fq from_value(std::uint32_t v) const {
        check(Fq(v));
        return Fq(v);
    }
    std::vector<std::uint32_t> coords(Fq a) const;
    Fq from_coords(const std::vector<std::uint32_t>& c) const;

    Fq add(Fq a, Fq b) const;
    Fq sub(Fq a, Fq b) const { return add(a, neg(b)); }
    Fq neg(Fq a) const;
    Fq mul(Fq a, Fq b) const {
        check(a);
        check(b);
        return mul_t_[a.value() * q_ + b.value()];
    }
    /// Multiplicative inverse; inversion of zero is a domain error.
    Fq inv(Fq a) const;
    Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }
    /// a^k for any integer k (negative k inverts first; 0^0 = 1, 0^neg errors).
    Fq pow(Fq a, std::int64_t k) const;
    /// The p-power Frobenius x -> x^p.
    Fq frobenius(Fq a) const {
        check(a);
        return frob_t_[a.value()];
    }
    /// x -> x^{p^r}.
    Fq frobenius_iter(Fq a, std::uint64_t r) const;

    bool same_as(const FqContext& o) const { return this == &o; }

  private:
    FqContext(std::uint32_t p, std::uint32_t s);
    void check(Fq a) const {
        if (a.value() >= q_) throw usage_error("Fq element out of range for this context");
    }

    std::uint32_t p_, s_, q_;
    std::vector<std::uint32_t> mod_;
    std::vector<Fq> mul_t_;  // q*q
    std::vector<Fq> inv_t_;  // q (inv_t_[0] unused)
    std::vector<Fq> frob_t_; // q
};

} // namespace drinfeld
