#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drinfeld/errors.hpp"
#include "drinfeld/fq.hpp"

namespace drinfeld {

/// Absolute precision used for exact polynomials (no unknown tail). All
/// precision propagation saturates at this sentinel.
inline constexpr std::int64_t kExactPrec = INT64_MAX / 4;

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    if (a >= kExactPrec || b >= kExactPrec) return kExactPrec;
    std::int64_t r = a + b;
    return r >= kExactPrec ? kExactPrec : r;
}
inline std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
    if (a >= kExactPrec || b >= kExactPrec) return kExactPrec;
    __int128 r = static_cast<__int128>(a) * b;
    if (r >= kExactPrec) return kExactPrec;
    if (r <= -kExactPrec) throw domain_error("exponent overflow");
    return static_cast<std::int64_t>(r);
}

/// Truncated Laurent series over a finite field with an explicit absolute
/// precision: coefficients at exponents >= prec() are unknown, everything
/// below prec() is known (zero outside the stored window). A series may be
/// "zero to precision": no stored coefficients, in which case val() == prec()
/// by convention. Exact polynomials carry prec() == kExactPrec.
///
/// Precision propagation (pessimistic, saturating at kExactPrec):
///   add/sub:   prec = min(prec(x), prec(y))
///   mul:       prec = min(prec(x)+val(y), prec(y)+val(x)),  val = val(x)+val(y)
///   inv:       prec = prec(x) - 2*val(x)   (monomials invert exactly)
///   x^{p^r}:   prec = p^r * prec(x)
///   compose:   see series_compose
///   derivative: prec = prec(x) - 1
/// Values are immutable after construction and safe to share across threads.
class PrecSeries {
  public:
    static PrecSeries zero(const FqContext& ctx, std::int64_t prec) {
        return PrecSeries(ctx, prec, prec, {});
    }
    static PrecSeries exact_zero(const FqContext& ctx) { return zero(ctx, kExactPrec); }
    static PrecSeries monomial(const FqContext& ctx, Fq c, std::int64_t exp,
                               std::int64_t prec = kExactPrec);
    static PrecSeries one(const FqContext& ctx) { return monomial(ctx, ctx.one(), 0); }
    /// Coefficients c[i] at exponents val+i; unknown tail from prec on.
    static PrecSeries from_coeffs(const FqContext& ctx, std::int64_t val, std::vector<Fq> c,
                                  std::int64_t prec = kExactPrec);

    const FqContext& ctx() const { return *ctx_; }
    std::int64_t prec() const { return prec_; }
    bool is_exact() const { return prec_ == kExactPrec; }
    bool is_zero_to_prec() const { return c_.empty(); }
    /// Lowest exponent with a (known) nonzero coefficient; nullopt when the
    /// series is zero to its precision.
    std::optional<std::int64_t> valuation() const {
        if (c_.empty()) return std::nullopt;
        return val_;
    }
    /// valuation() when nonzero, prec() when zero-to-precision: a certified
    /// lower bound for the true valuation either way.
    std::int64_t val_lower_bound() const { return c_.empty() ? prec_ : val_; }
    std::int64_t stored_low() const { return val_; }
    std::int64_t stored_high() const { return val_ + static_cast<std::int64_t>(c_.size()); }
    const std::vector<Fq>& coeffs() const { return c_; }

    /// Coefficient at exponent e. Throws insufficient_precision for e >= prec.
    Fq coeff(std::int64_t e) const;

    PrecSeries with_prec(std::int64_t p) const; ///< lower the precision (truncate)
    PrecSeries shifted(std::int64_t k) const;   ///< multiply by t^k

    std::string str(const std::string& var = "t") const;

    friend PrecSeries operator+(const PrecSeries& a, const PrecSeries& b);
    friend PrecSeries operator-(const PrecSeries& a, const PrecSeries& b);
    friend PrecSeries operator*(const PrecSeries& a, const PrecSeries& b);
    PrecSeries operator-() const;
    PrecSeries scaled(Fq c) const;

  private:
    PrecSeries(const FqContext& ctx, std::int64_t val, std::int64_t prec, std::vector<Fq> c)
        : ctx_(&ctx), val_(val), prec_(prec), c_(std::move(c)) {}
    void normalize();

    const FqContext* ctx_;
    std::int64_t val_;  // lowest stored exponent; == prec_ when zero-to-prec
    std::int64_t prec_; // absolute precision
    std::vector<Fq> c_; // c_[i] = coefficient of exponent val_+i; c_[0] != 0 when nonempty

    friend PrecSeries series_inv(const PrecSeries&, std::optional<std::int64_t>);
    friend PrecSeries series_frobenius_power(const PrecSeries&, std::uint32_t);
    friend PrecSeries series_derivative(const PrecSeries&);
};

/// Multiplicative inverse. `target` is the requested absolute precision of the
/// result; it is required when x is exact and not a monomial (the inverse of a
/// genuine polynomial is an infinite series). Raises insufficient_precision
/// when x is zero to its precision, domain_error when x is exactly zero.
PrecSeries series_inv(const PrecSeries& x, std::optional<std::int64_t> target = std::nullopt);

PrecSeries series_div(const PrecSeries& x, const PrecSeries& y,
                      std::optional<std::int64_t> target = std::nullopt);

/// x^{p^r}: coefficientwise p^r-power and exponent dilation by p^r.
PrecSeries series_frobenius_power(const PrecSeries& x, std::uint32_t r);

/// x^k for integer k; negative k goes through series_inv (same target rules).
PrecSeries series_pow(const PrecSeries& x, std::int64_t k,
                      std::optional<std::int64_t> target = std::nullopt);

/// f(g). Needs val(g) >= 1 when f has an unknown tail (non-exact f), and g
/// invertible when f has negative exponents. Result precision:
///   min( val(g)*prec(f)            [skipped when f exact],
///        prec(g) + (i_eff-1)*val(g) [skipped when g exact] )
/// with i_eff = val(f) if val(f) >= 1 or val(f) < 0, else 1.
PrecSeries series_compose(const PrecSeries& f, const PrecSeries& g,
                          std::optional<std::int64_t> target = std::nullopt);

PrecSeries series_derivative(const PrecSeries& f);

/// Compositional inverse of s (val(s) == 1, unit leading coefficient):
/// returns w with s(w) = id to absolute precision `target`.
PrecSeries series_reversion(const PrecSeries& s, std::int64_t target);

/// Equality of all coefficients below min(prec(a), prec(b)).
bool series_eq_shared_prec(const PrecSeries& a, const PrecSeries& b);

/// Certifies that all coefficients below p vanish. Raises
/// insufficient_precision if prec(x) < p (cannot certify).
bool series_is_zero_to(const PrecSeries& x, std::int64_t p);

} // namespace drinfeld
