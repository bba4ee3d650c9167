#pragma once

#include "drinfeld/tower.hpp"

namespace drinfeld {

/// tau-degree sentinel for exact skew polynomials.
inline constexpr std::int64_t kExactDeg = INT64_MAX / 4;

/// Element of the skew series ring O_H{{tau}}: sum a_i tau^i with
/// coefficients in a tower field and multiplication twisted by tau a = a^q tau
/// (q the base residue size). Evaluation turns it into the F_q-linear series
/// sum a_i X^{q^i}. A series either is an exact polynomial (dmax == kExactDeg)
/// or carries a truncation bound dmax: coefficients at indices <= dmax are
/// known (zero when not stored), higher ones are not.
class TwistedSeries {
  public:
    TwistedSeries(TowerPtr F, std::vector<FieldElement> coeffs, std::int64_t dmax = kExactDeg);
    static TwistedSeries zero(const TowerPtr& F) { return TwistedSeries(F, {}); }
    static TwistedSeries one(const TowerPtr& F);
    static TwistedSeries tau_power(const TowerPtr& F, std::int64_t i);
    static TwistedSeries constant(const FieldElement& c);

    const TowerPtr& field() const { return F_; }
    std::int64_t dmax() const { return dmax_; }
    bool is_exact() const { return dmax_ == kExactDeg; }
    /// Highest stored index (-1 for the zero polynomial).
    std::int64_t tau_degree() const { return static_cast<std::int64_t>(a_.size()) - 1; }
    /// Coefficient of tau^i; insufficient_precision beyond dmax.
    FieldElement coeff(std::int64_t i) const;
    const std::vector<FieldElement>& coeffs() const { return a_; }

    TwistedSeries truncated(std::int64_t d) const;
    /// Smallest index whose coefficient is possibly nonzero.
    std::int64_t tau_valuation() const;

    /// mu(a_i) >= 0 for all stored coefficients (certified).
    bool is_integral() const;
    /// mu(a_i) >= -i for all stored coefficients (certified).
    bool is_log_type() const;

    std::string str() const;

  private:
    TowerPtr F_;
    std::vector<FieldElement> a_;
    std::int64_t dmax_;
};

TwistedSeries tw_add(const TwistedSeries& f, const TwistedSeries& g);
TwistedSeries tw_sub(const TwistedSeries& f, const TwistedSeries& g);
/// Left multiplication by a constant: c * (sum a_i tau^i) = sum (c a_i) tau^i.
TwistedSeries tw_scale(const FieldElement& c, const TwistedSeries& f);
/// Skew product; as additive series this is composition (f*g)(x) = f(g(x)).
TwistedSeries tw_mul(const TwistedSeries& f, const TwistedSeries& g);

/// sum a_i x^{q^i} in x's field (the coefficient field must be a sub-tower).
/// Preconditions: exact polynomials evaluate anywhere; integral series need
/// mu(x) > 0 and logarithm-type series mu(x) > 1/(q-1). The result's precision
/// is capped by the dropped tail's valuation bound.
FieldElement tw_evaluate(const TwistedSeries& f, const FieldElement& x);

/// Two-sided inverse to tau-degree D; requires a unit constant coefficient.
TwistedSeries tw_invert(const TwistedSeries& f, std::int64_t D);

/// Solve r * g = P for r, coefficientwise lowest-degree-first, dividing by
/// the powers g_0^{q^k}. domain_error when P is (provably) not left-divisible,
/// insufficient_precision when the divisions exhaust the precision before
/// tau-degree D.
TwistedSeries tw_left_divide(const TwistedSeries& P, const TwistedSeries& g, std::int64_t D);

/// Coefficientwise reduction to the residue field of the coefficient field.
/// Requires an integral series.
std::vector<Fq> tw_reduce_mod_p(const TwistedSeries& f);

/// All stored coefficients vanish to their precision.
bool tw_zero_to_prec(const TwistedSeries& f);

} // namespace drinfeld
