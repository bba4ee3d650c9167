#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "drinfeld/series.hpp"
#include "drinfeld/valuation.hpp"

namespace drinfeld {

class TowerField;
using TowerPtr = std::shared_ptr<const TowerField>;

/// Element of a tower field L: a Laurent series in the top uniformizer with
/// coefficients in the top residue field F_{q_L}. Construction truncates the
/// series to the field's working precision. mu(x) = v_pi(x)/e(L|K).
class FieldElement {
  public:
    FieldElement(TowerPtr F, PrecSeries s);

    const TowerPtr& field() const { return F_; }
    const PrecSeries& repr() const { return s_; }

    bool is_zero_to_prec() const { return s_.is_zero_to_prec(); }
    bool provably_nonzero() const { return !s_.is_zero_to_prec(); }
    /// Exact valuation, nullopt when zero to precision.
    std::optional<RationalVal> valuation() const;
    /// Certified lower bound for mu (= prec/e when zero to precision).
    RationalVal val_lower_bound() const;
    /// Integer valuation in L (v_L); nullopt when zero to precision.
    std::optional<std::int64_t> int_valuation() const { return s_.valuation(); }

    /// Constant coefficient as residue-field element; needs an integral value.
    Fq residue() const;

    FieldElement operator-() const { return FieldElement(F_, -s_); }
    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
    FieldElement inverse() const;
    FieldElement pow(std::int64_t k) const;
    /// x^{q^r} with q the base-field residue size (the tau action).
    FieldElement frobenius_q(std::uint32_t r = 1) const;
    FieldElement scaled(Fq c) const { return FieldElement(F_, s_.scaled(c)); }

    std::string str() const;

  private:
    TowerPtr F_;
    PrecSeries s_;
};

/// A local field presented as an explicit tower over K = F_q((t)): the base
/// layer, unramified layers (residue extension, uniformizer unchanged) and
/// Eisenstein layers (uniformizer adjunction). Each instance stores its layer
/// data, the embedding of the parent uniformizer, cumulative invariants
/// (e, f, different valuation) and the working precision. Instances are
/// immutable after construction; elements of deeper fields reference their
/// tower by shared pointer.
class TowerField : public std::enable_shared_from_this<TowerField> {
  public:
    enum class Kind { Base, Unramified, Eisenstein };

    static TowerPtr make_base(std::uint32_t p, std::uint32_t s, std::int64_t prec_t);
    TowerPtr extend_unramified(std::uint32_t fext) const;
    /// Adjoin a root of the monic polynomial X^d + sum c_i X^i given by its
    /// lower coefficients c_0..c_{d-1} over *this. The polynomial must be
    /// Eisenstein; the embedding of the parent uniformizer is solved by
    /// fixed-point iteration (each step must strictly gain valuation).
    TowerPtr extend_eisenstein(const std::vector<FieldElement>& lower_coeffs) const;
    /// Cache-reload path: trusts the stored embedding after verifying that
    /// the minimal polynomial vanishes on the uniformizer to precision.
    static TowerPtr restore_eisenstein(TowerPtr parent, std::vector<PrecSeries> minpoly,
                                       PrecSeries embedding);

    Kind kind() const { return kind_; }
    const TowerPtr& parent() const { return parent_; }
    const FqContext& residue_ctx() const { return *ctx_; }
    std::uint32_t base_p() const { return p_; }
    std::uint32_t base_s() const { return s_; }
    std::uint32_t base_q() const { return FqContext::get(p_, s_).q(); }

    std::int64_t e() const { return e_; }
    std::int64_t f() const { return f_; }
    std::int64_t degree() const { return e_ * f_; }
    /// Working absolute precision in this field's uniformizer (= e * prec_t).
    std::int64_t prec() const { return prec_; }
    std::int64_t prec_t() const { return prec_t_; }
    RationalVal different_valuation() const { return diff_; }

    std::uint32_t layer_degree() const { return d_; }
    const std::vector<PrecSeries>& minpoly() const { return minpoly_; }
    /// Parent uniformizer as a series in this field's uniformizer.
    const PrecSeries& parent_embedding() const { return embed_parent_; }

    Fq lift_coeff(Fq parent_c) const;
    std::optional<Fq> coeff_to_parent(Fq c) const;

    bool same_field(const TowerField& o) const { return this == &o; }
    bool is_prefix_of(const TowerField& M) const;

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement uniformizer() const;
    FieldElement from_series(PrecSeries s) const;
    FieldElement from_constant(Fq c) const;
    FieldElement from_int(std::int64_t n) const;

  private:
    TowerField() = default;
    void init_eisenstein_tail(); // different + layer cache shared by build/restore

    Kind kind_{Kind::Base};
    TowerPtr parent_;
    const FqContext* ctx_{nullptr};
    std::uint32_t p_{0}, s_{0};
    std::int64_t e_{1}, f_{1}, prec_{0}, prec_t_{0};
    RationalVal diff_{0};
    std::uint32_t d_{1};
    std::vector<PrecSeries> minpoly_;
    PrecSeries embed_parent_ = PrecSeries::exact_zero(FqContext::get(2, 1));
    // unramified residue embedding
    std::vector<Fq> lift_t_;
    std::unordered_map<std::uint32_t, Fq> to_parent_;
};

/// View an element of a sub-tower inside the larger field M.
FieldElement embed(const FieldElement& x, const TowerPtr& M);

/// Digits of x over the layer below: x = sum_j c_j pi^j with c_j in the
/// parent field, found by greedy lowest-term elimination (exponent k of the
/// residual maps to digit j = k mod d; the residual valuation strictly
/// increases). Supports Laurent x (negative digit exponents).
std::vector<FieldElement> digits_to_parent(const FieldElement& x);
FieldElement from_digits(const TowerPtr& L, const std::vector<FieldElement>& digits);

/// Layerwise trace/norm: Eisenstein layers go through the d x d
/// multiplication matrix over the layer below (trace = diagonal sum, norm =
/// determinant by Gaussian elimination with minimal-valuation pivoting),
/// unramified layers through the residue-field conjugates. Output precision
/// follows the series propagation rules; a result the precision cannot
/// certify surfaces as insufficient_precision, never as a wrong value.
FieldElement trace_to_parent(const FieldElement& x);
FieldElement norm_to_parent(const FieldElement& x);
FieldElement trace_to(const FieldElement& x, const TowerField& target);
FieldElement norm_to(const FieldElement& x, const TowerField& target);

/// Reinterpret x as an element of the sub-tower `target`; domain_error if x
/// does not lie in it to working precision.
FieldElement descend_to(const FieldElement& x, const TowerPtr& target);

/// x == y modulo the ideal { mu >= bound }. Raises insufficient_precision
/// when the difference's precision cannot certify the congruence.
bool congruent_mod_val(const FieldElement& x, const FieldElement& y, const RationalVal& bound);

} // namespace drinfeld
