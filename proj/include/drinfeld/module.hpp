#pragma once

#include <map>
#include <string>

#include "drinfeld/twisted.hpp"

namespace drinfeld {

class DrinfeldModule;
using ModulePtr = std::shared_ptr<const DrinfeldModule>;

/// Residue in O_K/p_K^k, stored as the exact polynomial in t of degree < k.
class ResidueClass {
  public:
    ResidueClass(const FqContext& ctx, std::int64_t k, PrecSeries value);
    /// Truncate a K-series mod t^k; insufficient_precision if prec(s) < k.
    static ResidueClass from_series(std::int64_t k, const PrecSeries& s);

    std::int64_t modulus_exp() const { return k_; }
    const PrecSeries& value() const { return v_; }
    bool is_zero() const { return v_.is_zero_to_prec(); }

    ResidueClass lowered(std::int64_t k2) const; ///< reduce mod t^{k2}, k2 <= k
    friend ResidueClass operator+(const ResidueClass& a, const ResidueClass& b);
    friend ResidueClass operator-(const ResidueClass& a, const ResidueClass& b);
    friend ResidueClass operator*(const ResidueClass& a, const ResidueClass& b);
    friend bool operator==(const ResidueClass& a, const ResidueClass& b);
    friend bool operator!=(const ResidueClass& a, const ResidueClass& b) { return !(a == b); }

    std::string str() const { return v_.str(); }

  private:
    const FqContext* ctx_;
    std::int64_t k_;
    PrecSeries v_;
};

/// Element of W_rho^n presented by its residue a in O_K/p_K^{n m0} relative to
/// the fixed generator v_n: the point is rho_a(v_n).
class TorsionClass {
  public:
    TorsionClass(ModulePtr mod, int level, ResidueClass residue);

    int level() const { return n_; }
    const ResidueClass& residue() const { return r_; }
    const ModulePtr& module() const { return mod_; }
    bool is_zero() const { return r_.is_zero(); }

    /// Apply rho_{eta^{n-n2}}: W^n -> W^{n2} (residue truncation), n2 <= n.
    TorsionClass lowered(int n2) const;
    TorsionClass scaled(const ResidueClass& a) const;
    friend TorsionClass operator+(const TorsionClass& a, const TorsionClass& b);
    friend TorsionClass operator-(const TorsionClass& a, const TorsionClass& b);
    friend bool operator==(const TorsionClass& a, const TorsionClass& b);
    friend bool operator!=(const TorsionClass& a, const TorsionClass& b) { return !(a == b); }

    /// The actual point rho_a(v_n) in E^n.
    FieldElement point() const;

    std::string str() const { return r_.str(); }

  private:
    ModulePtr mod_;
    int n_;
    ResidueClass r_;
};

/// A formal Drinfeld module of stable reduction height one over an unramified
/// base H|K: the structure map rho_t (an exact skew polynomial), m0, eta, and
/// lazily built caches for the logarithm, the torsion tower E^1 c E^2 c ...
/// with its generator chain rho_eta(v_k) = v_{k-1}, kernel products and the
/// series r_n. Tower construction is single-threaded; everything is immutable
/// once built.
class DrinfeldModule : public std::enable_shared_from_this<DrinfeldModule> {
  public:
    static ModulePtr carlitz(std::uint32_t p, std::uint32_t s, std::int64_t prec_t);
    static ModulePtr make(TowerPtr H, TwistedSeries rho_t, std::uint32_t m0, PrecSeries eta,
                          std::string spec_string);

    const TowerPtr& H() const { return H_; }
    const TowerPtr& base() const { return K_; } ///< K itself (root of the tower)
    const TwistedSeries& rho_t() const { return *rho_t_; }
    std::uint32_t m0() const { return m0_; }
    const PrecSeries& eta() const { return eta_; }
    std::uint32_t q() const { return H_->base_q(); }
    std::int64_t prec_t() const { return H_->prec_t(); }
    const std::string& spec_string() const { return spec_; }
    /// rho_eta == tau^{m0} mod p_H, exactly (checked at construction).
    bool normalized() const { return normalized_; }

    /// rho_a for an exact integral polynomial a, truncated to tau-degree D.
    TwistedSeries rho_of(const PrecSeries& a, std::int64_t D = kExactDeg) const;
    TwistedSeries rho_eta_pow(int n) const;

    /// Logarithm coefficients c_0..c_D with lambda rho_t = t lambda, c_0 = 1.
    TwistedSeries logarithm(std::int64_t D) const;

    // --- torsion towers ---
    void build_tower(int m) const;
    int built_levels() const { return static_cast<int>(levels_.size()) - 1; }
    /// E^k (level(0) == H).
    const TowerPtr& level(int k) const;
    /// v_k as an element of E^k.
    const FieldElement& generator(int k) const;
    FieldElement generator_in(int k, int m) const;
    std::vector<FieldElement> torsion_points(int n) const;
    /// Representative a_idx of O_K/p^{nm0} in the fixed enumeration order.
    PrecSeries torsion_residue(int n, std::uint64_t idx) const;

    /// prod_{w in W^n} (X - w), expanded as an additive polynomial with
    /// coefficients descended to O_H.
    TwistedSeries kernel_product(int n) const;
    /// r_n with r_n rho_{eta^n} = kernel product; checks r invertible.
    TwistedSeries compute_r(int n, std::int64_t D) const;

    /// The twisted module rho'_a = r rho_a r^{-1}. Shares this module's tower
    /// fields; generators map by v -> r(v).
    ModulePtr twist(const TwistedSeries& r, std::int64_t D) const;

    /// Install cached tower levels (cache reload). Verifies generator chain.
    void adopt_tower(const std::vector<TowerPtr>& eisenstein_levels) const;

  private:
    DrinfeldModule() = default;
    void build_level(int k) const;

    TowerPtr H_, K_;
    std::optional<TwistedSeries> rho_t_;
    std::uint32_t m0_{1};
    PrecSeries eta_ = PrecSeries::exact_zero(FqContext::get(2, 1));
    std::string spec_;
    bool normalized_{false};
    bool twisted_{false};

    mutable std::vector<TowerPtr> levels_;       // levels_[k] = E^k, levels_[0] = H
    mutable std::vector<FieldElement> gens_;     // gens_[k] = v_k in E^k
    // m0 > 1 only: the fine t-power tower E^k = fine_levels_[k*m0]
    mutable std::vector<TowerPtr> fine_levels_;
    mutable std::vector<FieldElement> fine_gens_;
    mutable std::map<std::pair<int, int>, FieldElement> gen_embed_;
    mutable std::vector<TwistedSeries> rho_tpow_; // rho_{t^i}
    mutable std::vector<FieldElement> log_coeffs_;
    mutable std::map<int, TwistedSeries> kernel_products_;
};

/// Trace/norm of x in E^n over K through the Galois action on torsion:
/// conjugates of x = f(v_n) are f(rho_u(v_n)) for units u of O_K/p^{nm0}.
/// Requires H = K. Agrees with the multiplication-matrix route (tested).
FieldElement galois_trace_to_K(const DrinfeldModule& mod, const FieldElement& x, int n);
FieldElement galois_norm_to_K(const DrinfeldModule& mod, const FieldElement& x, int n);

} // namespace drinfeld
