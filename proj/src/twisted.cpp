#include "drinfeld/twisted.hpp"

#include <sstream>

namespace drinfeld {

namespace {
void require_same(const TwistedSeries& f, const TwistedSeries& g) {
    if (!f.field()->same_field(*g.field()))
        throw usage_error("twisted series operation on mismatched coefficient fields");
}
} // namespace

TwistedSeries::TwistedSeries(TowerPtr F, std::vector<FieldElement> coeffs, std::int64_t dmax)
    : F_(std::move(F)), a_(std::move(coeffs)), dmax_(dmax) {
    for (const auto& c : a_)
        if (!c.field()->same_field(*F_))
            throw usage_error("twisted series coefficient in the wrong field");
    if (dmax_ < kExactDeg && static_cast<std::int64_t>(a_.size()) - 1 > dmax_)
        a_.resize(static_cast<std::size_t>(dmax_ + 1), F_->zero());
    while (!a_.empty() && a_.back().repr().is_exact() && a_.back().is_zero_to_prec()) a_.pop_back();
}

TwistedSeries TwistedSeries::one(const TowerPtr& F) { return TwistedSeries(F, {F->one()}); }

TwistedSeries TwistedSeries::tau_power(const TowerPtr& F, std::int64_t i) {
    std::vector<FieldElement> c(static_cast<std::size_t>(i + 1), F->from_series(PrecSeries::exact_zero(F->residue_ctx())));
    c.back() = F->one();
    return TwistedSeries(F, std::move(c));
}

TwistedSeries TwistedSeries::constant(const FieldElement& c) {
    return TwistedSeries(c.field(), {c});
}

FieldElement TwistedSeries::coeff(std::int64_t i) const {
    if (i > dmax_) throw insufficient_precision("twisted coefficient beyond truncation bound");
    if (i < 0 || i >= static_cast<std::int64_t>(a_.size()))
        return F_->from_series(PrecSeries::exact_zero(F_->residue_ctx()));
    return a_[static_cast<std::size_t>(i)];
}

TwistedSeries TwistedSeries::truncated(std::int64_t d) const {
    if (d >= dmax_) return *this;
    std::vector<FieldElement> c = a_;
    if (static_cast<std::int64_t>(c.size()) - 1 > d) c.resize(static_cast<std::size_t>(d + 1), F_->zero());
    return TwistedSeries(F_, std::move(c), d);
}

std::int64_t TwistedSeries::tau_valuation() const {
    for (std::size_t i = 0; i < a_.size(); ++i)
        if (!(a_[i].repr().is_exact() && a_[i].is_zero_to_prec())) return static_cast<std::int64_t>(i);
    return is_exact() ? kExactDeg : dmax_ + 1;
}

bool TwistedSeries::is_integral() const {
    for (const auto& c : a_)
        if (c.val_lower_bound() < RationalVal(0)) return false;
    return true;
}

bool TwistedSeries::is_log_type() const {
    for (std::size_t i = 0; i < a_.size(); ++i)
        if (a_[i].val_lower_bound() < RationalVal(-static_cast<std::int64_t>(i))) return false;
    return true;
}

std::string TwistedSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (a_[i].is_zero_to_prec()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << a_[i].str() << ")";
        if (i > 0) os << "*tau";
        if (i > 1) os << "^" << i;
    }
    if (first) os << "0";
    if (!is_exact()) os << " + O(tau^" << dmax_ + 1 << ")";
    return os.str();
}

TwistedSeries tw_add(const TwistedSeries& f, const TwistedSeries& g) {
    require_same(f, g);
    const TowerPtr& F = f.field();
    std::int64_t dmax = std::min(f.dmax(), g.dmax());
    std::size_t n = std::max(f.coeffs().size(), g.coeffs().size());
    if (dmax < kExactDeg) n = std::min(n, static_cast<std::size_t>(dmax + 1));
    std::vector<FieldElement> c;
    c.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FieldElement ci = F->from_series(PrecSeries::exact_zero(F->residue_ctx()));
        if (i < f.coeffs().size()) ci = ci + f.coeffs()[i];
        if (i < g.coeffs().size()) ci = ci + g.coeffs()[i];
        c.push_back(ci);
    }
    return TwistedSeries(F, std::move(c), dmax);
}

TwistedSeries tw_sub(const TwistedSeries& f, const TwistedSeries& g) {
    return tw_add(f, tw_scale(f.field()->from_int(-1), g));
}

TwistedSeries tw_scale(const FieldElement& k, const TwistedSeries& f) {
    std::vector<FieldElement> c;
    c.reserve(f.coeffs().size());
    for (const auto& a : f.coeffs()) c.push_back(k * a);
    return TwistedSeries(f.field(), std::move(c), f.dmax());
}

TwistedSeries tw_mul(const TwistedSeries& f, const TwistedSeries& g) {
    require_same(f, g);
    const TowerPtr& F = f.field();
    std::int64_t dmax = kExactDeg;
    if (!f.is_exact()) dmax = std::min(dmax, sat_add(f.dmax(), g.tau_valuation()));
    if (!g.is_exact()) dmax = std::min(dmax, sat_add(g.dmax(), f.tau_valuation()));
    std::int64_t dlen = static_cast<std::int64_t>(f.coeffs().size() + g.coeffs().size()) - 1;
    if (dmax < kExactDeg) dlen = std::min(dlen, dmax + 1);
    if (dlen <= 0) return TwistedSeries(F, {}, dmax);

    FieldElement zero = F->from_series(PrecSeries::exact_zero(F->residue_ctx()));
    std::vector<FieldElement> c(static_cast<std::size_t>(dlen), zero);
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
        if (static_cast<std::int64_t>(i) >= dlen) break;
        const FieldElement& ai = f.coeffs()[i];
        if (ai.repr().is_exact() && ai.is_zero_to_prec()) continue;
        for (std::size_t j = 0; j < g.coeffs().size(); ++j) {
            if (static_cast<std::int64_t>(i + j) >= dlen) break;
            const FieldElement& bj = g.coeffs()[j];
            if (bj.repr().is_exact() && bj.is_zero_to_prec()) continue;
            c[i + j] = c[i + j] + ai * bj.frobenius_q(static_cast<std::uint32_t>(i));
        }
    }
    return TwistedSeries(F, std::move(c), dmax);
}

FieldElement tw_evaluate(const TwistedSeries& f, const FieldElement& x) {
    const TowerPtr& Lx = x.field();
    if (!f.field()->is_prefix_of(*Lx))
        throw usage_error("tw_evaluate: coefficient field is not a sub-tower of the argument field");
    const std::uint32_t q = Lx->base_q();

    RationalVal mu_tail_coeff(0);
    if (!f.is_exact()) {
        if (f.is_integral()) {
            if (!(x.val_lower_bound() > RationalVal(0)))
                throw domain_error("tw_evaluate: integral series needs mu(x) > 0");
            mu_tail_coeff = RationalVal(0);
        } else if (f.is_log_type()) {
            if (!(x.val_lower_bound() > RationalVal(1, q - 1)))
                throw domain_error("tw_evaluate: logarithm-type series needs mu(x) > 1/(q-1)");
            mu_tail_coeff = RationalVal(-1);
        } else {
            throw domain_error("tw_evaluate: series is neither integral nor logarithm-type");
        }
    }

    FieldElement acc = Lx->zero();
    FieldElement xp = x;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
        if (i > 0) xp = xp.frobenius_q();
        const FieldElement& ai = f.coeffs()[i];
        if (ai.repr().is_exact() && ai.is_zero_to_prec()) continue;
        acc = acc + embed(ai, Lx) * xp;
    }

    if (!f.is_exact()) {
        // Dropped tail: mu(a_i x^{q^i}) >= mu_tail_coeff*(D+1) + q^{D+1} mu(x).
        std::int64_t D1 = f.dmax() + 1;
        RationalVal mux = x.val_lower_bound();
        __int128 qp = 1;
        bool huge = false;
        for (std::int64_t i = 0; i < D1; ++i) {
            qp *= q;
            if (qp > (static_cast<__int128>(1) << 56)) {
                huge = true;
                break;
            }
        }
        if (!huge) {
            RationalVal tail = mu_tail_coeff * D1 + mux * static_cast<std::int64_t>(qp);
            std::int64_t cap = (tail * Lx->e()).ceil();
            if (cap < acc.repr().prec())
                acc = Lx->from_series(acc.repr().with_prec(cap));
        }
    }
    return acc;
}

TwistedSeries tw_invert(const TwistedSeries& f, std::int64_t D) {
    const TowerPtr& F = f.field();
    auto v0 = f.coeffs().empty() ? std::optional<RationalVal>{} : f.coeffs()[0].valuation();
    if (!v0 || *v0 != RationalVal(0))
        throw domain_error("tw_invert: constant coefficient is not a unit");
    std::int64_t dmax = std::min(D, f.is_exact() ? kExactDeg : f.dmax());
    if (dmax == kExactDeg) dmax = D;
    FieldElement a0i = f.coeffs()[0].inverse();
    std::vector<FieldElement> g = {a0i};
    for (std::int64_t k = 1; k <= dmax; ++k) {
        FieldElement s = F->zero();
        for (std::int64_t i = 1; i <= k && i < static_cast<std::int64_t>(f.coeffs().size()); ++i) {
            const FieldElement& ai = f.coeffs()[static_cast<std::size_t>(i)];
            if (ai.repr().is_exact() && ai.is_zero_to_prec()) continue;
            s = s + ai * g[static_cast<std::size_t>(k - i)].frobenius_q(static_cast<std::uint32_t>(i));
        }
        g.push_back(-(a0i * s));
    }
    return TwistedSeries(F, std::move(g), dmax);
}

TwistedSeries tw_left_divide(const TwistedSeries& P, const TwistedSeries& g, std::int64_t D) {
    require_same(P, g);
    const TowerPtr& F = P.field();
    if (g.coeffs().empty() || g.coeffs()[0].is_zero_to_prec())
        throw domain_error("tw_left_divide: divisor has no usable constant coefficient");
    const FieldElement& g0 = g.coeffs()[0];
    std::vector<FieldElement> r;
    for (std::int64_t k = 0; k <= D; ++k) {
        FieldElement num = P.coeff(k);
        for (std::int64_t j = 1; j <= k && j < static_cast<std::int64_t>(g.coeffs().size()); ++j) {
            const FieldElement& gj = g.coeffs()[static_cast<std::size_t>(j)];
            if (gj.repr().is_exact() && gj.is_zero_to_prec()) continue;
            num = num - r[static_cast<std::size_t>(k - j)] * gj.frobenius_q(static_cast<std::uint32_t>(k - j));
        }
        FieldElement den = g0.frobenius_q(static_cast<std::uint32_t>(k));
        auto dv = den.valuation();
        if (!dv) throw insufficient_precision("tw_left_divide: divisor constant term lost to precision");
        if (num.is_zero_to_prec()) {
            if (num.val_lower_bound() < *dv)
                throw insufficient_precision(
                    "tw_left_divide: cannot certify divisibility at tau^" + std::to_string(k) +
                    " (needed valuation " + dv->str() + ")");
        } else if (*num.valuation() < *dv) {
            throw domain_error("tw_left_divide: not in the left ideal to precision (tau^" +
                               std::to_string(k) + ")");
        }
        FieldElement rk = num / den;
        if (rk.repr().prec() < 1 && !rk.repr().is_exact())
            throw insufficient_precision("tw_left_divide: quotient coefficient at tau^" +
                                         std::to_string(k) + " has no certified digits");
        r.push_back(rk);
    }
    return TwistedSeries(F, std::move(r), D);
}

bool tw_zero_to_prec(const TwistedSeries& f) {
    for (const auto& c : f.coeffs())
        if (!c.is_zero_to_prec()) return false;
    return true;
}

std::vector<Fq> tw_reduce_mod_p(const TwistedSeries& f) {
    if (!f.is_integral()) throw domain_error("tw_reduce_mod_p: series is not integral");
    std::vector<Fq> out;
    out.reserve(f.coeffs().size());
    for (const auto& c : f.coeffs()) out.push_back(c.residue());
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
}

} // namespace drinfeld
