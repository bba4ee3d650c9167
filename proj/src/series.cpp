#include "drinfeld/series.hpp"

#include <algorithm>
#include <sstream>

namespace drinfeld {

namespace {
void require_same_ctx(const PrecSeries& a, const PrecSeries& b) {
    if (!a.ctx().same_as(b.ctx()))
        throw usage_error("series operation on mismatched coefficient fields");
}
} // namespace

void PrecSeries::normalize() {
    std::size_t lead = 0;
    while (lead < c_.size() && c_[lead].is_zero()) ++lead;
    if (lead) {
        c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
        val_ += static_cast<std::int64_t>(lead);
    }
    if (!c_.empty() && val_ >= prec_) c_.clear();
    if (!c_.empty() && stored_high() > prec_) c_.resize(static_cast<std::size_t>(prec_ - val_));
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    if (c_.empty()) val_ = prec_;
}

PrecSeries PrecSeries::monomial(const FqContext& ctx, Fq c, std::int64_t exp, std::int64_t prec) {
    if (c.is_zero()) return zero(ctx, prec);
    if (exp >= prec) return zero(ctx, prec);
    return PrecSeries(ctx, exp, prec, {c});
}

PrecSeries PrecSeries::from_coeffs(const FqContext& ctx, std::int64_t val, std::vector<Fq> c,
                                   std::int64_t prec) {
    PrecSeries r(ctx, val, prec, std::move(c));
    r.normalize();
    return r;
}

Fq PrecSeries::coeff(std::int64_t e) const {
    if (e >= prec_) throw insufficient_precision("coefficient beyond series precision");
    if (c_.empty() || e < val_ || e >= stored_high()) return ctx_->zero();
    return c_[static_cast<std::size_t>(e - val_)];
}

PrecSeries PrecSeries::with_prec(std::int64_t p) const {
    if (p >= prec_) return *this;
    PrecSeries r(*ctx_, c_.empty() ? p : val_, p, c_);
    r.normalize();
    return r;
}

PrecSeries PrecSeries::shifted(std::int64_t k) const {
    return PrecSeries::from_coeffs(*ctx_, sat_add(val_, k), c_, sat_add(prec_, k));
}

PrecSeries operator+(const PrecSeries& a, const PrecSeries& b) {
    require_same_ctx(a, b);
    const FqContext& F = a.ctx();
    std::int64_t prec = std::min(a.prec(), b.prec());
    if (a.is_zero_to_prec() && b.is_zero_to_prec()) return PrecSeries::zero(F, prec);
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    for (const PrecSeries* x : {&a, &b}) {
        if (x->is_zero_to_prec()) continue;
        lo = std::min(lo, x->stored_low());
        hi = std::max(hi, x->stored_high());
    }
    hi = std::min(hi, prec);
    if (hi < lo) hi = lo;
    std::vector<Fq> c(static_cast<std::size_t>(hi - lo), F.zero());
    auto acc = [&](const PrecSeries& x) {
        for (std::int64_t e = x.stored_low(); e < std::min(x.stored_high(), hi); ++e) {
            if (e < lo) continue;
            std::size_t i = static_cast<std::size_t>(e - lo);
            c[i] = F.add(c[i], x.coeffs()[static_cast<std::size_t>(e - x.stored_low())]);
        }
    };
    acc(a);
    acc(b);
    return PrecSeries::from_coeffs(F, lo, std::move(c), prec);
}

PrecSeries PrecSeries::operator-() const {
    std::vector<Fq> c(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] = ctx_->neg(c_[i]);
    return PrecSeries(*ctx_, val_, prec_, std::move(c));
}

PrecSeries operator-(const PrecSeries& a, const PrecSeries& b) { return a + (-b); }

PrecSeries PrecSeries::scaled(Fq k) const {
    if (k.is_zero()) return zero(*ctx_, prec_);
    std::vector<Fq> c(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] = ctx_->mul(c_[i], k);
    return PrecSeries(*ctx_, val_, prec_, std::move(c));
}

PrecSeries operator*(const PrecSeries& a, const PrecSeries& b) {
    require_same_ctx(a, b);
    const FqContext& F = a.ctx();
    std::int64_t prec = std::min(sat_add(a.prec(), b.val_lower_bound()),
                                 sat_add(b.prec(), a.val_lower_bound()));
    if (a.is_zero_to_prec() || b.is_zero_to_prec()) return PrecSeries::zero(F, prec);
    std::int64_t val = a.stored_low() + b.stored_low();
    std::int64_t len = std::min(
        static_cast<std::int64_t>(a.coeffs().size() + b.coeffs().size()) - 1,
        prec >= kExactPrec ? kExactPrec : prec - val);
    if (len <= 0) return PrecSeries::zero(F, prec);
    std::vector<Fq> c(static_cast<std::size_t>(len), F.zero());
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (ca[i].is_zero() || i >= static_cast<std::size_t>(len)) continue;
        for (std::size_t j = 0; j < cb.size(); ++j) {
            if (i + j >= static_cast<std::size_t>(len)) break;
            if (cb[j].is_zero()) continue;
            c[i + j] = F.add(c[i + j], F.mul(ca[i], cb[j]));
        }
    }
    return PrecSeries::from_coeffs(F, val, std::move(c), prec);
}

PrecSeries series_inv(const PrecSeries& x, std::optional<std::int64_t> target) {
    const FqContext& F = x.ctx();
    if (x.is_zero_to_prec()) {
        if (x.is_exact()) throw domain_error("series_inv: division by zero");
        throw insufficient_precision("series_inv: divisor indistinguishable from zero");
    }
    std::int64_t v = x.stored_low();
    if (x.coeffs().size() == 1 && x.is_exact()) {
        // exact monomial: exact inverse
        return PrecSeries::monomial(F, F.inv(x.coeffs()[0]), -v);
    }
    std::int64_t prec;
    if (x.is_exact()) {
        if (!target) throw usage_error("series_inv: exact non-monomial input needs a target precision");
        prec = *target;
    } else {
        prec = x.prec() - 2 * v;
        if (target) prec = std::min(prec, *target);
    }
    std::int64_t rel = prec + v; // number of result coefficients from exponent -v on
    if (rel <= 0) return PrecSeries::zero(F, prec);
    const auto& a = x.coeffs();
    Fq a0i = F.inv(a[0]);
    std::vector<Fq> b(static_cast<std::size_t>(rel), F.zero());
    b[0] = a0i;
    for (std::size_t k = 1; k < b.size(); ++k) {
        Fq s = F.zero();
        for (std::size_t j = 1; j <= k && j < a.size(); ++j)
            s = F.add(s, F.mul(a[j], b[k - j]));
        b[k] = F.neg(F.mul(a0i, s));
    }
    return PrecSeries::from_coeffs(F, -v, std::move(b), prec);
}

PrecSeries series_div(const PrecSeries& x, const PrecSeries& y, std::optional<std::int64_t> target) {
    return x * series_inv(y, target);
}

PrecSeries series_frobenius_power(const PrecSeries& x, std::uint32_t r) {
    if (r == 0) return x;
    const FqContext& F = x.ctx();
    std::int64_t pr = 1;
    for (std::uint32_t i = 0; i < r; ++i) pr = sat_mul(pr, F.p());
    std::int64_t prec = sat_mul(x.prec(), pr);
    if (x.is_zero_to_prec()) return PrecSeries::zero(F, prec);
    std::int64_t len = sat_mul(static_cast<std::int64_t>(x.coeffs().size() - 1), pr) + 1;
    std::vector<Fq> c(static_cast<std::size_t>(len), F.zero());
    for (std::size_t i = 0; i < x.coeffs().size(); ++i)
        if (!x.coeffs()[i].is_zero())
            c[i * static_cast<std::size_t>(pr)] = F.frobenius_iter(x.coeffs()[i], r);
    return PrecSeries::from_coeffs(F, sat_mul(x.stored_low(), pr), std::move(c), prec);
}

PrecSeries series_pow(const PrecSeries& x, std::int64_t k, std::optional<std::int64_t> target) {
    const FqContext& F = x.ctx();
    if (k == 0) return PrecSeries::one(F);
    PrecSeries base = k < 0 ? series_inv(x, target) : x;
    std::uint64_t e = static_cast<std::uint64_t>(k < 0 ? -k : k);
    PrecSeries r = base;
    --e;
    PrecSeries sq = base;
    while (e) {
        if (e & 1) r = r * sq;
        e >>= 1;
        if (e) sq = sq * sq;
    }
    return r;
}

PrecSeries series_compose(const PrecSeries& f, const PrecSeries& g,
                          std::optional<std::int64_t> target) {
    require_same_ctx(f, g);
    const FqContext& F = f.ctx();
    std::int64_t w = g.val_lower_bound();
    if (!f.is_exact() && w < 1)
        throw domain_error("series_compose: inner series must have valuation >= 1 for non-polynomial outer series");

    // precision cap from the two unknown tails
    std::int64_t cap = kExactPrec;
    if (!f.is_exact()) cap = std::min(cap, sat_mul(w, f.prec()));
    if (!g.is_exact()) {
        std::int64_t vf = f.val_lower_bound();
        std::int64_t ieff = (vf >= 1 || vf < 0) ? vf : 1;
        cap = std::min(cap, sat_add(g.prec(), sat_mul(ieff - 1, w)));
    }
    if (target) cap = std::min(cap, *target);

    if (f.is_zero_to_prec()) return PrecSeries::zero(F, cap);

    // Truncating g at the cap is information-preserving for the nonnegative
    // powers whenever val(g) >= 1, and keeps windows small.
    PrecSeries gc = (w >= 1 && cap < g.prec()) ? g.with_prec(cap) : g;
    PrecSeries pos = PrecSeries::zero(F, cap);
    std::int64_t lo = f.stored_low(), hi = f.stored_high();
    // nonnegative-exponent part by Horner, top down
    if (hi > 0) {
        std::int64_t top = hi - 1;
        PrecSeries acc = PrecSeries::monomial(F, f.coeff(top), 0);
        for (std::int64_t i = top - 1; i >= std::max<std::int64_t>(lo, 0); --i) {
            acc = acc * gc;
            Fq fi = f.coeff(i);
            if (!fi.is_zero()) acc = acc + PrecSeries::monomial(F, fi, 0);
        }
        if (lo > 0) acc = acc * series_pow(gc, lo);
        pos = acc.with_prec(cap);
    }
    // negative-exponent part; uses the untruncated g so the inverse keeps the
    // full precision the cap formula accounts for
    if (lo < 0) {
        std::optional<std::int64_t> t;
        if (g.is_exact()) t = (cap == kExactPrec) ? std::optional<std::int64_t>{} : std::optional<std::int64_t>(cap - sat_mul(lo - 1, w));
        PrecSeries gi = series_inv(g, t);
        PrecSeries pw = gi;
        PrecSeries neg = PrecSeries::zero(F, cap);
        for (std::int64_t i = -1; i >= lo; --i) {
            Fq fi = f.coeff(i);
            if (!fi.is_zero()) neg = neg + pw.scaled(fi);
            if (i > lo) pw = pw * gi;
        }
        pos = pos + neg.with_prec(cap);
    }
    return pos.with_prec(cap);
}

PrecSeries series_derivative(const PrecSeries& f) {
    const FqContext& F = f.ctx();
    std::int64_t prec = f.prec() >= kExactPrec ? kExactPrec : f.prec() - 1;
    if (f.is_zero_to_prec()) return PrecSeries::zero(F, prec);
    std::vector<Fq> c(f.coeffs().size(), F.zero());
    std::int64_t p = F.p();
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::int64_t e = f.stored_low() + static_cast<std::int64_t>(i);
        std::int64_t em = ((e % p) + p) % p;
        c[i] = F.mul(f.coeffs()[i], F.from_int(em));
    }
    return PrecSeries::from_coeffs(F, f.stored_low() - 1, std::move(c), prec);
}

PrecSeries series_reversion(const PrecSeries& s, std::int64_t target) {
    const FqContext& F = s.ctx();
    if (s.is_zero_to_prec() || s.stored_low() != 1)
        throw domain_error("series_reversion: input must have valuation exactly 1");
    if (target > s.prec())
        throw insufficient_precision("series_reversion: target beyond input precision");
    PrecSeries z = PrecSeries::monomial(F, F.one(), 1, target);
    PrecSeries sp = series_derivative(s);
    PrecSeries w = z.scaled(F.inv(s.coeffs()[0]));
    for (std::int64_t iter = 0; iter < target + 4; ++iter) {
        PrecSeries err = series_compose(s, w, target) - z;
        if (err.is_zero_to_prec()) return w;
        PrecSeries corr = series_div(err, series_compose(sp, w, target));
        w = (w - corr).with_prec(target);
        if (corr.val_lower_bound() >= target) return w;
    }
    throw internal_inconsistency("series_reversion: Newton iteration failed to converge");
}

bool series_eq_shared_prec(const PrecSeries& a, const PrecSeries& b) {
    std::int64_t p = std::min(a.prec(), b.prec());
    PrecSeries d = (a - b).with_prec(p);
    return d.is_zero_to_prec();
}

bool series_is_zero_to(const PrecSeries& x, std::int64_t p) {
    if (x.prec() < p) throw insufficient_precision("series_is_zero_to: precision too low to certify");
    return x.val_lower_bound() >= p;
}

std::string PrecSeries::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        std::int64_t e = val_ + static_cast<std::int64_t>(i);
        if (!first) os << " + ";
        first = false;
        if (e == 0 || c_[i].value() != 1) os << c_[i].value();
        if (e != 0) {
            if (c_[i].value() != 1) os << "*";
            os << var;
            if (e != 1) os << "^" << e;
        }
    }
    if (first) os << "0";
    if (!is_exact()) os << " + O(" << var << "^" << prec_ << ")";
    return os.str();
}

} // namespace drinfeld
