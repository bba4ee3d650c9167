#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "drinfeld/errors.hpp"

namespace drinfeld {

/// Exact rational valuation, normalized so that mu(pi_K) = 1. Values coming
/// from a field L|K have denominator dividing e(L|K). Kept reduced with a
/// positive denominator.
class RationalVal {
  public:
    constexpr RationalVal() = default;
    RationalVal(std::int64_t num, std::int64_t den = 1) : n_(num), d_(den) { normalize(); }

    std::int64_t num() const { return n_; }
    std::int64_t den() const { return d_; }

    RationalVal operator+(const RationalVal& o) const {
        return RationalVal(n_ * o.d_ + o.n_ * d_, d_ * o.d_);
    }
    RationalVal operator-(const RationalVal& o) const {
        return RationalVal(n_ * o.d_ - o.n_ * d_, d_ * o.d_);
    }
    RationalVal operator-() const { return RationalVal(-n_, d_); }
    RationalVal operator*(std::int64_t k) const { return RationalVal(n_ * k, d_); }
    RationalVal operator/(std::int64_t k) const {
        if (k == 0) throw domain_error("RationalVal: division by zero");
        return RationalVal(n_, d_ * k);
    }

    friend bool operator==(const RationalVal& a, const RationalVal& b) {
        return a.n_ == b.n_ && a.d_ == b.d_;
    }
    friend bool operator!=(const RationalVal& a, const RationalVal& b) { return !(a == b); }
    friend bool operator<(const RationalVal& a, const RationalVal& b) {
        return (__int128)a.n_ * b.d_ < (__int128)b.n_ * a.d_;
    }
    friend bool operator<=(const RationalVal& a, const RationalVal& b) { return !(b < a); }
    friend bool operator>(const RationalVal& a, const RationalVal& b) { return b < a; }
    friend bool operator>=(const RationalVal& a, const RationalVal& b) { return !(a < b); }

    static RationalVal max(const RationalVal& a, const RationalVal& b) { return a < b ? b : a; }
    static RationalVal min(const RationalVal& a, const RationalVal& b) { return a < b ? a : b; }

    /// Largest integer k with k <= value.
    std::int64_t floor() const {
        std::int64_t q = n_ / d_;
        if (n_ % d_ != 0 && n_ < 0) --q;
        return q;
    }
    /// Smallest integer k with k >= value.
    std::int64_t ceil() const {
        std::int64_t q = n_ / d_;
        if (n_ % d_ != 0 && n_ > 0) ++q;
        return q;
    }

    std::string str() const {
        if (d_ == 1) return std::to_string(n_);
        return std::to_string(n_) + "/" + std::to_string(d_);
    }

  private:
    void normalize() {
        if (d_ == 0) throw domain_error("RationalVal: zero denominator");
        if (d_ < 0) {
            n_ = -n_;
            d_ = -d_;
        }
        std::int64_t g = std::gcd(n_ < 0 ? -n_ : n_, d_);
        if (g > 1) {
            n_ /= g;
            d_ /= g;
        }
    }

    std::int64_t n_{0};
    std::int64_t d_{1};
};

} // namespace drinfeld
