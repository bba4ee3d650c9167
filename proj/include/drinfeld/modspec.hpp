#pragma once

#include <string>

#include "drinfeld/module.hpp"

namespace drinfeld {

/// Parsed module specification from the CLI grammar:
///   carlitz(p=3,s=1)
///   custom(rho_t="t + (1+t)*tau", p=3, s=1)
/// p and s may also come from flags; values given in both places must agree.
/// In rho_t, coefficients are polynomials in t over F_q written to the left
/// of tau; integers reduce mod p; tau^k for powers.
struct ModuleSpec {
    std::string kind;                                // "carlitz" | "custom"
    std::uint32_t p{0}, s{0};                        // 0 = take from flags
    std::string rho_t_text;                          // custom only
    std::vector<std::vector<std::int64_t>> rho_t_coeffs; // tau-coefficient t-polynomials

    /// Canonical spec string used for cache keys and reports.
    std::string canonical(std::uint32_t p_eff, std::uint32_t s_eff) const;
};

/// Parse the spec grammar; usage_error with a message on malformed input.
ModuleSpec parse_module_spec(const std::string& text);

/// Build the module over F_q((t)) at the given precision (m0 = 1 modules; the
/// custom grammar covers the supported polynomial rho_t case).
ModulePtr instantiate_module(const ModuleSpec& spec, std::uint32_t p, std::uint32_t s,
                             std::uint32_t m0, std::int64_t prec_t);

} // namespace drinfeld
