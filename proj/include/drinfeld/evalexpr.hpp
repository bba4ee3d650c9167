#pragma once

#include "drinfeld/reciprocity.hpp"

namespace drinfeld {

/// Result of evaluating a CLI expression: either a field element (with its
/// valuation and precision) or a torsion/residue class.
struct EvalResult {
    enum class Kind { Element, Torsion, Residue } kind{Kind::Element};
    std::optional<FieldElement> element;
    std::optional<TorsionClass> torsion;
    std::optional<ResidueClass> residue;
    std::string describe() const;
};

/// Evaluate an expression in E^m for the given module. Grammar: +, -, *, /,
/// ^int, parentheses, integers, t, v1..vm, and the functions trace(x),
/// norm(x), lambda(x), rho(a, x), r(x), dlog(x), chi(u), pair(alpha=..,
/// beta=.., n=..). trace/norm map to K; dlog/chi/pair use levels (m, n).
EvalResult eval_expression(const std::string& text, const ModulePtr& mod, int m, int n);

} // namespace drinfeld
