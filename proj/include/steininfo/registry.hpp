#pragma once

#include <vector>

#include "steininfo/piecewise.hpp"

namespace steininfo {

/* Registered 1-D laws, all centered with unit variance:
     gaussian              N(0,1)
     uniform               U[-sqrt(3), sqrt(3)]
     exponential           Exp(1) shifted to mean zero
     laplace               Laplace(1/sqrt(2))
     mixture               (1/2) N(-0.8, 0.36) + (1/2) N(0.8, 0.36)
   plus *_smoothed variants: sqrt(0.9) X + sqrt(0.1) Z, which keep unit
   variance while giving full-line densities with regular scores. */
const std::vector<LawPtr>& registered_models();

// Throws DomainError listing the registry when the name is unknown.
LawPtr model_by_name(const std::string& name);

std::shared_ptr<const PiecewiseLaw> as_piecewise(const LawPtr& law);

inline constexpr double kSmoothedBaseT = 0.9;  // *_smoothed mixing weight

}  // namespace steininfo
