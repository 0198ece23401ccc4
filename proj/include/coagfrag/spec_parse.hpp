#pragma once

// Text forms of models and partition laws, as accepted on the command line.
//
// Models:  gamma:nu=4 | stable:alpha=0.5 | linnik:nu=4,alpha=0.5
//          compose(<model>;alpha=0.5) | rescale(<model>;c=2)
// Laws:    pd:alpha=0.5,theta=1 | pk:levy=<model> | pk_tilted:levy=<model>,theta=1
//          ps:levy=<model>,alpha=0.5,theta=1 | linnik:nu=4,alpha=0.5,theta=1
//
// Inside levy=..., a plain model takes the first occurrences of its own keys
// and the remaining keys belong to the law, so "ps:levy=stable:alpha=0.5,alpha=0.6,theta=1"
// is PS(stable(0.5), 0.6, 1).

#include <string_view>

#include "coagfrag/eppf.hpp"
#include "coagfrag/levy.hpp"

namespace coagfrag {

/// Throws DomainError on malformed text or out-of-range parameters.
LevyModel parse_model(std::string_view text);

EppfSpec parse_eppf(std::string_view text);

/// Strict full-string number parse; `what` names the field in the error.
double parse_number(std::string_view text, std::string_view what);

}  // namespace coagfrag
