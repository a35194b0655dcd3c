#pragma once

#include <iosfwd>
#include <string>

#include "ncres/classical_symbol.hpp"

namespace ncres {

// Differential operator description, one directive per line, '#' starts a comment:
//   dimension 2
//   theta 0.5                 (same syntax as parse_theta)
//   term 2 0 scalar 1 0       alpha, then the coefficient
//   term 1 0 left a.nce       L_a, element file relative to the description
//   term 0 1 right b.nce
//   term 0 0 pair a.nce b.nce L_a R_b
// Repeated alphas add up.
ClassicalSymbol read_differential(std::istream& is, const std::string& base_dir = ".");
ClassicalSymbol load_differential(const std::string& path);

}  // namespace ncres
