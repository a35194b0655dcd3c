#pragma once

#include <iosfwd>
#include <string>

#include "ncres/nc_element.hpp"

namespace ncres {

// Text format:
//   ncelement 1
//   n <dim>
//   theta <n*n entries, row major>
//   terms <count>
//   k_1 ... k_n re im        (one line per coefficient)
// Doubles are written with 17 significant digits, so a write/read cycle is bit exact.
void write_element(std::ostream& os, const NCElement& a);
NCElement read_element(std::istream& is);

void save_element(const std::string& path, const NCElement& a);
NCElement load_element(const std::string& path);

std::string format_double(double x);
// Parses "0", "1", "0 0.5 -0.5 0" style theta specs. A single number t for n = 2 means theta_12 = t.
ThetaMatrix parse_theta(int n, const std::string& text);

}  // namespace ncres
