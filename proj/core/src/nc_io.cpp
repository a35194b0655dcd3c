#include "ncres/nc_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ncres/error.hpp"

namespace ncres {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

double parse_double(const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + tok + "'");
  }
  if (used != tok.size()) throw InvalidInput("not a number: '" + tok + "'");
  return v;
}

std::string expect_key(std::istream& is, const std::string& key) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw InvalidInput("element file: expected '" + key + "', found '" + k + "'");
    std::string rest;
    std::getline(ls, rest);
    return rest;
  }
  throw InvalidInput("element file: missing '" + key + "'");
}

}  // namespace

ThetaMatrix parse_theta(int n, const std::string& text) {
  std::istringstream is(text);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) v.push_back(parse_double(tok));
  if (v.empty()) return ThetaMatrix::zero(n);
  if (v.size() == 1 && n == 2) return ThetaMatrix::two_dim(v[0]);
  if (v.size() == 1 && v[0] == 0.0) return ThetaMatrix::zero(n);
  if (static_cast<int>(v.size()) != n * n)
    throw InvalidInput("theta needs " + std::to_string(n * n) + " entries, got " + std::to_string(v.size()));
  return ThetaMatrix(n, v.data());
}

void write_element(std::ostream& os, const NCElement& a) {
  const int n = a.dim();
  os << "ncelement 1\n";
  os << "n " << n << "\n";
  os << "theta";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) os << ' ' << format_double(a.theta()(i, j));
  os << "\nterms " << a.size() << "\n";
  for (const auto& [k, c] : a.terms()) {
    for (int i = 0; i < n; ++i) os << k[i] << ' ';
    os << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
  }
}

NCElement read_element(std::istream& is) {
  std::string ver = expect_key(is, "ncelement");
  if (std::stoi(ver) != 1) throw InvalidInput("element file: unsupported version " + ver);
  int n = std::stoi(expect_key(is, "n"));
  ThetaMatrix th = parse_theta(n, expect_key(is, "theta"));
  long count = std::stol(expect_key(is, "terms"));
  std::vector<NCElement::Term> terms;
  std::string line;
  while (static_cast<long>(terms.size()) < count && std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Index k{};
    std::string tok;
    for (int i = 0; i < n; ++i) {
      if (!(ls >> tok)) throw InvalidInput("element file: short coefficient line '" + line + "'");
      k[i] = std::stoi(tok);
    }
    std::string re, im;
    if (!(ls >> re >> im)) throw InvalidInput("element file: short coefficient line '" + line + "'");
    terms.emplace_back(k, cplx(parse_double(re), parse_double(im)));
  }
  if (static_cast<long>(terms.size()) != count) throw InvalidInput("element file: fewer coefficients than declared");
  return NCElement(th, std::move(terms));
}

void save_element(const std::string& path, const NCElement& a) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path);
  write_element(os, a);
}

NCElement load_element(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read " + path);
  return read_element(is);
}

}  // namespace ncres
