#include "ncres/symbol_io.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "ncres/error.hpp"
#include "ncres/nc_io.hpp"

namespace ncres {

namespace {

NCElement element_at(const std::string& base, const std::string& rel, const ThetaMatrix& th) {
  std::filesystem::path p(rel);
  if (p.is_relative()) p = std::filesystem::path(base) / p;
  NCElement a = load_element(p.string());
  if (!(a.theta() == th)) throw InvalidInput("element " + p.string() + " has a different theta");
  return a;
}

}  // namespace

ClassicalSymbol read_differential(std::istream& is, const std::string& base_dir) {
  int n = 0;
  ThetaMatrix th;
  bool have_theta = false;
  std::vector<DifferentialTerm> terms;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw InvalidInput("operator file line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "dimension") {
      if (!(ls >> n) || n < 1 || n > kMaxDim) fail("bad dimension");
    } else if (key == "theta") {
      if (n == 0) fail("theta before dimension");
      std::string rest;
      std::getline(ls, rest);
      th = parse_theta(n, rest);
      have_theta = true;
    } else if (key == "term") {
      if (!have_theta) fail("term before theta");
      DifferentialTerm t;
      for (int i = 0; i < n; ++i)
        if (!(ls >> t.alpha[i]) || t.alpha[i] < 0) fail("bad multi-index");
      std::string kind;
      ls >> kind;
      if (kind == "scalar") {
        double re = 0, im = 0;
        if (!(ls >> re)) fail("scalar needs a value");
        ls >> im;
        t.coefficient = MultiplierCoefficient::scalar(th, {re, im});
      } else if (kind == "left" || kind == "right") {
        std::string f;
        if (!(ls >> f)) fail(kind + " needs a file");
        NCElement a = element_at(base_dir, f, th);
        t.coefficient = kind == "left" ? MultiplierCoefficient::left(a) : MultiplierCoefficient::right(a);
      } else if (kind == "pair") {
        std::string f, g;
        if (!(ls >> f >> g)) fail("pair needs two files");
        t.coefficient = MultiplierCoefficient::pair(element_at(base_dir, f, th), element_at(base_dir, g, th));
      } else {
        fail("unknown coefficient kind '" + kind + "'");
      }
      terms.push_back(std::move(t));
    } else {
      fail("unknown directive '" + key + "'");
    }
  }
  if (!have_theta) throw InvalidInput("operator file has no theta");
  if (terms.empty()) throw InvalidInput("operator file has no terms");
  return from_differential(th, terms);
}

ClassicalSymbol load_differential(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open " + path);
  auto dir = std::filesystem::path(path).parent_path();
  return read_differential(f, dir.empty() ? "." : dir.string());
}

}  // namespace ncres
