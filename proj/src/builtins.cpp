#include <map>
#include <sstream>

#include "koszul/model.hpp"

namespace koszul {

namespace {

const char kIwasawa3[] = R"([model]
name = iwasawa3
kind = free
dim  = 3
holo = w1 w2 w3
anti = v1 v2 v3
[del]
w2 = -1 w1^w3
[dbar]
v2 = -1 v1^v3
[poisson]
pi = 0
)";

const char kIwasawa6[] = R"([model]
name = iwasawa6
kind = free
dim  = 6
holo = w1 w2 w3 w4 w5 w6
anti = v1 v2 v3 v4 v5 v6
[del]
w2 = -1 w1^w4
w3 = -1 w1^w5 + -1 w2^w6
w5 = -1 w4^w6
[dbar]
v2 = -1 v1^v4
v3 = -1 v1^v5 + -1 v2^v6
v5 = -1 v4^v6
[poisson]
pi = 0
)";

// Solvmanifold model, lattice case with the full free antiholomorphic part.
const char kNakamuraCase1[] = R"([model]
name = nakamura_case1
kind = free
dim  = 3
holo = w1 w2 w3
anti = v1 v2 v3
[del]
w2 = -1 w1^w2
w3 = 1 w1^w3
v2 = -1 w1^v2
v3 = 1 w1^v3
[poisson]
pi = 0
)";

// Lattice case with the smaller coefficient complex (one element per degree).
const char kNakamuraCase2[] = R"([model]
name = nakamura_case2
kind = tensor
dim  = 3
holo = w1 w2 w3
[del]
w2 = -1 w1^w2
w3 = 1 w1^w3
[poisson]
pi = 0
[coeff]
b0 : 0 ; b1 : 1 ; b2 : 2 ; b3 : 3
b1*b2 = 1 b3
)";

std::string torus_text(int k) {
  std::ostringstream os;
  os << "[model]\n";
  os << "name = torus_" << k << "\n";
  os << "kind = free\n";
  os << "dim  = " << k << "\n";
  os << "holo =";
  for (int i = 1; i <= k; ++i) os << " w" << i;
  os << "\n";
  os << "anti =";
  for (int i = 1; i <= k; ++i) os << " v" << i;
  os << "\n";
  os << "[poisson]\npi = 0\n";
  return os.str();
}

const std::map<std::string, const char*>& fixed_models() {
  static const std::map<std::string, const char*> table = {
      {"iwasawa3", kIwasawa3},
      {"iwasawa6", kIwasawa6},
      {"nakamura_case1", kNakamuraCase1},
      {"nakamura_case2", kNakamuraCase2},
  };
  return table;
}

}  // namespace

const std::string& builtin_model_text(const std::string& name) {
  static std::map<std::string, std::string> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  if (name.rfind("torus_", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(name.substr(6));
    } catch (...) {
      throw UnknownBuiltin("unknown built-in model '" + name + "'");
    }
    if (k < 1 || k > 16)
      throw UnknownBuiltin("torus dimension out of range in '" + name + "'");
    return cache.emplace(name, torus_text(k)).first->second;
  }
  auto jt = fixed_models().find(name);
  if (jt == fixed_models().end())
    throw UnknownBuiltin("unknown built-in model '" + name + "'");
  return cache.emplace(name, jt->second).first->second;
}

Model builtin(const std::string& name) {
  Model m = parse_model(builtin_model_text(name));
  ValidationReport rep = validate(m);
  if (!rep.ok()) throw InternalInconsistency("built-in model failed validation: " + name);
  return m;
}

std::vector<std::string> builtin_names() {
  return {"torus_<k>", "iwasawa3", "iwasawa6", "nakamura_case1", "nakamura_case2"};
}

}  // namespace koszul
