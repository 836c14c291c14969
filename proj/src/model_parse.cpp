#include <algorithm>
#include <cctype>
#include <sstream>

#include "koszul/model.hpp"

namespace koszul {

namespace {

struct Token {
  std::string text;
  int line = 0;
  int col = 0;  // 1-based
};

std::vector<Token> tokenize(const std::string& line, int lineno) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), lineno, static_cast<int>(start) + 1});
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

struct RawRule {
  Token lhs;      // generator (or, in [coeff], the element after del/dbar)
  bool is_del = true;
  std::vector<Token> rhs;
};

struct RawProduct {
  Token pair_tok;  // "a*b"
  std::vector<Token> rhs;
};

Q parse_coeff_token(const Token& t) {
  auto q = Q::parse(t.text);
  if (!q) throw SyntaxError(t.line, t.col, "Gaussian rational coefficient");
  return *q;
}

// Single-factor monomial of a form expression.
Monomial factor_monomial(const Model& m, const Token& t, const std::string& nm) {
  Monomial mono = m.one_monomial();
  if (nm == "1") return mono;
  int hi = m.holo_index(nm);
  if (hi >= 0) {
    mono.holo = 1u << hi;
    return mono;
  }
  if (m.kind == ModelKind::Free) {
    int ai = m.anti_index(nm);
    if (ai >= 0) {
      mono.anti = 1u << ai;
      return mono;
    }
  } else {
    int ci = m.coeff_index(nm);
    if (ci >= 0) {
      mono.anti = 1u << ci;
      return mono;
    }
  }
  throw UnknownGenerator("unknown generator '" + nm + "' at line " +
                         std::to_string(t.line));
}

std::vector<std::string> split_factors(const Token& t) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : t.text) {
    if (c == '^') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (const auto& f : out)
    if (f.empty()) throw SyntaxError(t.line, t.col, "wedge monomial");
  return out;
}

// coeff mono ( '+' coeff mono )*  |  "0"
FormExpr parse_form_tokens(const Model& m, const std::vector<Token>& toks, size_t from,
                           int p, int q, int lineno) {
  FormExpr out(p, q);
  if (from >= toks.size()) throw SyntaxError(lineno, 1, "expression");
  if (toks.size() == from + 1 && toks[from].text == "0") return out;
  size_t i = from;
  while (i < toks.size()) {
    Q c = parse_coeff_token(toks[i]);
    ++i;
    if (i >= toks.size()) throw SyntaxError(lineno, toks[i - 1].col, "wedge monomial");
    const Token& mt = toks[i];
    ++i;
    Monomial acc = m.one_monomial();
    Q sign(1);
    bool dead = false;
    for (const std::string& f : split_factors(mt)) {
      if (f == "1") continue;
      Monomial fm = factor_monomial(m, mt, f);
      auto w = m.wedge_monomials(acc, fm);
      if (!w) {
        dead = true;  // repeated generator or zero product: the term vanishes
        break;
      }
      acc = w->first;
      sign *= w->second;
    }
    if (!dead) {
      int tp = std::popcount(acc.holo);
      int tq = m.anti_degree_of(acc.anti);
      if (tp != p || tq != q)
        throw BidegreeMismatch("term '" + mt.text + "' at line " +
                               std::to_string(mt.line) + " has bidegree (" +
                               std::to_string(tp) + "," + std::to_string(tq) +
                               "), expected (" + std::to_string(p) + "," +
                               std::to_string(q) + ")");
      out.add(acc, c * sign);
    }
    if (i < toks.size()) {
      if (toks[i].text != "+") throw SyntaxError(toks[i].line, toks[i].col, "'+'");
      ++i;
      if (i >= toks.size()) throw SyntaxError(lineno, toks[i - 1].col, "term after '+'");
    }
  }
  return out;
}

PoissonBivector parse_poisson_tokens(const Model& m, const std::vector<Token>& toks,
                                     size_t from, int lineno) {
  PoissonBivector pi;
  if (from >= toks.size()) throw SyntaxError(lineno, 1, "bivector expression");
  if (toks.size() == from + 1 && toks[from].text == "0") return pi;
  size_t i = from;
  while (i < toks.size()) {
    Q c = parse_coeff_token(toks[i]);
    ++i;
    if (i >= toks.size()) throw SyntaxError(lineno, toks[i - 1].col, "X monomial");
    const Token& mt = toks[i];
    ++i;
    uint32_t mask = 0;
    int sign = 1;
    bool dead = false;
    for (const std::string& f : split_factors(mt)) {
      if (f.size() < 2 || f[0] != 'X')
        throw SyntaxError(mt.line, mt.col, "X<k> factor");
      int k = 0;
      for (size_t j = 1; j < f.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(f[j])))
          throw SyntaxError(mt.line, mt.col, "X<k> factor");
        k = k * 10 + (f[j] - '0');
      }
      if (k < 1 || k > m.n)
        throw UnknownGenerator("X" + std::to_string(k) + " out of range at line " +
                               std::to_string(mt.line));
      uint32_t bit = 1u << (k - 1);
      if (mask & bit) {
        dead = true;
        break;
      }
      sign *= merge_mask_sign(mask, bit);
      mask |= bit;
    }
    if (!dead) {
      if (std::popcount(mask) != 2)
        throw BidegreeMismatch("bivector term '" + mt.text + "' at line " +
                               std::to_string(mt.line) + " must have two legs");
      int a = std::countr_zero(mask);
      int b = std::countr_zero(mask & (mask - 1));
      pi.set(a, b, Q(sign) * c);
    }
    if (i < toks.size()) {
      if (toks[i].text != "+") throw SyntaxError(toks[i].line, toks[i].col, "'+'");
      ++i;
      if (i >= toks.size()) throw SyntaxError(lineno, toks[i - 1].col, "term after '+'");
    }
  }
  return pi;
}

struct GenRef {
  enum Kind { Holo, Anti, Coeff } kind;
  int index;
};

GenRef resolve_generator(const Model& m, const Token& t) {
  int hi = m.holo_index(t.text);
  if (hi >= 0) return {GenRef::Holo, hi};
  if (m.kind == ModelKind::Free) {
    int ai = m.anti_index(t.text);
    if (ai >= 0) return {GenRef::Anti, ai};
  } else {
    int ci = m.coeff_index(t.text);
    if (ci >= 0) return {GenRef::Coeff, ci};
  }
  throw UnknownGenerator("unknown generator '" + t.text + "' at line " +
                         std::to_string(t.line));
}

std::pair<int, int> rule_bidegree(const Model& m, GenRef g, bool is_del) {
  switch (g.kind) {
    case GenRef::Holo:
      return is_del ? std::pair{2, 0} : std::pair{1, 1};
    case GenRef::Anti:
      return is_del ? std::pair{1, 1} : std::pair{0, 2};
    case GenRef::Coeff: {
      int d = m.coeff_elems[g.index].degree;
      return is_del ? std::pair{1, d} : std::pair{0, d + 1};
    }
  }
  throw Error("unreachable");
}

}  // namespace

Model parse_model(std::string_view text) {
  enum Section { None, Mod, Del, Dbar, Poisson, Coeff };
  Section section = None;

  Model m;
  bool have_kind = false, have_dim = false;
  std::vector<RawRule> rules;
  std::vector<RawProduct> products;
  std::vector<std::pair<int, std::vector<Token>>> poisson_lines;

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<Token> toks = tokenize(line, lineno);
    if (toks.empty()) continue;

    if (toks[0].text.front() == '[') {
      if (toks.size() != 1 || toks[0].text.back() != ']')
        throw SyntaxError(lineno, toks[0].col, "section header");
      std::string sec = toks[0].text.substr(1, toks[0].text.size() - 2);
      if (sec == "model")
        section = Mod;
      else if (sec == "del")
        section = Del;
      else if (sec == "dbar")
        section = Dbar;
      else if (sec == "poisson")
        section = Poisson;
      else if (sec == "coeff")
        section = Coeff;
      else
        throw SyntaxError(lineno, toks[0].col, "model/del/dbar/poisson/coeff section");
      if (section != Mod && m.holo_names.empty())
        throw SyntaxError(lineno, toks[0].col, "[model] section first");
      continue;
    }

    switch (section) {
      case None:
        throw SyntaxError(lineno, toks[0].col, "section header");
      case Mod: {
        if (toks.size() < 3 || toks[1].text != "=")
          throw SyntaxError(lineno, toks[0].col, "key = value");
        const std::string& key = toks[0].text;
        if (key == "name") {
          m.name = toks[2].text;
        } else if (key == "kind") {
          if (toks[2].text == "free")
            m.kind = ModelKind::Free;
          else if (toks[2].text == "tensor")
            m.kind = ModelKind::Tensor;
          else
            throw SyntaxError(lineno, toks[2].col, "free or tensor");
          have_kind = true;
        } else if (key == "dim") {
          try {
            m.n = std::stoi(toks[2].text);
          } catch (...) {
            throw SyntaxError(lineno, toks[2].col, "integer dimension");
          }
          if (m.n < 1 || m.n > 16)
            throw SyntaxError(lineno, toks[2].col, "dimension between 1 and 16");
          have_dim = true;
        } else if (key == "holo" || key == "anti") {
          auto& names = key == "holo" ? m.holo_names : m.anti_names;
          for (size_t i = 2; i < toks.size(); ++i) {
            if (!is_identifier(toks[i].text))
              throw SyntaxError(toks[i].line, toks[i].col, "identifier");
            names.push_back(toks[i].text);
          }
        } else {
          throw SyntaxError(lineno, toks[0].col, "name/kind/dim/holo/anti");
        }
        break;
      }
      case Del:
      case Dbar: {
        if (toks.size() < 3 || toks[1].text != "=")
          throw SyntaxError(lineno, toks[0].col, "generator = expression");
        RawRule r;
        r.lhs = toks[0];
        r.is_del = section == Del;
        r.rhs.assign(toks.begin() + 2, toks.end());
        rules.push_back(std::move(r));
        break;
      }
      case Poisson: {
        if (toks.size() < 3 || toks[0].text != "pi" || toks[1].text != "=")
          throw SyntaxError(lineno, toks[0].col, "pi = expression");
        poisson_lines.emplace_back(lineno, std::vector<Token>(toks.begin() + 2, toks.end()));
        break;
      }
      case Coeff: {
        if (toks[0].text == "del" || toks[0].text == "dbar") {
          if (toks.size() < 4 || toks[2].text != "=")
            throw SyntaxError(lineno, toks[0].col, "del/dbar element = expression");
          RawRule r;
          r.lhs = toks[1];
          r.is_del = toks[0].text == "del";
          r.rhs.assign(toks.begin() + 3, toks.end());
          rules.push_back(std::move(r));
        } else if (toks[0].text.find('*') != std::string::npos) {
          if (toks.size() < 3 || toks[1].text != "=")
            throw SyntaxError(lineno, toks[0].col, "a*b = expression");
          RawProduct p;
          p.pair_tok = toks[0];
          p.rhs.assign(toks.begin() + 2, toks.end());
          products.push_back(std::move(p));
        } else {
          // basis declaration: name : degree ; name : degree ; ...
          size_t i = 0;
          while (i < toks.size()) {
            if (!is_identifier(toks[i].text))
              throw SyntaxError(toks[i].line, toks[i].col, "element name");
            std::string nm = toks[i].text;
            if (i + 2 >= toks.size() || toks[i + 1].text != ":")
              throw SyntaxError(toks[i].line, toks[i].col, "name : degree");
            int deg;
            try {
              deg = std::stoi(toks[i + 2].text);
            } catch (...) {
              throw SyntaxError(toks[i + 2].line, toks[i + 2].col, "integer degree");
            }
            if (deg < 0 || deg > 28)
              throw SyntaxError(toks[i + 2].line, toks[i + 2].col, "degree in [0,28]");
            m.coeff_elems.push_back({nm, deg});
            i += 3;
            if (i < toks.size()) {
              if (toks[i].text != ";")
                throw SyntaxError(toks[i].line, toks[i].col, "';'");
              ++i;
            }
          }
        }
        break;
      }
    }
  }

  if (m.name.empty()) throw SyntaxError(lineno, 1, "name key in [model]");
  if (!have_kind) throw SyntaxError(lineno, 1, "kind key in [model]");
  if (!have_dim) throw SyntaxError(lineno, 1, "dim key in [model]");
  if (static_cast<int>(m.holo_names.size()) != m.n)
    throw SyntaxError(lineno, 1, std::to_string(m.n) + " holomorphic generators");
  if (m.kind == ModelKind::Tensor && m.coeff_elems.empty())
    throw SyntaxError(lineno, 1, "[coeff] basis for a tensor model");
  if (m.kind == ModelKind::Free && !m.coeff_elems.empty())
    throw SyntaxError(lineno, 1, "no [coeff] section in a free model");
  {
    std::vector<std::string> all = m.holo_names;
    all.insert(all.end(), m.anti_names.begin(), m.anti_names.end());
    for (const auto& e : m.coeff_elems) all.push_back(e.name);
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw Error("duplicate generator name in model '" + m.name + "'");
  }

  // Products first (their right sides need no wedge), then a provisional
  // finalize so expression resolution can canonicalize monomials.
  for (const auto& pr : products) {
    const std::string& pt = pr.pair_tok.text;
    size_t star = pt.find('*');
    std::string a = pt.substr(0, star), b = pt.substr(star + 1);
    int ia = m.coeff_index(a), ib = m.coeff_index(b);
    if (ia < 0 || ib < 0)
      throw UnknownGenerator("unknown coefficient element in '" + pt + "' at line " +
                             std::to_string(pr.pair_tok.line));
    if (pr.rhs.size() == 1 && pr.rhs[0].text == "0") continue;
    if (pr.rhs.size() != 2)
      throw SyntaxError(pr.pair_tok.line, pr.pair_tok.col, "coefficient and element");
    Q c = parse_coeff_token(pr.rhs[0]);
    int ik = m.coeff_index(pr.rhs[1].text);
    if (ik < 0)
      throw UnknownGenerator("unknown coefficient element '" + pr.rhs[1].text +
                             "' at line " + std::to_string(pr.rhs[1].line));
    if (!c.is_zero()) m.coeff_products[{ia, ib}] = {c, ik};
  }
  m.finalize();

  for (const auto& r : rules) {
    GenRef g = resolve_generator(m, r.lhs);
    auto [p, q] = rule_bidegree(m, g, r.is_del);
    FormExpr e(p, q);
    {
      std::vector<Token> toks = r.rhs;
      e = parse_form_tokens(m, toks, 0, p, q, r.lhs.line);
    }
    switch (g.kind) {
      case GenRef::Holo:
        (r.is_del ? m.del_holo : m.dbar_holo)[g.index] = std::move(e);
        break;
      case GenRef::Anti:
        (r.is_del ? m.del_anti : m.dbar_anti)[g.index] = std::move(e);
        break;
      case GenRef::Coeff:
        (r.is_del ? m.del_coeff : m.dbar_coeff)[g.index] = std::move(e);
        break;
    }
  }

  for (const auto& [ln, toks] : poisson_lines) {
    PoissonBivector pi = parse_poisson_tokens(m, toks, 0, ln);
    for (const auto& [ij, c] : pi.coeff) m.poisson.set(ij.first, ij.second, c);
  }

  m.finalize();  // rederives the bracket table from the final rules
  return m;
}

PoissonBivector parse_poisson_expr(const Model& m, std::string_view text) {
  std::vector<Token> toks = tokenize(std::string(text), 1);
  return parse_poisson_tokens(m, toks, 0, 1);
}

FormExpr parse_form_expr(const Model& m, std::string_view text, int p, int q) {
  std::vector<Token> toks = tokenize(std::string(text), 1);
  return parse_form_tokens(m, toks, 0, p, q, 1);
}

std::string print_model(const Model& m) {
  std::ostringstream os;
  os << "[model]\n";
  os << "name = " << m.name << "\n";
  os << "kind = " << (m.kind == ModelKind::Free ? "free" : "tensor") << "\n";
  os << "dim  = " << m.n << "\n";
  os << "holo =";
  for (const auto& s : m.holo_names) os << " " << s;
  os << "\n";
  if (m.kind == ModelKind::Free && !m.anti_names.empty()) {
    os << "anti =";
    for (const auto& s : m.anti_names) os << " " << s;
    os << "\n";
  }

  auto print_rules = [&](const char* header, const std::vector<FormExpr>& holo,
                         const std::vector<FormExpr>& anti) {
    bool any = false;
    for (const auto& e : holo) any |= !e.is_zero();
    for (const auto& e : anti) any |= !e.is_zero();
    if (!any) return;
    os << "[" << header << "]\n";
    for (size_t i = 0; i < holo.size(); ++i)
      if (!holo[i].is_zero())
        os << m.holo_names[i] << " = " << m.form_str(holo[i]) << "\n";
    for (size_t i = 0; i < anti.size(); ++i)
      if (!anti[i].is_zero())
        os << m.anti_names[i] << " = " << m.form_str(anti[i]) << "\n";
  };
  print_rules("del", m.del_holo, m.del_anti);
  print_rules("dbar", m.dbar_holo, m.dbar_anti);

  os << "[poisson]\n";
  if (m.poisson.is_zero()) {
    os << "pi = 0\n";
  } else {
    os << "pi = ";
    bool first = true;
    for (const auto& [ij, c] : m.poisson.coeff) {
      if (!first) os << " + ";
      first = false;
      os << c.str() << " X" << ij.first + 1 << "^X" << ij.second + 1;
    }
    os << "\n";
  }

  if (m.kind == ModelKind::Tensor) {
    os << "[coeff]\n";
    for (size_t i = 0; i < m.coeff_elems.size(); ++i) {
      if (i) os << " ; ";
      os << m.coeff_elems[i].name << " : " << m.coeff_elems[i].degree;
    }
    os << "\n";
    const int unit = m.unit_coeff_index();
    for (const auto& [ij, val] : m.coeff_products) {
      if (ij.first > ij.second || val.first.is_zero()) continue;
      if (ij.first == unit || ij.second == unit) continue;
      os << m.coeff_elems[ij.first].name << "*" << m.coeff_elems[ij.second].name
         << " = " << val.first.str() << " " << m.coeff_elems[val.second].name << "\n";
    }
    for (size_t i = 0; i < m.del_coeff.size(); ++i)
      if (!m.del_coeff[i].is_zero())
        os << "del " << m.coeff_elems[i].name << " = " << m.form_str(m.del_coeff[i])
           << "\n";
    for (size_t i = 0; i < m.dbar_coeff.size(); ++i)
      if (!m.dbar_coeff[i].is_zero())
        os << "dbar " << m.coeff_elems[i].name << " = " << m.form_str(m.dbar_coeff[i])
           << "\n";
  }
  return os.str();
}

}  // namespace koszul
