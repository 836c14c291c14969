#include "koszul/report.hpp"

#include <chrono>
#include <sstream>

namespace koszul {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

Json bigraded_entries(const std::map<std::pair<int, int>, int>& t) {
  Json arr = Json::array();
  for (const auto& [pq, d] : t) arr.push_back({pq.first, pq.second, d});
  return arr;
}

Json graded_entries(const std::map<int, int>& t) {
  Json arr = Json::array();
  for (const auto& [k, d] : t) arr.push_back({k, d});
  return arr;
}

}  // namespace

Json model_json(const Model& m) {
  Json j;
  j["name"] = m.name;
  j["kind"] = m.kind == ModelKind::Free ? "free" : "tensor";
  j["dim"] = m.n;
  j["holo"] = m.holo_names;
  if (m.kind == ModelKind::Free) {
    j["anti"] = m.anti_names;
  } else {
    Json ce = Json::array();
    for (const auto& e : m.coeff_elems) ce.push_back({e.name, e.degree});
    j["coeff"] = ce;
  }
  std::string pi;
  for (const auto& [ij, c] : m.poisson.coeff) {
    if (!pi.empty()) pi += " + ";
    pi += c.str() + " X" + std::to_string(ij.first + 1) + "^X" +
          std::to_string(ij.second + 1);
  }
  j["poisson"] = pi.empty() ? "0" : pi;
  return j;
}

Json validation_json(const ValidationReport& rep) {
  Json j;
  j["ok"] = rep.ok();
  Json items = Json::array();
  for (const auto& it : rep.items) {
    Json e;
    e["axiom"] = it.axiom;
    e["pass"] = it.pass;
    if (!it.pass) e["witness"] = it.witness;
    items.push_back(e);
  }
  j["items"] = items;
  return j;
}

Json table_json(const CohomologyTable& t) {
  Json j;
  j["kind"] = table_kind_name(t.kind);
  if (t.kind == TableKind::SSPage) j["page"] = t.page;  // -1 denotes the stable page
  if (!t.bigraded.empty()) {
    j["indexing"] = "bidegree";
    j["entries"] = bigraded_entries(t.bigraded);
  } else {
    j["indexing"] = "total";
    j["entries"] = graded_entries(t.graded);
  }
  if (!t.bigraded_reps.empty()) {
    Json reps = Json::object();
    for (const auto& [pq, rs] : t.bigraded_reps)
      reps[std::to_string(pq.first) + "," + std::to_string(pq.second)] = rs;
    j["reps"] = reps;
  }
  if (!t.graded_reps.empty()) {
    Json reps = Json::object();
    for (const auto& [k, rs] : t.graded_reps) reps[std::to_string(k)] = rs;
    j["reps"] = reps;
  }
  if (!t.notes.empty()) j["notes"] = t.notes;
  return j;
}

Json diamond_json(const HodgeDiamond& h) {
  Json j;
  j["kind"] = "hodge";
  j["n"] = h.n;
  j["entries"] = bigraded_entries(h.h);
  return j;
}

HodgeDiamond diamond_from_json(const Json& j) {
  HodgeDiamond h;
  if (!j.contains("n") || !j.contains("entries"))
    throw Error("diamond file needs \"n\" and \"entries\"");
  h.n = j["n"].get<int>();
  for (const auto& e : j["entries"]) {
    if (!e.is_array() || e.size() != 3) throw Error("diamond entries are [p,q,dim]");
    h.h[{e[0].get<int>(), e[1].get<int>()}] = e[2].get<int>();
  }
  return h;
}

Json lemma_json(const LemmaVerdict& v) {
  Json j;
  j["kind"] = "lemma";
  j["lemma"] = v.lemma;
  j["scope"] = "model-level";  // a statement about the finite model itself
  j["holds"] = v.holds;
  Json cells = Json::array();
  for (const auto& c : v.cells) {
    if (c.lhs_dim == 0 && c.rhs_dim == 0) continue;
    Json e;
    e["p"] = c.p;
    e["q"] = c.q;
    e["lhs"] = c.lhs_dim;
    e["rhs"] = c.rhs_dim;
    if (c.failed()) {
      e["witness"] = c.witness_str;
      if (!c.preimage_str.empty()) e["preimage"] = c.preimage_str;
    }
    cells.push_back(e);
  }
  j["cells"] = cells;
  if (const LemmaCell* c = v.primary()) {
    j["witness"] = c->witness_str;
    if (!c->preimage_str.empty()) j["witness_preimage"] = c->preimage_str;
    j["witness_bidegree"] = {c->p, c->q};
  }
  return j;
}

Json degeneracy_json(const DegeneracyVerdict& v) {
  Json j;
  j["kind"] = "degeneracy";
  j["degenerate"] = v.degenerate;
  Json rows = Json::array();
  for (const auto& [k, pair] : v.antidiagonals)
    rows.push_back({k, pair.first, pair.second});
  j["antidiagonals"] = rows;  // [k, first-page sum, total dimension]
  j["failing"] = v.failing;
  j["pagewise_agrees"] = v.pagewise_agrees;
  return j;
}

Json bc_aeppli_json(const BcAeppliVerdict& v) {
  Json j;
  j["kind"] = "bc-aeppli-equality";
  j["equality"] = v.equality;
  Json rows = Json::array();
  for (const auto& [k, pair] : v.antidiagonals)
    rows.push_back({k, pair.first, pair.second});
  j["antidiagonals"] = rows;  // [k, BC+A sum, 2*total dimension]
  j["failing"] = v.failing;
  return j;
}

Json unimodular_json(const UnimodularVerdict& v) {
  Json j;
  j["kind"] = "unimodular";
  j["unimodular"] = v.unimodular;
  j["delpi_volume"] = v.delpi_volume;
  if (v.duality_checked) {
    j["duality_holds"] = v.duality_holds;
    Json rows = Json::array();
    for (const auto& [k, pair] : v.duality_dims)
      rows.push_back({k, pair.first, pair.second});
    j["duality_dims"] = rows;  // [k, H_k, H^(2n-k)]
  }
  return j;
}

Json formality_json(const FormalityReport& v) {
  Json j;
  j["kind"] = "formality";
  j["all_quasi_iso"] = v.all_quasi_iso;
  Json maps = Json::array();
  for (const auto& mp : v.maps) {
    Json e;
    e["name"] = mp.name;
    e["well_defined"] = mp.well_defined;
    e["quasi_iso"] = mp.quasi_iso;
    Json cells = Json::array();
    for (const auto& [pq, t] : mp.cells) {
      auto [dom, cod, rank] = t;
      if (dom == 0 && cod == 0) continue;
      cells.push_back({pq.first, pq.second, dom, cod, rank});
    }
    e["cells"] = cells;  // [p, q, dom, cod, rank]
    maps.push_back(e);
  }
  j["maps"] = maps;
  return j;
}

Json mc_json(const Model& m, const MCOutcome& out,
             const std::vector<MCResidual>* residuals, const Tangent* tg) {
  Json j;
  j["kind"] = "mc";
  if (const auto* ob = std::get_if<Obstruction>(&out)) {
    j["solved"] = false;
    Json o;
    o["order"] = ob->order;
    o["failed"] = obstruction_kind_name(ob->failed);
    o["gamma"] = m.form_str(ob->gamma);
    j["obstruction"] = o;
    return j;
  }
  const MCSeries& s = std::get<MCSeries>(out);
  j["solved"] = true;
  j["order"] = s.order;
  Json alphas = Json::array();
  for (int k = 1; k <= s.order; ++k) alphas.push_back(m.form_str(s.alpha[k]));
  j["alpha"] = alphas;
  Json betas = Json::array();
  for (int k = 2; k <= s.order; ++k) betas.push_back(m.form_str(s.beta[k]));
  j["beta"] = betas;
  if (residuals) {
    bool all_zero = true;
    Json rs = Json::array();
    for (const auto& r : *residuals) {
      all_zero &= r.value.is_zero();
      rs.push_back(m.form_str(r.value));
    }
    j["residuals"] = rs;
    j["residuals_zero"] = all_zero;
  }
  if (tg) {
    j["tangent"] = m.poly_str(tg->value);
    j["tangent_dbar_closed"] = tg->dbar_closed;
  }
  return j;
}

Json full_report(const Model& m, const ReportOptions& opt) {
  m.require_validated();
  Json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["model"] = model_json(m);

  Json analyses = Json::object();
  Json timings = Json::object();
  auto timed = [&](const char* key, auto&& fn) {
    auto t0 = Clock::now();
    analyses[key] = fn();
    timings[key] = elapsed_ms(t0, Clock::now());
  };

  timed("hodge", [&] { return diamond_json(hodge_diamond(m, opt.exec)); });
  timed("dolbeault", [&] { return table_json(dolbeault(m, opt.exec, opt.with_reps)); });
  timed("delpi", [&] {
    return table_json(delpi_cohomology(m, opt.exec, opt.with_reps));
  });
  timed("kb", [&] { return table_json(kb_homology(m, opt.exec, opt.with_reps)); });
  timed("ss_page_1", [&] { return table_json(ss_page(m, 1, opt.exec)); });
  timed("ss_infinity", [&] { return table_json(ss_infinity(m, opt.exec)); });
  timed("bott_chern", [&] { return table_json(bott_chern(m, opt.exec, opt.with_reps)); });
  timed("aeppli", [&] { return table_json(aeppli(m, opt.exec, opt.with_reps)); });
  timed("lp", [&] { return table_json(lp_cohomology(m, opt.exec, opt.with_reps)); });
  timed("lemma_ddbar", [&] { return lemma_json(check_deldbar(m, opt.exec)); });
  timed("lemma_dpidbar", [&] { return lemma_json(check_dpidbar(m, opt.exec)); });
  timed("degeneracy", [&] { return degeneracy_json(check_degeneracy(m, opt.exec)); });
  timed("bc_aeppli_equality",
        [&] { return bc_aeppli_json(check_bc_aeppli_equality(m, opt.exec)); });
  timed("unimodular", [&]() -> Json {
    if (m.kind != ModelKind::Free)
      return Json{{"kind", "unimodular"}, {"skipped", "no volume form declared"}};
    return unimodular_json(check_unimodular(m, opt.exec));
  });
  timed("formality", [&] { return formality_json(formality_diagram(m, opt.exec)); });

  j["analyses"] = analyses;
  if (opt.with_timings) j["timings_ms"] = timings;
  return j;
}

// ---------------------------------------------------------------------------
// Text rendering.  Everything below formats the JSON documents, so the human
// output is a pure function of the machine output.

namespace {

std::string pad(const std::string& s, size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

void render_bigraded(std::ostringstream& os, const Json& entries,
                     const char* row = "p", const char* col = "q") {
  int pmax = 0, qmax = 0;
  std::map<std::pair<int, int>, int> t;
  for (const auto& e : entries) {
    int p = e[0].get<int>(), q = e[1].get<int>(), d = e[2].get<int>();
    t[{p, q}] = d;
    pmax = std::max(pmax, p);
    qmax = std::max(qmax, q);
  }
  size_t w = 5;
  os << pad("", 6);
  for (int q = 0; q <= qmax; ++q) os << pad(std::string(col) + "=" + std::to_string(q), w);
  os << "\n";
  for (int p = 0; p <= pmax; ++p) {
    os << pad(std::string(row) + "=" + std::to_string(p), 6);
    for (int q = 0; q <= qmax; ++q) {
      auto it = t.find({p, q});
      os << pad(it == t.end() ? "." : std::to_string(it->second), w);
    }
    os << "\n";
  }
}

void render_graded(std::ostringstream& os, const Json& entries) {
  for (const auto& e : entries)
    os << "  k=" << e[0].get<int>() << ": " << e[1].get<int>() << "\n";
}

void render_reps(std::ostringstream& os, const Json& reps) {
  for (const auto& [key, arr] : reps.items()) {
    os << "  [" << key << "] representatives:\n";
    for (const auto& r : arr) os << "    " << r.get<std::string>() << "\n";
  }
}

void render_doc(std::ostringstream& os, const Json& j);

void render_table(std::ostringstream& os, const Json& j) {
  std::string kind = j["kind"].get<std::string>();
  if (kind == "ss-page") {
    int page = j["page"].get<int>();
    os << (page < 0 ? "stable page (s,t)" : "page " + std::to_string(page) + " (s,t)")
       << ":\n";
  } else if (kind == "hodge") {
    os << "hodge diamond (n=" << j["n"].get<int>() << "):\n";
  } else {
    os << kind << ":\n";
  }
  if (j.contains("indexing") && j["indexing"] == "total") {
    render_graded(os, j["entries"]);
  } else if (kind == "ss-page") {
    render_bigraded(os, j["entries"], "s", "t");
  } else {
    render_bigraded(os, j["entries"]);
  }
  if (j.contains("notes"))
    for (const auto& n : j["notes"])
      os << "  note: " << n.get<std::string>() << "\n";
  if (j.contains("reps")) render_reps(os, j["reps"]);
}

void render_lemma(std::ostringstream& os, const Json& j) {
  os << (j["lemma"] == "ddbar" ? "ddbar" : "dpidbar") << " lemma (model-level): "
     << (j["holds"].get<bool>() ? "HOLDS" : "FAILS") << "\n";
  if (!j["holds"].get<bool>() && j.contains("witness")) {
    os << "  witness";
    if (j.contains("witness_bidegree"))
      os << " at (" << j["witness_bidegree"][0].get<int>() << ","
         << j["witness_bidegree"][1].get<int>() << ")";
    os << ": " << j["witness"].get<std::string>();
    if (j.contains("witness_preimage"))
      os << "  =  D( " << j["witness_preimage"].get<std::string>() << " )";
    os << "\n";
  }
  for (const auto& c : j["cells"]) {
    if (c["lhs"] == c["rhs"]) continue;
    os << "  (" << c["p"].get<int>() << "," << c["q"].get<int>()
       << "): left " << c["lhs"].get<int>() << " vs right " << c["rhs"].get<int>();
    if (c.contains("witness")) {
      os << "  witness " << c["witness"].get<std::string>();
      if (c.contains("preimage")) os << " = D( " << c["preimage"].get<std::string>() << " )";
    }
    os << "\n";
  }
}

void render_degeneracy(std::ostringstream& os, const Json& j) {
  os << "degeneracy at the first page: "
     << (j["degenerate"].get<bool>() ? "DEGENERATE" : "NOT DEGENERATE") << "\n";
  for (const auto& row : j["antidiagonals"]) {
    int k = row[0].get<int>(), a = row[1].get<int>(), b = row[2].get<int>();
    if (a == b) continue;
    os << "  k=" << k << ": first page " << a << " vs total " << b << "\n";
  }
}

void render_bc_aeppli(std::ostringstream& os, const Json& j) {
  os << "sum(BC)+sum(A) = 2*dim total: "
     << (j["equality"].get<bool>() ? "EQUALITY" : "STRICT INEQUALITY") << "\n";
  for (const auto& row : j["antidiagonals"]) {
    int k = row[0].get<int>(), a = row[1].get<int>(), b = row[2].get<int>();
    os << "  k=" << k << ": " << a << (a == b ? " = " : " > ") << b << "\n";
  }
}

void render_unimodular(std::ostringstream& os, const Json& j) {
  if (j.contains("skipped")) {
    os << "unimodular: skipped (" << j["skipped"].get<std::string>() << ")\n";
    return;
  }
  os << "unimodular: " << (j["unimodular"].get<bool>() ? "YES" : "NO") << "\n";
  if (!j["unimodular"].get<bool>())
    os << "  delpi(volume) = " << j["delpi_volume"].get<std::string>() << "\n";
  if (j.contains("duality_holds")) {
    os << "  duality dim H_k = dim H^(2n-k): "
       << (j["duality_holds"].get<bool>() ? "verified" : "VIOLATED") << "\n";
    for (const auto& row : j["duality_dims"])
      os << "    k=" << row[0].get<int>() << ": " << row[1].get<int>() << " vs "
         << row[2].get<int>() << "\n";
  }
}

void render_formality(std::ostringstream& os, const Json& j) {
  os << "formality diagram: "
     << (j["all_quasi_iso"].get<bool>() ? "all four maps are quasi-isomorphisms"
                                        : "NOT all maps are quasi-isomorphisms")
     << "\n";
  for (const auto& mp : j["maps"]) {
    os << "  " << mp["name"].get<std::string>() << ": well-defined="
       << (mp["well_defined"].get<bool>() ? "yes" : "no")
       << " quasi-iso=" << (mp["quasi_iso"].get<bool>() ? "yes" : "no") << "\n";
  }
}

void render_mc(std::ostringstream& os, const Json& j) {
  if (!j["solved"].get<bool>()) {
    const Json& o = j["obstruction"];
    os << "obstruction at order " << o["order"].get<int>() << " ("
       << o["failed"].get<std::string>() << ")\n";
    os << "  bracket sum: " << o["gamma"].get<std::string>() << "\n";
    return;
  }
  os << "maurer-cartan series up to order " << j["order"].get<int>() << ":\n";
  int k = 1;
  for (const auto& a : j["alpha"]) os << "  a_" << k++ << " = " << a.get<std::string>() << "\n";
  if (j.contains("residuals_zero"))
    os << "  residuals all zero: " << (j["residuals_zero"].get<bool>() ? "yes" : "NO")
       << "\n";
  if (j.contains("tangent"))
    os << "  tangent class: " << j["tangent"].get<std::string>()
       << (j["tangent_dbar_closed"].get<bool>() ? " (dbar-closed)" : " (NOT dbar-closed)")
       << "\n";
}

void render_validation(std::ostringstream& os, const Json& j) {
  os << "validation: " << (j["ok"].get<bool>() ? "PASS" : "FAIL") << "\n";
  for (const auto& it : j["items"]) {
    os << "  " << (it["pass"].get<bool>() ? "pass" : "FAIL") << "  "
       << it["axiom"].get<std::string>();
    if (it.contains("witness")) os << "   [" << it["witness"].get<std::string>() << "]";
    os << "\n";
  }
}

void render_doc(std::ostringstream& os, const Json& j) {
  if (!j.contains("kind")) return;
  std::string kind = j["kind"].get<std::string>();
  if (kind == "lemma")
    render_lemma(os, j);
  else if (kind == "degeneracy")
    render_degeneracy(os, j);
  else if (kind == "bc-aeppli-equality")
    render_bc_aeppli(os, j);
  else if (kind == "unimodular")
    render_unimodular(os, j);
  else if (kind == "formality")
    render_formality(os, j);
  else if (kind == "mc")
    render_mc(os, j);
  else if (kind == "builtin-list") {
    for (const auto& n : j["names"]) os << n.get<std::string>() << "\n";
  } else if (kind == "formula") {
    render_table(os, j["diamond"]);
    render_table(os, j["kb"]);
  } else {
    render_table(os, j);
  }
}

}  // namespace

std::string render_human(const Json& j) {
  std::ostringstream os;
  if (j.contains("schema")) {  // full report
    const Json& m = j["model"];
    os << "model " << m["name"].get<std::string>() << " (kind "
       << m["kind"].get<std::string>() << ", dim " << m["dim"].get<int>() << ", pi = "
       << m["poisson"].get<std::string>() << ")\n";
    if (j.contains("validation")) {
      render_validation(os, j["validation"]);
      os << "\n";
    }
    for (const auto& [key, doc] : j["analyses"].items()) {
      os << "== " << key << "\n";
      render_doc(os, doc);
      os << "\n";
    }
    if (j.contains("timings_ms")) {
      os << "== timings (ms)\n";
      for (const auto& [key, v] : j["timings_ms"].items())
        os << "  " << key << ": " << v.dump() << "\n";
    }
    return os.str();
  }
  if (j.contains("ok") && j.contains("items")) {
    render_validation(os, j);
    return os.str();
  }
  render_doc(os, j);
  return os.str();
}

}  // namespace koszul
