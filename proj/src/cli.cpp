#include "koszul/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "koszul/report.hpp"

namespace koszul {

namespace {

struct UsageFailure {
  std::string msg;
};
struct ModelFailure {
  std::string msg;
  std::optional<Json> report;
};

struct Options {
  std::string model_file, builtin_name, poisson, expect;
  bool json = false, basis = false, serial = false, timings = false;
  int threads = 0;

  Exec exec() const { return serial ? Exec::Serial : Exec::Parallel; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFailure{"cannot open '" + path + "'", std::nullopt};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Model load_model(const Options& o) {
  if (o.model_file.empty() == o.builtin_name.empty())
    throw UsageFailure{"exactly one of --model or --builtin is required"};
  Model m;
  try {
    m = o.model_file.empty() ? builtin(o.builtin_name)
                             : parse_model(read_file(o.model_file));
  } catch (const UnknownBuiltin& e) {
    throw UsageFailure{e.what()};
  } catch (const Error& e) {
    throw ModelFailure{e.what(), std::nullopt};
  }
  if (!o.poisson.empty()) {
    try {
      set_poisson(m, parse_poisson_expr(m, o.poisson));
    } catch (const Error& e) {
      throw UsageFailure{std::string("--poisson: ") + e.what()};
    }
  }
  ValidationReport rep = validate(m);
  if (!rep.ok())
    throw ModelFailure{"model '" + m.name + "' failed validation",
                       validation_json(rep)};
  return m;
}

struct Outcome {
  Json doc;
  std::string verdict;  // empty when the analysis has no yes/no verdict
};

int finish(const Options& o, const Outcome& res, std::ostream& out, std::ostream& err) {
  if (o.json)
    out << res.doc.dump(2) << "\n";
  else
    out << render_human(res.doc);
  if (!o.expect.empty()) {
    if (res.verdict.empty())
      throw UsageFailure{"--expect is not supported by this subcommand"};
    if (res.verdict != o.expect) {
      err << "expected verdict '" << o.expect << "' but got '" << res.verdict << "'\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cohomology of finite holomorphic Poisson models"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--model", o.model_file, "model file to load");
  app.add_option("--builtin", o.builtin_name, "built-in model name (see list-builtin)");
  app.add_option("--poisson", o.poisson, "override the Poisson bivector, e.g. \"1 X1^X3\"");
  app.add_flag("--json", o.json, "emit machine-readable JSON");
  app.add_flag("--basis", o.basis, "include representative bases in tables");
  app.add_flag("--serial", o.serial, "run table kernels on one thread");
  app.add_option("--threads", o.threads, "cap the OpenMP thread count");
  app.add_option("--expect", o.expect,
                 "fail (exit 1) unless the verdict matches, e.g. holds/fails");
  app.add_flag("--timings", o.timings, "include wall-clock timings in reports");

  std::function<Outcome()> action;

  auto* c_list = app.add_subcommand("list-builtin", "list built-in models");
  c_list->callback([&] {
    action = [] {
      Json j;
      j["kind"] = "builtin-list";
      j["names"] = builtin_names();
      return Outcome{j, ""};
    };
  });

  auto* c_validate = app.add_subcommand("validate", "check every model axiom");
  c_validate->callback([&] {
    action = [&]() -> Outcome {
      // Unlike the other subcommands, an invalid model is a reportable result.
      if (o.model_file.empty() == o.builtin_name.empty())
        throw UsageFailure{"exactly one of --model or --builtin is required"};
      Model m;
      try {
        m = o.model_file.empty() ? builtin(o.builtin_name)
                                 : parse_model(read_file(o.model_file));
      } catch (const UnknownBuiltin& e) {
        throw UsageFailure{e.what()};
      } catch (const ModelFailure&) {
        throw;
      } catch (const Error& e) {
        throw ModelFailure{e.what(), std::nullopt};
      }
      if (!o.poisson.empty()) {
        try {
          set_poisson(m, parse_poisson_expr(m, o.poisson));
        } catch (const Error& e) {
          throw UsageFailure{std::string("--poisson: ") + e.what()};
        }
      }
      ValidationReport rep = validate(m);
      Outcome res{validation_json(rep), rep.ok() ? "valid" : "invalid"};
      if (!rep.ok() && o.expect.empty())
        throw ModelFailure{"model '" + m.name + "' failed validation", res.doc};
      return res;
    };
  });

  auto* c_hodge = app.add_subcommand("hodge", "Dolbeault dimensions as a diamond");
  c_hodge->callback([&] {
    action = [&] {
      Model m = load_model(o);
      return Outcome{diamond_json(hodge_diamond(m, o.exec())), ""};
    };
  });

  auto add_table = [&](const char* name, const char* desc, auto fn) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->callback([&, fn] {
      action = [&, fn] {
        Model m = load_model(o);
        return Outcome{table_json(fn(m)), ""};
      };
    });
    return cmd;
  };
  add_table("kb", "total homology of the contraction double complex",
            [&](const Model& m) { return kb_homology(m, o.exec(), o.basis); });
  add_table("bc", "Bott-Chern table",
            [&](const Model& m) { return bott_chern(m, o.exec(), o.basis); });
  add_table("aeppli", "Aeppli table",
            [&](const Model& m) { return aeppli(m, o.exec(), o.basis); });
  add_table("lp", "polyvector (Lichnerowicz-Poisson) total cohomology",
            [&](const Model& m) { return lp_cohomology(m, o.exec(), o.basis); });

  int page = 0;
  auto* c_ss = app.add_subcommand("ss", "spectral sequence page dimensions");
  c_ss->add_option("--page", page, "page index r >= 0")->required();
  c_ss->callback([&] {
    action = [&] {
      Model m = load_model(o);
      return Outcome{table_json(ss_page(m, page, o.exec())), ""};
    };
  });

  std::string which_lemma;
  auto* c_lemma = app.add_subcommand("lemma", "ddbar / dpidbar lemma verdict");
  c_lemma->add_option("name", which_lemma, "ddbar or dpidbar")
      ->required()
      ->check(CLI::IsMember({"ddbar", "dpidbar"}));
  c_lemma->callback([&] {
    action = [&] {
      Model m = load_model(o);
      LemmaVerdict v =
          which_lemma == "ddbar" ? check_deldbar(m, o.exec()) : check_dpidbar(m, o.exec());
      return Outcome{lemma_json(v), v.holds ? "holds" : "fails"};
    };
  });

  auto* c_deg = app.add_subcommand("degeneracy", "first-page degeneracy verdict");
  c_deg->callback([&] {
    action = [&] {
      Model m = load_model(o);
      DegeneracyVerdict v = check_degeneracy(m, o.exec());
      return Outcome{degeneracy_json(v), v.degenerate ? "degenerate" : "nondegenerate"};
    };
  });

  auto* c_uni = app.add_subcommand("unimodular", "volume-form compatibility verdict");
  c_uni->callback([&] {
    action = [&]() -> Outcome {
      Model m = load_model(o);
      UnimodularVerdict v;
      try {
        v = check_unimodular(m, o.exec());
      } catch (const Unsupported& e) {
        throw UsageFailure{e.what()};
      }
      return Outcome{unimodular_json(v), v.unimodular ? "unimodular" : "not-unimodular"};
    };
  });

  auto* c_formality = app.add_subcommand("formality", "ranks of the four induced maps");
  c_formality->callback([&] {
    action = [&] {
      Model m = load_model(o);
      FormalityReport v = formality_diagram(m, o.exec());
      return Outcome{formality_json(v), v.all_quasi_iso ? "quasi-iso" : "not-quasi-iso"};
    };
  });

  std::string alpha_text, method = "dpidbar";
  int order = 10;
  auto* c_mc = app.add_subcommand("mc", "order-by-order deformation series");
  c_mc->add_option("--alpha", alpha_text, "seed (1,1)-form, e.g. \"1 w1^v1\"")->required();
  c_mc->add_option("--order", order, "truncation order (default 10)");
  c_mc->add_option("--method", method, "representative selection: dpidbar|deldbar|none")
      ->check(CLI::IsMember({"dpidbar", "deldbar", "none"}));
  c_mc->callback([&] {
    action = [&]() -> Outcome {
      Model m = load_model(o);
      FormExpr a1(1, 1);
      try {
        a1 = parse_form_expr(m, alpha_text, 1, 1);
      } catch (const Error& e) {
        throw UsageFailure{std::string("--alpha: ") + e.what()};
      }
      try {
        if (method == "dpidbar")
          a1 = delpi_close(m, a1, CloseMethod::DpiDbar);
        else if (method == "deldbar")
          a1 = delpi_close(m, a1, CloseMethod::DelDbar);
        MCOutcome mo = solve_mc(m, a1, order);
        if (const auto* s = std::get_if<MCSeries>(&mo)) {
          auto residuals = verify_mc(m, *s);
          Tangent tg = tangent(m, s->a(1));
          return Outcome{mc_json(m, mo, &residuals, &tg), "solution"};
        }
        return Outcome{mc_json(m, mo, nullptr, nullptr), "obstruction"};
      } catch (const LemmaUnavailable& e) {
        throw UsageFailure{e.what()};
      } catch (const NotClosed& e) {
        throw UsageFailure{e.what()};
      } catch (const PreconditionViolated& e) {
        throw UsageFailure{e.what()};
      }
    };
  });

  std::string hodge_file, kunneth_file;
  auto* c_formula = app.add_subcommand(
      "formula", "total dimensions from a Hodge diamond alone");
  c_formula->add_option("--hodge", hodge_file, "diamond JSON file")->required();
  c_formula->add_option("--kunneth", kunneth_file, "second diamond to multiply in");
  c_formula->callback([&] {
    action = [&]() -> Outcome {
      Json jd;
      try {
        jd = Json::parse(read_file(hodge_file));
      } catch (const Json::parse_error& e) {
        throw UsageFailure{std::string("--hodge: ") + e.what()};
      }
      HodgeDiamond h = diamond_from_json(jd);
      if (!kunneth_file.empty()) {
        Json jd2;
        try {
          jd2 = Json::parse(read_file(kunneth_file));
        } catch (const Json::parse_error& e) {
          throw UsageFailure{std::string("--kunneth: ") + e.what()};
        }
        h = kunneth(h, diamond_from_json(jd2));
      }
      Json j;
      j["kind"] = "formula";
      j["diamond"] = diamond_json(h);
      j["kb"] = table_json(kb_from_hodge(h, h.n));
      return Outcome{j, ""};
    };
  });

  auto* c_report = app.add_subcommand("report", "every analysis in one document");
  c_report->callback([&] {
    action = [&] {
      Model m = load_model(o);
      ReportOptions ro;
      ro.with_reps = o.basis;
      ro.with_timings = o.timings;
      ro.exec = o.exec();
      return Outcome{full_report(m, ro), ""};
    };
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    require_calibrated();
#ifdef _OPENMP
    if (o.threads > 0) omp_set_num_threads(o.threads);
#endif
    return finish(o, action(), out, err);
  } catch (const UsageFailure& e) {
    err << "error: " << e.msg << "\n";
    return 2;
  } catch (const ModelFailure& e) {
    err << "error: " << e.msg << "\n";
    if (e.report) err << render_human(*e.report);
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace koszul
