#pragma once

#include <json.hpp>
#include <string>

#include "koszul/lemmas.hpp"
#include "koszul/mc.hpp"

namespace koszul {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "koszul";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "koszul-report/1";

struct ReportOptions {
  bool with_reps = false;
  bool with_timings = false;  // off by default: report bytes stay reproducible
  Exec exec = Exec::Parallel;
};

Json model_json(const Model& m);
Json validation_json(const ValidationReport& rep);
Json table_json(const CohomologyTable& t);
Json diamond_json(const HodgeDiamond& h);
Json lemma_json(const LemmaVerdict& v);
Json degeneracy_json(const DegeneracyVerdict& v);
Json bc_aeppli_json(const BcAeppliVerdict& v);
Json unimodular_json(const UnimodularVerdict& v);
Json formality_json(const FormalityReport& v);
Json mc_json(const Model& m, const MCOutcome& out,
             const std::vector<MCResidual>* residuals, const Tangent* tg);

/// Reads a diamond back from diamond_json output (used by formula mode).
HodgeDiamond diamond_from_json(const Json& j);

/// Runs every analysis on a validated model.
Json full_report(const Model& m, const ReportOptions& opt);

/// Renders any of the documents above (or the full report) as plain text.
/// The CLI always renders from the JSON document, so --json emits exactly the
/// data the human output was produced from.
std::string render_human(const Json& j);

}  // namespace koszul
