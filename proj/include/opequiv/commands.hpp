#pragma once

#include <sstream>
#include <string>

#include "opequiv/json_io.hpp"

namespace opequiv {

enum class Command { Decide, Match, Inspect };

// Exit codes of the command-line tool.
enum ExitCode : int { kHolds = 0, kFails = 1, kErrorOrInconclusive = 2 };

struct CommandResult {
  Json report;
  std::string text;
  int exit_code = kErrorOrInconclusive;
};

inline Json error_json(const Error& e) { return {{"error", to_string(e.code())}, {"message", e.what()}}; }

namespace detail {

inline BucketFunction bucket_function_of(const SpecPtr& spec, const SpecDocument& doc, const char* side) {
  const auto* b = std::get_if<Buckets>(&spec->node);
  if (!b) throw Error(ErrorCode::SchemaViolation, std::string("at /") + side + ": match needs a \"buckets\" operator");
  const BucketMeasure& m = b->measure;
  if (m.has_tail()) throw Error(ErrorCode::UnsupportedTail, std::string("at /") + side + ": match needs finite buckets");
  BucketFunction f;
  f.delta = m.delta;
  f.N = doc.match_N;
  f.M = doc.match_M;
  for (const auto& [j, c] : m.buckets) {
    if (c.is_zero()) continue;
    if (!c.is_finite() || c.finite() > 1'000'000)
      throw Error(ErrorCode::UnsupportedTail, std::string("at /") + side + ": bucket counts must be small and finite");
    f.counts[j] = c.finite().convert_to<long long>();
  }
  return f;
}

inline std::string verdict_text(const Verdict& v) {
  std::ostringstream os;
  os << "relation: " << to_string(v.relation) << "\n"
     << "holds: " << (v.holds ? "yes" : "no") << "\n"
     << "reason: " << to_string(v.reason) << " (" << v.path << ")\n";
  if (v.window)
    os << "failing window: k=" << v.window->k << " ell=" << v.window->ell << " exceeding="
       << (v.window->first_exceeds ? "T" : "S") << "\n";
  if (v.witness) {
    const auto& w = *v.witness;
    os << "delta': " << to_string(w.delta_prime) << "\n"
       << "extension: " << w.extension_side.str() << "\n";
    if (w.shift) os << "shift: " << *w.shift << "\n";
    if (w.cutoff_n) os << "cutoff N: " << *w.cutoff_n << "\n";
    if (w.pairing)
      os << "pairing: case " << to_string(w.pairing->case_tag) << ", " << w.pairing->pairing.size() << " pairs, padding "
         << w.pairing->padding << "\n";
  }
  if (v.strong_upgrade) os << "also strongly equivalent\n";
  return os.str();
}

}  // namespace detail

// Decision with the constructive witness attached when the relation holds.
inline Verdict decide_with_witness(const SpecDocument& doc) {
  Verdict v = decide(doc.relation, doc.T, doc.S, doc.options);
  if (v.holds) {
    try {
      v.witness = build_witness(doc.T, doc.S, v, std::nullopt, doc.options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WitnessUnavailable) throw;
    }
  }
  return v;
}

inline CommandResult run_command(Command cmd, const SpecDocument& doc) {
  CommandResult out;
  switch (cmd) {
    case Command::Decide: {
      Verdict v = decide_with_witness(doc);
      out.report = verdict_json(v);
      out.text = detail::verdict_text(v);
      out.exit_code = v.holds ? kHolds : v.reason == Reason::Inconclusive ? kErrorOrInconclusive : kFails;
      break;
    }
    case Command::Match: {
      BucketFunction tau = detail::bucket_function_of(doc.T, doc, "T");
      BucketFunction sigma = detail::bucket_function_of(doc.S, doc, "S");
      try {
        MatchResult r = build_matching(tau, sigma, doc.match_mode);
        out.report = {{"holds", true}, {"match", match_json(r)}};
        out.text = "case " + to_string(r.case_tag) + ", " + std::to_string(r.pairing.size()) + " pairs, padding " +
                   std::to_string(r.padding) + ", delta' " + to_string(r.delta_prime) + "\n";
        out.exit_code = kHolds;
      } catch (const HypothesisViolation& e) {
        const auto& w = e.window();
        out.report = {{"holds", false},
                      {"reason", "HypothesisViolation"},
                      {"window", {{"k", w.k}, {"ell", w.ell}, {"exceeding", w.tau_exceeds ? "T" : "S"}}}};
        out.text = std::string("hypotheses fail: ") + e.what() + "\n";
        out.exit_code = kFails;
      }
      break;
    }
    case Command::Inspect: {
      BucketMeasure a = modulus_data(doc.T, doc.options.delta, doc.options.svd_tol);
      BucketMeasure b = modulus_data(doc.S, doc.options.delta, doc.options.svd_tol);
      out.report = {{"T", measure_json(a)}, {"S", measure_json(b)}};
      out.text = "T: " + measure_json(a).dump() + "\nS: " + measure_json(b).dump() + "\n";
      out.exit_code = kHolds;
      break;
    }
  }
  return out;
}

}  // namespace opequiv
