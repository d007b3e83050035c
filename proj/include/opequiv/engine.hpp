#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opequiv/bucket_matcher.hpp"
#include "opequiv/conditions.hpp"
#include "opequiv/error.hpp"
#include "opequiv/sequence.hpp"
#include "opequiv/spectral_model.hpp"

namespace opequiv {

enum class Relation { Strong, ExtensionFamily };

enum class Reason { KernelMismatch, ConditionSFailed, ConditionSTildeFailed, NotComparable, Inconclusive, Established };

inline std::string to_string(Relation r) { return r == Relation::Strong ? "strong" : "extension"; }

inline std::string to_string(Reason r) {
  switch (r) {
    case Reason::KernelMismatch: return "KernelMismatch";
    case Reason::ConditionSFailed: return "ConditionSFailed";
    case Reason::ConditionSTildeFailed: return "ConditionSTildeFailed";
    case Reason::NotComparable: return "NotComparable";
    case Reason::Inconclusive: return "Inconclusive";
    case Reason::Established: return "Established";
  }
  return "?";
}

// Which operator receives the identity summand, and its dimension.
struct ExtensionSide {
  enum class Kind { None, LeftByDim, RightByDim };
  Kind kind = Kind::None;
  Cardinal dim;

  static ExtensionSide none() { return {}; }
  static ExtensionSide left(Cardinal d) { return {Kind::LeftByDim, std::move(d)}; }
  static ExtensionSide right(Cardinal d) { return {Kind::RightByDim, std::move(d)}; }

  std::string str() const {
    switch (kind) {
      case Kind::None: return "none";
      case Kind::LeftByDim: return "left:" + dim.str();
      case Kind::RightByDim: return "right:" + dim.str();
    }
    return "?";
  }
  friend bool operator==(const ExtensionSide&, const ExtensionSide&) = default;
};

struct EquivalenceWitness {
  Rational delta_prime;
  ExtensionSide extension_side;
  std::optional<long long> shift;  // t_n against s_{n+shift} (mirrored when negative)
  std::vector<long long> feasible_shifts;
  std::optional<long long> cutoff_n;  // condition (S~) cutoff delta^N
  std::optional<MatchResult> pairing;
  long long pairing_coarsening = 1;  // the pairing uses delta^coarsening buckets
};

struct Verdict {
  Relation relation = Relation::Strong;
  bool holds = false;
  Reason reason = Reason::Inconclusive;
  std::string path;  // branch of the decision procedure that settled the verdict
  std::optional<FailingWindow> window;
  std::optional<EquivalenceWitness> witness;
  bool strong_upgrade = false;  // extension family only: the pair is also strongly equivalent
};

struct EngineOptions {
  Rational delta{1, 2};
  double svd_tol = 1e-9;
  long long q_max = 64;
  long long n_max = 64;
  long long prefix_check = 256;
  long long max_shift = 16;

  ConditionOptions condition() const {
    ConditionOptions c;
    c.q_max = q_max;
    c.n_max = n_max;
    return c;
  }
};

namespace detail {

inline Verdict established(Relation rel, std::string path, EquivalenceWitness w) {
  Verdict v;
  v.relation = rel;
  v.holds = true;
  v.reason = Reason::Established;
  v.path = std::move(path);
  v.witness = std::move(w);
  return v;
}

inline Verdict refused(Relation rel, Reason reason, std::string path, std::optional<FailingWindow> window = {}) {
  Verdict v;
  v.relation = rel;
  v.reason = reason;
  v.path = std::move(path);
  v.window = window;
  return v;
}

inline Verdict from_condition(Relation rel, const ConditionResult& r, Reason failure, std::string path) {
  if (r.present()) {
    EquivalenceWitness w;
    w.delta_prime = r.delta_prime;
    if (rel == Relation::ExtensionFamily) w.cutoff_n = r.cutoff_n;
    return established(rel, std::move(path), std::move(w));
  }
  Reason reason = r.status == ConditionResult::Status::Inconclusive ? Reason::Inconclusive : failure;
  return refused(rel, reason, std::move(path), r.window);
}

// Reported delta of a shift comparison; exact agreement is reported as the
// bucket delta since any delta < 1 then works.
inline Rational reported_delta(const ShiftComparison& c, const Rational& delta) { return c.delta == 1 ? delta : c.delta; }

inline ExtensionSide side_for_shift(long long m) {
  if (m > 0) return ExtensionSide::left(Cardinal(m));
  if (m < 0) return ExtensionSide::right(Cardinal(-m));
  return ExtensionSide::none();
}

inline bool finite_dimensional(const BucketMeasure& m) {
  return m.domain_dim().is_finite() && m.codomain_dim().is_finite();
}

// The part of a spec whose spectrum can accumulate at 0: the direct sum of its
// compact summands, with infinite explicit buckets removed. Returns nullptr
// when nothing remains; throws when some summand has infinite multiplicity
// arbitrarily close to 0.
struct LowPart {
  bool compact = true;
  SpecPtr spec;
};

inline LowPart low_part(const SpecPtr& spec, const Rational& delta, double svd_tol) {
  LowPart out;
  if (const auto* sum = std::get_if<DirectSum>(&spec->node)) {
    LowPart l = low_part(sum->left, delta, svd_tol), r = low_part(sum->right, delta, svd_tol);
    out.compact = l.compact && r.compact;
    if (!l.spec) out.spec = r.spec;
    else if (!r.spec) out.spec = l.spec;
    else out.spec = direct_sum(l.spec, r.spec);
    return out;
  }
  BucketMeasure m = modulus_data(spec, delta, svd_tol);
  if (m.is_compact()) {
    out.spec = spec;
    return out;
  }
  if (!m.low_part_compact()) {
    out.compact = false;
    return out;
  }
  // finitely many infinite buckets at the top: keep the finite remainder
  if (const auto* b = std::get_if<Buckets>(&spec->node)) {
    BucketMeasure rest = b->measure;
    for (auto it = rest.buckets.begin(); it != rest.buckets.end();)
      it = it->second.is_finite() ? std::next(it) : rest.buckets.erase(it);
    rest.kernel_dim = 0;
    rest.cokernel_dim = 0;
    if (rest.min_index()) out.spec = make_spec(Buckets{rest});
  }
  return out;
}

inline std::optional<SingularSequence> sequence_of(const SpecPtr& spec, const Rational& delta, double svd_tol) {
  if (!spec) return SingularSequence{};
  return singular_sequence(spec, delta, svd_tol);
}

}  // namespace detail

// Strong equivalence: T = U S V with U, V invertible.
inline Verdict decide_strong(const SpecPtr& tt, const SpecPtr& ss, const EngineOptions& opt = {}) {
  const Relation rel = Relation::Strong;
  BucketMeasure a = modulus_data(tt, opt.delta, opt.svd_tol);
  BucketMeasure b = modulus_data(ss, opt.delta, opt.svd_tol);
  if (!kernel_condition(a, b)) return detail::refused(rel, Reason::KernelMismatch, "kernel");

  if (a.is_compact() && b.is_compact()) {
    auto sa = singular_sequence(tt, opt.delta, opt.svd_tol);
    auto sb = singular_sequence(ss, opt.delta, opt.svd_tol);
    if (sa && sb) {
      auto at_zero = compare_at_shift(*sa, *sb, 0, opt.prefix_check);
      if (!at_zero) return detail::refused(rel, Reason::NotComparable, "compact-sequences");
      EquivalenceWitness w;
      w.delta_prime = detail::reported_delta(*at_zero, opt.delta);
      auto shifts = feasible_shifts(*sa, *sb, opt.max_shift, opt.prefix_check);
      for (const auto& c : shifts) w.feasible_shifts.push_back(c.shift);
      if (auto best = best_shift(shifts)) w.shift = best->shift;
      return detail::established(rel, "compact-sequences", std::move(w));
    }
  }
  return detail::from_condition(rel, check_condition_S(a, b, opt.condition()), Reason::ConditionSFailed,
                                "condition-S");
}

// Equivalence after extension, equivalently Schur coupling or equivalence
// after one-sided extension.
inline Verdict decide_extension_family(const SpecPtr& tt, const SpecPtr& ss, const EngineOptions& opt = {}) {
  const Relation rel = Relation::ExtensionFamily;
  BucketMeasure a = modulus_data(tt, opt.delta, opt.svd_tol);
  BucketMeasure b = modulus_data(ss, opt.delta, opt.svd_tol);
  if (!kernel_condition(a, b)) return detail::refused(rel, Reason::KernelMismatch, "kernel");

  if (detail::finite_dimensional(a) && detail::finite_dimensional(b)) {
    EquivalenceWitness w;
    w.delta_prime = opt.delta * opt.delta;
    return detail::established(rel, "finite-dimensional", std::move(w));
  }
  const bool ca = a.is_compact(), cb = b.is_compact();
  // noncompact pairs of equal dimensions are then also strongly equivalent
  const bool upgradable =
      !ca && !cb && a.domain_dim() == b.domain_dim() && a.codomain_dim() == b.codomain_dim();
  if (a.has_closed_range() && b.has_closed_range()) {
    EquivalenceWitness w;
    w.delta_prime = opt.delta * opt.delta;
    Verdict v = detail::established(rel, "closed-range", std::move(w));
    v.strong_upgrade = upgradable;
    return v;
  }

  if (ca || cb) {
    // Compare the singular values of the compact side with the part of the
    // other side that accumulates at 0.
    detail::LowPart la = ca ? detail::LowPart{true, tt} : detail::low_part(tt, opt.delta, opt.svd_tol);
    detail::LowPart lb = cb ? detail::LowPart{true, ss} : detail::low_part(ss, opt.delta, opt.svd_tol);
    const std::string path = ca && cb ? "compact-sequences" : "low-part-sequences";
    if (la.compact && lb.compact) {
      auto sa = detail::sequence_of(la.spec, opt.delta, opt.svd_tol);
      auto sb = detail::sequence_of(lb.spec, opt.delta, opt.svd_tol);
      if (sa && sb) {
        auto shifts = feasible_shifts(*sa, *sb, opt.max_shift, opt.prefix_check);
        auto best = best_shift(shifts);
        if (!best) return detail::refused(rel, Reason::NotComparable, path);
        EquivalenceWitness w;
        w.delta_prime = detail::reported_delta(*best, opt.delta);
        w.shift = best->shift;
        for (const auto& c : shifts) w.feasible_shifts.push_back(c.shift);
        if (ca && cb) w.extension_side = detail::side_for_shift(best->shift);
        else if (ca) w.extension_side = ExtensionSide::left(b.rank());
        else w.extension_side = ExtensionSide::right(a.rank());
        return detail::established(rel, path, std::move(w));
      }
    }
  }

  Verdict v = detail::from_condition(rel, check_condition_S_tilde(a, b, opt.condition()),
                                     Reason::ConditionSTildeFailed, "condition-S-tilde");
  v.strong_upgrade = v.holds && upgradable;
  return v;
}

inline Verdict decide(Relation rel, const SpecPtr& tt, const SpecPtr& ss, const EngineOptions& opt = {}) {
  return rel == Relation::Strong ? decide_strong(tt, ss, opt) : decide_extension_family(tt, ss, opt);
}

namespace detail {

inline long long floor_div(long long a, long long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

inline std::optional<BucketFunction> bucket_function(const BucketMeasure& m, long long coarsening) {
  if (m.has_tail()) return std::nullopt;
  constexpr long long kMaxElements = 4096;
  BucketFunction f;
  f.delta = opequiv::pow(m.delta, coarsening);
  long long total = 0;
  for (const auto& [j, c] : m.buckets) {
    if (c.is_zero()) continue;
    if (!c.is_finite() || c.finite() > kMaxElements) return std::nullopt;
    long long n = c.finite().convert_to<long long>();
    total += n;
    if (total > kMaxElements) return std::nullopt;
    f.counts[floor_div(j, coarsening)] += n;
  }
  return f;
}

inline Rational value_bound(const BucketFunction& f) {
  Rational M = 1;
  for (const auto& [j, c] : f.counts)
    if (c > 0) M = std::max(M, Rational(opequiv::pow(f.delta, j + 1)));
  return M;
}

// Runs the matcher on coarsened buckets until its hypotheses hold.
inline std::optional<std::pair<MatchResult, long long>> match_measures(const BucketMeasure& a, const BucketMeasure& b,
                                                                       MatchMode mode, long long max_coarsening) {
  for (long long c = 1; c <= max_coarsening; ++c) {
    auto fa = bucket_function(a, c), fb = bucket_function(b, c);
    if (!fa || !fb) return std::nullopt;
    Rational M = std::max(value_bound(*fa), value_bound(*fb));
    fa->M = fb->M = M;
    long long hi = 1;
    for (const auto* f : {&*fa, &*fb})
      if (!f->counts.empty()) hi = std::max(hi, f->counts.rbegin()->first + 2);
    // least cutoff N for which the window hypotheses hold
    for (long long n = 1; n <= hi; ++n) {
      fa->N = fb->N = n;
      if (verify_hypotheses(*fa, *fb, mode == MatchMode::TwoSidedStrict))
        return std::make_pair(build_matching(*fa, *fb, mode), c);
      if (mode == MatchMode::TwoSidedStrict) break;  // N plays no role
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Constructive data for a verdict that holds. For compact pairs a shift may be
// requested; otherwise the verdict's own shift is used. Finite bucket
// instances also get a full pairing from the matcher.
inline EquivalenceWitness build_witness(const SpecPtr& tt, const SpecPtr& ss, const Verdict& verdict,
                                        std::optional<long long> requested_shift = std::nullopt,
                                        const EngineOptions& opt = {}) {
  if (!verdict.holds || !verdict.witness) throw Error(ErrorCode::WitnessUnavailable, "verdict does not hold");
  EquivalenceWitness w = *verdict.witness;
  BucketMeasure a = modulus_data(tt, opt.delta, opt.svd_tol);
  BucketMeasure b = modulus_data(ss, opt.delta, opt.svd_tol);

  if (requested_shift) {
    auto sa = a.is_compact() ? singular_sequence(tt, opt.delta, opt.svd_tol) : std::nullopt;
    auto sb = b.is_compact() ? singular_sequence(ss, opt.delta, opt.svd_tol) : std::nullopt;
    if (!sa || !sb) throw Error(ErrorCode::WitnessUnavailable, "shift witnesses need two compact sequences");
    auto c = compare_at_shift(*sa, *sb, *requested_shift, opt.prefix_check);
    if (!c) throw Error(ErrorCode::WitnessUnavailable, "sequences are not comparable at the requested shift");
    w.shift = *requested_shift;
    w.delta_prime = c->delta;
    w.extension_side = detail::side_for_shift(*requested_shift);
    return w;
  }

  const MatchMode mode = verdict.relation == Relation::Strong ? MatchMode::TwoSidedStrict : MatchMode::OneSided;
  if (auto matched = detail::match_measures(a, b, mode, 2 * opt.q_max)) {
    w.pairing = matched->first;
    w.pairing_coarsening = matched->second;
    if (verdict.relation == Relation::ExtensionFamily) {
      const auto& r = matched->first;
      if (r.case_tag == MatchCase::II) w.extension_side = ExtensionSide::left(Cardinal(r.padding));
      else if (r.case_tag == MatchCase::III) w.extension_side = ExtensionSide::right(Cardinal(r.padding));
      else w.extension_side = ExtensionSide::none();
    }
  }
  return w;
}

}  // namespace opequiv
