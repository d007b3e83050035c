#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "opequiv/cardinal.hpp"
#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"
#include "opequiv/spectral_model.hpp"

namespace opequiv {

// A window of consecutive buckets [k, k+ell) on which one measure exceeds the
// other's widened window. ell = 0 marks a failure deep in the tails, where no
// finite window is materialized (one tail outgrows the other).
struct FailingWindow {
  long long k = 0;
  long long ell = 0;
  bool first_exceeds = true;  // false: the second measure's window is the larger one
  long long widening = 0;     // q at which the window was found
};

struct ConditionResult {
  enum class Status { Present, Absent, Inconclusive };

  Status status = Status::Absent;
  long long grid_q = 0;     // widening exponent on the bucket grid
  long long cutoff_n = 0;   // condition (S~) only: windows start at k >= cutoff_n
  Rational delta_prime;     // delta^(grid_q + 1), valid for arbitrary real intervals
  std::optional<FailingWindow> window;

  bool present() const { return status == Status::Present; }
};

struct ConditionOptions {
  long long q_max = 64;
  long long n_max = 64;
  long long margin = 48;  // buckets examined past the last explicit index
};

namespace detail {

// Bucket counts of a measure over a contiguous index range, split into a
// finite part and an infinite level (-1 when finite).
struct CountTable {
  long long first = 0;
  std::vector<Integer> finite;
  std::vector<int> level;

  CountTable(const BucketMeasure& m, long long from, long long to) : first(from) {
    for (const Cardinal& c : m.counts(from, to)) {
      level.push_back(c.level());
      finite.push_back(c.is_finite() ? c.finite() : Integer(0));
    }
  }
  const Integer& fin(long long j) const { return finite[static_cast<std::size_t>(j - first)]; }
  int lev(long long j) const { return level[static_cast<std::size_t>(j - first)]; }
};

// Checks a[k, e) <= b[k-q, e+q) for every kmin <= k < e <= horizon.
inline std::optional<FailingWindow> check_direction(const CountTable& a, const CountTable& b, long long q,
                                                    long long kmin, long long horizon, bool a_is_first) {
  auto fail = [&](long long k, long long ell) { return FailingWindow{k, ell, a_is_first, q}; };
  if (kmin >= horizon) return std::nullopt;

  // An infinite bucket needs an infinite bucket of at least its level nearby.
  for (long long i = kmin; i < horizon; ++i) {
    int need = a.lev(i);
    if (need < 0) continue;
    int best = -1;
    for (long long j = i - q; j <= i + q; ++j) best = std::max(best, b.lev(j));
    if (best < need) return fail(i, 1);
  }

  // Finite part: a's infinite buckets count 0 (settled above); b's count as
  // more than all of a together.
  Integer huge = 1;
  for (long long i = kmin; i < horizon; ++i) huge += a.fin(i);
  auto b_at = [&](long long j) -> Integer { return b.lev(j) >= 0 ? huge : b.fin(j); };

  // PA(x) = sum a over [kmin, x); PB(x) = sum b over [kmin - q, x).
  // a[k,e) <= b[k-q,e+q)  <=>  PA(e) - PB(e+q) <= PA(k) - PB(k-q).
  Integer pa = 0, pb_lag = 0, pb_lead = 0;  // PA(e), PB(e - 1 - q), PB(e + q)
  for (long long j = kmin - q; j < kmin + q; ++j) pb_lead += b_at(j);
  Integer min_y = 0;
  long long arg_k = kmin;
  bool have_y = false;
  for (long long e = kmin + 1; e <= horizon; ++e) {
    // k = e - 1 enters the running minimum.
    Integer y = pa - pb_lag;
    if (!have_y || y < min_y) {
      min_y = y;
      arg_k = e - 1;
      have_y = true;
    }
    pa += a.fin(e - 1);
    pb_lag += b_at(e - 1 - q);
    pb_lead += b_at(e - 1 + q);
    if (pa - pb_lead > min_y) return fail(arg_k, e - arg_k);
  }
  return std::nullopt;
}

struct ConditionSetup {
  bool empty = false;
  long long lo = 0;
  long long explicit_end = 0;
  bool finite_measures = false;
  std::optional<FailingWindow> deep_failure;
};

inline ConditionSetup prepare(const BucketMeasure& a, const BucketMeasure& b) {
  if (a.delta != b.delta) throw Error(ErrorCode::MismatchedDelta, "measures use different delta");
  require_delta(a.delta);
  ConditionSetup s;
  auto la = a.min_index(), lb = b.min_index();
  if (!la && !lb) {
    s.empty = true;
    return s;
  }
  s.lo = std::min(la.value_or(*lb), lb.value_or(*la));
  s.explicit_end = std::max({a.explicit_end(), b.explicit_end(), s.lo});
  TailGrowth ga = a.growth(), gb = b.growth();
  s.finite_measures = ga.cls == TailGrowth::Class::Zero && gb.cls == TailGrowth::Class::Zero;
  auto ord = compare_growth(ga, gb, a.delta);
  // Deep windows: the faster-growing tail eventually beats any widening.
  if (ord > 0) s.deep_failure = FailingWindow{s.explicit_end + 1, 0, true, 0};
  if (ord < 0) s.deep_failure = FailingWindow{s.explicit_end + 1, 0, false, 0};
  return s;
}

inline Rational delta_prime_for(const Rational& delta, long long q) { return opequiv::pow(delta, q + 1); }

}  // namespace detail

// Condition (S) on the bucket grid: the first q in 1..q_max such that for all
// windows, a[k, k+ell) <= b[k-q, k+ell+q) and symmetrically.
inline ConditionResult check_condition_S(const BucketMeasure& a, const BucketMeasure& b,
                                         const ConditionOptions& opt = {}) {
  auto setup = detail::prepare(a, b);
  ConditionResult out;
  if (setup.empty) {
    out.status = ConditionResult::Status::Present;
    out.grid_q = 1;
    out.delta_prime = detail::delta_prime_for(a.delta, 1);
    return out;
  }
  if (setup.deep_failure) {
    out.status = ConditionResult::Status::Absent;
    out.window = setup.deep_failure;
    return out;
  }
  const long long q_max = std::max<long long>(1, opt.q_max);
  const long long horizon_max = setup.explicit_end + 2 * q_max + opt.margin;
  detail::CountTable ta(a, setup.lo - q_max - 1, horizon_max + q_max + 1);
  detail::CountTable tb(b, setup.lo - q_max - 1, horizon_max + q_max + 1);
  for (long long q = 1; q <= q_max; ++q) {
    long long horizon = setup.explicit_end + 2 * q + opt.margin;
    auto w = detail::check_direction(ta, tb, q, setup.lo, horizon, true);
    if (!w) w = detail::check_direction(tb, ta, q, setup.lo, horizon, false);
    if (!w) {
      out.status = ConditionResult::Status::Present;
      out.grid_q = q;
      out.delta_prime = detail::delta_prime_for(a.delta, q);
      return out;
    }
    out.window = w;
  }
  // Finite measures stop changing once the widening covers their whole span.
  bool saturated = setup.finite_measures && q_max > setup.explicit_end - setup.lo;
  out.status = saturated ? ConditionResult::Status::Absent : ConditionResult::Status::Inconclusive;
  return out;
}

// Condition (S~): as (S) but only for windows starting at k >= N (intervals
// inside (0, delta^N)). Searches q = 1..q_max and, for each, the least N in
// 1..n_max (the condition weakens as N grows).
inline ConditionResult check_condition_S_tilde(const BucketMeasure& a, const BucketMeasure& b,
                                               const ConditionOptions& opt = {}) {
  auto setup = detail::prepare(a, b);
  ConditionResult out;
  if (setup.empty) {
    out.status = ConditionResult::Status::Present;
    out.grid_q = 1;
    out.cutoff_n = 1;
    out.delta_prime = detail::delta_prime_for(a.delta, 1);
    return out;
  }
  if (setup.deep_failure) {
    out.status = ConditionResult::Status::Absent;
    out.window = setup.deep_failure;
    return out;
  }
  const long long q_max = std::max<long long>(1, opt.q_max);
  const long long n_max = std::max<long long>(1, opt.n_max);
  const long long end = std::max(setup.explicit_end, n_max);
  const long long horizon_max = end + 2 * q_max + opt.margin;
  const long long first = std::min(setup.lo, 1LL) - q_max - 1;
  detail::CountTable ta(a, first, horizon_max + q_max + 1);
  detail::CountTable tb(b, first, horizon_max + q_max + 1);

  for (long long q = 1; q <= q_max; ++q) {
    long long horizon = end + 2 * q + opt.margin;
    auto failure_at = [&](long long n) {
      long long kmin = std::max(setup.lo, n);
      auto w = detail::check_direction(ta, tb, q, kmin, horizon, true);
      if (!w) w = detail::check_direction(tb, ta, q, kmin, horizon, false);
      return w;
    };
    if (auto w = failure_at(n_max)) {
      out.window = w;
      continue;
    }
    long long lo_n = 1, hi_n = n_max;  // hi_n passes
    while (lo_n < hi_n) {
      long long mid = lo_n + (hi_n - lo_n) / 2;
      if (failure_at(mid)) lo_n = mid + 1;
      else hi_n = mid;
    }
    out.status = ConditionResult::Status::Present;
    out.grid_q = q;
    out.cutoff_n = hi_n;
    out.delta_prime = detail::delta_prime_for(a.delta, q);
    out.window.reset();
    return out;
  }
  bool saturated = setup.finite_measures && q_max > setup.explicit_end - setup.lo;
  out.status = saturated ? ConditionResult::Status::Absent : ConditionResult::Status::Inconclusive;
  return out;
}

// Self-test: (S~) for a, b agrees with (S) for a + identity(dim_b) against
// b + identity(dim_a).
inline bool lemma_s_tilde_consistency(const BucketMeasure& a, const BucketMeasure& b, const Cardinal& dim_a,
                                      const Cardinal& dim_b, const ConditionOptions& opt = {}) {
  auto tilde = check_condition_S_tilde(a, b, opt);
  auto ext = check_condition_S(add_measures(a, identity_measure(a.delta, dim_b)),
                               add_measures(b, identity_measure(b.delta, dim_a)), opt);
  return tilde.status == ext.status;
}

}  // namespace opequiv
