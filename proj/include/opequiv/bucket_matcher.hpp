#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"

namespace opequiv {

// A finite set of positive values, bucketed: counts[j] elements lie in
// [delta^(j+1), delta^j). Each element is represented by the value delta^(j+1).
struct BucketFunction {
  Rational delta{1, 2};
  std::map<long long, long long> counts;
  long long N = 1;  // hypotheses are only required for windows starting at k >= N
  Rational M = 1;   // all values are <= M

  long long count(long long j) const {
    auto it = counts.find(j);
    return it == counts.end() ? 0 : it->second;
  }

  long long total() const {
    long long sum = 0;
    for (const auto& [j, c] : counts) sum += c;
    return sum;
  }

  long long total_below(long long n) const {
    long long sum = 0;
    for (const auto& [j, c] : counts)
      if (j < n) sum += c;
    return sum;
  }

  void validate() const {
    require_delta(delta);
    if (N < 1) throw Error(ErrorCode::InvalidSpec, "N must be at least 1");
    if (M < 1) throw Error(ErrorCode::InvalidSpec, "M must be at least 1");
    for (const auto& [j, c] : counts) {
      if (c < 0) throw Error(ErrorCode::InvalidSpec, "negative bucket count");
      if (c > 0 && opequiv::pow(delta, j + 1) > M)
        throw Error(ErrorCode::InvalidSpec, "bucket " + std::to_string(j) + " exceeds the value bound M");
    }
  }
};

// An element of a bucketed set: (bucket index, ordinal within the bucket).
// Padding elements have value 1 and bucket -1 by convention.
struct MatchElement {
  long long bucket = 0;
  long long ordinal = 0;
  bool padding = false;

  friend auto operator<=>(const MatchElement&, const MatchElement&) = default;
};

enum class MatchCase { I, II, III };
enum class MatchMode { OneSided, TwoSidedStrict };

inline std::string to_string(MatchCase c) {
  switch (c) {
    case MatchCase::I: return "I";
    case MatchCase::II: return "II";
    case MatchCase::III: return "III";
  }
  return "?";
}

struct MatchResult {
  MatchCase case_tag = MatchCase::I;
  std::vector<std::pair<MatchElement, MatchElement>> pairing;  // (tau element, sigma element)
  long long padding = 0;
  Rational delta_prime;
};

// A window [k, k+ell) whose count on one side exceeds the count of the other
// side on [k-1, k+ell].
struct HypothesisWindow {
  long long k = 0;
  long long ell = 0;
  bool tau_exceeds = true;  // false: the sigma-window exceeds the tau-window
  long long lhs = 0;
  long long rhs = 0;
};

class HypothesisViolation : public Error {
 public:
  explicit HypothesisViolation(HypothesisWindow w)
      : Error(ErrorCode::HypothesisViolation,
              std::string(w.tau_exceeds ? "tau" : "sigma") + " window k=" + std::to_string(w.k) +
                  " ell=" + std::to_string(w.ell) + ": " + std::to_string(w.lhs) + " > " + std::to_string(w.rhs)),
        window_(w) {}

  const HypothesisWindow& window() const noexcept { return window_; }

 private:
  HypothesisWindow window_;
};

namespace detail {

inline long long window_sum(const BucketFunction& f, long long from, long long to_inclusive) {
  long long sum = 0;
  for (auto it = f.counts.lower_bound(from); it != f.counts.end() && it->first <= to_inclusive; ++it) sum += it->second;
  return sum;
}

inline Rational bucket_value(const MatchElement& e, const Rational& delta) {
  return e.padding ? Rational(1) : opequiv::pow(delta, e.bucket + 1);
}

// Augmenting-path bipartite matching; left vertices are tried in order.
// Returns mate[left] = right index, or -1.
inline std::vector<int> augmenting_path_matching(const std::vector<std::vector<int>>& adj, std::size_t right_size) {
  std::vector<int> mate_left(adj.size(), -1), mate_right(right_size, -1);
  std::vector<char> seen;
  auto try_augment = [&](auto&& self, int u) -> bool {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      if (mate_right[static_cast<std::size_t>(v)] < 0 || self(self, mate_right[static_cast<std::size_t>(v)])) {
        mate_left[static_cast<std::size_t>(u)] = v;
        mate_right[static_cast<std::size_t>(v)] = u;
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < adj.size(); ++u) {
    seen.assign(right_size, 0);
    try_augment(try_augment, static_cast<int>(u));
  }
  return mate_left;
}

inline std::vector<MatchElement> elements_of(const BucketFunction& f) {
  std::vector<MatchElement> out;
  for (const auto& [j, c] : f.counts)
    for (long long i = 0; i < c; ++i) out.push_back({j, i, false});
  return out;
}

// Injection from the elements of `from` at buckets >= cutoff into `to`, each
// element sent into the three buckets around its own.
inline std::vector<int> window_injection(const std::vector<MatchElement>& from, const std::vector<MatchElement>& to,
                                         long long cutoff) {
  std::vector<std::vector<int>> adj(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i].bucket < cutoff) continue;
    for (std::size_t k = 0; k < to.size(); ++k)
      if (to[k].bucket >= from[i].bucket - 1 && to[k].bucket <= from[i].bucket + 1) adj[i].push_back(static_cast<int>(k));
  }
  auto mate = augmenting_path_matching(adj, to.size());
  for (std::size_t i = 0; i < from.size(); ++i)
    if (from[i].bucket >= cutoff && mate[i] < 0)
      throw Error(ErrorCode::InternalInconsistency, "window matching is not saturating despite the hypotheses");
  return mate;
}

}  // namespace detail

// First violated window of the hypothesis inequalities, or nullopt when they
// all hold. With all_k = false only windows starting at k >= N are checked.
inline std::optional<HypothesisWindow> find_hypothesis_violation(const BucketFunction& tau, const BucketFunction& sigma,
                                                                 bool all_k) {
  if (tau.delta != sigma.delta) throw Error(ErrorCode::MismatchedDelta, "tau and sigma use different delta");
  std::set<long long> support;
  for (const auto& [j, c] : tau.counts)
    if (c > 0) support.insert(j);
  for (const auto& [j, c] : sigma.counts)
    if (c > 0) support.insert(j);
  if (support.empty()) return std::nullopt;
  const long long lo = *support.begin(), hi = *support.rbegin();
  const long long n = std::max(tau.N, sigma.N);
  const long long k_from = all_k ? lo : std::max(lo, n);
  for (long long k = k_from; k <= hi; ++k)
    for (long long ell = 1; k + ell - 1 <= hi; ++ell) {
      long long t = detail::window_sum(tau, k, k + ell - 1);
      long long s_wide = detail::window_sum(sigma, k - 1, k + ell);
      if (t > s_wide) return HypothesisWindow{k, ell, true, t, s_wide};
      long long s = detail::window_sum(sigma, k, k + ell - 1);
      long long t_wide = detail::window_sum(tau, k - 1, k + ell);
      if (s > t_wide) return HypothesisWindow{k, ell, false, s, t_wide};
    }
  return std::nullopt;
}

inline bool verify_hypotheses(const BucketFunction& tau, const BucketFunction& sigma, bool all_k) {
  return !find_hypothesis_violation(tau, sigma, all_k).has_value();
}

inline Rational guaranteed_delta_prime(const Rational& delta, long long N, const Rational& M) {
  Rational sq = delta * delta, scaled = opequiv::pow(delta, N) / M;
  return std::min(sq, scaled);
}

// Builds a bijection between the two bucketed sets (padding one side with
// unit values when needed) such that every pair has ratio within
// [delta', 1/delta'], delta' = min(delta^2, delta^N / M).
inline MatchResult build_matching(const BucketFunction& tau, const BucketFunction& sigma, MatchMode mode) {
  tau.validate();
  sigma.validate();
  if (tau.delta != sigma.delta) throw Error(ErrorCode::MismatchedDelta, "tau and sigma use different delta");
  const bool strict = mode == MatchMode::TwoSidedStrict;
  if (auto w = find_hypothesis_violation(tau, sigma, strict)) throw HypothesisViolation(*w);

  const Rational& delta = tau.delta;
  const long long N = std::max(tau.N, sigma.N);
  const Rational M = std::max(tau.M, sigma.M);
  // Elements at buckets >= cutoff form T' and S'.
  const long long cutoff = strict ? std::numeric_limits<long long>::min() : N;

  const auto T = detail::elements_of(tau);
  const auto S = detail::elements_of(sigma);
  const auto phi = detail::window_injection(T, S, cutoff);  // T' -> S
  const auto psi = detail::window_injection(S, T, cutoff);  // S' -> T

  auto in_T_prime = [&](std::size_t i) { return T[i].bucket >= cutoff; };
  auto in_S_prime = [&](std::size_t k) { return S[k].bucket >= cutoff; };

  // Least fixed point of E -> T \ psi[(S \ phi(E & T')) & S'], iterated from the empty set.
  std::vector<char> E(T.size(), 0);
  while (true) {
    std::vector<char> hit(S.size(), 0);  // phi(E & T')
    for (std::size_t i = 0; i < T.size(); ++i)
      if (E[i] && in_T_prime(i)) hit[static_cast<std::size_t>(phi[i])] = 1;
    std::vector<char> next(T.size(), 1);
    for (std::size_t k = 0; k < S.size(); ++k)
      if (!hit[k] && in_S_prime(k)) next[static_cast<std::size_t>(psi[k])] = 0;
    if (next == E) break;
    E = std::move(next);
  }

  std::vector<char> in_G2(S.size(), 0);
  for (std::size_t i = 0; i < T.size(); ++i)
    if (E[i] && in_T_prime(i)) in_G2[static_cast<std::size_t>(phi[i])] = 1;

  MatchResult out;
  out.delta_prime = guaranteed_delta_prime(delta, N, M);
  std::vector<char> s_used(S.size(), 0);
  std::vector<MatchElement> F3;
  // F2 = E & T' goes through phi.
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!E[i]) continue;
    if (in_T_prime(i)) {
      out.pairing.emplace_back(T[i], S[static_cast<std::size_t>(phi[i])]);
      s_used[static_cast<std::size_t>(phi[i])] = 1;
    } else {
      F3.push_back(T[i]);
    }
  }
  // F1 = T \ E is the psi-image of G1 = (S \ G2) & S'.
  std::vector<char> t_covered(T.size(), 0);
  for (std::size_t k = 0; k < S.size(); ++k) {
    if (in_G2[k] || !in_S_prime(k)) continue;
    auto i = static_cast<std::size_t>(psi[k]);
    out.pairing.emplace_back(T[i], S[k]);
    s_used[k] = 1;
    t_covered[i] = 1;
  }
  for (std::size_t i = 0; i < T.size(); ++i)
    if (!E[i] && !t_covered[i]) throw Error(ErrorCode::InternalInconsistency, "fixed point does not split T");

  std::vector<MatchElement> G3;
  for (std::size_t k = 0; k < S.size(); ++k)
    if (!s_used[k]) G3.push_back(S[k]);

  const std::size_t common = std::min(F3.size(), G3.size());
  for (std::size_t i = 0; i < common; ++i) out.pairing.emplace_back(F3[i], G3[i]);
  if (F3.size() < G3.size()) {
    out.case_tag = MatchCase::II;
    out.padding = static_cast<long long>(G3.size() - F3.size());
    for (std::size_t i = common; i < G3.size(); ++i)
      out.pairing.emplace_back(MatchElement{-1, static_cast<long long>(i - common), true}, G3[i]);
  } else if (F3.size() > G3.size()) {
    out.case_tag = MatchCase::III;
    out.padding = static_cast<long long>(F3.size() - G3.size());
    for (std::size_t i = common; i < F3.size(); ++i)
      out.pairing.emplace_back(F3[i], MatchElement{-1, static_cast<long long>(i - common), true});
  }
  if (strict && out.padding != 0)
    throw Error(ErrorCode::InternalInconsistency, "two-sided matching required padding");

  std::sort(out.pairing.begin(), out.pairing.end());
  for (const auto& [t, s] : out.pairing) {
    Rational ratio = detail::bucket_value(t, delta) / detail::bucket_value(s, delta);
    if (ratio < out.delta_prime || ratio * out.delta_prime > 1)
      throw Error(ErrorCode::InternalInconsistency, "pair violates the delta' bound");
  }
  return out;
}

}  // namespace opequiv
