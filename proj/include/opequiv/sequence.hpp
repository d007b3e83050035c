#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <vector>

#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"
#include "opequiv/spectral_model.hpp"
#include "opequiv/tail.hpp"

namespace opequiv {

// Nonincreasing singular values: an explicit head followed by a closed-form
// tail. Terms of a power-law tail with p = a/b are b-th roots of rationals, so
// every term is stored as its root_degree-th power.
struct SingularSequence {
  unsigned root_degree = 1;
  std::vector<Rational> head;  // term^root_degree, nonincreasing
  TailModel tail;

  bool is_finite() const { return tail.is_zero(); }
  std::size_t head_size() const { return head.size(); }

  // term(i)^power; power must be a multiple of root_degree.
  Rational term_power(long long i, unsigned power) const {
    unsigned scale = power / root_degree;
    if (i < static_cast<long long>(head.size())) return opequiv::pow(head[static_cast<std::size_t>(i)], scale);
    if (tail.is_zero()) throw Error(ErrorCode::InternalInconsistency, "index past the end of a finite sequence");
    return tail.term_power(tail.start + i - static_cast<long long>(head.size()), power);
  }

  // Index into the tail model of sequence position i (i >= head_size()).
  long long tail_index(long long i) const { return tail.start + i - static_cast<long long>(head.size()); }
};

namespace detail {

inline SingularSequence merge_sequences(const SingularSequence& a, const SingularSequence& b) {
  if (!a.tail.is_zero() && !b.tail.is_zero())
    throw Error(ErrorCode::UnsupportedTailPair, "direct sum of two infinite singular-value tails");
  const SingularSequence& with_tail = a.tail.is_zero() ? b : a;
  SingularSequence out;
  out.tail = with_tail.tail;
  out.root_degree = with_tail.root_degree;
  auto lift = [&](const SingularSequence& s) {
    unsigned k = out.root_degree / s.root_degree;
    for (const auto& v : s.head) out.head.push_back(opequiv::pow(v, static_cast<long long>(k)));
  };
  if (a.root_degree != 1 && b.root_degree != 1 && a.root_degree != b.root_degree)
    throw Error(ErrorCode::UnsupportedTailPair, "incompatible root degrees");
  lift(a);
  lift(b);
  std::sort(out.head.rbegin(), out.head.rend());
  if (!out.tail.is_zero()) {
    // Pull tail terms forward until every head entry dominates the tail.
    while (!out.head.empty() && out.head.back() < out.tail.term_power(out.tail.start, out.root_degree)) {
      out.head.push_back(out.tail.term_power(out.tail.start, out.root_degree));
      ++out.tail.start;
      std::sort(out.head.rbegin(), out.head.rend());
    }
  }
  return out;
}

inline Rational representative(long long j, const Rational& delta) { return opequiv::pow(delta, j + 1); }

}  // namespace detail

inline std::optional<SingularSequence> singular_sequence(const OperatorSpec& spec, const Rational& delta,
                                                         double svd_tol = 1e-9);

inline std::optional<SingularSequence> singular_sequence(const SpecPtr& spec, const Rational& delta,
                                                         double svd_tol = 1e-9) {
  return singular_sequence(*spec, delta, svd_tol);
}

// The singular values of a compact spec, when they have a single closed-form
// tail. Bucket specs contribute the representative value delta^(j+1) per
// dimension of bucket j. Returns nullopt for noncompact specs and for sums of
// several infinite tails.
inline std::optional<SingularSequence> singular_sequence(const OperatorSpec& spec, const Rational& delta,
                                                         double svd_tol) {
  constexpr long long kMaxExplicit = 1 << 16;
  return std::visit(
      [&](const auto& node) -> std::optional<SingularSequence> {
        using T = std::decay_t<decltype(node)>;
        SingularSequence out;
        if constexpr (std::is_same_v<T, FiniteMatrix>) {
          MatrixSpectrum ms = matrix_spectrum(node, svd_tol);
          for (std::size_t i = 0; i < ms.rank; ++i) out.head.push_back(rational_from_double(ms.singular_values[i]));
          return out;
        } else if constexpr (std::is_same_v<T, CompactDiagonal>) {
          out.tail = node.tail;
          out.root_degree = node.tail.root_degree();
          for (const auto& v : node.prefix) out.head.push_back(opequiv::pow(v, static_cast<long long>(out.root_degree)));
          return out;
        } else if constexpr (std::is_same_v<T, ScaledIdentity>) {
          if (!node.dim.is_finite() || node.dim.finite() > kMaxExplicit) return std::nullopt;
          out.head.assign(node.dim.finite().template convert_to<std::size_t>(), node.value);
          return out;
        } else if constexpr (std::is_same_v<T, Buckets>) {
          const BucketMeasure& m = node.measure;
          if (m.has_tail()) return std::nullopt;
          for (auto it = m.buckets.begin(); it != m.buckets.end(); ++it) {
            const Cardinal& c = it->second;
            if (!c.is_finite() || c.finite() > kMaxExplicit) return std::nullopt;
            for (Integer k = 0; k < c.finite(); ++k) out.head.push_back(detail::representative(it->first, m.delta));
          }
          std::sort(out.head.rbegin(), out.head.rend());
          return out;
        } else {
          auto l = singular_sequence(*node.left, delta, svd_tol);
          auto r = singular_sequence(*node.right, delta, svd_tol);
          if (!l || !r) return std::nullopt;
          if (!l->tail.is_zero() && !r->tail.is_zero()) return std::nullopt;
          return detail::merge_sequences(*l, *r);
        }
      },
      spec.node);
}

// Outcome of comparing t_n against s_{n+shift} (shift >= 0) or t_{n-shift}
// against s_n (shift < 0).
struct ShiftComparison {
  long long shift = 0;
  // Largest rational delta found with delta <= ratio <= 1/delta for all n
  // (a lower bound within 2^-40 when terms are irrational). Equal to 1 when
  // every ratio is exactly 1.
  Rational delta;
};

namespace detail {

inline bool same_tail_family(const TailModel& a, const TailModel& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TailModel::Kind::Zero: return true;
    case TailModel::Kind::PowerLaw: return a.p == b.p;
    case TailModel::Kind::Geometric: return a.r == b.r;
    case TailModel::Kind::FactorialReciprocal: return true;
  }
  return false;
}

}  // namespace detail

namespace detail {

// Memoized term(i)^power of one sequence.
class TermTable {
 public:
  TermTable(const SingularSequence& seq, unsigned power) : seq_(seq), power_(power) {}

  const SingularSequence& sequence() const { return seq_; }

  const Rational& operator()(long long i) {
    auto idx = static_cast<std::size_t>(i);
    if (idx >= terms_.size()) terms_.resize(idx + 1);
    if (!terms_[idx]) terms_[idx] = seq_.term_power(i, power_);
    return *terms_[idx];
  }

 private:
  const SingularSequence& seq_;
  unsigned power_;
  std::vector<std::optional<Rational>> terms_;
};

inline std::optional<ShiftComparison> compare_at_shift(TermTable& tt, TermTable& st, long long shift,
                                                       long long prefix_check);

}  // namespace detail

// Decides whether (t_n) and (s_n) are comparable at a fixed shift, and if so
// returns the best delta. Ratios are checked exactly on the explicit region,
// at the first index where both sides are in their tails, and in the limit;
// in the tail region the ratio is monotone for every supported family.
inline std::optional<ShiftComparison> compare_at_shift(const SingularSequence& t, const SingularSequence& s,
                                                       long long shift, long long prefix_check = 256) {
  const unsigned L = std::lcm(t.root_degree, s.root_degree);
  detail::TermTable tt(t, L), st(s, L);
  return detail::compare_at_shift(tt, st, shift, prefix_check);
}

namespace detail {

inline std::optional<ShiftComparison> compare_at_shift(TermTable& tt, TermTable& st, long long shift,
                                                       long long prefix_check) {
  const SingularSequence& t = tt.sequence();
  const SingularSequence& s = st.sequence();
  const long long off_t = shift < 0 ? -shift : 0;
  const long long off_s = shift > 0 ? shift : 0;
  const unsigned L = std::lcm(t.root_degree, s.root_degree);
  const long long head_t = static_cast<long long>(t.head_size());
  const long long head_s = static_cast<long long>(s.head_size());

  if (t.is_finite() != s.is_finite()) return std::nullopt;
  if (t.is_finite()) {
    if (head_t - off_t != head_s - off_s) return std::nullopt;
  } else {
    if (!detail::same_tail_family(t.tail, s.tail)) return std::nullopt;
    if (t.tail.kind == TailModel::Kind::FactorialReciprocal) {
      // indices must align: t.start + n + off_t - head_t == s.start + n + off_s - head_s
      if (t.tail.start + off_t - head_t != s.tail.start + off_s - head_s) return std::nullopt;
    }
  }

  // n ranges over pairs (t_{n+off_t}, s_{n+off_s}).
  const long long pair_count = t.is_finite() ? head_t - off_t : -1;
  const long long tail_from = std::max<long long>({head_t - off_t, head_s - off_s, 0});

  Rational lo, hi;
  bool first = true;
  auto absorb = [&](const Rational& r) {
    if (first) {
      lo = hi = r;
      first = false;
    } else {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  };
  auto ratio = [&](long long n) { return tt(n + off_t) / st(n + off_s); };

  const long long explicit_end = t.is_finite() ? pair_count : tail_from + 1;
  for (long long n = 0; n < explicit_end; ++n) absorb(ratio(n));

  if (!t.is_finite()) {
    // limit of the ratio in the tail
    long long gap = s.tail_index(tail_from + off_s) - t.tail_index(tail_from + off_t);
    switch (t.tail.kind) {
      case TailModel::Kind::PowerLaw: absorb(opequiv::pow(t.tail.c / s.tail.c, static_cast<long long>(L))); break;
      case TailModel::Kind::Geometric:
        absorb(opequiv::pow(t.tail.c / s.tail.c * opequiv::pow(t.tail.r, -gap), static_cast<long long>(L)));
        break;
      case TailModel::Kind::FactorialReciprocal: absorb(Rational(1)); break;
      case TailModel::Kind::Zero: break;
    }
  }

  ShiftComparison out;
  out.shift = shift;
  if (first) {
    out.delta = 1;  // two empty sequences
    return out;
  }
  Rational bound = std::min(lo, Rational(1) / hi);
  out.delta = bound >= 1 ? Rational(1) : root_lower_bound(bound, L);

  // Independent pass over the first prefix_check pairs.
  // dL <= t/s <= 1/dL, cross-multiplied in integers
  Rational dL = opequiv::pow(out.delta, static_cast<long long>(L));
  const Integer dn = boost::multiprecision::numerator(dL), dd = boost::multiprecision::denominator(dL);
  long long limit = t.is_finite() ? pair_count : prefix_check;
  for (long long n = 0; n < limit; ++n) {
    const Rational& tv = tt(n + off_t);
    const Rational& sv = st(n + off_s);
    Integer tn = boost::multiprecision::numerator(tv) * boost::multiprecision::denominator(sv);
    Integer sn = boost::multiprecision::numerator(sv) * boost::multiprecision::denominator(tv);
    if (tn * dd < sn * dn || tn * dn > sn * dd)
      throw Error(ErrorCode::InternalInconsistency, "shift bound violated at n = " + std::to_string(n));
  }
  return out;
}

}  // namespace detail

// All shifts in [-max_shift, max_shift] at which the sequences are comparable,
// plus the analytically forced shift for finite and factorial tails when it
// lies outside that window.
inline std::vector<ShiftComparison> feasible_shifts(const SingularSequence& t, const SingularSequence& s,
                                                    long long max_shift = 16, long long prefix_check = 256) {
  std::vector<long long> candidates;
  for (long long m = -max_shift; m <= max_shift; ++m) candidates.push_back(m);
  long long head_t = static_cast<long long>(t.head_size()), head_s = static_cast<long long>(s.head_size());
  if (t.is_finite() && s.is_finite()) candidates.push_back(head_s - head_t);
  if (!t.is_finite() && t.tail.kind == TailModel::Kind::FactorialReciprocal)
    candidates.push_back((t.tail.start - head_t) - (s.tail.start - head_s));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const unsigned L = std::lcm(t.root_degree, s.root_degree);
  detail::TermTable tt(t, L), st(s, L);
  std::vector<ShiftComparison> out;
  for (long long m : candidates)
    if (auto c = detail::compare_at_shift(tt, st, m, prefix_check)) out.push_back(*c);
  return out;
}

// Best of a set of feasible shifts: largest delta, then smallest |shift|,
// then positive shift.
inline std::optional<ShiftComparison> best_shift(const std::vector<ShiftComparison>& all) {
  if (all.empty()) return std::nullopt;
  auto better = [](const ShiftComparison& a, const ShiftComparison& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    if (std::llabs(a.shift) != std::llabs(b.shift)) return std::llabs(a.shift) < std::llabs(b.shift);
    return a.shift > b.shift;
  };
  return *std::min_element(all.begin(), all.end(), better);
}

// Best shift: largest delta, then smallest |shift|, then positive shift.
inline std::optional<ShiftComparison> comparable_after_shift(const SingularSequence& t, const SingularSequence& s,
                                                             long long prefix_check = 256, long long max_shift = 16) {
  return best_shift(feasible_shifts(t, s, max_shift, prefix_check));
}

}  // namespace opequiv
