#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "opequiv/cardinal.hpp"
#include "opequiv/error.hpp"
#include "opequiv/rational.hpp"
#include "opequiv/tail.hpp"

namespace opequiv {

// ---------------------------------------------------------------------------
// Bucket tails
// ---------------------------------------------------------------------------

// Rule for the bucket counts at every index j >= from. Several of these may be
// stacked on one measure (direct sums add them pointwise).
struct BucketTail {
  enum class Kind { AllZero, Constant, GeometricCount, SparseFactorial, Sequence };

  Kind kind = Kind::AllZero;
  long long from = 0;
  Cardinal constant;   // Constant
  Integer base = 0;    // GeometricCount: count(j) = base^j
  TailModel sequence;  // Sequence: bucketed terms of a singular-value tail

  static BucketTail all_zero() { return {}; }
  static BucketTail constant_count(long long from, Cardinal c) {
    BucketTail t;
    t.kind = Kind::Constant;
    t.from = from;
    t.constant = std::move(c);
    return t;
  }
  static BucketTail geometric_count(long long from, Integer base) {
    BucketTail t;
    t.kind = Kind::GeometricCount;
    t.from = from;
    t.base = std::move(base);
    return t;
  }
  static BucketTail sparse_factorial(long long from) {
    BucketTail t;
    t.kind = Kind::SparseFactorial;
    t.from = from;
    return t;
  }
  static BucketTail of_sequence(long long from, TailModel model) {
    BucketTail t;
    t.kind = Kind::Sequence;
    t.from = from;
    t.sequence = std::move(model);
    return t;
  }

  void validate() const {
    if (kind == Kind::GeometricCount && (from < 0 || base < 0))
      throw Error(ErrorCode::InvalidSpec, "geometric bucket count needs from >= 0 and base >= 0");
    if (kind == Kind::Sequence) sequence.validate();
  }

  Cardinal count(long long j, const Rational& delta) const {
    if (j < from) return 0;
    switch (kind) {
      case Kind::AllZero: return 0;
      case Kind::Constant: return constant;
      case Kind::GeometricCount: return Cardinal(opequiv::pow(base, static_cast<unsigned long long>(j)));
      case Kind::SparseFactorial: return Cardinal(TailModel::factorial_reciprocal(2).count_in_bucket(j, delta));
      case Kind::Sequence: return Cardinal(sequence.count_in_bucket(j, delta));
    }
    return 0;
  }

  // count(j, delta) for lo <= j <= hi, walking the bucket boundaries once.
  std::vector<Cardinal> counts(long long lo, long long hi, const Rational& delta) const {
    std::vector<Cardinal> out;
    if (hi < lo) return out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    if (kind != Kind::SparseFactorial && kind != Kind::Sequence) {
      for (long long j = lo; j <= hi; ++j) out.push_back(count(j, delta));
      return out;
    }
    const TailModel model = kind == Kind::Sequence ? sequence : TailModel::factorial_reciprocal(2);
    long long j = lo;
    for (; j <= hi && j < from; ++j) out.emplace_back(0);
    if (j > hi) return out;
    Rational upper = opequiv::pow(delta, j);
    Integer above = model.count_ge(upper);
    for (; j <= hi; ++j) {
      Rational lower = upper * delta;
      Integer with_bucket = model.count_ge(lower);
      out.emplace_back(with_bucket - above);
      above = std::move(with_bucket);
      upper = std::move(lower);
    }
    return out;
  }

  friend bool operator==(const BucketTail& a, const BucketTail& b) {
    return a.kind == b.kind && a.from == b.from && a.constant == b.constant && a.base == b.base &&
           a.sequence == b.sequence;
  }
};

// Asymptotic growth of bucket counts deep in the tail (j -> infinity). Windows
// far out are decided by comparing these, the explicit region by enumeration.
struct TailGrowth {
  enum class Class { Zero = 0, Sparse = 1, Linear = 2, Exponential = 3, Infinite = 4 };

  Class cls = Class::Zero;
  int multiplicity = 0;              // Sparse: number of stacked factorial tails
  Rational linear_exact = 0;         // Linear: rational part of the mean count per bucket
  std::vector<Rational> linear_geo;  // Linear: ratios r of geometric sequences (mean log_r delta each)
  // Exponential: growth per bucket, either an integer base or delta^(-1/p).
  std::optional<Integer> exp_base;
  std::optional<Rational> exp_power;
  int level = -1;  // Infinite

  double linear_mean(const Rational& delta) const {
    double m = to_double(linear_exact);
    for (const auto& r : linear_geo) m += log_abs(delta) / log_abs(r);
    return m;
  }
};

namespace detail {

// Compares two exponential growth rates exactly.
inline std::strong_ordering compare_exponential(const TailGrowth& a, const TailGrowth& b, const Rational& delta) {
  auto cmp = [](const auto& x, const auto& y) {
    if (x < y) return std::strong_ordering::less;
    if (y < x) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  };
  Rational inv = Rational(1) / delta;
  if (a.exp_base && b.exp_base) return cmp(*a.exp_base, *b.exp_base);
  if (a.exp_power && b.exp_power) return cmp(*b.exp_power, *a.exp_power);  // larger p grows slower
  // base b vs (1/delta)^(1/p) with p = u/v: compare b^u with (1/delta)^v.
  bool a_is_base = a.exp_base.has_value();
  const Integer& base = a_is_base ? *a.exp_base : *b.exp_base;
  const Rational& p = a_is_base ? *b.exp_power : *a.exp_power;
  long long u = boost::multiprecision::numerator(p).convert_to<long long>();
  long long v = boost::multiprecision::denominator(p).convert_to<long long>();
  auto ord = cmp(Rational(opequiv::pow(base, static_cast<unsigned long long>(u))), opequiv::pow(inv, v));
  return a_is_base ? ord : 0 <=> ord;
}

inline std::strong_ordering compare_linear(const TailGrowth& a, const TailGrowth& b, const Rational& delta) {
  auto geo_a = a.linear_geo, geo_b = b.linear_geo;
  std::sort(geo_a.begin(), geo_a.end());
  std::sort(geo_b.begin(), geo_b.end());
  if (geo_a == geo_b) {
    if (a.linear_exact < b.linear_exact) return std::strong_ordering::less;
    if (a.linear_exact > b.linear_exact) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  if (geo_a.size() + geo_b.size() == 1 && (geo_a.empty() ? b : a).linear_exact == 0) {
    // log_r(delta) against a rational u/v: log_r delta < u/v <=> delta^v > r^u.
    const Rational& r = geo_a.empty() ? geo_b.front() : geo_a.front();
    const Rational& q = geo_a.empty() ? a.linear_exact : b.linear_exact;
    if (q <= 0) return geo_a.empty() ? std::strong_ordering::less : std::strong_ordering::greater;
    long long u = boost::multiprecision::numerator(q).convert_to<long long>();
    long long v = boost::multiprecision::denominator(q).convert_to<long long>();
    Rational lhs = opequiv::pow(delta, v), rhs = opequiv::pow(r, u);
    std::strong_ordering geo_vs_q = lhs > rhs ? std::strong_ordering::less
                                    : lhs < rhs ? std::strong_ordering::greater
                                                : std::strong_ordering::equal;
    return geo_a.empty() ? 0 <=> geo_vs_q : geo_vs_q;
  }
  double ma = a.linear_mean(delta), mb = b.linear_mean(delta);
  if (std::abs(ma - mb) <= 1e-9 * std::max(1.0, std::abs(ma)))
    throw Error(ErrorCode::UnsupportedTailPair, "cannot decide equality of mixed geometric tail densities");
  return ma < mb ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace detail

inline TailGrowth growth_of(const BucketTail& t) {
  TailGrowth g;
  switch (t.kind) {
    case BucketTail::Kind::AllZero: break;
    case BucketTail::Kind::Constant:
      if (!t.constant.is_finite()) {
        g.cls = TailGrowth::Class::Infinite;
        g.level = t.constant.level();
      } else if (!t.constant.is_zero()) {
        g.cls = TailGrowth::Class::Linear;
        g.linear_exact = Rational(t.constant.finite());
      }
      break;
    case BucketTail::Kind::GeometricCount:
      if (t.base == 1) {
        g.cls = TailGrowth::Class::Linear;
        g.linear_exact = 1;
      } else if (t.base >= 2) {
        g.cls = TailGrowth::Class::Exponential;
        g.exp_base = t.base;
      }
      break;
    case BucketTail::Kind::SparseFactorial:
      g.cls = TailGrowth::Class::Sparse;
      g.multiplicity = 1;
      break;
    case BucketTail::Kind::Sequence:
      switch (t.sequence.kind) {
        case TailModel::Kind::Zero: break;
        case TailModel::Kind::Geometric:
          g.cls = TailGrowth::Class::Linear;
          g.linear_geo.push_back(t.sequence.r);
          break;
        case TailModel::Kind::PowerLaw:
          g.cls = TailGrowth::Class::Exponential;
          g.exp_power = t.sequence.p;
          break;
        case TailModel::Kind::FactorialReciprocal:
          g.cls = TailGrowth::Class::Sparse;
          g.multiplicity = 1;
          break;
      }
      break;
  }
  return g;
}

// Ordering of growths; used both for "which tail dominates a sum" and for the
// deep-window comparison.
inline std::strong_ordering compare_growth(const TailGrowth& a, const TailGrowth& b, const Rational& delta) {
  if (a.cls != b.cls) return static_cast<int>(a.cls) <=> static_cast<int>(b.cls);
  switch (a.cls) {
    case TailGrowth::Class::Zero: return std::strong_ordering::equal;
    case TailGrowth::Class::Sparse: return a.multiplicity <=> b.multiplicity;
    case TailGrowth::Class::Linear: return detail::compare_linear(a, b, delta);
    case TailGrowth::Class::Exponential: return detail::compare_exponential(a, b, delta);
    case TailGrowth::Class::Infinite: return a.level <=> b.level;
  }
  return std::strong_ordering::equal;
}

inline TailGrowth combine_growth(const TailGrowth& a, const TailGrowth& b, const Rational& delta) {
  if (a.cls != b.cls) return static_cast<int>(a.cls) > static_cast<int>(b.cls) ? a : b;
  TailGrowth g = a;
  switch (a.cls) {
    case TailGrowth::Class::Zero: break;
    case TailGrowth::Class::Sparse: g.multiplicity += b.multiplicity; break;
    case TailGrowth::Class::Linear:
      g.linear_exact += b.linear_exact;
      g.linear_geo.insert(g.linear_geo.end(), b.linear_geo.begin(), b.linear_geo.end());
      break;
    case TailGrowth::Class::Exponential:
      if (detail::compare_exponential(a, b, delta) < 0) g = b;
      break;
    case TailGrowth::Class::Infinite: g.level = std::max(a.level, b.level); break;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Bucket measures
// ---------------------------------------------------------------------------

// Spectral multiplicity data of a positive operator: how many dimensions of
// its spectral projection fall in each [delta^(j+1), delta^j), plus kernel and
// cokernel dimensions of the operator it came from.
struct BucketMeasure {
  Rational delta{1, 2};
  std::map<long long, Cardinal> buckets;
  std::vector<BucketTail> tails;
  Cardinal kernel_dim;
  Cardinal cokernel_dim;

  Cardinal count(long long j) const {
    Cardinal c;
    if (auto it = buckets.find(j); it != buckets.end()) c = it->second;
    for (const auto& t : tails) c += t.count(j, delta);
    return c;
  }

  // count(j) for lo <= j <= hi.
  std::vector<Cardinal> counts(long long lo, long long hi) const {
    std::vector<Cardinal> out;
    for (long long j = lo; j <= hi; ++j) {
      auto it = buckets.find(j);
      out.push_back(it == buckets.end() ? Cardinal(0) : it->second);
    }
    for (const auto& t : tails) {
      if (growth_of(t).cls == TailGrowth::Class::Zero) continue;
      auto extra = t.counts(lo, hi, delta);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += extra[i];
    }
    return out;
  }

  bool has_tail() const {
    return std::any_of(tails.begin(), tails.end(), [&](const BucketTail& t) {
      return growth_of(t).cls != TailGrowth::Class::Zero;
    });
  }

  TailGrowth growth() const {
    TailGrowth g;
    for (const auto& t : tails) g = combine_growth(g, growth_of(t), delta);
    return g;
  }

  // Smallest index that may carry a nonzero count (top of the spectrum).
  std::optional<long long> min_index() const {
    std::optional<long long> lo;
    for (const auto& [j, c] : buckets)
      if (!c.is_zero()) {
        lo = j;
        break;
      }
    for (const auto& t : tails) {
      if (growth_of(t).cls == TailGrowth::Class::Zero) continue;
      long long j = t.from;
      if (t.kind == BucketTail::Kind::GeometricCount || t.kind == BucketTail::Kind::Constant) {
        // nonzero from the start
      } else {
        while (t.count(j, delta).is_zero()) ++j;
      }
      lo = lo ? std::min(*lo, j) : j;
    }
    return lo;
  }

  // Largest explicit nonzero index or tail start; beyond it only tails act.
  long long explicit_end() const {
    long long hi = std::numeric_limits<long long>::min();
    for (const auto& [j, c] : buckets)
      if (!c.is_zero()) hi = std::max(hi, j);
    for (const auto& t : tails)
      if (growth_of(t).cls != TailGrowth::Class::Zero) hi = std::max(hi, t.from);
    return hi;
  }

  Cardinal rank() const {
    if (has_tail()) {
      TailGrowth g = growth();
      return g.cls == TailGrowth::Class::Infinite ? Cardinal::aleph(g.level) : Cardinal::aleph(0);
    }
    Cardinal total;
    for (const auto& [j, c] : buckets) total += c;
    return total;
  }

  Cardinal domain_dim() const { return kernel_dim + rank(); }
  Cardinal codomain_dim() const { return cokernel_dim + rank(); }

  // Every bucket finite-dimensional.
  bool is_compact() const {
    for (const auto& [j, c] : buckets)
      if (!c.is_finite()) return false;
    return growth().cls != TailGrowth::Class::Infinite;
  }

  // No spectrum in (0, eps) for some eps > 0.
  bool has_closed_range() const { return !has_tail(); }

  // Spectrum below delta^K has finite multiplicity in every bucket, for some K.
  bool low_part_compact() const { return growth().cls != TailGrowth::Class::Infinite; }

  void validate() const {
    require_delta(delta);
    for (const auto& t : tails) t.validate();
  }

  friend bool operator==(const BucketMeasure& a, const BucketMeasure& b) {
    auto strip = [](const std::map<long long, Cardinal>& m) {
      std::map<long long, Cardinal> out;
      for (const auto& [j, c] : m)
        if (!c.is_zero()) out.emplace(j, c);
      return out;
    };
    return a.delta == b.delta && strip(a.buckets) == strip(b.buckets) && a.tails == b.tails &&
           a.kernel_dim == b.kernel_dim && a.cokernel_dim == b.cokernel_dim;
  }
};

// Pointwise card_add of two measures.
inline BucketMeasure add_measures(const BucketMeasure& a, const BucketMeasure& b) {
  if (a.delta != b.delta) throw Error(ErrorCode::MismatchedDelta, "measures use different delta");
  BucketMeasure out = a;
  for (const auto& [j, c] : b.buckets) out.buckets[j] += c;
  for (const auto& t : b.tails)
    if (t.kind != BucketTail::Kind::AllZero) out.tails.push_back(t);
  out.kernel_dim += b.kernel_dim;
  out.cokernel_dim += b.cokernel_dim;
  return out;
}

// Measure of the identity operator on a space of dimension dim.
inline BucketMeasure identity_measure(const Rational& delta, const Cardinal& dim) {
  BucketMeasure m;
  m.delta = delta;
  if (!dim.is_zero()) m.buckets[bucket_index(Rational(1), delta)] = dim;
  return m;
}

// ---------------------------------------------------------------------------
// Operator specifications
// ---------------------------------------------------------------------------

struct OperatorSpec;
using SpecPtr = std::shared_ptr<const OperatorSpec>;

struct FiniteMatrix {
  Eigen::MatrixXcd entries;
};

struct CompactDiagonal {
  std::vector<Rational> prefix;
  TailModel tail;
  Cardinal kernel_dim;
  Cardinal cokernel_dim;
};

struct Buckets {
  BucketMeasure measure;
};

struct DirectSum {
  SpecPtr left;
  SpecPtr right;
};

struct ScaledIdentity {
  Rational value;
  Cardinal dim;
};

struct OperatorSpec {
  std::variant<FiniteMatrix, CompactDiagonal, Buckets, DirectSum, ScaledIdentity> node;
};

inline SpecPtr make_spec(FiniteMatrix m) {
  if (m.entries.rows() < 1 || m.entries.cols() < 1)
    throw Error(ErrorCode::InvalidSpec, "matrix dimensions must be at least 1");
  return std::make_shared<const OperatorSpec>(OperatorSpec{std::move(m)});
}

inline SpecPtr make_matrix(const Eigen::MatrixXd& real) { return make_spec(FiniteMatrix{real.cast<std::complex<double>>()}); }

inline SpecPtr make_spec(CompactDiagonal d) {
  d.tail.validate();
  for (std::size_t i = 0; i < d.prefix.size(); ++i) {
    if (d.prefix[i] <= 0) throw Error(ErrorCode::InvalidSpec, "prefix entries must be positive");
    if (i > 0 && d.prefix[i] > d.prefix[i - 1])
      throw Error(ErrorCode::InvalidSpec, "prefix must be nonincreasing at index " + std::to_string(i));
  }
  if (!d.tail.is_zero() && !d.prefix.empty()) {
    unsigned L = d.tail.root_degree();
    if (opequiv::pow(d.prefix.back(), static_cast<long long>(L)) < d.tail.term_power(d.tail.start, L))
      throw Error(ErrorCode::InvalidSpec, "prefix entries must dominate the first tail term");
  }
  return std::make_shared<const OperatorSpec>(OperatorSpec{std::move(d)});
}

inline SpecPtr make_spec(Buckets b) {
  b.measure.validate();
  for (const auto& t : b.measure.tails)
    for (const auto& [j, c] : b.measure.buckets)
      if (t.kind != BucketTail::Kind::AllZero && j >= t.from && !c.is_zero())
        throw Error(ErrorCode::InvalidSpec, "explicit bucket " + std::to_string(j) + " overlaps the tail");
  return std::make_shared<const OperatorSpec>(OperatorSpec{std::move(b)});
}

inline SpecPtr make_spec(ScaledIdentity s) {
  if (s.value <= 0) throw Error(ErrorCode::InvalidSpec, "scaled identity needs a positive value");
  return std::make_shared<const OperatorSpec>(OperatorSpec{std::move(s)});
}

inline SpecPtr direct_sum(SpecPtr a, SpecPtr b) {
  return std::make_shared<const OperatorSpec>(OperatorSpec{DirectSum{std::move(a), std::move(b)}});
}

inline SpecPtr compact_diagonal(std::vector<Rational> prefix, TailModel tail, Cardinal kernel = 0,
                                Cardinal cokernel = 0) {
  return make_spec(CompactDiagonal{std::move(prefix), std::move(tail), std::move(kernel), std::move(cokernel)});
}

inline SpecPtr scaled_identity(Rational value, Cardinal dim) { return make_spec(ScaledIdentity{std::move(value), std::move(dim)}); }

// Singular values of a matrix in nonincreasing order, and the numerical rank
// under the relative threshold svd_tol * sigma_max.
struct MatrixSpectrum {
  std::vector<double> singular_values;
  std::size_t rank = 0;
  double threshold = 0.0;
};

inline MatrixSpectrum matrix_spectrum(const FiniteMatrix& m, double svd_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.entries);
  MatrixSpectrum out;
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  std::sort(out.singular_values.rbegin(), out.singular_values.rend());
  double smax = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  out.threshold = svd_tol * smax;
  for (double s : out.singular_values)
    if (s > out.threshold && s > 0.0) ++out.rank;
  return out;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline BucketMeasure modulus_data(const OperatorSpec& spec, const Rational& delta, double svd_tol = 1e-9);

inline BucketMeasure modulus_data(const SpecPtr& spec, const Rational& delta, double svd_tol = 1e-9) {
  return modulus_data(*spec, delta, svd_tol);
}

inline BucketMeasure modulus_data(const OperatorSpec& spec, const Rational& delta, double svd_tol) {
  require_delta(delta);
  BucketMeasure out;
  out.delta = delta;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FiniteMatrix>) {
          MatrixSpectrum ms = matrix_spectrum(node, svd_tol);
          for (std::size_t i = 0; i < ms.rank; ++i) {
            double s = ms.singular_values[i];
            Rational exact = rational_from_double(s);
            long long j = bucket_index(exact, delta);
            for (long long b : {j, j + 1}) {
              double boundary = to_double(opequiv::pow(delta, b));
              if (std::abs(s - boundary) <= ms.threshold)
                throw Error(ErrorCode::BoundaryAmbiguity,
                            "singular value " + std::to_string(s) + " lies within svd_tol of bucket boundary " +
                                to_string(opequiv::pow(delta, b)));
            }
            out.buckets[j] += Cardinal(1);
          }
          out.kernel_dim = Cardinal(static_cast<long long>(node.entries.cols() - static_cast<long>(ms.rank)));
          out.cokernel_dim = Cardinal(static_cast<long long>(node.entries.rows() - static_cast<long>(ms.rank)));
        } else if constexpr (std::is_same_v<T, CompactDiagonal>) {
          for (const auto& v : node.prefix) out.buckets[bucket_index(v, delta)] += Cardinal(1);
          if (!node.tail.is_zero()) {
            unsigned L = node.tail.root_degree();
            Rational first = node.tail.term_power(node.tail.start, L);
            // bucket of the first term: delta^(j+1) <= first^(1/L) < delta^j
            long long j = bucket_index(root_lower_bound(first, L), delta);
            while (opequiv::pow(opequiv::pow(delta, j), static_cast<long long>(L)) <= first) --j;
            while (opequiv::pow(opequiv::pow(delta, j + 1), static_cast<long long>(L)) > first) ++j;
            Integer head = node.tail.count_ge(opequiv::pow(delta, j + 1));
            if (head > 0) out.buckets[j] += Cardinal(head);
            out.tails.push_back(BucketTail::of_sequence(j + 1, node.tail));
          }
          out.kernel_dim = node.kernel_dim;
          out.cokernel_dim = node.cokernel_dim;
        } else if constexpr (std::is_same_v<T, Buckets>) {
          if (node.measure.delta != delta)
            throw Error(ErrorCode::MismatchedDelta, "bucket spec uses delta " + to_string(node.measure.delta) +
                                                        ", requested " + to_string(delta));
          out = node.measure;
        } else if constexpr (std::is_same_v<T, ScaledIdentity>) {
          out = identity_measure(delta, Cardinal(0));
          if (!node.dim.is_zero()) out.buckets[bucket_index(node.value, delta)] = node.dim;
        } else {
          out = add_measures(modulus_data(*node.left, delta, svd_tol), modulus_data(*node.right, delta, svd_tol));
        }
      },
      spec.node);
  return out;
}

inline bool kernel_condition(const BucketMeasure& a, const BucketMeasure& b) {
  return a.kernel_dim == b.kernel_dim && a.cokernel_dim == b.cokernel_dim;
}

inline bool kernel_condition(const SpecPtr& a, const SpecPtr& b, const Rational& delta = Rational(1, 2),
                             double svd_tol = 1e-9) {
  return kernel_condition(modulus_data(a, delta, svd_tol), modulus_data(b, delta, svd_tol));
}

// Norms ||x_n|| of the components of a vector along the buckets of a diagonal
// positive operator.
struct ComponentNorms {
  enum class Kind { FiniteSupport, Geometric, PowerDecay };

  Kind kind = Kind::FiniteSupport;
  std::map<long long, Rational> finite;  // FiniteSupport: bucket -> norm
  Rational c = 0;                        // Geometric: c r^n (n >= 0); PowerDecay: c n^-p (n >= 1)
  Rational r = 0;
  Rational p = 1;
};

// Whether x lies in the range of the positive operator with the given bucket
// measure: sum_{n >= 0} delta^(-2n) ||x_n||^2 < infinity.
inline bool range_membership(const BucketMeasure& a, const ComponentNorms& x) {
  require_delta(a.delta);
  switch (x.kind) {
    case ComponentNorms::Kind::FiniteSupport:
      for (const auto& [n, norm] : x.finite)
        if (norm != 0 && a.count(n).is_zero())
          throw Error(ErrorCode::NotInSupport, "component in empty bucket " + std::to_string(n));
      return true;
    case ComponentNorms::Kind::Geometric:
    case ComponentNorms::Kind::PowerDecay: {
      if (x.c == 0) return true;
      if (!a.has_tail())
        throw Error(ErrorCode::NotInSupport, "infinitely supported vector against finitely supported spectrum");
      if (x.kind == ComponentNorms::Kind::PowerDecay) {
        if (x.p <= 0) throw Error(ErrorCode::UnsupportedTail, "power decay needs p > 0");
        // delta^(-2n) n^(-2p) grows without bound.
        return false;
      }
      if (x.r <= 0) throw Error(ErrorCode::UnsupportedTail, "geometric decay needs r > 0");
      // terms c^2 (r/delta)^(2n): a geometric series.
      return x.r < a.delta;
    }
  }
  return false;
}

}  // namespace opequiv
