#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wagner::jets {

// Truncated multivariate Taylor jets.
//
// A Jet holds the Taylor coefficients of a smooth function at a point, over a
// declared set of active directions, up to a truncation order. Arithmetic on
// jets is arithmetic in the quotient ring R[h1..hd]/(h^{order+1}); every
// operation propagates exact derivatives (up to rounding), so no step-size
// tuning is involved anywhere downstream.
//
// Directions are tagged Base (a manifold coordinate) or Fiber (a velocity
// coordinate). The tags carry no algebraic meaning; they only let callers ask
// "which directions are fiber directions" when wiring evaluation contexts.

enum class DirKind : std::uint8_t { Base, Fiber };

class JetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Division by a jet with zero value, sqrt/log of a non-positive value, and
// similar singular compositions.
class JetDomainError : public JetError {
 public:
  using JetError::JetError;
};

// Seeding or extracting beyond the declared truncation order, mismatched
// contexts, bad direction indices.
class JetConfigError : public JetError {
 public:
  using JetError::JetError;
};

class Jet;

// Immutable description of an evaluation context: the active directions, the
// truncation order, and the precomputed multiplication tables. Shared between
// all jets of one computation; safe to use from several threads at once.
class JetContext : public std::enable_shared_from_this<JetContext> {
 public:
  static constexpr int kMaxOrder = 6;
  static constexpr int kMaxDims = 16;

  static std::shared_ptr<const JetContext> create(std::vector<DirKind> kinds,
                                                  int order);

  int dims() const { return dims_; }
  int order() const { return order_; }
  DirKind kind(int dir) const;

  // Number of multi-indices with total degree <= t (they occupy the leading
  // ranks of the coefficient array).
  std::size_t coeff_count(int t) const;

  // Rank of a multi-index given as per-direction exponents; throws if the
  // index is not representable in this context.
  std::size_t rank_of(std::span<const int> exponents) const;

 private:
  JetContext() = default;
  friend class Jet;
  friend Jet operator*(const Jet&, const Jet&);
  friend Jet seed_variable(const std::shared_ptr<const JetContext>&, int,
                           double, int);

  int dims_ = 0;
  int order_ = 0;
  std::vector<DirKind> kinds_;

  // Multi-indices in graded order (degree-major); exponents packed 4 bits per
  // direction.
  std::vector<std::uint64_t> packed_;
  std::vector<std::size_t> count_by_order_;  // coeff_count(t) for t = 0..order
  std::vector<double> extract_norm_;         // prod of exponent factorials

  // Product table grouped by result rank: pairs_[pair_begin_[k]..k+1) lists
  // all (i, j) with index(i) + index(j) == index(k).
  std::vector<std::uint32_t> pair_begin_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;

  // shift_up_[dir][rank] = rank of index + e_dir, or -1 past the truncation.
  std::vector<std::vector<std::int32_t>> shift_up_;

  std::size_t lookup(std::uint64_t packed) const;  // ~0 if absent
};

// Value-semantic truncated jet. `trunc()` is the order up to which the stored
// coefficients are the exact Taylor coefficients of the represented function;
// it shrinks under differentiation and under combination with lower-order
// operands, and extraction past it is an error instead of a wrong number.
class Jet {
 public:
  Jet() = default;

  static Jet constant(std::shared_ptr<const JetContext> ctx, double value);

  const std::shared_ptr<const JetContext>& context() const { return ctx_; }
  int trunc() const { return trunc_; }
  double value() const { return coeff_.empty() ? 0.0 : coeff_[0]; }

  // Jet of the partial derivative in `dir`; truncation drops by one.
  Jet derivative(int dir) const;

  // Mixed partial derivative (multiplicities allowed), e.g. {0, 0, 3} is
  // d^2/dx0^2 d/dx3. Normalized as a derivative, not a Taylor coefficient.
  double extract(std::span<const int> dirs) const;
  double extract(std::initializer_list<int> dirs) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
  friend Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
  friend Jet operator-(double lhs, const Jet& rhs) { return -rhs + lhs; }
  friend Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
  friend Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
  friend Jet operator/(Jet lhs, double rhs) { return lhs /= rhs; }
  friend Jet operator*(const Jet& lhs, const Jet& rhs);
  friend Jet operator/(const Jet& lhs, const Jet& rhs);
  friend Jet operator/(double lhs, const Jet& rhs);

  friend Jet sqrt(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet pow(const Jet& a, double p);
  friend Jet pow_int(const Jet& a, long long p);

 private:
  friend class JetContext;
  friend Jet seed_variable(const std::shared_ptr<const JetContext>&, int,
                           double, int);

  Jet(std::shared_ptr<const JetContext> ctx, int trunc);

  // Composition with a univariate power series sum_k series[k] * (a - a0)^k.
  static Jet compose(const Jet& a, std::span<const double> series);
  void require_same_context(const Jet& rhs) const;

  std::shared_ptr<const JetContext> ctx_;
  int trunc_ = 0;
  std::vector<double> coeff_;  // Taylor coefficients, graded rank order
};

// A jet representing the coordinate function of `dir` at `value`, exact up to
// `order` (defaults to the full context order; must be within [1, order]).
Jet seed_variable(const std::shared_ptr<const JetContext>& ctx, int dir,
                  double value, int order = -1);

// Namespace-scope redeclarations of the hidden friends, so qualified lookup
// (jets::sqrt etc.) works outside this header.
Jet operator*(const Jet& lhs, const Jet& rhs);
Jet operator/(const Jet& lhs, const Jet& rhs);
Jet operator/(double lhs, const Jet& rhs);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, double p);
Jet pow_int(const Jet& a, long long p);

}  // namespace wagner::jets
