#include "wagner/jets.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace wagner::jets {

namespace {

std::uint64_t pack_exponents(std::span<const int> e) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    key |= static_cast<std::uint64_t>(e[i] & 0xF) << (4 * i);
  }
  return key;
}

int packed_exponent(std::uint64_t key, int dir) {
  return static_cast<int>((key >> (4 * dir)) & 0xF);
}

// Enumerates all exponent tuples of the given total degree in lexicographic
// order, appending them to `out`.
void enumerate_degree(int dims, int degree, std::vector<int>& scratch, int pos,
                      int remaining, std::vector<std::uint64_t>& out) {
  if (pos == dims - 1) {
    scratch[pos] = remaining;
    out.push_back(pack_exponents(scratch));
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    scratch[pos] = e;
    enumerate_degree(dims, degree, scratch, pos + 1, remaining - e, out);
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::shared_ptr<const JetContext> JetContext::create(
    std::vector<DirKind> kinds, int order) {
  const int dims = static_cast<int>(kinds.size());
  if (dims < 1 || dims > kMaxDims) {
    throw JetConfigError("jet context needs between 1 and " +
                         std::to_string(kMaxDims) + " directions, got " +
                         std::to_string(dims));
  }
  if (order < 1 || order > kMaxOrder) {
    throw JetConfigError("jet truncation order must lie in [1, " +
                         std::to_string(kMaxOrder) + "], got " +
                         std::to_string(order));
  }

  auto ctx = std::shared_ptr<JetContext>(new JetContext());
  ctx->dims_ = dims;
  ctx->order_ = order;
  ctx->kinds_ = std::move(kinds);

  std::vector<int> scratch(dims, 0);
  ctx->count_by_order_.resize(order + 1);
  for (int t = 0; t <= order; ++t) {
    enumerate_degree(dims, t, scratch, 0, t, ctx->packed_);
    ctx->count_by_order_[t] = ctx->packed_.size();
  }

  std::unordered_map<std::uint64_t, std::uint32_t> rank;
  rank.reserve(ctx->packed_.size() * 2);
  for (std::uint32_t r = 0; r < ctx->packed_.size(); ++r) {
    rank.emplace(ctx->packed_[r], r);
  }

  ctx->extract_norm_.resize(ctx->packed_.size());
  for (std::size_t r = 0; r < ctx->packed_.size(); ++r) {
    double norm = 1.0;
    for (int d = 0; d < dims; ++d) {
      norm *= factorial(packed_exponent(ctx->packed_[r], d));
    }
    ctx->extract_norm_[r] = norm;
  }

  // Product table: bucket every admissible pair (i, j) under its sum k.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> buckets(
      ctx->packed_.size());
  auto degree_of = [&](std::uint32_t r) {
    int deg = 0;
    for (int d = 0; d < dims; ++d) deg += packed_exponent(ctx->packed_[r], d);
    return deg;
  };
  std::vector<int> degree(ctx->packed_.size());
  for (std::uint32_t r = 0; r < ctx->packed_.size(); ++r)
    degree[r] = degree_of(r);
  for (std::uint32_t i = 0; i < ctx->packed_.size(); ++i) {
    for (std::uint32_t j = 0; j < ctx->packed_.size(); ++j) {
      if (degree[i] + degree[j] > order) continue;
      // Exponents are <= order < 16 in every slot, so packed addition does
      // not carry between the 4-bit fields.
      const std::uint64_t sum = ctx->packed_[i] + ctx->packed_[j];
      buckets[rank.at(sum)].emplace_back(i, j);
    }
  }
  ctx->pair_begin_.resize(ctx->packed_.size() + 1);
  std::size_t total = 0;
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    ctx->pair_begin_[k] = static_cast<std::uint32_t>(total);
    total += buckets[k].size();
  }
  ctx->pair_begin_.back() = static_cast<std::uint32_t>(total);
  ctx->pairs_.reserve(total);
  for (auto& bucket : buckets) {
    ctx->pairs_.insert(ctx->pairs_.end(), bucket.begin(), bucket.end());
  }

  ctx->shift_up_.assign(dims, std::vector<std::int32_t>(ctx->packed_.size()));
  for (int d = 0; d < dims; ++d) {
    for (std::size_t r = 0; r < ctx->packed_.size(); ++r) {
      if (degree[r] + 1 > order) {
        ctx->shift_up_[d][r] = -1;
        continue;
      }
      const std::uint64_t up = ctx->packed_[r] + (std::uint64_t{1} << (4 * d));
      auto it = rank.find(up);
      ctx->shift_up_[d][r] = it == rank.end() ? -1 : static_cast<std::int32_t>(it->second);
    }
  }
  return ctx;
}

DirKind JetContext::kind(int dir) const {
  if (dir < 0 || dir >= dims_) {
    throw JetConfigError("direction index " + std::to_string(dir) +
                         " out of range for " + std::to_string(dims_) +
                         " directions");
  }
  return kinds_[dir];
}

std::size_t JetContext::coeff_count(int t) const {
  if (t < 0) return 0;
  return count_by_order_[std::min(t, order_)];
}

std::size_t JetContext::lookup(std::uint64_t packed) const {
  // Binary search is possible, but the callers of rank_of are not hot; a
  // linear scan over at most a few thousand entries keeps the context lean.
  for (std::size_t r = 0; r < packed_.size(); ++r) {
    if (packed_[r] == packed) return r;
  }
  return static_cast<std::size_t>(-1);
}

std::size_t JetContext::rank_of(std::span<const int> exponents) const {
  if (static_cast<int>(exponents.size()) != dims_) {
    throw JetConfigError("exponent tuple has wrong number of directions");
  }
  int total = 0;
  for (int e : exponents) {
    if (e < 0) throw JetConfigError("negative exponent in multi-index");
    total += e;
  }
  if (total > order_) {
    throw JetConfigError("multi-index of order " + std::to_string(total) +
                         " exceeds context truncation order " +
                         std::to_string(order_));
  }
  const std::size_t r = lookup(pack_exponents(exponents));
  if (r == static_cast<std::size_t>(-1)) {
    throw JetConfigError("multi-index not representable in this context");
  }
  return r;
}

Jet::Jet(std::shared_ptr<const JetContext> ctx, int trunc)
    : ctx_(std::move(ctx)), trunc_(trunc), coeff_(ctx_->coeff_count(trunc), 0.0) {}

Jet Jet::constant(std::shared_ptr<const JetContext> ctx, double value) {
  const int order = ctx->order();
  Jet j(std::move(ctx), order);
  j.coeff_[0] = value;
  return j;
}

Jet seed_variable(const std::shared_ptr<const JetContext>& ctx, int dir,
                  double value, int order) {
  if (!ctx) throw JetConfigError("null jet context");
  if (dir < 0 || dir >= ctx->dims()) {
    throw JetConfigError("seed direction " + std::to_string(dir) +
                         " out of range");
  }
  const int effective = order < 0 ? ctx->order() : order;
  if (effective < 1 || effective > ctx->order()) {
    throw JetConfigError("seed order " + std::to_string(order) +
                         " outside [1, " + std::to_string(ctx->order()) + "]");
  }
  Jet j(ctx, effective);
  j.coeff_[0] = value;
  // The linear coefficient of the coordinate function itself.
  std::vector<int> e(ctx->dims(), 0);
  e[dir] = 1;
  j.coeff_[ctx->lookup(pack_exponents(e))] = 1.0;
  return j;
}

void Jet::require_same_context(const Jet& rhs) const {
  if (ctx_ != rhs.ctx_) {
    throw JetConfigError("jets from different contexts cannot be combined");
  }
}

Jet Jet::derivative(int dir) const {
  if (!ctx_) throw JetConfigError("derivative of default-constructed jet");
  if (dir < 0 || dir >= ctx_->dims()) {
    throw JetConfigError("derivative direction out of range");
  }
  if (trunc_ < 1) {
    throw JetConfigError(
        "jet truncation exhausted: cannot differentiate an order-0 jet");
  }
  Jet out(ctx_, trunc_ - 1);
  const auto& up = ctx_->shift_up_[dir];
  for (std::size_t r = 0; r < out.coeff_.size(); ++r) {
    const std::int32_t src = up[r];
    // Taylor coefficient of the derivative: (e_dir + 1) * c[idx + e_dir].
    const int mult = packed_exponent(ctx_->packed_[src], dir);
    out.coeff_[r] = mult * coeff_[src];
  }
  return out;
}

double Jet::extract(std::span<const int> dirs) const {
  if (!ctx_) throw JetConfigError("extract from default-constructed jet");
  std::vector<int> exp(ctx_->dims(), 0);
  for (int d : dirs) {
    if (d < 0 || d >= ctx_->dims()) {
      throw JetConfigError("extract direction out of range");
    }
    ++exp[d];
  }
  if (static_cast<int>(dirs.size()) > trunc_) {
    throw JetConfigError("extract of order " + std::to_string(dirs.size()) +
                         " exceeds jet truncation " + std::to_string(trunc_));
  }
  const std::size_t r = ctx_->rank_of(exp);
  return coeff_[r] * ctx_->extract_norm_[r];
}

double Jet::extract(std::initializer_list<int> dirs) const {
  return extract(std::span<const int>(dirs.begin(), dirs.size()));
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& c : out.coeff_) c = -c;
  return out;
}

Jet& Jet::operator+=(const Jet& rhs) {
  require_same_context(rhs);
  const int t = std::min(trunc_, rhs.trunc_);
  coeff_.resize(ctx_->coeff_count(t));
  trunc_ = t;
  for (std::size_t r = 0; r < coeff_.size(); ++r) coeff_[r] += rhs.coeff_[r];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  require_same_context(rhs);
  const int t = std::min(trunc_, rhs.trunc_);
  coeff_.resize(ctx_->coeff_count(t));
  trunc_ = t;
  for (std::size_t r = 0; r < coeff_.size(); ++r) coeff_[r] -= rhs.coeff_[r];
  return *this;
}

Jet& Jet::operator+=(double rhs) {
  coeff_.at(0) += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  coeff_.at(0) -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  for (double& c : coeff_) c *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) {
  if (rhs == 0.0) throw JetDomainError("jet division by zero scalar");
  for (double& c : coeff_) c /= rhs;
  return *this;
}

Jet operator*(const Jet& lhs, const Jet& rhs) {
  lhs.require_same_context(rhs);
  const auto& ctx = *lhs.ctx_;
  Jet out(lhs.ctx_, std::min(lhs.trunc_, rhs.trunc_));
  const std::size_t count = out.coeff_.size();
  for (std::size_t k = 0; k < count; ++k) {
    double acc = 0.0;
    const std::uint32_t begin = ctx.pair_begin_[k];
    const std::uint32_t end = ctx.pair_begin_[k + 1];
    for (std::uint32_t p = begin; p < end; ++p) {
      const auto [i, j] = ctx.pairs_[p];
      acc += lhs.coeff_[i] * rhs.coeff_[j];
    }
    out.coeff_[k] = acc;
  }
  return out;
}

Jet Jet::compose(const Jet& a, std::span<const double> series) {
  // Horner evaluation of sum_k series[k] * n^k where n = a - a.value() is
  // nilpotent of index trunc + 1.
  Jet n = a;
  n.coeff_[0] = 0.0;
  Jet acc = Jet::constant(a.ctx_, series.back());
  for (int k = static_cast<int>(series.size()) - 2; k >= 0; --k) {
    acc = acc * n;
    acc += series[k];
  }
  return acc;
}

Jet operator/(const Jet& lhs, const Jet& rhs) {
  lhs.require_same_context(rhs);
  return lhs * (1.0 / rhs);
}

Jet operator/(double lhs, const Jet& rhs) {
  const double b0 = rhs.value();
  if (b0 == 0.0) {
    throw JetDomainError("jet division by a jet with zero value");
  }
  std::vector<double> series(rhs.trunc_ + 1);
  double c = lhs / b0;
  series[0] = c;
  for (int k = 1; k <= rhs.trunc_; ++k) {
    c = -c / b0;
    series[k] = c;
  }
  return Jet::compose(rhs, series);
}

Jet sqrt(const Jet& a) {
  const double a0 = a.value();
  if (a0 <= 0.0) {
    throw JetDomainError("jet sqrt of a non-positive value");
  }
  std::vector<double> series(a.trunc_ + 1);
  series[0] = std::sqrt(a0);
  // d_k = binom(1/2, k) a0^{1/2 - k}
  double coef = series[0];
  for (int k = 1; k <= a.trunc_; ++k) {
    coef *= (0.5 - (k - 1)) / (k * a0);
    series[k] = coef;
  }
  return Jet::compose(a, series);
}

Jet exp(const Jet& a) {
  const double e0 = std::exp(a.value());
  std::vector<double> series(a.trunc_ + 1);
  double c = e0;
  series[0] = c;
  for (int k = 1; k <= a.trunc_; ++k) {
    c /= k;
    series[k] = c;
  }
  return Jet::compose(a, series);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (a0 <= 0.0) {
    throw JetDomainError("jet log of a non-positive value");
  }
  std::vector<double> series(a.trunc_ + 1);
  series[0] = std::log(a0);
  double c = 1.0;
  for (int k = 1; k <= a.trunc_; ++k) {
    c *= -1.0 / a0;
    series[k] = -c / k;
  }
  return Jet::compose(a, series);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> series(a.trunc_ + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.trunc_; ++k) {
    if (k > 0) fact *= k;
    series[k] = cycle[k % 4] / fact;
  }
  return Jet::compose(a, series);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> series(a.trunc_ + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.trunc_; ++k) {
    if (k > 0) fact *= k;
    series[k] = cycle[k % 4] / fact;
  }
  return Jet::compose(a, series);
}

Jet pow(const Jet& a, double p) {
  const double r = std::round(p);
  if (r == p && std::abs(p) < 64.0) {
    return pow_int(a, static_cast<long long>(r));
  }
  const double a0 = a.value();
  if (a0 <= 0.0) {
    throw JetDomainError("jet pow with non-integer exponent needs a positive base");
  }
  std::vector<double> series(a.trunc_ + 1);
  series[0] = std::pow(a0, p);
  double coef = series[0];
  for (int k = 1; k <= a.trunc_; ++k) {
    coef *= (p - (k - 1)) / (k * a0);
    series[k] = coef;
  }
  return Jet::compose(a, series);
}

Jet pow_int(const Jet& a, long long p) {
  if (p == 0) return Jet::constant(a.context(), 1.0);
  if (p < 0) return 1.0 / pow_int(a, -p);
  Jet base = a;
  Jet acc;
  bool started = false;
  for (long long e = p; e > 0; e >>= 1) {
    if (e & 1) {
      acc = started ? acc * base : base;
      started = true;
    }
    if (e > 1) base = base * base;
  }
  return acc;
}

}  // namespace wagner::jets
