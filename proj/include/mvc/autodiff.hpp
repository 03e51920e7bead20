#pragma once

// Scalar reverse-mode differentiation on an append-only tape.
//
// A Scalar behaves like a double when no tape is active (or when it was
// built from constants), so the same numeric code serves both the plain
// and the differentiated execution paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mvc/errors.hpp"

namespace mvc::ad {

class Tape {
 public:
  // Two-parent node: d(out)/d(parent_a) = wa, d(out)/d(parent_b) = wb.
  // Affine offsets need no node at all and n-ary ops decompose.
  struct Node {
    double wa, wb;
    std::int32_t a, b;
  };

  Tape() = default;

  void reserve(std::size_t n) { nodes_.reserve(n); }

  void clear() {
    nodes_.clear();
    adj_.clear();
  }

  std::size_t size() const { return nodes_.size(); }

  std::int32_t leaf() {
    nodes_.push_back({0.0, 0.0, -1, -1});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t push1(std::int32_t a, double wa) {
    nodes_.push_back({wa, 0.0, a, -1});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t push2(std::int32_t a, double wa, std::int32_t b, double wb) {
    nodes_.push_back({wa, wb, a, b});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  // Reverse sweep in strict append order; seeds d(root)/d(root) = 1.
  void backward(std::int32_t root) {
    adj_.assign(nodes_.size(), 0.0);
    if (root < 0 || root >= static_cast<std::int32_t>(nodes_.size()))
      throw Error("Tape::backward: root node out of range");
    adj_[static_cast<std::size_t>(root)] = 1.0;
    for (std::int32_t i = root; i >= 0; --i) {
      const double g = adj_[static_cast<std::size_t>(i)];
      if (g == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.a >= 0) adj_[static_cast<std::size_t>(n.a)] += n.wa * g;
      if (n.b >= 0) adj_[static_cast<std::size_t>(n.b)] += n.wb * g;
    }
  }

  double adjoint(std::int32_t node) const {
    if (node < 0 || static_cast<std::size_t>(node) >= adj_.size()) return 0.0;
    return adj_[static_cast<std::size_t>(node)];
  }

 private:
  std::vector<Node> nodes_;
  std::vector<double> adj_;
};

namespace detail {
inline Tape*& active_tape_slot() {
  thread_local Tape* t = nullptr;
  return t;
}
}  // namespace detail

inline Tape* active_tape() { return detail::active_tape_slot(); }

// RAII activation; tapes are per-thread and never shared.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape) : prev_(detail::active_tape_slot()) {
    detail::active_tape_slot() = &tape;
  }
  ~TapeScope() { detail::active_tape_slot() = prev_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

[[noreturn]] inline void throw_nonfinite(const char* op) {
  throw NonFiniteValue(std::string("non-finite value produced by op '") + op +
                       "'");
}

class Scalar {
 public:
  Scalar() = default;
  Scalar(double v) : v_(v) {}  // NOLINT: implicit by design, constants abound

  static Scalar leaf(double v) {
    Tape* t = active_tape();
    if (!t) return Scalar(v);
    return Scalar(v, t->leaf());
  }

  double value() const { return v_; }
  std::int32_t node() const { return idx_; }
  bool tracked() const { return idx_ >= 0; }

  static Scalar raw(double v, std::int32_t idx) { return Scalar(v, idx); }

 private:
  Scalar(double v, std::int32_t idx) : v_(v), idx_(idx) {}

  double v_ = 0.0;
  std::int32_t idx_ = -1;
};

namespace detail {
inline Scalar record1(double v, const Scalar& a, double wa, const char* op) {
  if (!std::isfinite(v)) throw_nonfinite(op);
  Tape* t = active_tape();
  if (!t || !a.tracked()) return Scalar(v);
  return Scalar::raw(v, t->push1(a.node(), wa));
}

inline Scalar record2(double v, const Scalar& a, double wa, const Scalar& b,
                      double wb, const char* op) {
  if (!std::isfinite(v)) throw_nonfinite(op);
  Tape* t = active_tape();
  if (!t) return Scalar(v);
  const bool ta = a.tracked(), tb = b.tracked();
  if (ta && tb) return Scalar::raw(v, t->push2(a.node(), wa, b.node(), wb));
  if (ta) return Scalar::raw(v, t->push1(a.node(), wa));
  if (tb) return Scalar::raw(v, t->push1(b.node(), wb));
  return Scalar(v);
}
}  // namespace detail

// Constant offsets reuse the operand's node: d(x + c)/dx = 1.
inline Scalar operator+(const Scalar& x, double c) {
  const double v = x.value() + c;
  if (!std::isfinite(v)) throw_nonfinite("add");
  return Scalar::raw(v, x.node());
}
inline Scalar operator+(double c, const Scalar& x) { return x + c; }
inline Scalar operator-(const Scalar& x, double c) { return x + (-c); }

inline Scalar operator+(const Scalar& a, const Scalar& b) {
  return detail::record2(a.value() + b.value(), a, 1.0, b, 1.0, "add");
}
inline Scalar operator-(const Scalar& a, const Scalar& b) {
  return detail::record2(a.value() - b.value(), a, 1.0, b, -1.0, "sub");
}
inline Scalar operator-(double c, const Scalar& x) {
  return detail::record1(c - x.value(), x, -1.0, "sub");
}
inline Scalar operator-(const Scalar& x) {
  return detail::record1(-x.value(), x, -1.0, "neg");
}

inline Scalar operator*(const Scalar& a, const Scalar& b) {
  return detail::record2(a.value() * b.value(), a, b.value(), b, a.value(),
                         "mul");
}
inline Scalar operator*(const Scalar& x, double c) {
  return detail::record1(x.value() * c, x, c, "mul");
}
inline Scalar operator*(double c, const Scalar& x) { return x * c; }

inline Scalar operator/(const Scalar& a, const Scalar& b) {
  const double inv = 1.0 / b.value();
  return detail::record2(a.value() * inv, a, inv, b,
                         -a.value() * inv * inv, "div");
}
inline Scalar operator/(const Scalar& x, double c) { return x * (1.0 / c); }
inline Scalar operator/(double c, const Scalar& x) {
  const double inv = 1.0 / x.value();
  return detail::record1(c * inv, x, -c * inv * inv, "div");
}

inline Scalar& operator+=(Scalar& a, const Scalar& b) { return a = a + b; }
inline Scalar& operator-=(Scalar& a, const Scalar& b) { return a = a - b; }
inline Scalar& operator*=(Scalar& a, const Scalar& b) { return a = a * b; }

inline bool operator<(const Scalar& a, const Scalar& b) {
  return a.value() < b.value();
}
inline bool operator>(const Scalar& a, const Scalar& b) {
  return a.value() > b.value();
}

inline Scalar exp(const Scalar& x) {
  const double v = std::exp(x.value());
  return detail::record1(v, x, v, "exp");
}

inline Scalar log(const Scalar& x) {
  return detail::record1(std::log(x.value()), x, 1.0 / x.value(), "log");
}

inline Scalar sqrt(const Scalar& x) {
  const double v = std::sqrt(x.value());
  return detail::record1(v, x, 0.5 / v, "sqrt");
}

inline Scalar reciprocal(const Scalar& x) { return 1.0 / x; }

inline Scalar abs(const Scalar& x) {
  return detail::record1(std::fabs(x.value()), x,
                         x.value() >= 0.0 ? 1.0 : -1.0, "abs");
}

// Ties pick the first argument (subgradient convention).
inline Scalar max(const Scalar& a, const Scalar& b) {
  if (a.value() >= b.value())
    return detail::record1(a.value(), a, 1.0, "max");
  return detail::record1(b.value(), b, 1.0, "max");
}
inline Scalar min(const Scalar& a, const Scalar& b) {
  if (a.value() <= b.value())
    return detail::record1(a.value(), a, 1.0, "min");
  return detail::record1(b.value(), b, 1.0, "min");
}

inline Scalar logistic(const Scalar& x) {
  const double v = x.value();
  const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                            : std::exp(v) / (1.0 + std::exp(v));
  return detail::record1(s, x, s * (1.0 - s), "logistic");
}

inline Scalar tanh(const Scalar& x) {
  const double t = std::tanh(x.value());
  return detail::record1(t, x, 1.0 - t * t, "tanh");
}

inline Scalar clamp01(const Scalar& x) {
  return min(max(x, Scalar(0.0)), Scalar(1.0));
}

// Stop-gradient marker: first-class, used for importance-sampling k and
// the frozen inpainter.
inline Scalar detach(const Scalar& x) { return Scalar(x.value()); }

inline double floor_value(const Scalar& x) { return std::floor(x.value()); }

// --- Gradient driver and finite-difference verifier -----------------------

using ScalarFn = std::function<Scalar(std::span<const Scalar>)>;

// Exact reverse-mode gradient of f at x.
std::vector<double> grad(const ScalarFn& f, std::span<const double> x);

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t argmax = 0;
  bool passed = true;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Central differences per coordinate; relative error uses denominator
// max(|analytic|, |numeric|, 1e-8).
GradCheckReport check_grad(const ScalarFn& f, std::span<const double> x,
                           double h, double tol);

}  // namespace mvc::ad
