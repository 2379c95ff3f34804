#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lrlab/geometry.hpp"

namespace lrlab {

/// Value and partial derivatives (up to third order) of a scalar function at a point.
/// Only entries up to `order` are meaningful.
struct Jet {
  int order = 0;
  double v = 0.0;
  std::array<double, kMaxDim> d1{};
  std::array<double, kMaxDim * kMaxDim> d2{};
  std::array<double, kMaxDim * kMaxDim * kMaxDim> d3{};

  double grad(int i) const { return d1[i]; }
  double hess(int i, int j) const { return d2[i * kMaxDim + j]; }
  double third(int i, int j, int k) const { return d3[(i * kMaxDim + j) * kMaxDim + k]; }

  /// this += s * other, over the derivative orders both carry.
  void add_scaled(double s, const Jet& other);
};

/// Immutable closed-form scalar field on spacetime with exact derivatives.
/// Cheap to copy (shared node). A default-constructed field is empty.
class AnalyticField {
 public:
  struct Node {
    virtual ~Node() = default;
    virtual Jet eval(const Point& p, int order) const = 0;
    virtual int max_order() const = 0;
    /// Closed box outside of which the field and all its derivatives vanish; nullopt if unbounded.
    virtual std::optional<Box> support() const = 0;
  };

  AnalyticField() = default;
  AnalyticField(int dim, std::shared_ptr<const Node> node) : dim_(dim), node_(std::move(node)) {}

  static AnalyticField zero(int dim);
  static AnalyticField constant(int dim, double c);
  /// Wraps a user callback. The callback must fill the jet up to the requested order.
  static AnalyticField from_function(int dim, int max_order,
                                     std::function<Jet(const Point&, int)> fn,
                                     std::optional<Box> support = std::nullopt);

  bool valid() const { return static_cast<bool>(node_); }
  int dim() const { return dim_; }
  int max_order() const { return node_ ? node_->max_order() : -1; }
  std::optional<Box> support() const { return node_->support(); }

  Jet eval(const Point& p, int order) const;
  double value(const Point& p) const { return eval(p, 0).v; }

  /// Partial derivative along spacetime axis `axis` (0 = t).
  AnalyticField partial(int axis) const;

  friend AnalyticField operator+(const AnalyticField& a, const AnalyticField& b);
  friend AnalyticField operator-(const AnalyticField& a, const AnalyticField& b);
  friend AnalyticField operator*(double s, const AnalyticField& a);
  friend AnalyticField operator*(const AnalyticField& a, const AnalyticField& b);

  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  int dim_ = 0;
  std::shared_ptr<const Node> node_;
};

}  // namespace lrlab
