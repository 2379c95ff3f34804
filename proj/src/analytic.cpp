#include "lrlab/analytic.hpp"

#include <algorithm>
#include <string>

#include "lrlab/error.hpp"

namespace lrlab {

void Jet::add_scaled(double s, const Jet& other) {
  const int o = std::min(order, other.order);
  v += s * other.v;
  if (o >= 1)
    for (std::size_t i = 0; i < d1.size(); ++i) d1[i] += s * other.d1[i];
  if (o >= 2)
    for (std::size_t i = 0; i < d2.size(); ++i) d2[i] += s * other.d2[i];
  if (o >= 3)
    for (std::size_t i = 0; i < d3.size(); ++i) d3[i] += s * other.d3[i];
}

namespace {

struct ConstantNode final : AnalyticField::Node {
  double c;
  explicit ConstantNode(double value) : c(value) {}
  Jet eval(const Point&, int order) const override {
    Jet j;
    j.order = order;
    j.v = c;
    return j;
  }
  int max_order() const override { return 3; }
  std::optional<Box> support() const override {
    if (c == 0.0) {
      Box b;
      b.dim = kMaxDim;
      b.lo.fill(1.0);
      b.hi.fill(0.0);
      return b;
    }
    return std::nullopt;
  }
};

struct FunctionNode final : AnalyticField::Node {
  int order_cap;
  std::function<Jet(const Point&, int)> fn;
  std::optional<Box> supp;
  Jet eval(const Point& p, int order) const override {
    Jet j = fn(p, order);
    j.order = order;
    return j;
  }
  int max_order() const override { return order_cap; }
  std::optional<Box> support() const override { return supp; }
};

struct PartialNode final : AnalyticField::Node {
  std::shared_ptr<const AnalyticField::Node> child;
  int axis;
  Jet eval(const Point& p, int order) const override {
    Jet c = child->eval(p, order + 1);
    Jet j;
    j.order = order;
    j.v = c.d1[axis];
    if (order >= 1)
      for (int i = 0; i < kMaxDim; ++i) j.d1[i] = c.hess(axis, i);
    if (order >= 2)
      for (int i = 0; i < kMaxDim; ++i)
        for (int k = 0; k < kMaxDim; ++k) j.d2[i * kMaxDim + k] = c.third(axis, i, k);
    return j;
  }
  int max_order() const override { return child->max_order() - 1; }
  std::optional<Box> support() const override { return child->support(); }
};

struct CombinationNode final : AnalyticField::Node {
  std::vector<std::pair<double, std::shared_ptr<const AnalyticField::Node>>> terms;
  Jet eval(const Point& p, int order) const override {
    Jet j;
    j.order = order;
    for (const auto& [c, node] : terms) {
      if (c == 0.0) continue;
      j.add_scaled(c, node->eval(p, order));
    }
    return j;
  }
  int max_order() const override {
    int m = 3;
    for (const auto& t : terms) m = std::min(m, t.second->max_order());
    return m;
  }
  std::optional<Box> support() const override {
    std::optional<Box> acc;
    for (const auto& t : terms) {
      auto s = t.second->support();
      if (!s) return std::nullopt;
      if (s->empty()) continue;
      acc = acc ? Box::merge(*acc, *s) : *s;
    }
    if (!acc) {
      Box b;
      b.dim = kMaxDim;
      b.lo.fill(1.0);
      b.hi.fill(0.0);
      return b;
    }
    return acc;
  }
};

struct ProductNode final : AnalyticField::Node {
  std::shared_ptr<const AnalyticField::Node> a, b;
  Jet eval(const Point& p, int order) const override {
    const Jet ja = a->eval(p, order);
    const Jet jb = b->eval(p, order);
    Jet j;
    j.order = order;
    j.v = ja.v * jb.v;
    if (order >= 1)
      for (int i = 0; i < kMaxDim; ++i) j.d1[i] = ja.d1[i] * jb.v + ja.v * jb.d1[i];
    if (order >= 2)
      for (int i = 0; i < kMaxDim; ++i)
        for (int k = 0; k < kMaxDim; ++k)
          j.d2[i * kMaxDim + k] = ja.hess(i, k) * jb.v + ja.d1[i] * jb.d1[k] +
                                  ja.d1[k] * jb.d1[i] + ja.v * jb.hess(i, k);
    return j;
  }
  int max_order() const override { return std::min({2, a->max_order(), b->max_order()}); }
  std::optional<Box> support() const override {
    auto sa = a->support();
    auto sb = b->support();
    if (sa && sb) return Box::intersect(*sa, *sb);
    if (sa) return sa;
    return sb;
  }
};

std::shared_ptr<CombinationNode> combine(
    std::initializer_list<std::pair<double, std::shared_ptr<const AnalyticField::Node>>> terms) {
  auto n = std::make_shared<CombinationNode>();
  for (const auto& t : terms) {
    // flatten nested combinations so long sums stay shallow
    if (auto inner = std::dynamic_pointer_cast<const CombinationNode>(t.second)) {
      for (const auto& it : inner->terms) n->terms.emplace_back(t.first * it.first, it.second);
    } else {
      n->terms.push_back(t);
    }
  }
  return n;
}

}  // namespace

AnalyticField AnalyticField::zero(int dim) {
  return AnalyticField(dim, std::make_shared<ConstantNode>(0.0));
}

AnalyticField AnalyticField::constant(int dim, double c) {
  return AnalyticField(dim, std::make_shared<ConstantNode>(c));
}

AnalyticField AnalyticField::from_function(int dim, int max_order,
                                           std::function<Jet(const Point&, int)> fn,
                                           std::optional<Box> support) {
  auto n = std::make_shared<FunctionNode>();
  n->order_cap = max_order;
  n->fn = std::move(fn);
  n->supp = support;
  return AnalyticField(dim, n);
}

Jet AnalyticField::eval(const Point& p, int order) const {
  require(valid(), ErrorCode::InvalidArgument, "evaluating an empty analytic field");
  require(order <= node_->max_order(), ErrorCode::InvalidArgument,
          "analytic field supports derivatives up to order " +
              std::to_string(node_->max_order()) + ", requested " + std::to_string(order));
  return node_->eval(p, order);
}

AnalyticField AnalyticField::partial(int axis) const {
  require(valid(), ErrorCode::InvalidArgument, "partial of an empty analytic field");
  require(axis >= 0 && axis < dim_, ErrorCode::InvalidArgument, "partial: axis out of range");
  auto n = std::make_shared<PartialNode>();
  n->child = node_;
  n->axis = axis;
  return AnalyticField(dim_, n);
}

AnalyticField operator+(const AnalyticField& a, const AnalyticField& b) {
  return AnalyticField(a.dim(), combine({{1.0, a.node()}, {1.0, b.node()}}));
}

AnalyticField operator-(const AnalyticField& a, const AnalyticField& b) {
  return AnalyticField(a.dim(), combine({{1.0, a.node()}, {-1.0, b.node()}}));
}

AnalyticField operator*(double s, const AnalyticField& a) {
  return AnalyticField(a.dim(), combine({{s, a.node()}}));
}

AnalyticField operator*(const AnalyticField& a, const AnalyticField& b) {
  auto n = std::make_shared<ProductNode>();
  n->a = a.node();
  n->b = b.node();
  return AnalyticField(a.dim(), n);
}

}  // namespace lrlab
