#include "lrlab/finite_difference.hpp"

#include <complex>

#include "lrlab/error.hpp"

namespace lrlab::fd {

std::size_t Layout::size() const {
  std::size_t s = 1;
  for (int a = 0; a < ndim; ++a) s *= static_cast<std::size_t>(shape[a]);
  return s;
}

Layout Layout::row_major(int ndim, const std::array<int, kMaxDim>& shape) {
  Layout l;
  l.ndim = ndim;
  l.shape = shape;
  std::size_t s = 1;
  for (int a = ndim - 1; a >= 0; --a) {
    l.stride[a] = s;
    s *= static_cast<std::size_t>(shape[a]);
  }
  return l;
}

namespace {

// Calls fn(base) for the first element of every line along `axis`.
template <class Fn>
void for_each_line(const Layout& lay, int axis, Fn&& fn) {
  const std::size_t total = lay.size();
  const std::size_t n_axis = static_cast<std::size_t>(lay.shape[axis]);
  const std::size_t lines = total / n_axis;
  const std::size_t inner = lay.stride[axis];
  const long long nl = static_cast<long long>(lines);
#pragma omp parallel for schedule(static)
  for (long long l = 0; l < nl; ++l) {
    const std::size_t outer = static_cast<std::size_t>(l) / inner;
    const std::size_t in = static_cast<std::size_t>(l) % inner;
    fn(outer * n_axis * inner + in);
  }
}

}  // namespace

template <class T>
std::vector<T> partial(const std::vector<T>& u, const Layout& lay, int axis, double h, int order) {
  require(u.size() == lay.size(), ErrorCode::GridMismatch, "fd::partial: size mismatch");
  require(lay.shape[axis] >= 4, ErrorCode::InvalidArgument, "fd::partial: need >= 4 samples");
  require(order == 2 || order == 4, ErrorCode::InvalidArgument, "fd::partial: order must be 2 or 4");
  std::vector<T> out(u.size());
  const int n = lay.shape[axis];
  const std::size_t s = lay.stride[axis];
  const double i2h = 1.0 / (2.0 * h), i12h = 1.0 / (12.0 * h);
  for_each_line(lay, axis, [&](std::size_t b) {
    auto U = [&](int i) -> const T& { return u[b + static_cast<std::size_t>(i) * s]; };
    auto O = [&](int i) -> T& { return out[b + static_cast<std::size_t>(i) * s]; };
    O(0) = (-3.0 * U(0) + 4.0 * U(1) - U(2)) * i2h;
    O(n - 1) = (3.0 * U(n - 1) - 4.0 * U(n - 2) + U(n - 3)) * i2h;
    if (order == 2 || n < 5) {
      for (int i = 1; i < n - 1; ++i) O(i) = (U(i + 1) - U(i - 1)) * i2h;
      return;
    }
    O(1) = (U(2) - U(0)) * i2h;
    O(n - 2) = (U(n - 1) - U(n - 3)) * i2h;
    for (int i = 2; i < n - 2; ++i)
      O(i) = (U(i - 2) - 8.0 * U(i - 1) + 8.0 * U(i + 1) - U(i + 2)) * i12h;
  });
  return out;
}

template <class T>
std::vector<T> second(const std::vector<T>& u, const Layout& lay, int axis, double h) {
  require(u.size() == lay.size(), ErrorCode::GridMismatch, "fd::second: size mismatch");
  require(lay.shape[axis] >= 4, ErrorCode::InvalidArgument, "fd::second: need >= 4 samples");
  std::vector<T> out(u.size());
  const int n = lay.shape[axis];
  const std::size_t s = lay.stride[axis];
  const double ih2 = 1.0 / (h * h);
  for_each_line(lay, axis, [&](std::size_t b) {
    auto U = [&](int i) -> const T& { return u[b + static_cast<std::size_t>(i) * s]; };
    auto O = [&](int i) -> T& { return out[b + static_cast<std::size_t>(i) * s]; };
    O(0) = (2.0 * U(0) - 5.0 * U(1) + 4.0 * U(2) - U(3)) * ih2;
    O(n - 1) = (2.0 * U(n - 1) - 5.0 * U(n - 2) + 4.0 * U(n - 3) - U(n - 4)) * ih2;
    for (int i = 1; i < n - 1; ++i) O(i) = (U(i - 1) - 2.0 * U(i) + U(i + 1)) * ih2;
  });
  return out;
}

template std::vector<double> partial(const std::vector<double>&, const Layout&, int, double, int);
template std::vector<std::complex<double>> partial(const std::vector<std::complex<double>>&,
                                                   const Layout&, int, double, int);
template std::vector<double> second(const std::vector<double>&, const Layout&, int, double);
template std::vector<std::complex<double>> second(const std::vector<std::complex<double>>&,
                                                  const Layout&, int, double);

}  // namespace lrlab::fd
