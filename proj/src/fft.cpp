#include "lrlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "lrlab/error.hpp"

namespace lrlab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FFT::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* scratch = nullptr;
};

FFT::FFT(std::vector<int> shape) : shape_(std::move(shape)), plans_(std::make_unique<Plans>()) {
  size_ = 1;
  for (int s : shape_) {
    require(s > 0, ErrorCode::InvalidArgument, "FFT shape entries must be positive");
    size_ *= static_cast<std::size_t>(s);
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->scratch = fftw_alloc_complex(size_);
  const int rank = static_cast<int>(shape_.size());
  plans_->fwd = fftw_plan_dft(rank, shape_.data(), plans_->scratch, plans_->scratch, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft(rank, shape_.data(), plans_->scratch, plans_->scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
  require(plans_->fwd && plans_->bwd, ErrorCode::InvalidArgument, "FFTW planning failed");
}

FFT::~FFT() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
  if (plans_->scratch) fftw_free(plans_->scratch);
}

void FFT::forward(std::vector<std::complex<double>>& data) const {
  require(data.size() == size_, ErrorCode::InvalidArgument, "FFT input has the wrong size");
  fftw_execute_dft(plans_->fwd, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
}

void FFT::backward(std::vector<std::complex<double>>& data) const {
  require(data.size() == size_, ErrorCode::InvalidArgument, "FFT input has the wrong size");
  fftw_execute_dft(plans_->bwd, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
}

double dft_frequency(int m, int n, double h) {
  const int k = m < (n + 1) / 2 ? m : m - n;
  return 2.0 * std::numbers::pi * k / (n * h);
}

SpectralLattice::SpectralLattice(const SpacetimeGrid& grid) : grid_(grid) {}

Point SpectralLattice::zeta(std::size_t flat) const {
  const auto idx = grid_.unravel(flat);
  Point z{};
  for (int a = 0; a < grid_.dim(); ++a) z[a] = dft_frequency(idx[a], grid_.shape(a), grid_.spacing(a));
  return z;
}

std::ptrdiff_t SpectralLattice::index_of(const Point& zeta, double tol) const {
  std::array<int, kMaxDim> idx{};
  for (int a = 0; a < grid_.dim(); ++a) {
    const int n = grid_.shape(a);
    const double step = 2.0 * std::numbers::pi / (n * grid_.spacing(a));
    const double k = zeta[a] / step;
    const long kr = std::lround(k);
    if (std::abs(k - kr) > tol) return -1;
    if (kr >= (n + 1) / 2 || kr < -(n / 2)) return -1;
    idx[a] = static_cast<int>(kr < 0 ? kr + n : kr);
  }
  return static_cast<std::ptrdiff_t>(grid_.flat(idx));
}

std::complex<double> SpectralLattice::to_continuous(std::size_t flat) const {
  const Point z = zeta(flat);
  double vol = 1.0, phase = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    vol *= grid_.spacing(a);
    phase += z[a] * grid_.origin(a);
  }
  return vol * std::polar(1.0, -phase);
}

}  // namespace lrlab
