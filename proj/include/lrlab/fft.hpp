#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "lrlab/grid.hpp"

namespace lrlab {

/// In-place multi-dimensional complex DFT over a fixed row-major shape (unnormalized both ways).
class FFT {
 public:
  explicit FFT(std::vector<int> shape);
  ~FFT();
  FFT(const FFT&) = delete;
  FFT& operator=(const FFT&) = delete;

  void forward(std::vector<std::complex<double>>& data) const;
  void backward(std::vector<std::complex<double>>& data) const;
  std::size_t size() const { return size_; }
  const std::vector<int>& shape() const { return shape_; }

 private:
  struct Plans;
  std::vector<int> shape_;
  std::size_t size_ = 0;
  std::unique_ptr<Plans> plans_;
};

/// Angular frequency of DFT index m on an axis with n samples and spacing h.
double dft_frequency(int m, int n, double h);

/// Spectral lattice of a grid: for each flat index, ζ = (ζ_t, ζ_x…) paired with the phase that
/// converts DFT coefficients into the continuous transform ∫ f e^{−iζ·p} of the sampled function.
struct SpectralLattice {
  explicit SpectralLattice(const SpacetimeGrid& grid);
  const SpacetimeGrid& grid() const { return grid_; }
  Point zeta(std::size_t flat) const;
  /// Flat index of the lattice frequency ζ; −1 if ζ is not on the lattice.
  std::ptrdiff_t index_of(const Point& zeta, double tol = 1e-9) const;
  /// Multiplier c(ζ) with ∫ f e^{−iζ·p} ≈ c(ζ)·DFT(f)(ζ).
  std::complex<double> to_continuous(std::size_t flat) const;

 private:
  SpacetimeGrid grid_;
};

}  // namespace lrlab
