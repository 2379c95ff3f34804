#pragma once

#include <optional>
#include <vector>

#include "lrlab/field.hpp"

namespace lrlab {

/// Unit vector ω in R^n, optionally tied to a reference ω₀ within radius eps.
struct Direction {
  std::vector<double> omega;
  std::optional<std::vector<double>> omega0;
  double eps = 0.0;

  /// Validates |ω| = 1 (to 1e-12) and, when a reference is given, |ω − ω₀| < eps.
  static Direction make(std::vector<double> omega, std::optional<std::vector<double>> omega0 = std::nullopt,
                        double eps = 0.0);
  int n() const { return static_cast<int>(omega.size()); }
  /// Spacetime vector (1, s·ω).
  Point spacetime(double s) const;
};

/// Frequency ζ in R^{1+n} orthogonal to (1, −ω).
struct SliceQuery {
  Direction dir;
  Point zeta{};

  static SliceQuery make(Direction dir, const std::vector<double>& zeta);
};

enum class GOKind { Growing, Decaying };

/// Complex value, gradient and Hessian of an amplitude at a point.
struct ComplexJet {
  cplx v{};
  std::array<cplx, kMaxDim> d1{};
  std::array<cplx, kMaxDim * kMaxDim> d2{};
};

class GOAmplitude {
 public:
  GOAmplitude(ComplexField B, GOKind kind, SliceQuery query, bool with_phase, CovectorField A);

  const ComplexField& B() const { return B_; }
  GOKind kind() const { return kind_; }
  const SliceQuery& query() const { return query_; }
  const Direction& direction() const { return query_.dir; }
  bool with_phase() const { return with_phase_; }
  /// True when the amplitude can be re-evaluated off-grid with exact derivatives.
  bool has_jets() const;
  ComplexJet jet(const Point& p, int order) const;

 private:
  ComplexField B_;
  GOKind kind_;
  SliceQuery query_;
  bool with_phase_;
  CovectorField A_;
};

double ray_integral_halfline(const CovectorField& F, const Point& point, const Direction& omega);

GOAmplitude amplitude_growing(const CovectorField& A, const SliceQuery& query, bool with_phase = true);
GOAmplitude amplitude_decaying(const CovectorField& A, const Direction& omega);

enum class DerivativeMode { Analytic, FiniteDifference };

/// sup over interior nodes of |(1,−ω)·∇B ± (1,−ω)·A B| / (1 + |B|).
double transport_residual(const GOAmplitude& B, const CovectorField& A,
                          DerivativeMode mode = DerivativeMode::Analytic);

struct RemainderReport {
  double h = 0.0;
  double value = 0.0;      ///< ‖e^{∓φ/h} L(e^{±φ/h} B)‖_{L²(Q)}
  double transport = 0.0;  ///< ‖2(1,−ω)·(∇B ± A B)‖, the coefficient of 1/h
  double leading = 0.0;    ///< ‖L B‖, the h-independent part
};

/// Conjugated source term, expanded in powers of 1/h without forming e^{±φ/h}.
RemainderReport conjugated_remainder(const CovectorField& A, const ScalarField& q, const GOAmplitude& B, double h);

}  // namespace lrlab
