#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string_view>
#include <vector>

namespace toda {

using Complex = std::complex<double>;

// Round metric density on the plane chart, 4/(1+|x|^2)^2.
double round_metric(Complex x);

// Green kernel of the round sphere in the plane chart,
//   ln(1/|x-y|) - (ln g(x) + ln g(y))/4 + ln 2 - 1/2.
// Symmetric and mean-zero against the round volume. Throws on x == y.
double green_round(Complex x, Complex y);

// Quasi-uniform point set on the sphere pushed to the plane by
// stereographic projection, with equal round-volume weights 4pi/N.
// The Fibonacci construction never produces the projection pole.
struct SphereGrid {
  std::vector<Complex> points;
  Eigen::VectorXd cell_volume;
  double mean_nn_distance = 0;        // plane chart
  double mean_nn_round = 0;           // round metric

  int size() const { return static_cast<int>(points.size()); }

  // Planar radius of a disk carrying the cell's round volume at node n.
  double cell_radius(int n) const;

  static SphereGrid fibonacci(int n);
};

class MobiusMap {
public:
  MobiusMap(Complex a, Complex b, Complex c, Complex d);

  static MobiusMap identity() { return MobiusMap(1, 0, 0, 1); }

  // "a,b,c,d" with complex entries like "2", "-0.5i", "1+2i".
  static MobiusMap parse(std::string_view text);

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }

  Complex apply(Complex z) const;        // throws at the pole
  Complex derivative(Complex z) const;   // 1/(cz+d)^2 once det-normalized
  double pullback_factor(Complex z) const { return std::norm(derivative(z)); }

  // phi with e^phi = g_psi / g for the round metric.
  double log_conformal_factor(Complex z) const;

  MobiusMap compose(const MobiusMap& inner) const;
  MobiusMap inverse() const { return MobiusMap(d_, -b_, -c_, a_); }

private:
  Complex a_, b_, c_, d_;
};

// G(psi x, psi y) - G(x, y) + (phi(x) + phi(y))/4; identically zero in
// exact arithmetic.
double green_mobius_residual(const MobiusMap& psi, Complex x, Complex y);

// Conformal factor phi with g = e^phi ghat. Derivatives are flat-chart;
// when a provider does not supply them central differences with
// h = 1e-5 (1 + |x|) are used.
struct ConformalFactor {
  std::function<double(Complex)> value;
  std::function<Eigen::Vector2d(Complex)> gradient;
  std::function<double(Complex)> laplacian;
  int smoothness = 1;

  double operator()(Complex x) const { return value(x); }
  Eigen::Vector2d grad(Complex x) const;
  double lap(Complex x) const;

  static ConformalFactor zero();
  static ConformalFactor constant(double c);
  // amplitude / (1 + |x|^2), with analytic derivatives.
  static ConformalFactor bump(double amplitude);
};

// Quadrature state for the general conformal-metric kernel on a fixed grid.
// The cell containing a log singularity contributes through the analytic
// average of ln 1/|x-.| over a disk of equal volume.
class GreenQuadrature {
public:
  GreenQuadrature(const SphereGrid& grid, const ConformalFactor& phi);

  double mean_log_potential(Complex x) const;
  double theta() const { return theta_; }
  double kernel(Complex x, Complex y) const;

  const Eigen::VectorXd& weights() const { return w_; }
  const Eigen::VectorXd& phi_values() const { return phi_; }
  double total_volume() const { return volume_; }

private:
  double disk_average_term(Complex x, int cell) const;

  const SphereGrid* grid_;
  Eigen::VectorXd phi_;
  Eigen::VectorXd w_;
  double volume_ = 0;
  double theta_ = 0;
};

double green_general(Complex x, Complex y, const ConformalFactor& phi, const SphereGrid& grid);

// Average of |y - z|^{-beta} over a planar disk of radius rho whose center
// sits at distance delta from z, by the exact radial decomposition with
// arc-length weights. Needs beta < 2 (integrability at the singularity).
double offcenter_power_average(double delta, double rho, double beta);

// S_L(phi) = int |d phi|^2_ghat + 2 R_ghat phi dv_ghat with R_ghat = 2;
// the Dirichlet term is evaluated in the flat chart.
double liouville_functional(const ConformalFactor& phi, const SphereGrid& grid);

// R_g = e^{-phi} (2 - lap(phi)/ghat) for g = e^phi ghat.
double scalar_curvature(const ConformalFactor& phi, Complex x);

}  // namespace toda
