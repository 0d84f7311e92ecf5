#include "toda/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace toda {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double fd_step(Complex x) { return 1e-5 * (1.0 + std::abs(x)); }

}  // namespace

double round_metric(Complex x) {
  const double s = 1.0 + std::norm(x);
  return 4.0 / (s * s);
}

double green_round(Complex x, Complex y) {
  if (x == y) throw std::invalid_argument("green_round is singular on the diagonal");
  return std::log(1.0 / std::abs(x - y)) -
         0.25 * (std::log(round_metric(x)) + std::log(round_metric(y))) + std::numbers::ln2 - 0.5;
}

double SphereGrid::cell_radius(int n) const {
  return std::sqrt(cell_volume(n) / (std::numbers::pi * round_metric(points[n])));
}

SphereGrid SphereGrid::fibonacci(int n) {
  if (n < 4) throw std::invalid_argument("sphere grid needs at least 4 points");
  SphereGrid grid;
  grid.points.reserve(n);
  grid.cell_volume = Eigen::VectorXd::Constant(n, kFourPi / n);

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double rho = std::sqrt(1.0 - z * z);
    const double phi = 2.0 * std::numbers::pi * std::fmod(k * golden, 1.0);
    // Stereographic projection from the north pole (z = 1 is never hit).
    const double denom = 1.0 - z;
    grid.points.emplace_back(rho * std::cos(phi) / denom, rho * std::sin(phi) / denom);
  }

  // Nearest-neighbor separations in both the chart and the round metric
  // (chordal distance on the unit sphere).
  std::vector<Eigen::Vector3d> sphere(n);
  for (int k = 0; k < n; ++k) {
    const Complex w = grid.points[k];
    const double s = 1.0 + std::norm(w);
    sphere[k] = {2.0 * w.real() / s, 2.0 * w.imag() / s, (std::norm(w) - 1.0) / s};
  }
  double acc_plane = 0, acc_round = 0;
  for (int i = 0; i < n; ++i) {
    double best_plane = std::numeric_limits<double>::infinity();
    double best_round = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      best_plane = std::min(best_plane, std::abs(grid.points[i] - grid.points[j]));
      best_round = std::min(best_round, (sphere[i] - sphere[j]).norm());
    }
    acc_plane += best_plane;
    acc_round += best_round;
  }
  grid.mean_nn_distance = acc_plane / n;
  grid.mean_nn_round = acc_round / n;
  return grid;
}

MobiusMap::MobiusMap(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
  const Complex det = a_ * d_ - b_ * c_;
  if (det == Complex(0, 0)) throw std::invalid_argument("Mobius map must have nonzero determinant");
  const Complex s = std::sqrt(det);
  a_ /= s;
  b_ /= s;
  c_ /= s;
  d_ /= s;
}

namespace {

Complex parse_complex(std::string_view token) {
  // Accepts re, im-only ("2i", "-i") and re±im forms ("1+2i", "0.5-0.5i").
  std::string s(token);
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  size_t split = std::string::npos;
  for (size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
  }
  auto parse_part = [](std::string part, bool imag) -> double {
    if (imag) {
      if (part.empty() || part.back() != 'i')
        throw std::invalid_argument("imaginary part must end in 'i'");
      part.pop_back();
      if (part.empty() || part == "+") part = "1";
      else if (part == "-") part = "-1";
    }
    size_t used = 0;
    const double v = std::stod(part, &used);
    if (used != part.size()) throw std::invalid_argument("bad complex literal");
    return v;
  };
  if (split == std::string::npos) {
    if (s.back() == 'i') return Complex(0, parse_part(s, true));
    return Complex(parse_part(s, false), 0);
  }
  return Complex(parse_part(s.substr(0, split), false), parse_part(s.substr(split), true));
}

}  // namespace

MobiusMap MobiusMap::parse(std::string_view text) {
  std::vector<Complex> vals;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string_view tok =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    vals.push_back(parse_complex(tok));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (vals.size() != 4) throw std::invalid_argument("Mobius map needs exactly four entries a,b,c,d");
  return MobiusMap(vals[0], vals[1], vals[2], vals[3]);
}

Complex MobiusMap::apply(Complex z) const {
  const Complex denom = c_ * z + d_;
  if (denom == Complex(0, 0)) throw std::invalid_argument("Mobius map evaluated at its pole");
  return (a_ * z + b_) / denom;
}

Complex MobiusMap::derivative(Complex z) const {
  const Complex denom = c_ * z + d_;
  if (denom == Complex(0, 0)) throw std::invalid_argument("Mobius map evaluated at its pole");
  return 1.0 / (denom * denom);
}

double MobiusMap::log_conformal_factor(Complex z) const {
  return std::log(pullback_factor(z)) + std::log(round_metric(apply(z))) -
         std::log(round_metric(z));
}

MobiusMap MobiusMap::compose(const MobiusMap& inner) const {
  return MobiusMap(a_ * inner.a_ + b_ * inner.c_, a_ * inner.b_ + b_ * inner.d_,
                   c_ * inner.a_ + d_ * inner.c_, c_ * inner.b_ + d_ * inner.d_);
}

double green_mobius_residual(const MobiusMap& psi, Complex x, Complex y) {
  return green_round(psi.apply(x), psi.apply(y)) - green_round(x, y) +
         0.25 * (psi.log_conformal_factor(x) + psi.log_conformal_factor(y));
}

Eigen::Vector2d ConformalFactor::grad(Complex x) const {
  if (gradient) return gradient(x);
  const double h = fd_step(x);
  Eigen::Vector2d g;
  g(0) = (value(x + Complex(h, 0)) - value(x - Complex(h, 0))) / (2 * h);
  g(1) = (value(x + Complex(0, h)) - value(x - Complex(0, h))) / (2 * h);
  return g;
}

double ConformalFactor::lap(Complex x) const {
  if (laplacian) return laplacian(x);
  const double h = fd_step(x);
  return (value(x + Complex(h, 0)) + value(x - Complex(h, 0)) + value(x + Complex(0, h)) +
          value(x - Complex(0, h)) - 4.0 * value(x)) /
         (h * h);
}

ConformalFactor ConformalFactor::zero() { return constant(0.0); }

ConformalFactor ConformalFactor::constant(double c) {
  ConformalFactor f;
  f.value = [c](Complex) { return c; };
  f.gradient = [](Complex) { return Eigen::Vector2d::Zero().eval(); };
  f.laplacian = [](Complex) { return 0.0; };
  f.smoothness = 2;
  return f;
}

ConformalFactor ConformalFactor::bump(double amplitude) {
  ConformalFactor f;
  f.value = [amplitude](Complex x) { return amplitude / (1.0 + std::norm(x)); };
  f.gradient = [amplitude](Complex x) {
    const double u = 1.0 + std::norm(x);
    Eigen::Vector2d g;
    g(0) = -2.0 * amplitude * x.real() / (u * u);
    g(1) = -2.0 * amplitude * x.imag() / (u * u);
    return g;
  };
  f.laplacian = [amplitude](Complex x) {
    const double u = 1.0 + std::norm(x);
    return 4.0 * amplitude * (u - 2.0) / (u * u * u);
  };
  f.smoothness = 2;
  return f;
}

GreenQuadrature::GreenQuadrature(const SphereGrid& grid, const ConformalFactor& phi)
    : grid_(&grid) {
  const int n = grid.size();
  phi_.resize(n);
  w_.resize(n);
  for (int i = 0; i < n; ++i) {
    phi_(i) = phi.value(grid.points[i]);
    if (!std::isfinite(phi_(i)))
      throw std::invalid_argument("conformal factor not finite at a grid point");
    w_(i) = std::exp(phi_(i)) * grid.cell_volume(i);
  }
  volume_ = w_.sum();

  // theta = double quadrature of ln 1/|x-y| with disk-averaged diagonal.
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      acc += 2.0 * w_(i) * w_(j) * std::log(1.0 / std::abs(grid.points[i] - grid.points[j]));
    acc += w_(i) * w_(i) * disk_average_term(grid.points[i], i);
  }
  theta_ = acc / (volume_ * volume_);
}

double GreenQuadrature::disk_average_term(Complex x, int cell) const {
  // Average of ln 1/|x-.| over a planar disk around x that carries the
  // cell's volume in the metric e^phi ghat: ln(1/R) + 1/2.
  const double density = std::exp(phi_(cell)) * round_metric(x);
  const double radius = std::sqrt(w_(cell) / (std::numbers::pi * density));
  return std::log(1.0 / radius) + 0.5;
}

double GreenQuadrature::mean_log_potential(Complex x) const {
  const int n = grid_->size();
  int nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(x - grid_->points[i]);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    if (i == nearest) continue;
    acc += w_(i) * std::log(1.0 / std::abs(x - grid_->points[i]));
  }
  acc += w_(nearest) * disk_average_term(x, nearest);
  return acc / volume_;
}

double GreenQuadrature::kernel(Complex x, Complex y) const {
  if (x == y) throw std::invalid_argument("green kernel is singular on the diagonal");
  return std::log(1.0 / std::abs(x - y)) - mean_log_potential(x) - mean_log_potential(y) + theta_;
}

double green_general(Complex x, Complex y, const ConformalFactor& phi, const SphereGrid& grid) {
  return GreenQuadrature(grid, phi).kernel(x, y);
}

double offcenter_power_average(double delta, double rho, double beta) {
  if (!(beta < 2.0)) throw std::invalid_argument("power average needs beta < 2");
  if (!(rho > 0.0) || delta < 0.0) throw std::invalid_argument("bad disk geometry");
  double acc = 0;
  if (delta < rho) {
    // circles fully inside the disk
    acc += 2.0 * std::numbers::pi * std::pow(rho - delta, 2.0 - beta) / (2.0 - beta);
  }
  const double lo = std::abs(delta - rho);
  const double hi = delta + rho;
  auto arc = [&](double r) {
    if (r <= 0.0 || delta == 0.0) return 0.0;
    double c = (r * r + delta * delta - rho * rho) / (2.0 * r * delta);
    c = std::clamp(c, -1.0, 1.0);
    return 2.0 * std::acos(c) * std::pow(r, 1.0 - beta);
  };
  const int steps = 128;
  const double h = (hi - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double a = lo + i * h;
    const double b = a + h;
    acc += h / 6.0 * (arc(a) + 4.0 * arc(0.5 * (a + b)) + arc(b));
  }
  return acc / (std::numbers::pi * rho * rho);
}

double liouville_functional(const ConformalFactor& phi, const SphereGrid& grid) {
  // Dirichlet energy is conformally invariant, so the gradient term is the
  // flat-chart energy; the area element of the flat chart is vol/ghat.
  double dirichlet = 0;
  double linear = 0;
  for (int i = 0; i < grid.size(); ++i) {
    const Complex x = grid.points[i];
    dirichlet += phi.grad(x).squaredNorm() * grid.cell_volume(i) / round_metric(x);
    linear += phi.value(x) * grid.cell_volume(i);
  }
  return dirichlet + 4.0 * linear;  // 2 R_ghat = 4
}

double scalar_curvature(const ConformalFactor& phi, Complex x) {
  return std::exp(-phi.value(x)) * (2.0 - phi.lap(x) / round_metric(x));
}

}  // namespace toda
