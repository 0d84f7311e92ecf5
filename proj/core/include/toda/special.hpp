#pragma once

#include <functional>
#include <span>

namespace toda {

// log Gamma on (0, inf), Lanczos approximation (g = 7, 15 terms).
// Relative error below 1e-13 for arguments in (0, 50].
double log_gamma(double x);

// Independent route for validation: Stirling series at x + 50 divided
// down by the recurrence product. Slower, accurate to ~1e-14.
double log_gamma_shifted_stirling(double x);

// Adaptive Simpson quadrature with absolute/relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, int max_depth = 60);

// Compensated (Kahan-Neumaier) summation; the reduction mandated for all
// replica aggregates so results are independent of worker count.
class KahanSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0;
  double comp_ = 0;
};

double kahan_total(std::span<const double> xs);

// log(sum exp(x_i)) with the usual max shift.
double log_sum_exp(std::span<const double> xs);

}  // namespace toda
