#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "toda/rational.hpp"

namespace toda {

using Complex = std::complex<double>;

// Simply-laced families. A_n covers sl_{n+1} (rank n >= 1), D_n covers
// so_{2n} (rank n >= 4), E6/E7/E8 have fixed rank.
enum class Family { A, D, E6, E7, E8 };

struct Summand {
  Family family;
  int rank;
};

struct AlgebraSpec {
  std::vector<Summand> summands;

  int total_rank() const;
  void validate() const;
  std::string name() const;

  // Compact grammar: "A2", "D4", "E6", and direct sums "A1+A1".
  static AlgebraSpec parse(std::string_view text);
};

using RationalMatrix = std::vector<std::vector<Rational>>;

// Cartan matrix, its exact inverse and the constants derived from them.
// Immutable after build; safe to share across threads.
class AlgebraData {
public:
  static AlgebraData build(const AlgebraSpec& spec);
  static AlgebraData build(std::string_view spec_text) { return build(AlgebraSpec::parse(spec_text)); }

  const AlgebraSpec& spec() const { return spec_; }
  int rank() const { return rank_; }

  const Eigen::MatrixXi& cartan() const { return cartan_; }
  const RationalMatrix& cartan_inv() const { return cartan_inv_; }
  const Rational& weyl_norm_sq() const { return weyl_norm_sq_; }
  const std::vector<long long>& dual_coxeter() const { return dual_coxeter_; }

  // Double-precision views used by the stochastic modules.
  const Eigen::MatrixXd& cartan_d() const { return cartan_d_; }
  const Eigen::MatrixXd& cartan_inv_d() const { return cartan_inv_d_; }

private:
  AlgebraSpec spec_;
  int rank_ = 0;
  Eigen::MatrixXi cartan_;
  RationalMatrix cartan_inv_;
  Rational weyl_norm_sq_;
  std::vector<long long> dual_coxeter_;
  Eigen::MatrixXd cartan_d_;
  Eigen::MatrixXd cartan_inv_d_;
};

enum class Basis { SimpleRoot, FundamentalWeight };

// Vector in the weight space of a fixed algebra. Root coordinates c and
// weight coordinates w of the same vector satisfy w = A c.
struct CartanVector {
  Basis basis = Basis::SimpleRoot;
  Eigen::VectorXd coords;
  const AlgebraData* algebra = nullptr;

  CartanVector() = default;
  CartanVector(Basis b, Eigen::VectorXd c, const AlgebraData& data)
      : basis(b), coords(std::move(c)), algebra(&data) {}

  CartanVector to_basis(Basis target) const;
  Eigen::VectorXd root_coords() const { return to_basis(Basis::SimpleRoot).coords; }
  Eigen::VectorXd weight_coords() const { return to_basis(Basis::FundamentalWeight).coords; }
};

// Basis-independent pairing; throws if u and v refer to different algebras.
double inner_product(const CartanVector& u, const CartanVector& v);
double norm_sq(const CartanVector& v);

CartanVector simple_root(const AlgebraData& data, int i);
CartanVector weyl_vector(const AlgebraData& data);

struct CouplingParams {
  double gamma = 0;
  Eigen::VectorXd mu;

  // q = gamma + 2/gamma, the pairing of the background charge with any
  // simple root.
  double q() const { return gamma + 2.0 / gamma; }
  void validate_gamma() const;
  void validate(int rank) const;

  static CouplingParams uniform(double gamma, double mu_value, int rank);
};

CartanVector background_charge(const AlgebraData& data, const CouplingParams& params);
double central_charge(const AlgebraData& data, const CouplingParams& params);

// Symbolic coefficients (r, 6*|rho|^2) so that c_T = r + coeff * q^2.
std::pair<long long, Rational> central_charge_coefficients(const AlgebraData& data);

double conformal_weight(const CartanVector& alpha, const AlgebraData& data,
                        const CouplingParams& params);

struct Insertion {
  Complex z;
  CartanVector alpha;
};

using InsertionSet = std::vector<Insertion>;

// Stable ordering by insertion point. Floating-point sums over insertions
// run in this order internally, which makes every estimate exactly
// invariant under permutations of the input set.
InsertionSet canonical_order(InsertionSet insertions);

// s_i = <sum alpha_k - 2Q, omega_i>/gamma, the root coordinates of
// (sum alpha - 2Q)/gamma.
Eigen::VectorXd s_vector(const InsertionSet& insertions, const AlgebraData& data,
                         const CouplingParams& params);

struct SeibergSi {
  int index;
  double value;
  bool positive;
};

struct SeibergWeightBound {
  int insertion;
  int direction;
  double margin;  // q - <alpha_k, e_i>, must be > 0
  bool ok;
};

struct SeibergReport {
  std::vector<SeibergSi> s;
  std::vector<SeibergWeightBound> bounds;

  bool pass() const;
  std::vector<std::string> failures() const;
};

struct ExtendedSeibergEntry {
  int index;
  double neg_s;
  double bound;  // min(2/gamma^2, min_k <Q - alpha_k, e_i>/gamma)
  bool ok;       // neg_s < bound
};

struct ExtendedSeibergReport {
  std::vector<ExtendedSeibergEntry> entries;
  bool pass() const;
};

SeibergReport seiberg_check(const InsertionSet& insertions, const AlgebraData& data,
                            const CouplingParams& params);
ExtendedSeibergReport extended_seiberg_check(const InsertionSet& insertions,
                                             const AlgebraData& data,
                                             const CouplingParams& params);

// Exact-arithmetic counterparts used by the identity suites.
std::vector<Rational> to_root_exact(const AlgebraData& data, Basis from,
                                    const std::vector<Rational>& coords);
std::vector<Rational> to_weight_exact(const AlgebraData& data, Basis from,
                                      const std::vector<Rational>& coords);
Rational inner_product_exact(const AlgebraData& data, Basis bu,
                             const std::vector<Rational>& u, Basis bv,
                             const std::vector<Rational>& v);

}  // namespace toda
