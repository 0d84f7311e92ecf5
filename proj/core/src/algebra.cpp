#include "toda/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace toda {

namespace {

const char* family_letter(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::D: return "D";
    case Family::E6: return "E6";
    case Family::E7: return "E7";
    case Family::E8: return "E8";
  }
  return "?";
}

// Dynkin diagram edges, 0-based. A_n is the chain; D_n forks at node n-3
// (both tail nodes attach to it); E uses the Bourbaki layout with the
// branch node at position 3 of the long chain.
std::vector<std::pair<int, int>> dynkin_edges(Family family, int rank) {
  std::vector<std::pair<int, int>> edges;
  switch (family) {
    case Family::A:
      for (int i = 0; i + 1 < rank; ++i) edges.emplace_back(i, i + 1);
      break;
    case Family::D:
      for (int i = 0; i + 2 < rank; ++i) edges.emplace_back(i, i + 1);
      edges.emplace_back(rank - 3, rank - 1);
      break;
    case Family::E6:
    case Family::E7:
    case Family::E8: {
      // chain 0-2-3-4-... with node 1 attached to node 3
      edges.emplace_back(0, 2);
      for (int i = 2; i + 1 < rank; ++i) edges.emplace_back(i, i + 1);
      edges.emplace_back(1, 3);
      break;
    }
  }
  return edges;
}

long long dual_coxeter_number(Family family, int rank) {
  switch (family) {
    case Family::A: return rank + 1;        // sl_{n+1}
    case Family::D: return 2 * rank - 2;    // so_{2n}
    case Family::E6: return 12;
    case Family::E7: return 18;
    case Family::E8: return 30;
  }
  return 0;
}

long long algebra_dimension(Family family, int rank) {
  switch (family) {
    case Family::A: return static_cast<long long>(rank) * (rank + 2);
    case Family::D: return static_cast<long long>(rank) * (2 * rank - 1);
    case Family::E6: return 78;
    case Family::E7: return 133;
    case Family::E8: return 248;
  }
  return 0;
}

// Gauss-Jordan over exact rationals.
RationalMatrix invert_exact(const RationalMatrix& m) {
  const int n = static_cast<int>(m.size());
  RationalMatrix a = m;
  RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = Rational(1);

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int row = col; row < n; ++row) {
      if (a[row][col] != Rational(0)) {
        pivot = row;
        break;
      }
    }
    if (pivot < 0) throw std::runtime_error("singular Cartan matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const Rational p = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col || a[row][col] == Rational(0)) continue;
      const Rational f = a[row][col];
      for (int j = 0; j < n; ++j) {
        a[row][j] -= f * a[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Leading principal minor determinants by exact elimination.
Rational leading_minor_det(const Eigen::MatrixXi& m, int size) {
  RationalMatrix a(size, std::vector<Rational>(size));
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) a[i][j] = Rational(m(i, j));
  Rational det(1);
  for (int col = 0; col < size; ++col) {
    int pivot = -1;
    for (int row = col; row < size; ++row) {
      if (a[row][col] != Rational(0)) {
        pivot = row;
        break;
      }
    }
    if (pivot < 0) return Rational(0);
    if (pivot != col) {
      std::swap(a[col], a[pivot]);
      det = -det;
    }
    det *= a[col][col];
    for (int row = col + 1; row < size; ++row) {
      const Rational f = a[row][col] / a[col][col];
      for (int j = col; j < size; ++j) a[row][j] -= f * a[col][j];
    }
  }
  return det;
}

}  // namespace

int AlgebraSpec::total_rank() const {
  int r = 0;
  for (const auto& s : summands) r += s.rank;
  return r;
}

void AlgebraSpec::validate() const {
  if (summands.empty()) throw std::invalid_argument("algebra spec has no summands");
  for (size_t i = 0; i < summands.size(); ++i) {
    const auto& s = summands[i];
    std::ostringstream where;
    where << "summand " << i + 1 << " (" << family_letter(s.family) << s.rank << ")";
    switch (s.family) {
      case Family::A:
        if (s.rank < 1) throw std::invalid_argument(where.str() + ": A family needs rank >= 1");
        break;
      case Family::D:
        if (s.rank < 4) throw std::invalid_argument(where.str() + ": D family needs rank >= 4");
        break;
      case Family::E6:
        if (s.rank != 6) throw std::invalid_argument(where.str() + ": E6 has rank 6");
        break;
      case Family::E7:
        if (s.rank != 7) throw std::invalid_argument(where.str() + ": E7 has rank 7");
        break;
      case Family::E8:
        if (s.rank != 8) throw std::invalid_argument(where.str() + ": E8 has rank 8");
        break;
    }
  }
}

std::string AlgebraSpec::name() const {
  std::string out;
  for (size_t i = 0; i < summands.size(); ++i) {
    if (i) out += "+";
    switch (summands[i].family) {
      case Family::A: out += "A" + std::to_string(summands[i].rank); break;
      case Family::D: out += "D" + std::to_string(summands[i].rank); break;
      case Family::E6: out += "E6"; break;
      case Family::E7: out += "E7"; break;
      case Family::E8: out += "E8"; break;
    }
  }
  return out;
}

AlgebraSpec AlgebraSpec::parse(std::string_view text) {
  AlgebraSpec spec;
  size_t pos = 0;
  while (pos < text.size()) {
    const char letter = static_cast<char>(std::toupper(text[pos]));
    ++pos;
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw std::invalid_argument("algebra spec: missing rank after family letter");
    const int rank = std::stoi(std::string(text.substr(start, pos - start)));
    switch (letter) {
      case 'A': spec.summands.push_back({Family::A, rank}); break;
      case 'D': spec.summands.push_back({Family::D, rank}); break;
      case 'E':
        if (rank == 6) spec.summands.push_back({Family::E6, 6});
        else if (rank == 7) spec.summands.push_back({Family::E7, 7});
        else if (rank == 8) spec.summands.push_back({Family::E8, 8});
        else throw std::invalid_argument("algebra spec: E family is E6, E7 or E8");
        break;
      default:
        throw std::invalid_argument(std::string("algebra spec: unknown family '") + letter + "'");
    }
    if (pos < text.size()) {
      if (text[pos] != '+') throw std::invalid_argument("algebra spec: expected '+' between summands");
      ++pos;
      if (pos == text.size()) throw std::invalid_argument("algebra spec: trailing '+'");
    }
  }
  spec.validate();
  return spec;
}

AlgebraData AlgebraData::build(const AlgebraSpec& spec) {
  spec.validate();
  AlgebraData data;
  data.spec_ = spec;
  data.rank_ = spec.total_rank();
  const int r = data.rank_;

  data.cartan_ = Eigen::MatrixXi::Zero(r, r);
  int offset = 0;
  for (const auto& s : spec.summands) {
    for (int i = 0; i < s.rank; ++i) data.cartan_(offset + i, offset + i) = 2;
    for (auto [i, j] : dynkin_edges(s.family, s.rank)) {
      data.cartan_(offset + i, offset + j) = -1;
      data.cartan_(offset + j, offset + i) = -1;
    }
    data.dual_coxeter_.push_back(dual_coxeter_number(s.family, s.rank));
    offset += s.rank;
  }

  RationalMatrix a(r, std::vector<Rational>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a[i][j] = Rational(data.cartan_(i, j));
  data.cartan_inv_ = invert_exact(a);

  // A A^{-1} = I, exactly.
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      Rational acc(0);
      for (int k = 0; k < r; ++k) acc += a[i][k] * data.cartan_inv_[k][j];
      if (acc != Rational(i == j ? 1 : 0))
        throw std::runtime_error("Cartan inverse failed exact identity check");
    }
  }

  // Positive definiteness through exact leading principal minors.
  for (int k = 1; k <= r; ++k) {
    if (!(leading_minor_det(data.cartan_, k) > Rational(0)))
      throw std::runtime_error("Cartan matrix not positive definite");
  }

  // |rho|^2 as the sum of all entries of A^{-1}; cross-checked against the
  // dual-Coxeter table per summand.
  Rational norm(0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) norm += data.cartan_inv_[i][j];
  data.weyl_norm_sq_ = norm;

  Rational table(0);
  for (size_t s = 0; s < spec.summands.size(); ++s) {
    const auto& sm = spec.summands[s];
    table += Rational(data.dual_coxeter_[s] * algebra_dimension(sm.family, sm.rank), 12);
  }
  if (table != norm)
    throw std::runtime_error("Weyl vector norm disagrees with dual-Coxeter table");

  data.cartan_d_ = data.cartan_.cast<double>();
  data.cartan_inv_d_.resize(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) data.cartan_inv_d_(i, j) = data.cartan_inv_[i][j].to_double();

  return data;
}

CartanVector CartanVector::to_basis(Basis target) const {
  if (!algebra) throw std::logic_error("CartanVector without algebra");
  if (target == basis) return *this;
  CartanVector out;
  out.basis = target;
  out.algebra = algebra;
  if (target == Basis::FundamentalWeight)
    out.coords = algebra->cartan_d() * coords;  // w = A c
  else
    out.coords = algebra->cartan_inv_d() * coords;
  return out;
}

double inner_product(const CartanVector& u, const CartanVector& v) {
  if (!u.algebra || u.algebra != v.algebra)
    throw std::invalid_argument("inner_product: vectors from different algebras");
  // <u,v> = c_u^T A c_v = w_u^T A^{-1} w_v = c_u^T w_v.
  const Eigen::VectorXd cu = u.root_coords();
  const Eigen::VectorXd wv = v.weight_coords();
  return cu.dot(wv);
}

double norm_sq(const CartanVector& v) { return inner_product(v, v); }

CartanVector simple_root(const AlgebraData& data, int i) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(data.rank());
  c(i) = 1.0;
  return {Basis::SimpleRoot, std::move(c), data};
}

CartanVector weyl_vector(const AlgebraData& data) {
  return {Basis::FundamentalWeight, Eigen::VectorXd::Ones(data.rank()), data};
}

void CouplingParams::validate_gamma() const {
  if (!(gamma > 0.0) || !(gamma < std::sqrt(2.0)))
    throw std::invalid_argument("gamma must lie strictly inside (0, sqrt(2))");
}

void CouplingParams::validate(int rank) const {
  validate_gamma();
  if (mu.size() != rank)
    throw std::invalid_argument("mu must have one entry per rank");
  for (int i = 0; i < mu.size(); ++i)
    if (!(mu(i) > 0.0)) throw std::invalid_argument("all cosmological constants must be positive");
}

CouplingParams CouplingParams::uniform(double gamma, double mu_value, int rank) {
  CouplingParams p;
  p.gamma = gamma;
  p.mu = Eigen::VectorXd::Constant(rank, mu_value);
  return p;
}

CartanVector background_charge(const AlgebraData& data, const CouplingParams& params) {
  params.validate_gamma();
  return {Basis::FundamentalWeight, Eigen::VectorXd::Constant(data.rank(), params.q()), data};
}

double central_charge(const AlgebraData& data, const CouplingParams& params) {
  const double q = params.q();
  return data.rank() + 6.0 * q * q * data.weyl_norm_sq().to_double();
}

std::pair<long long, Rational> central_charge_coefficients(const AlgebraData& data) {
  return {data.rank(), Rational(6) * data.weyl_norm_sq()};
}

double conformal_weight(const CartanVector& alpha, const AlgebraData& data,
                        const CouplingParams& params) {
  const CartanVector q = background_charge(data, params);
  CartanVector half = alpha;
  half.coords *= 0.5;
  CartanVector rest = q.to_basis(half.basis);
  rest.coords -= half.coords;
  return inner_product(half, rest);
}

namespace {

void check_insertions(const InsertionSet& insertions, const AlgebraData& data) {
  if (insertions.empty()) throw std::invalid_argument("need at least one insertion");
  for (size_t k = 0; k < insertions.size(); ++k) {
    if (!std::isfinite(insertions[k].z.real()) || !std::isfinite(insertions[k].z.imag()))
      throw std::invalid_argument("insertion point at infinity is not supported");
    if (insertions[k].alpha.algebra != &data)
      throw std::invalid_argument("insertion weight belongs to a different algebra");
    for (size_t l = 0; l < k; ++l)
      if (insertions[k].z == insertions[l].z)
        throw std::invalid_argument("insertion points must be pairwise distinct");
  }
}

}  // namespace

InsertionSet canonical_order(InsertionSet insertions) {
  std::sort(insertions.begin(), insertions.end(), [](const Insertion& a, const Insertion& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return insertions;
}

Eigen::VectorXd s_vector(const InsertionSet& insertions, const AlgebraData& data,
                         const CouplingParams& params) {
  check_insertions(insertions, data);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(data.rank());
  for (const auto& ins : canonical_order(insertions)) total += ins.alpha.weight_coords();
  total -= 2.0 * background_charge(data, params).coords;
  return data.cartan_inv_d() * total / params.gamma;
}

bool SeibergReport::pass() const {
  for (const auto& e : s)
    if (!e.positive) return false;
  for (const auto& b : bounds)
    if (!b.ok) return false;
  return true;
}

std::vector<std::string> SeibergReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : s) {
    if (!e.positive) {
      std::ostringstream os;
      os << "s_" << e.index + 1 << " = " << e.value << " is not positive";
      out.push_back(os.str());
    }
  }
  for (const auto& b : bounds) {
    if (!b.ok) {
      std::ostringstream os;
      os << "<alpha_" << b.insertion + 1 << ", e_" << b.direction + 1
         << "> exceeds <Q, e_i> by " << -b.margin;
      out.push_back(os.str());
    }
  }
  return out;
}

SeibergReport seiberg_check(const InsertionSet& insertions, const AlgebraData& data,
                            const CouplingParams& params) {
  const Eigen::VectorXd s = s_vector(insertions, data, params);
  const double q = params.q();

  SeibergReport report;
  for (int i = 0; i < data.rank(); ++i)
    report.s.push_back({i, s(i), s(i) > 0.0});
  for (size_t k = 0; k < insertions.size(); ++k) {
    const Eigen::VectorXd w = insertions[k].alpha.weight_coords();
    for (int i = 0; i < data.rank(); ++i) {
      const double margin = q - w(i);
      report.bounds.push_back({static_cast<int>(k), i, margin, margin > 0.0});
    }
  }
  return report;
}

bool ExtendedSeibergReport::pass() const {
  for (const auto& e : entries)
    if (!e.ok) return false;
  return true;
}

ExtendedSeibergReport extended_seiberg_check(const InsertionSet& insertions,
                                             const AlgebraData& data,
                                             const CouplingParams& params) {
  const Eigen::VectorXd s = s_vector(insertions, data, params);
  const double q = params.q();
  const double gamma = params.gamma;

  ExtendedSeibergReport report;
  for (int i = 0; i < data.rank(); ++i) {
    double bound = 2.0 / (gamma * gamma);
    for (const auto& ins : insertions) {
      const double w = ins.alpha.weight_coords()(i);
      bound = std::min(bound, (q - w) / gamma);
    }
    report.entries.push_back({i, -s(i), bound, -s(i) < bound});
  }
  return report;
}

std::vector<Rational> to_root_exact(const AlgebraData& data, Basis from,
                                    const std::vector<Rational>& coords) {
  const int r = data.rank();
  if (static_cast<int>(coords.size()) != r)
    throw std::invalid_argument("coordinate size mismatch");
  if (from == Basis::SimpleRoot) return coords;
  std::vector<Rational> out(r, Rational(0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out[i] += data.cartan_inv()[i][j] * coords[j];
  return out;
}

std::vector<Rational> to_weight_exact(const AlgebraData& data, Basis from,
                                      const std::vector<Rational>& coords) {
  const int r = data.rank();
  if (static_cast<int>(coords.size()) != r)
    throw std::invalid_argument("coordinate size mismatch");
  if (from == Basis::FundamentalWeight) return coords;
  std::vector<Rational> out(r, Rational(0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out[i] += Rational(data.cartan()(i, j)) * coords[j];
  return out;
}

Rational inner_product_exact(const AlgebraData& data, Basis bu,
                             const std::vector<Rational>& u, Basis bv,
                             const std::vector<Rational>& v) {
  const std::vector<Rational> cu = to_root_exact(data, bu, u);
  const std::vector<Rational> wv = to_weight_exact(data, bv, v);
  Rational acc(0);
  for (int i = 0; i < data.rank(); ++i) acc += cu[i] * wv[i];
  return acc;
}

}  // namespace toda
