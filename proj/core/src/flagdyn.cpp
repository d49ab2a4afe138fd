#include "weylgeom/flagdyn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weylgeom/error.hpp"
#include "weylgeom/symspace.hpp"

namespace weylgeom {

namespace {

std::shared_ptr<const WeylGroup> flag_group(int n) {
  if (n < 2) throw Error(Errc::InvalidArgument, "flags need dimension at least 2");
  return WeylGroup::type_a(n - 1);
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

}  // namespace

// --- Flag ------------------------------------------------------------------

Flag Flag::from_basis(const Matrix& columns) {
  if (columns.rows() != columns.cols() || columns.rows() < 1)
    throw Error(Errc::InvalidArgument, "flag basis must be a nonempty square matrix");
  if (!columns.allFinite()) throw Error(Errc::NearSingular, "flag basis has non-finite entries");
  const Vector s = singular_values(columns);
  if (!(s(s.size() - 1) > 0) || s(0) / s(s.size() - 1) >= 1e10)
    throw Error(Errc::NearSingular, "flag basis is singular or has condition number >= 1e10");
  return Flag(linalg::orthonormalize(columns));
}

Flag Flag::standard(int n) { return Flag(Matrix::Identity(n, n)); }

Flag Flag::opposite(int n) { return Flag(Matrix::Identity(n, n).rowwise().reverse()); }

Flag Flag::transformed(const Matrix& g) const {
  if (g.rows() != dim() || g.cols() != dim()) throw Error(Errc::InvalidArgument, "dimension mismatch");
  return from_basis(g * basis_);
}

Flag flag_from_basis(const Matrix& columns) { return Flag::from_basis(columns); }

double flag_distance(const Flag& f, const Flag& g) {
  if (f.dim() != g.dim()) throw Error(Errc::InvalidArgument, "flags have different dimensions");
  const int n = f.dim();
  double worst = 0;
  for (int i = 1; i < n; ++i) {
    // Sines of principal angles between V_i and W_i.
    const Vector s = singular_values(f.basis().rightCols(n - i).transpose() * g.basis().leftCols(i));
    if (s.size()) worst = std::max(worst, std::asin(std::min(1.0, s(0))));
  }
  return worst;
}

// --- relative position ----------------------------------------------------

Index position_from_rank_matrix(const WeylGroup& group, const Eigen::MatrixXi& d) {
  const int n = static_cast<int>(d.rows());
  auto at = [&](int i, int j) { return (i < 0 || j < 0) ? 0 : d(i, j); };
  std::vector<int> p(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1);
      if (r == 1) {
        if (p[static_cast<std::size_t>(i)] != -1) throw Error(Errc::AmbiguousRank, "rank matrix is not a permutation pattern");
        p[static_cast<std::size_t>(i)] = j;
      } else if (r != 0) {
        throw Error(Errc::AmbiguousRank, "rank matrix is not a permutation pattern");
      }
    }
  const auto w = group.from_permutation(p);
  if (!w) throw Error(Errc::AmbiguousRank, "rank matrix is not a permutation pattern");
  return *w;
}

PositionResult relative_position(const Flag& f, const Flag& f_prime, RankOptions options) {
  if (f.dim() != f_prime.dim()) throw Error(Errc::InvalidArgument, "flags have different dimensions");
  const int n = f.dim();
  PositionResult out;
  out.group = flag_group(n);
  out.rank_matrix = Eigen::MatrixXi::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == n) {
        out.rank_matrix(i - 1, j - 1) = j;
        continue;
      }
      // dim(V_i cap W_j) = j - rank(P_{V_i^perp} W_j).
      const Vector s = singular_values(f.basis().rightCols(n - i).transpose() * f_prime.basis().leftCols(j));
      int rank = 0;
      double max_zero = 0, min_nonzero = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) >= options.tau && s(k) <= 2 * options.tau)
          throw Error(Errc::AmbiguousRank, "singular value " + std::to_string(s(k)) + " inside the ambiguity band");
        if (s(k) > options.tau) {
          ++rank;
          min_nonzero = std::min(min_nonzero, s(k));
        } else {
          max_zero = std::max(max_zero, s(k));
        }
      }
      if (rank > 0 && max_zero > 0 && min_nonzero / max_zero < options.separation)
        throw Error(Errc::AmbiguousRank, "accepted and rejected singular values are not separated");
      if (rank > 0) out.confidence = std::min(out.confidence, min_nonzero);
      out.rank_matrix(i - 1, j - 1) = j - rank;
    }
  }
  out.w = position_from_rank_matrix(*out.group, out.rank_matrix);
  return out;
}

bool is_antipodal(const Flag& f, const Flag& f_prime, RankOptions options) {
  const auto r = relative_position(f, f_prime, options);
  return r.w == r.group->longest();
}

// --- attracting / repelling flags ------------------------------------------

namespace {

Flag eigen_flag(const Matrix& g, bool descending) {
  if (g.rows() != g.cols() || g.rows() < 2) throw Error(Errc::InvalidArgument, "matrix must be square, n >= 2");
  Eigen::EigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success) throw Error(Errc::NotRegular, "eigendecomposition failed");
  const auto ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  const Eigen::Index n = g.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::fabs(ev(i).imag()) > 1e-12 * scale) throw Error(Errc::NotRegular, "matrix has non-real eigenvalues");
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return descending ? std::abs(ev(a)) > std::abs(ev(b)) : std::abs(ev(a)) < std::abs(ev(b));
  });
  Matrix basis(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto idx = order[static_cast<std::size_t>(k)];
    if (k > 0) {
      const double prev = std::abs(ev(order[static_cast<std::size_t>(k - 1)]));
      const double cur = std::abs(ev(idx));
      if (std::fabs(std::log(prev / cur)) < 1e-8) throw Error(Errc::NotRegular, "eigenvalue moduli are not distinct");
    }
    basis.col(k) = es.eigenvectors().col(idx).real();
  }
  return Flag::from_basis(basis);
}

}  // namespace

Flag attracting_flag(const Matrix& g) { return eigen_flag(g, true); }
Flag repelling_flag(const Matrix& g) { return eigen_flag(g, false); }

// --- words and limit sets --------------------------------------------------

std::string word_to_string(std::span<const int> letters) {
  std::string s;
  for (int l : letters) s += static_cast<char>((l % 2 ? 'A' : 'a') + l / 2);
  return s;
}

std::vector<int> word_from_string(std::string_view word, int generators) {
  std::vector<int> out;
  for (char c : word) {
    int l;
    if (c >= 'a' && c < 'a' + generators) {
      l = 2 * (c - 'a');
    } else if (c >= 'A' && c < 'A' + generators) {
      l = 2 * (c - 'A') + 1;
    } else {
      throw Error(Errc::InvalidArgument, std::string("unknown letter '") + c + "' in word");
    }
    out.push_back(l);
  }
  return out;
}

bool word_less(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return a.size() < b.size();
  auto rank = [](char c) { return c >= 'a' ? 2 * (c - 'a') : 2 * (c - 'A') + 1; };
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return rank(a[i]) < rank(b[i]);
  return false;
}

namespace {

std::vector<Matrix> letter_matrices(std::span<const Matrix> generators) {
  std::vector<Matrix> out;
  for (const auto& g : generators) {
    if (g.rows() != g.cols() || (!out.empty() && g.rows() != out.front().rows()))
      throw Error(Errc::InvalidArgument, "generators must be square matrices of equal size");
    Eigen::FullPivLU<Matrix> lu(g);
    if (!lu.isInvertible()) throw Error(Errc::SingularInput, "generator is singular");
    out.push_back(g);
    out.push_back(lu.inverse());
  }
  return out;
}

// Depth-first walk over freely reduced words of length 1..max_len, built by
// prepending letters so that rho(s w) = rho(s) rho(w) is a left product.
template <typename State, typename Visit>
void walk_words(const std::vector<Matrix>& letters, int max_len, const State& root, Visit&& visit) {
  std::vector<int> suffix;  // letters of the current word, reversed
  auto rec = [&](auto&& self, const State& state) -> void {
    if (static_cast<int>(suffix.size()) == max_len) return;
    for (int l = 0; l < static_cast<int>(letters.size()); ++l) {
      if (!suffix.empty() && (l ^ 1) == suffix.back()) continue;
      suffix.push_back(l);
      State next = state;
      next.left_multiply(letters[static_cast<std::size_t>(l)]);
      const std::vector<int> word(suffix.rbegin(), suffix.rend());
      if (visit(word, next)) self(self, next);
      suffix.pop_back();
    }
  };
  rec(rec, root);
}

struct DenseState {
  Matrix m;
  void left_multiply(const Matrix& a) { m = a * m; }
};

}  // namespace

FlagSample limit_set_sample(std::span<const Matrix> generators, int max_word_length, double margin_threshold,
                            LimitSampleOptions options) {
  FlagSample sample;
  if (generators.empty() || max_word_length < 1) return sample;
  const auto letters = letter_matrices(generators);
  const int n = static_cast<int>(letters.front().rows());
  struct Candidate {
    std::string word;
    std::vector<double> margins;
    Matrix basis;
  };
  std::vector<Candidate> candidates;
  std::size_t visited = 0;
  walk_words(letters, max_word_length, MatrixProduct(n), [&](const std::vector<int>& word, const MatrixProduct& p) {
    if (++visited > options.word_cap)
      throw Error(Errc::BudgetExceeded, "limit set sampling exceeded " + std::to_string(options.word_cap) + " words");
    const Vector ls = p.log_singular_values();
    std::vector<double> margins;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) {
      margins.push_back(ls(i) - ls(i + 1));
      min_margin = std::min(min_margin, margins.back());
    }
    if (min_margin >= margin_threshold) candidates.push_back({word_to_string(word), margins, p.left_singular_vectors()});
    return true;
  });
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return word_less(a.word, b.word); });
  for (auto& c : candidates) {
    Flag f = Flag::from_basis(c.basis);
    bool duplicate = false;
    for (const auto& e : sample.entries)
      if (flag_distance(e.flag, f) < options.dedupe_angle) {
        duplicate = true;
        break;
      }
    if (!duplicate) sample.entries.push_back({std::move(f), std::move(c.word), std::move(c.margins)});
  }
  return sample;
}

MembershipResult thickening_membership(const Flag& f, std::span<const Flag> sample, const Thickening& th,
                                       RankOptions options) {
  const auto& g = th.group();
  if (!(g->type() == CoxeterType::a(f.dim() - 1)))
    throw Error(Errc::WrongGroupType, "thickening must live in A(" + std::to_string(f.dim() - 1) + ")");
  MembershipResult out;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto pos = relative_position(f, sample[k], options);
    // Indices agree across instances of the same type: enumeration is deterministic.
    if (th.contains(pos.w)) {
      out.member = true;
      out.witness = k;
      out.position = pos.w;
      return out;
    }
  }
  return out;
}

MembershipResult thickening_membership(const Flag& f, const FlagSample& sample, const Thickening& th,
                                       RankOptions options) {
  std::vector<Flag> flags;
  for (const auto& e : sample.entries) flags.push_back(e.flag);
  return thickening_membership(f, flags, th, options);
}

Index complementary_position(const WeylGroup& group, Index w) { return group.multiply(group.longest(), w); }

WeylElement complementary_position(const WeylElement& w) {
  return w.group()->element(complementary_position(*w.group(), w.index()));
}

// --- expansion -------------------------------------------------------------

namespace {

// Cayley transform: skew X -> orthogonal, derivative I at 0.
Matrix cayley(const Matrix& x) {
  const Matrix id = Matrix::Identity(x.rows(), x.cols());
  return (id - 0.5 * x).partialPivLu().solve(id + 0.5 * x);
}

Matrix cayley_inverse(const Matrix& o) {
  const Matrix id = Matrix::Identity(o.rows(), o.cols());
  return 2.0 * (o + id).transpose().partialPivLu().solve((o - id).transpose()).transpose();
}

Matrix expansion_jacobian(const Matrix& g, const Matrix& b, double h) {
  const int n = static_cast<int>(b.rows());
  std::vector<std::pair<int, int>> coords;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) coords.emplace_back(i, j);
  const int m = static_cast<int>(coords.size());
  const Matrix q0 = linalg::orthonormalize(g * b);
  auto image = [&](const Matrix& x) {
    const Matrix q = linalg::orthonormalize(g * b * cayley(x));
    const Matrix y = cayley_inverse(q0.transpose() * q);
    Vector out(m);
    for (int k = 0; k < m; ++k) out(k) = y(coords[static_cast<std::size_t>(k)].first, coords[static_cast<std::size_t>(k)].second);
    return out;
  };
  Matrix jac(m, m);
  for (int k = 0; k < m; ++k) {
    Matrix x = Matrix::Zero(n, n);
    const auto [i, j] = coords[static_cast<std::size_t>(k)];
    x(i, j) = h;
    x(j, i) = -h;
    jac.col(k) = (image(x) - image(-x)) / (2 * h);
  }
  return jac;
}

}  // namespace

double expansion_factor(const Matrix& g, const Flag& f, ExpansionOptions options) {
  if (g.rows() != f.dim() || g.cols() != f.dim()) throw Error(Errc::InvalidArgument, "dimension mismatch");
  if (!(options.step > 0)) throw Error(Errc::InvalidArgument, "step must be positive");
  if (Eigen::FullPivLU<Matrix>(g).rank() < g.rows()) throw Error(Errc::SingularInput, "matrix is singular");
  const Matrix j1 = expansion_jacobian(g, f.basis(), options.step);
  const Matrix j2 = expansion_jacobian(g, f.basis(), options.step / 2);
  const double scale = std::max(j1.norm(), 1e-300);
  if ((j1 - j2).norm() / scale > options.richardson_tolerance)
    throw Error(Errc::StepTooLarge, "finite-difference Jacobian changes under step halving; reduce the step");
  // Richardson extrapolation of the central differences.
  const Matrix jac = (4.0 * j2 - j1) / 3.0;
  const Vector s = singular_values(jac);
  return s(s.size() - 1);
}

// --- nondiscreteness -------------------------------------------------------

std::string_view status_name(NondiscretenessResult::Status s) {
  switch (s) {
    case NondiscretenessResult::Status::Found: return "found";
    case NondiscretenessResult::Status::NoneFound: return "none_found";
    case NondiscretenessResult::Status::BudgetExceeded: return "budget_exceeded";
  }
  return "unknown";
}

NondiscretenessResult nondiscreteness_certificate(std::span<const Matrix> generators, double epsilon, int max_len,
                                                  NondiscretenessOptions options) {
  if (!(epsilon > 0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  NondiscretenessResult out;
  if (generators.empty() || max_len < 1) return out;
  const auto letters = letter_matrices(generators);
  const int n = static_cast<int>(letters.front().rows());
  const Matrix id = Matrix::Identity(n, n);

  struct Small {
    std::string word;
    Matrix m;
  };
  std::vector<Small> small;
  bool exhausted = false;
  walk_words(letters, max_len, DenseState{id}, [&](const std::vector<int>& word, const DenseState& s) {
    if (exhausted) return false;
    if (++out.elements_examined > options.element_budget) {
      exhausted = true;
      --out.elements_examined;
      return false;
    }
    const Matrix diff = s.m - id;
    const double fro = diff.norm();
    if (fro / std::sqrt(static_cast<double>(n)) >= epsilon) return true;
    const double op = singular_values(diff)(0);
    if (op < epsilon && op > options.identity_threshold) small.push_back({word_to_string(word), s.m});
    return true;
  });
  out.small_elements = small.size();
  std::sort(small.begin(), small.end(), [](const Small& a, const Small& b) { return word_less(a.word, b.word); });
  if (small.size() > options.tuple_pool) small.resize(options.tuple_pool);

  auto commutator = [](const Matrix& a, const Matrix& b) { return Matrix(a * b * a.inverse() * b.inverse()); };
  // Odometer over n-tuples of pool indices in lexicographic order.
  const std::size_t k = small.size();
  if (k > 0) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
      Matrix c = small[idx[0]].m;
      for (int t = 1; t < n; ++t) c = commutator(c, small[idx[static_cast<std::size_t>(t)]].m);
      const double norm = singular_values(c - id)(0);
      if (norm > options.commutator_threshold) {
        out.status = NondiscretenessResult::Status::Found;
        for (auto i : idx) out.words.push_back(small[i].word);
        out.commutator_norm = norm;
        return out;
      }
      int pos = n - 1;
      while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == k) idx[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
  }
  out.status = exhausted ? NondiscretenessResult::Status::BudgetExceeded : NondiscretenessResult::Status::NoneFound;
  return out;
}

}  // namespace weylgeom
