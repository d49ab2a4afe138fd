#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "weylgeom/error.hpp"
#include "weylgeom/flagdyn.hpp"
#include "weylgeom/rational.hpp"

using namespace weylgeom;

namespace {

using QMatrix = std::vector<std::vector<Rational>>;

int exact_rank(QMatrix m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  int rank = 0;
  for (std::size_t c = 0; c < cols && static_cast<std::size_t>(rank) < rows; ++c) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == static_cast<std::size_t>(rank) || m[r][c] == 0) continue;
      const Rational f = m[r][c] / m[static_cast<std::size_t>(rank)][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[static_cast<std::size_t>(rank)][k];
    }
    ++rank;
  }
  return rank;
}

// Exact oracle: d_ij = i + j - rank[A_{:,1..i} | B_{:,1..j}].
Index exact_position(const WeylGroup& g, const QMatrix& a, const QMatrix& b) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXi d(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      QMatrix m(static_cast<std::size_t>(n));
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < i; ++c) m[static_cast<std::size_t>(r)].push_back(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        for (int c = 0; c < j; ++c) m[static_cast<std::size_t>(r)].push_back(b[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
      }
      d(i - 1, j - 1) = i + j - exact_rank(m);
    }
  return position_from_rank_matrix(g, d);
}

Matrix to_dense(const QMatrix& q) {
  Matrix m(static_cast<Eigen::Index>(q.size()), static_cast<Eigen::Index>(q.size()));
  for (std::size_t r = 0; r < q.size(); ++r)
    for (std::size_t c = 0; c < q.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double(q[r][c]);
  return m;
}

QMatrix multiply(const QMatrix& a, const QMatrix& b) {
  const std::size_t n = a.size();
  QMatrix c(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

QMatrix random_invertible(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> ud(-3, 3);
  while (true) {
    QMatrix m(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    for (auto& row : m)
      for (auto& x : row) x = Rational(ud(rng), 1 + std::abs(ud(rng)));
    if (exact_rank(m) == n) return m;
  }
}

// Columns permuted by a random permutation and then mixed by a random
// unipotent upper triangular matrix: lands in a prescribed Bruhat cell.
QMatrix random_cell_basis(const QMatrix& frame, std::mt19937& rng) {
  const int n = static_cast<int>(frame.size());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<int> ud(-2, 2);
  QMatrix pu(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
  for (int c = 0; c < n; ++c) {
    pu[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])][static_cast<std::size_t>(c)] = 1;
    for (int k = 0; k < c; ++k)
      if (rng() % 2) pu[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])][static_cast<std::size_t>(c)] = ud(rng);
  }
  return multiply(frame, pu);
}

Matrix random_matrix(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  return m;
}

Matrix permutation_matrix(const std::vector<int>& p) {
  const int n = static_cast<int>(p.size());
  Matrix m = Matrix::Zero(n, n);
  for (int c = 0; c < n; ++c) m(p[static_cast<std::size_t>(c)], c) = 1;
  return m;
}

// Oracle for lim gamma^{-k} F with gamma^{-1} diagonal: the coordinate flag
// whose k-th space is spanned by the highest-priority rows that keep the
// first k columns of B independent (rows ordered by growth rate).
Flag diagonal_limit(const Matrix& b, const std::vector<int>& priority) {
  const int n = static_cast<int>(b.rows());
  std::vector<int> chosen;
  for (int k = 1; k <= n; ++k) {
    for (int r : priority) {
      if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
      std::vector<int> rows = chosen;
      rows.push_back(r);
      Matrix minor(k, k);
      for (int i = 0; i < k; ++i) minor.row(i) = b.row(rows[static_cast<std::size_t>(i)]).leftCols(k);
      if (std::fabs(minor.determinant()) > 1e-9) {
        chosen.push_back(r);
        break;
      }
    }
  }
  Matrix basis = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) basis(chosen[static_cast<std::size_t>(k)], k) = 1;
  return Flag::from_basis(basis);
}

}  // namespace

TEST_CASE("flag construction") {
  const auto f = Flag::from_basis(Matrix::Identity(3, 3));
  CHECK((f.basis() - Matrix::Identity(3, 3)).norm() < 1e-15);
  const auto o = Flag::from_basis(Matrix::Identity(3, 3).rowwise().reverse());
  CHECK(flag_distance(o, Flag::opposite(3)) < 1e-12);
  std::mt19937 rng(1);
  const Matrix b = random_matrix(4, rng);
  const auto fb = Flag::from_basis(b);
  // Nested spans are preserved: first i columns of b lie in V_i.
  for (int i = 1; i <= 4; ++i) {
    const Matrix proj = fb.basis().leftCols(i) * fb.basis().leftCols(i).transpose();
    CHECK((proj * b.leftCols(i) - b.leftCols(i)).norm() < 1e-10 * b.norm());
  }
  Matrix sing = Matrix::Identity(3, 3);
  sing(2, 2) = 1e-12;
  CHECK_THROWS_AS(Flag::from_basis(sing), Error);
}

TEST_CASE("relative position basics") {
  for (int n = 2; n <= 5; ++n) {
    const auto g = WeylGroup::type_a(n - 1);
    CHECK(relative_position(Flag::standard(n), Flag::standard(n)).w == g->identity());
    CHECK(relative_position(Flag::standard(n), Flag::opposite(n)).w == g->longest());
    CHECK(is_antipodal(Flag::standard(n), Flag::opposite(n)));
    CHECK_FALSE(is_antipodal(Flag::standard(n), Flag::standard(n)));
  }
  // Shares only the line <e1> with the standard flag.
  Matrix b = Matrix::Zero(3, 3);
  b(0, 0) = b(2, 1) = b(1, 2) = 1;
  const auto r = relative_position(Flag::from_basis(b), Flag::standard(3));
  CHECK(r.group->one_line_label(r.w) == "132");
  CHECK(r.group->length(r.w) == 1);
}

TEST_CASE("floating relative position agrees with the exact oracle") {
  std::mt19937 rng(2);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 3;
    const auto g = WeylGroup::type_a(n - 1);
    const QMatrix a = random_invertible(n, rng);
    const QMatrix b = (trial % 5 == 4) ? random_invertible(n, rng) : random_cell_basis(a, rng);
    const Index exact = exact_position(*g, a, b);
    const auto fa = Flag::from_basis(to_dense(a)), fb = Flag::from_basis(to_dense(b));
    const auto r = relative_position(fa, fb);
    mismatches += r.w != exact;
    // delta(F', F) = delta(F, F')^{-1}.
    CHECK(relative_position(fb, fa).w == g->inverse(r.w));
  }
  CHECK(mismatches == 0);
}

TEST_CASE("generic pairs are antipodal") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 4;
    CHECK(is_antipodal(Flag::from_basis(random_matrix(n, rng)), Flag::from_basis(random_matrix(n, rng))));
  }
}

TEST_CASE("rank decisions near the tolerance are refused") {
  Matrix b = Matrix::Identity(3, 3);
  b(1, 0) = 1.5e-8;
  CHECK_THROWS_AS(relative_position(Flag::from_basis(b), Flag::standard(3)), Error);
  // An accepted 5e-8 next to a rejected 1e-9 in the same rank decision.
  b = Matrix::Identity(4, 4);
  b(2, 0) = 5e-8;
  b(3, 1) = 1e-9;
  CHECK_THROWS_AS(relative_position(Flag::from_basis(b), Flag::standard(4)), Error);
  // A lone 1e-6 is a clean decision.
  b = Matrix::Identity(3, 3);
  b(1, 0) = 1e-6;
  CHECK(relative_position(Flag::from_basis(b), Flag::standard(3)).w != 0);
}

TEST_CASE("attracting and repelling flags") {
  const Matrix g = Vector((Vector(3) << 4, 1, 0.25).finished()).asDiagonal();
  CHECK(flag_distance(attracting_flag(g), Flag::standard(3)) < 1e-12);
  CHECK(flag_distance(repelling_flag(g), Flag::opposite(3)) < 1e-12);
  CHECK(flag_distance(attracting_flag(g.inverse()), repelling_flag(g)) < 1e-12);
  CHECK(flag_distance(repelling_flag(g.inverse()), attracting_flag(g)) < 1e-12);

  std::mt19937 rng(4);
  const Matrix h = random_matrix(3, rng);
  const Matrix c = h * g * h.inverse();
  CHECK(flag_distance(attracting_flag(c), attracting_flag(g).transformed(h)) < 1e-9);
  CHECK(flag_distance(attracting_flag(c.inverse()), repelling_flag(c)) < 1e-9);

  // Dynamics: g^k F converges to the attracting flag.
  const auto f = Flag::from_basis(random_matrix(3, rng));
  double prev = 10;
  Flag fk = f;
  for (int k = 1; k <= 20; ++k) {
    fk = fk.transformed(g);
    const double d = flag_distance(fk, attracting_flag(g));
    CHECK(d <= prev);
    prev = d;
  }
  CHECK(relative_position(fk, attracting_flag(g)).w == 0);

  Matrix rot = Matrix::Identity(3, 3);
  rot(0, 0) = rot(1, 1) = 0;
  rot(0, 1) = -1;
  rot(1, 0) = 1;
  CHECK_THROWS_AS(attracting_flag(rot), Error);
  CHECK_THROWS_AS(attracting_flag(Matrix::Identity(3, 3)), Error);
}

TEST_CASE("limit set samples") {
  const Matrix g = Vector((Vector(3) << 4, 1, 0.25).finished()).asDiagonal();
  const Matrix gens[] = {g};
  const auto s = limit_set_sample(gens, 5, 1.0);
  REQUIRE(s.size() == 2);
  CHECK(s.entries[0].word == "a");
  CHECK(s.entries[1].word == "A");
  CHECK(flag_distance(s.entries[0].flag, Flag::standard(3)) < 1e-12);
  CHECK(flag_distance(s.entries[1].flag, Flag::opposite(3)) < 1e-12);
  CHECK(limit_set_sample(std::span<const Matrix>(), 5, 1.0).size() == 0);
  CHECK_THROWS_AS(limit_set_sample(gens, 5, 1.0, {.word_cap = 3}), Error);
}

TEST_CASE("word encoding") {
  const int w[] = {0, 1, 2, 3};
  CHECK(word_to_string(w) == "aAbB");
  CHECK(word_from_string("aAbB", 2) == std::vector<int>{0, 1, 2, 3});
  CHECK(word_less("b", "aa"));
  CHECK(word_less("aA", "ab"));
  CHECK_THROWS_AS(word_from_string("c", 2), Error);
}

TEST_CASE("thickening membership") {
  const auto g = WeylGroup::type_a(2);
  const auto balanced = enumerate_balanced(g).front();
  const Flag sample[] = {Flag::standard(3)};
  CHECK(thickening_membership(Flag::standard(3), sample, balanced).member);
  CHECK_FALSE(thickening_membership(Flag::opposite(3), sample, balanced).member);
  Matrix b = Matrix::Zero(3, 3);
  b(0, 0) = 1;
  b(1, 1) = 1;
  b(2, 1) = 0.7;
  b(2, 2) = 1;
  b(1, 2) = -0.3;
  const auto r = thickening_membership(Flag::from_basis(b), sample, balanced);
  CHECK(r.member);
  CHECK(r.witness == std::size_t{0});
  const auto b2 = WeylGroup::build(CoxeterType::b(2));
  CHECK_THROWS_AS(thickening_membership(Flag::standard(3), sample, Thickening::whole(b2)), Error);
}

TEST_CASE("complementary position") {
  const auto g = WeylGroup::type_a(2);
  CHECK(complementary_position(*g, g->identity()) == g->longest());
  CHECK(complementary_position(*g, g->longest()) == g->identity());
  const Index s1 = g->generator(0);
  CHECK(complementary_position(*g, s1) == g->multiply(g->longest(), s1));
  CHECK(g->length(complementary_position(*g, s1)) == 2);
}

TEST_CASE("left multiplication by w0 is the position to the opposite flag") {
  std::mt19937 rng(5);
  for (int n = 3; n <= 4; ++n) {
    const auto g = WeylGroup::type_a(n - 1);
    const Matrix k = linalg::orthonormalize(random_matrix(n, rng));
    const auto sigma = Flag::from_basis(k);
    const auto sigma_hat = Flag::from_basis(k * Matrix::Identity(n, n).rowwise().reverse());
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
      const auto tau = Flag::from_basis(k * permutation_matrix(p));
      const Index d = relative_position(tau, sigma).w;
      CHECK(relative_position(tau, sigma_hat).w == complementary_position(*g, d));
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST_CASE("fatness covers the apartment") {
  std::mt19937 rng(6);
  for (int n = 3; n <= 4; ++n) {
    const auto g = WeylGroup::type_a(n - 1);
    std::vector<Thickening> fat;
    for (const auto& t : enumerate_balanced(g)) fat.push_back(t);
    boost::dynamic_bitset<> all_but_top(g->order());
    all_but_top.set();
    all_but_top.reset(g->longest());
    fat.emplace_back(g, all_but_top);
    const Matrix k = linalg::orthonormalize(random_matrix(n, rng));
    const Flag s[] = {Flag::from_basis(k)};
    const Flag sh[] = {Flag::from_basis(k * Matrix::Identity(n, n).rowwise().reverse())};
    for (const auto& th : fat) {
      REQUIRE(th.is_fat());
      std::vector<int> p(static_cast<std::size_t>(n));
      std::iota(p.begin(), p.end(), 0);
      do {
        const auto tau = Flag::from_basis(k * permutation_matrix(p));
        CHECK((thickening_membership(tau, s, th).member || thickening_membership(tau, sh, th).member));
      } while (std::next_permutation(p.begin(), p.end()));
    }
  }
}

TEST_CASE("slim thickenings of antipodal flags are disjoint") {
  std::mt19937 rng(7);
  const int n = 4;
  const auto g = WeylGroup::type_a(n - 1);
  const Matrix k = linalg::orthonormalize(random_matrix(n, rng));
  const Flag s[] = {Flag::from_basis(k)};
  const Flag sh[] = {Flag::from_basis(k * Matrix::Identity(n, n).rowwise().reverse())};
  const auto slim = enumerate_balanced(g);
  std::uniform_int_distribution<int> ud(-2, 2);
  int both = 0, any = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Random flag in a random Bruhat cell relative to s.
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    Matrix u = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) u(i, j) = (rng() % 3 == 0) ? ud(rng) : 0;
    const auto f = Flag::from_basis(k * permutation_matrix(p) * u);
    const auto& th = slim[static_cast<std::size_t>(trial) % slim.size()];
    const bool a = thickening_membership(f, s, th).member, b = thickening_membership(f, sh, th).member;
    both += a && b;
    any += a || b;
  }
  CHECK(both == 0);
  CHECK(any > 100);
}

TEST_CASE("relative position is lower semicontinuous") {
  std::mt19937 rng(8);
  const int n = 4;
  const auto g = WeylGroup::type_a(n - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    const Matrix base = permutation_matrix(p);
    const Index limit = relative_position(Flag::from_basis(base), Flag::standard(n)).w;
    // Degenerate towards base along a random direction, with a random
    // subset of entries switched off so intermediate positions occur.
    Matrix dir = random_matrix(n, rng);
    for (int i = 0; i < n * n; ++i)
      if (rng() % 2) dir.data()[i] = 0;
    for (double t : {1e-1, 1e-2, 1e-3}) {
      const Index w = relative_position(Flag::from_basis(base + t * dir), Flag::standard(n)).w;
      CHECK(g->bruhat_leq(limit, w));
    }
  }
}

TEST_CASE("positions to limit flags are bounded by the complement for a cyclic diagonal group") {
  // gamma = diag(2, 1, 1/2); limit set {attracting, repelling} = {standard, opposite}.
  const int n = 3;
  const auto g = WeylGroup::type_a(n - 1);
  const Flag limit[] = {Flag::standard(n), Flag::opposite(n)};
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> ud(-2, 2);
  // gamma^{-k} grows fastest on e_3, then e_2, then e_1.
  const std::vector<int> priority = {2, 1, 0};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    Matrix u = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) u(i, j) = (rng() % 2) ? ud(rng) : 0;
    Matrix pre = Matrix::Identity(n, n);
    if (trial % 3 == 0) pre = linalg::orthonormalize(random_matrix(n, rng));
    const Matrix b = pre * permutation_matrix(p) * u;
    const auto xi_prime = Flag::from_basis(b);
    const auto xi = diagonal_limit(b, priority);
    bool found = false;
    for (const auto& lam : limit)
      for (const auto& lam_prime : limit) {
        const Index lhs = relative_position(xi_prime, lam_prime).w;
        const Index rhs = complementary_position(*g, relative_position(xi, lam).w);
        found = found || g->bruhat_leq(lhs, rhs);
      }
    CHECK(found);
  }
}

TEST_CASE("expansion factor") {
  CHECK(expansion_factor(Matrix::Identity(3, 3), Flag::standard(3)) == doctest::Approx(1.0).epsilon(1e-6));
  std::mt19937 rng(10);
  const Matrix q = linalg::orthonormalize(random_matrix(3, rng));
  const auto f = Flag::from_basis(random_matrix(3, rng));
  CHECK(expansion_factor(q, f) == doctest::Approx(1.0).epsilon(1e-6));
  // At the attracting flag of diag(l, 1, 1/l), g^{-k} stretches the three
  // chart directions by l^k, l^k and l^{2k}; the infimum is l^k.
  const double lambda = 2.0;
  for (int k = 1; k <= 5; ++k) {
    const Matrix gk = Vector((Vector(3) << std::pow(lambda, -k), 1, std::pow(lambda, k)).finished()).asDiagonal();
    CHECK(expansion_factor(gk, Flag::standard(3)) == doctest::Approx(std::pow(lambda, k)).epsilon(1e-6));
  }
  const Matrix big = Vector((Vector(3) << 1e-4, 1, 1e4).finished()).asDiagonal();
  CHECK_THROWS_AS(expansion_factor(big, Flag::standard(3), {.step = 1e-2}), Error);
}

TEST_CASE("nondiscreteness certificates") {
  const Matrix id[] = {Matrix::Identity(3, 3)};
  CHECK(nondiscreteness_certificate(id, 0.1, 6).status == NondiscretenessResult::Status::NoneFound);

  auto rot = [](int axis, double t) {
    Matrix r = Matrix::Identity(3, 3);
    const int i = (axis + 1) % 3, j = (axis + 2) % 3;
    r(i, i) = r(j, j) = std::cos(t);
    r(i, j) = -std::sin(t);
    r(j, i) = std::sin(t);
    return r;
  };
  const Matrix dense[] = {rot(0, 1.0), rot(2, 1.0)};
  const auto cert = nondiscreteness_certificate(dense, 0.1, 12);
  CHECK(cert.status == NondiscretenessResult::Status::Found);
  CHECK(cert.words.size() == 3);
  CHECK(cert.commutator_norm > 1e-6);

  std::vector<Matrix> elem;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        Matrix e = Matrix::Identity(3, 3);
        e(i, j) = 1;
        elem.push_back(e);
      }
  const auto none = nondiscreteness_certificate(elem, 0.1, 4);
  CHECK(none.status == NondiscretenessResult::Status::NoneFound);
  CHECK(none.small_elements == 0);
  const auto capped = nondiscreteness_certificate(elem, 0.1, 12, {.element_budget = 10000});
  CHECK(capped.status == NondiscretenessResult::Status::BudgetExceeded);
}
