#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "weylgeom/error.hpp"
#include "weylgeom/morse.hpp"

using namespace weylgeom;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix rot(int axis, double t) {
  Matrix r = Matrix::Identity(3, 3);
  const int i = (axis + 1) % 3, j = (axis + 2) % 3;
  r(i, i) = r(j, j) = std::cos(t);
  r(i, j) = -std::sin(t);
  r(j, i) = std::sin(t);
  return r;
}

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << a, b, c;
  return m;
}

Matrix random_sl3(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(3, 3);
  for (int i = 0; i < 9; ++i) g.data()[i] = nd(rng);
  if (g.determinant() < 0) g.col(0) *= -1;
  return g / std::cbrt(g.determinant());
}

// Flat coordinates (x, y) -> diagonal exponent vector, first axis on a wall.
Vector flat_vec(double x, double y) {
  Vector v(3);
  v << 2 * x / std::sqrt(6.0), -x / std::sqrt(6.0) + y / std::sqrt(2.0), -x / std::sqrt(6.0) - y / std::sqrt(2.0);
  return v;
}

// Finsler length of a flat displacement for c = (2, 0, -2).
double flat_finsler(const Vector& u) { return 2.0 * (u.maxCoeff() - u.minCoeff()); }

// zeta arranged along the order of u: the largest entry of u gets zeta_1.
Vector chamber_zeta(const Vector& u, const Vector& zeta) {
  std::vector<int> idx(static_cast<std::size_t>(u.size()));
  for (int i = 0; i < u.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return u(a) > u(b); });
  Vector out(u.size());
  for (int r = 0; r < u.size(); ++r) out(idx[static_cast<std::size_t>(r)]) = zeta(r);
  return out;
}

double chord_angle(const Vector& p, const Vector& q) { return 2.0 * std::asin(std::min(1.0, (p - q).norm() / 2.0)); }

std::vector<Matrix> standard_pair() {
  const Matrix g1 = diag3(4, 1, 0.25);
  const Matrix h = rot(2, 0.9) * rot(1, 0.7) * rot(0, 1.3);
  return {g1, h * g1 * h.transpose()};
}

}  // namespace

TEST_CASE("zeta type validation and default") {
  const auto z = ZetaType::standard(3);
  CHECK(z.values()(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(z.values()(1) == doctest::Approx(0.0));
  CHECK(z.values().norm() == doctest::Approx(1.0));
  const auto z4 = ZetaType::standard(4);
  CHECK(z4.values()(0) == doctest::Approx(3 / std::sqrt(20.0)));
  Vector bad(3);
  bad << 2, 0, -1;
  CHECK_THROWS_AS(ZetaType{bad}, Error);
  bad << 1, 1, -2;
  CHECK_THROWS_AS(ZetaType{bad}, Error);
}

TEST_CASE("zeta direction in the model flat and equivariance") {
  const auto z = ZetaType::standard(3);
  const auto o = SymPoint::origin(3);
  const auto y = SymPoint::from_matrix(diag3(std::exp(2.0), 1.0, std::exp(-2.0)));
  const Matrix v = zeta_direction(o, y, z);
  CHECK((v - diag3(1, 0, -1) / std::sqrt(2.0)).norm() < 1e-12);
  CHECK(tangent_inner(o, v, v) == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = random_sl3(rng);
    const auto x = SymPoint::from_group(random_sl3(rng));
    const auto w = SymPoint::from_group(random_sl3(rng));
    const Matrix a = zeta_direction(x.act(g), w.act(g), z);
    const Matrix b = g * zeta_direction(x, w, z) * g.transpose();
    CHECK((a - b).norm() < 1e-8 * (1 + b.norm()));
    CHECK(tangent_inner(x, zeta_direction(x, w, z), zeta_direction(x, w, z)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("zeta direction rejects segments on walls") {
  const auto z = ZetaType::standard(3);
  const auto o = SymPoint::origin(3);
  const auto wall = SymPoint::from_matrix(diag3(std::exp(1.0), std::exp(1.0), std::exp(-2.0)));
  try {
    zeta_direction(o, wall, z);
    FAIL("expected TieError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TieError);
  }
  CHECK_THROWS_AS(zeta_direction(o, o, z), Error);
}

TEST_CASE("zeta angle: trivial, opposite and flat oracle") {
  const auto z = ZetaType::standard(3);
  const auto o = SymPoint::origin(3);
  Vector u(3);
  u << 1.0, 0.2, -1.2;
  const auto y = SymPoint::from_flat(u);
  CHECK(zeta_angle(o, y, y, z) == doctest::Approx(0.0));
  CHECK(zeta_angle(o, y, SymPoint::from_flat(-u), z) == doctest::Approx(kPi));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = nd(rng);
      b(i) = nd(rng);
    }
    a.array() -= a.mean();
    b.array() -= b.mean();
    const double expected = chord_angle(chamber_zeta(a, z.values()), chamber_zeta(b, z.values()));
    CHECK(zeta_angle(o, SymPoint::from_flat(a), SymPoint::from_flat(b), z) == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("zeta angle symmetry and invariance") {
  const auto z = ZetaType::standard(3);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = SymPoint::from_group(random_sl3(rng));
    const auto y1 = SymPoint::from_group(random_sl3(rng));
    const auto y2 = SymPoint::from_group(random_sl3(rng));
    const Matrix g = random_sl3(rng);
    const double a = zeta_angle(x, y1, y2, z);
    CHECK(std::fabs(a - zeta_angle(x, y2, y1, z)) < 1e-8);
    CHECK(std::fabs(a - zeta_angle(x.act(g), y1.act(g), y2.act(g), z)) < 1e-8);
    CHECK(a >= 0.0);
    CHECK(a <= kPi);
  }
}

TEST_CASE("diamond membership") {
  const auto phi = FinslerFunctional::standard(3);
  const auto o = SymPoint::origin(3);
  const auto y = SymPoint::from_matrix(diag3(std::exp(2.0), 1.0, std::exp(-2.0)));
  CHECK(diamond_membership(o, y, midpoint(o, y), phi));
  CHECK(diamond_membership(o, y, o, phi));
  CHECK(diamond_membership(o, y, y, phi));
  const auto far = midpoint(o, y).act(rot(0, 1.0) * rot(2, 0.8));
  CHECK(diamond_defect(o, y, far, phi) > 1e-3);
  CHECK_FALSE(diamond_membership(o, y, far, phi));

  // Flat oracle: the defect of a flat point is the sum of flat Finsler lengths
  // minus the direct one.
  const Vector a = flat_vec(0, 0), b = flat_vec(4, 1), c = flat_vec(1, 3);
  const double expected = flat_finsler(c - a) + flat_finsler(b - c) - flat_finsler(b - a);
  CHECK(expected > 0);
  CHECK(diamond_defect(SymPoint::from_flat(a), SymPoint::from_flat(b), SymPoint::from_flat(c), phi) ==
        doctest::Approx(expected).epsilon(1e-10));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = SymPoint::from_group(random_sl3(rng));
    const auto w = SymPoint::from_group(random_sl3(rng));
    const auto p = SymPoint::from_group(random_sl3(rng));
    CHECK(diamond_defect(x, w, p, phi) >= -1e-9);
    std::uniform_real_distribution<double> t(0.05, 0.95);
    CHECK(std::fabs(diamond_defect(x, w, geodesic_point(x, w, t(rng)), phi)) < 1e-8);
  }
}

TEST_CASE("straightness of simple paths") {
  const auto z = ZetaType::standard(3);
  const RegularityCone theta(0.1);
  Vector u(3);
  u << 1.0, 0.1, -1.1;
  const Vector step = u / (2 * u.norm()) * 10.0;  // Riemannian length 10

  const std::vector<SymPoint> two{SymPoint::origin(3), SymPoint::from_flat(step)};
  const auto c2 = straightness_check(two, theta, z, 0.2, 5.0);
  CHECK(c2.pass);
  CHECK_FALSE(c2.straightness_margin.has_value());
  CHECK(c2.spacing_margin == doctest::Approx(5.0));

  const std::vector<SymPoint> three{SymPoint::from_flat(-step), SymPoint::origin(3), SymPoint::from_flat(step)};
  const auto c3 = straightness_check(three, theta, z, 0.2, 5.0);
  CHECK(c3.pass);
  REQUIRE(c3.vertex_angles.size() == 1);
  CHECK(c3.vertex_angles[0] == doctest::Approx(kPi));

  // Zigzag between directions at 30 and 90 degrees: different chambers.
  std::vector<SymPoint> zig;
  std::vector<Vector> coords;
  Vector pos = flat_vec(0, 0);
  coords.push_back(pos);
  for (int i = 0; i < 5; ++i) {
    const double ang = (i % 2 == 0) ? kPi / 6 : kPi / 2;
    pos = pos + flat_vec(6 * std::cos(ang), 6 * std::sin(ang));
    coords.push_back(pos);
  }
  for (const auto& v : coords) zig.push_back(SymPoint::from_flat(v));
  const auto cz = straightness_check(zig, theta, z, 0.2, 5.0);
  CHECK_FALSE(cz.pass);
  REQUIRE(cz.straightness_margin.has_value());
  CHECK(*cz.straightness_margin < 0);
  REQUIRE(cz.first_violation.has_value());
  CHECK(cz.first_violation->kind == PathViolation::Kind::Straightness);
  CHECK(cz.first_violation->index == 1);
  for (std::size_t i = 1; i + 1 < coords.size(); ++i) {
    const Vector back = chamber_zeta(coords[i - 1] - coords[i], z.values());
    const Vector fwd = chamber_zeta(coords[i + 1] - coords[i], z.values());
    CHECK(cz.vertex_angles[i - 1] == doctest::Approx(chord_angle(back, fwd)).epsilon(1e-9));
  }

  // A vertex whose outgoing segment lies on a wall.
  const std::vector<SymPoint> tied{SymPoint::from_flat(-step), SymPoint::origin(3), SymPoint::from_flat(flat_vec(5, 0))};
  try {
    straightness_check(tied, theta, z, 0.2, 1.0);
    FAIL("expected TieError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TieError);
    CHECK(std::string(e.what()).find("vertex 1") != std::string::npos);
  }
}

TEST_CASE("Schottky certificate: cyclic case") {
  const auto z = ZetaType::standard(3);
  const RegularityCone theta(0.1);
  const std::vector<Matrix> one{diag3(4, 1, 0.25)};
  double prev = 0;
  for (int N = 1; N <= 6; ++N) {
    const auto r = schottky_certificate(one, N, theta, z);
    CHECK(r.triples.size() == 2);
    // Everything lies in one flat, so the midpoint path is a straight line.
    for (const auto& t : r.triples) {
      CHECK(t.half_angles[0] < 1e-9);
      CHECK(t.straightness_angle == doctest::Approx(kPi));
      // d(m0, m1) = d(o, g^N o) = 2 N log 4 sqrt 2.
      CHECK(t.spacing[0] == doctest::Approx(2 * N * std::log(4.0) * std::sqrt(2.0)).epsilon(1e-9));
    }
    CHECK(r.spacing_margin > prev - 10.0);
    prev = r.spacing_margin + 10.0;
    CHECK(r.pass == (N >= 3));  // spacing 3.92 N against s = 10
  }
}

TEST_CASE("Schottky certificate: standard pair") {
  const auto z = ZetaType::standard(3);
  const RegularityCone theta(0.1);
  const auto gens = standard_pair();
  const auto search = schottky_search(gens, 30, 3, theta, z);
  REQUIRE(search.n0.has_value());
  CHECK(*search.n0 == 6);
  const int n0 = *search.n0;
  double prev_spacing = -1e9, prev_angle = -1e9;
  for (int N = n0; N <= n0 + 5; ++N) {
    const auto r = schottky_certificate(gens, N, theta, z);
    CHECK(r.pass);
    CHECK(r.triples.size() == 36);
    CHECK(r.spacing_margin >= prev_spacing);
    CHECK(r.angle_margin >= prev_angle);
    prev_spacing = r.spacing_margin;
    prev_angle = r.angle_margin;
  }
  CHECK_FALSE(schottky_certificate(gens, n0 - 1, theta, z).pass);

  std::vector<Matrix> powered;
  for (const auto& g : gens) {
    Matrix p = Matrix::Identity(3, 3);
    for (int i = 0; i < n0; ++i) p = g * p;
    powered.push_back(p);
  }
  const auto growth = orbit_growth(powered, 8);
  CHECK(growth.words == 4 * (6561 - 1) / 2);  // 4 (3^8 - 1) / 2 reduced words
  CHECK(growth.min_ratio > 0);
  CHECK(growth.max_ratio / growth.min_ratio <= 3.0);
}

TEST_CASE("Schottky certificate rejects non-antipodal generators") {
  const auto z = ZetaType::standard(3);
  const RegularityCone theta(0.1);
  const Matrix g1 = diag3(4, 1, 0.25);
  const Matrix h = rot(0, 0.8);  // fixes e_1
  const std::vector<Matrix> gens{g1, h * g1 * h.transpose()};
  try {
    schottky_certificate(gens, 5, theta, z);
    FAIL("expected NotAntipodalGenerators");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotAntipodalGenerators);
  }
}

TEST_CASE("Morse defects: geodesic, kinked and Lipschitz graphs") {
  const auto phi = FinslerFunctional::standard(3);
  const RegularityCone theta(0.05);

  Vector u(3);
  u << 1.0, 0.3, -1.3;
  u /= 2 * u.norm();
  std::vector<SymPoint> line;
  for (int t = 0; t <= 30; ++t) line.push_back(SymPoint::from_flat(t * u));
  const auto rl = morse_defect_report(line, theta, 2, 1.0, 0.0, phi);
  CHECK(std::fabs(rl.qi_lower_margin) < 1e-9);
  CHECK(std::fabs(rl.qi_upper_margin) < 1e-9);
  CHECK(rl.qi_violations == 0);
  CHECK(rl.max_defect < 1e-9);

  const int T = 40;
  std::vector<SymPoint> kink;
  for (int t = -T; t <= T; ++t) kink.push_back(sl3_flat_point(t, std::abs(t)));
  const auto rk = morse_defect_report(kink, theta, 2, 2.0, 1.0, phi);
  // Oracle: symmetric window around the kink, interior point at the kink.
  for (const auto& w : rk.windows) {
    if (w.length % 2 != 0) continue;
    const double h = w.length / 2.0;
    const Vector a = flat_vec(-h, h), m = flat_vec(0, 0), b = flat_vec(h, h);
    const double oracle = flat_finsler(m - a) + flat_finsler(b - m) - flat_finsler(b - a);
    CHECK(w.max_defect >= oracle - 1e-9);
  }
  CHECK(rk.windows.back().max_defect > 30 * rk.windows.front().max_defect / 2);
  CHECK(rk.windows.back().min_regularity_margin < 0);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> slope(0.3, std::sqrt(3.0) - 0.3);
  std::vector<SymPoint> lip;
  double y = 0;
  for (int t = 0; t <= 2 * T; ++t) {
    lip.push_back(sl3_flat_point(t, y));
    y += slope(rng);
  }
  const auto rp = morse_defect_report(lip, theta, 2, 3.0, 1.0, phi);
  CHECK(rp.max_defect < 1e-8);
  CHECK(rp.qi_violations == 0);
  for (const auto& w : rp.windows) CHECK(w.min_regularity_margin > 0);
}

TEST_CASE("sl3 flat chart: first axis is a wall, 60 degree chamber") {
  const auto o = SymPoint::origin(3);
  CHECK(delta_distance(o, sl3_flat_point(1, 0)).min_gap() < 1e-12);
  CHECK(delta_distance(o, sl3_flat_point(1, std::sqrt(3.0))).min_gap() < 1e-12);
  CHECK(delta_distance(o, sl3_flat_point(1, 0.8)).min_gap() > 0.1);
  CHECK(riemannian_distance(o, sl3_flat_point(3, 4)) == doctest::Approx(10.0));
}
