#include "weylgeom/gitconfig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/pending/disjoint_sets.hpp>

#include "weylgeom/coxeter.hpp"
#include "weylgeom/error.hpp"

namespace weylgeom {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double reduce_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

Rational reduce_turn(const Rational& t) {
  const BigInt num = boost::multiprecision::numerator(t), den = boost::multiprecision::denominator(t);
  BigInt q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return t - Rational(q);
}

std::shared_ptr<const WeylGroup> a1_power_group(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const WeylGroup>> cache;
  std::lock_guard lock(mu);
  auto& g = cache[n];
  if (!g) g = WeylGroup::build(CoxeterType::a1_power(n));
  return g;
}

}  // namespace

WeightedConfig::WeightedConfig(std::vector<Vector> points, std::vector<double> angles,
                               std::optional<std::vector<Rational>> turns, WeightVector weights, bool circle)
    : points_(std::move(points)),
      angles_(std::move(angles)),
      turns_(std::move(turns)),
      weights_(std::move(weights)),
      circle_(circle) {
  if (points_.size() != weights_.size())
    throw Error(Errc::InvalidArgument, "configuration has " + std::to_string(points_.size()) + " points but " +
                                           std::to_string(weights_.size()) + " weights");
}

WeightedConfig WeightedConfig::circle(std::vector<double> angles, WeightVector weights) {
  std::vector<Vector> pts;
  for (auto& t : angles) {
    if (!std::isfinite(t)) throw Error(Errc::InvalidArgument, "angles must be finite");
    t = reduce_angle(t);
    Vector p(2);
    p << std::cos(t), std::sin(t);
    pts.push_back(p);
  }
  return WeightedConfig(std::move(pts), std::move(angles), std::nullopt, std::move(weights), true);
}

WeightedConfig WeightedConfig::circle_turns(std::vector<Rational> turns, WeightVector weights) {
  std::vector<double> angles;
  for (auto& t : turns) {
    t = reduce_turn(t);
    angles.push_back(to_double(t) * kTwoPi);
  }
  auto z = circle(std::move(angles), std::move(weights));
  z.turns_ = std::move(turns);
  return z;
}

WeightedConfig WeightedConfig::sphere(std::vector<Vector> points, WeightVector weights) {
  if (points.empty()) throw Error(Errc::InvalidArgument, "configuration must have at least one point");
  const auto d = points.front().size();
  if (d < 2) throw Error(Errc::InvalidArgument, "sphere points need at least two coordinates");
  for (auto& p : points) {
    if (p.size() != d) throw Error(Errc::InvalidArgument, "sphere points have different dimensions");
    const double nrm = p.norm();
    if (!(nrm > 0) || !std::isfinite(nrm)) throw Error(Errc::InvalidArgument, "sphere points must be nonzero");
    p /= nrm;
  }
  std::vector<double> angles;
  if (d == 2)
    for (const auto& p : points) angles.push_back(reduce_angle(std::atan2(p(1), p(0))));
  return WeightedConfig(std::move(points), std::move(angles), std::nullopt, std::move(weights), d == 2);
}

double WeightedConfig::distance(std::size_t i, std::size_t j) const {
  if (turns_) {
    if ((*turns_)[i] == (*turns_)[j]) return 0.0;
    Rational diff = (*turns_)[i] - (*turns_)[j];
    if (diff < 0) diff = -diff;
    if (diff > Rational(1, 2)) diff = 1 - diff;
    return std::max(to_double(diff) * kTwoPi, std::numeric_limits<double>::min());
  }
  if (circle_) {
    const double d = std::fabs(angles_[i] - angles_[j]);
    return std::min(d, kTwoPi - d);
  }
  return 2.0 * std::asin(std::min(1.0, (points_[i] - points_[j]).norm() / 2.0));
}

WeightedConfig WeightedConfig::with_point_of(std::size_t i, std::size_t j) const {
  WeightedConfig z = *this;
  z.points_[i] = points_[j];
  if (!angles_.empty()) z.angles_[i] = angles_[j];
  if (turns_) (*z.turns_)[i] = (*turns_)[j];
  return z;
}

WeightedConfig WeightedConfig::rotated(double t) const {
  if (!circle_) throw Error(Errc::InvalidArgument, "rotation is defined for circle configurations");
  std::vector<double> a = angles_;
  for (auto& x : a) x += t;
  return circle(std::move(a), weights_);
}

WeightedConfig WeightedConfig::with_weights(WeightVector weights) const {
  return WeightedConfig(points_, angles_, turns_, std::move(weights), circle_);
}

std::vector<MassCluster> aggregate_masses(const WeightedConfig& z, double tol) {
  if (!(tol >= 0)) throw Error(Errc::InvalidArgument, "tolerance must be nonnegative");
  const std::size_t n = z.size();
  std::vector<std::size_t> rank(n), parent(n);
  boost::disjoint_sets<std::size_t*, std::size_t*> sets(rank.data(), parent.data());
  for (std::size_t i = 0; i < n; ++i) sets.make_set(i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (z.distance(i, j) <= tol) sets.union_set(i, j);
  std::map<std::size_t, MassCluster> by_root;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find_set(i);
    auto [it, fresh] = by_root.try_emplace(r);
    if (fresh) order.push_back(r);
    it->second.members.push_back(i);
    it->second.mass += z.weights()[i];
  }
  std::vector<MassCluster> out;
  for (auto r : order) out.push_back(std::move(by_root[r]));
  return out;
}

bool is_stable(const WeightedConfig& z, double tol) {
  const Rational half = z.total_mass() / 2;
  for (const auto& c : aggregate_masses(z, tol))
    if (!(c.mass < half)) return false;
  return true;
}

bool is_semistable(const WeightedConfig& z, double tol) {
  const Rational half = z.total_mass() / 2;
  for (const auto& c : aggregate_masses(z, tol))
    if (c.mass > half) return false;
  return true;
}

std::vector<int> relpos_config(const WeightedConfig& z, const WeightedConfig& z_prime, double tol) {
  if (z.size() != z_prime.size()) throw Error(Errc::InvalidArgument, "configurations have different sizes");
  if (z.points().front().size() != z_prime.points().front().size())
    throw Error(Errc::InvalidArgument, "configurations live on different spheres");
  std::vector<int> eps;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double d;
    if (z.turns() && z_prime.turns()) {
      d = (*z.turns())[i] == (*z_prime.turns())[i] ? 0.0 : std::numeric_limits<double>::infinity();
    } else if (z.is_circle() && z_prime.is_circle()) {
      d = std::fabs(z.angles()[i] - z_prime.angles()[i]);
      d = std::min(d, kTwoPi - d);
    } else {
      d = 2.0 * std::asin(std::min(1.0, (z.points()[i] - z_prime.points()[i]).norm() / 2.0));
    }
    eps.push_back(d <= tol ? 1 : -1);
  }
  return eps;
}

bool diagonal_thickening_check(const WeightedConfig& z, bool strict, double tol) {
  if (!z.is_circle()) throw Error(Errc::InvalidArgument, "the diagonal check is defined for circle configurations");
  const bool by_stability = strict ? !is_semistable(z, tol) : !is_stable(z, tol);

  const int n = static_cast<int>(z.size());
  const auto group = a1_power_group(n);
  const auto [th, th_closure] = metric_thickening(group, z.weights());
  const Thickening& target = strict ? th : th_closure;
  // Diagonal points away from every s_j sit at w0, which is never in the
  // thickening, so the candidates d = (s_j, ..., s_j) suffice.
  bool by_position = false;
  for (int j = 0; j < n && !by_position; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const WeightedConfig d =
        z.turns() ? WeightedConfig::circle_turns(std::vector<Rational>(z.size(), (*z.turns())[jj]), z.weights())
                  : WeightedConfig::circle(std::vector<double>(z.size(), z.angles()[jj]), z.weights());
    const std::vector<int> eps = relpos_config(z, d, tol);
    const auto w = from_sign_vector(*group, eps);
    if (!w) throw Error(Errc::InconsistentBackends, "sign vector does not name a group element");
    by_position = target.contains(*w);
  }
  if (by_position != by_stability)
    throw Error(Errc::InconsistentBackends, std::string("stability says ") + (by_stability ? "inside" : "outside") +
                                                ", relative positions say " + (by_position ? "inside" : "outside"));
  return by_stability;
}

WallReport wall_chamber_report(const WeightVector& a) {
  const std::size_t n = a.size();
  if (n > 24) throw Error(Errc::InvalidArgument, "wall report supports at most 24 weights");
  const Rational total = a.total();
  WallReport r;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<int> idx{0};
    Rational in = a[0];
    for (std::size_t j = 1; j < n; ++j)
      if (mask >> (j - 1) & 1) {
        idx.push_back(static_cast<int>(j));
        in += a[j];
      }
    const Rational diff = in - (total - in);
    r.signs.push_back(diff > 0 ? 1 : diff < 0 ? -1 : 0);
    if (diff == 0) r.walls.push_back(std::move(idx));
  }
  return r;
}

}  // namespace weylgeom
