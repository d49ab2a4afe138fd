#include "weylgeom/thickenings.hpp"

#include <algorithm>
#include <map>

namespace weylgeom {

bool is_lower_ideal(const WeylGroup& group, const boost::dynamic_bitset<>& members) {
  for (auto v = members.find_first(); v != boost::dynamic_bitset<>::npos; v = members.find_next(v)) {
    for (Index u : group.lower_covers(static_cast<Index>(v)))
      if (!members.test(u)) return false;
  }
  return true;
}

Thickening::Thickening(std::shared_ptr<const WeylGroup> group, boost::dynamic_bitset<> members)
    : group_(std::move(group)), members_(std::move(members)) {
  if (!group_) throw Error(Errc::InvalidArgument, "thickening needs a group");
  if (members_.size() != group_->order())
    throw Error(Errc::InvalidArgument, "membership set size does not match the group order");
  if (!is_lower_ideal(*group_, members_)) throw Error(Errc::NotAnIdeal, "member set is not downward closed");
}

Thickening Thickening::empty(std::shared_ptr<const WeylGroup> group) {
  const auto n = group->order();
  return Thickening(std::move(group), boost::dynamic_bitset<>(n));
}

Thickening Thickening::whole(std::shared_ptr<const WeylGroup> group) {
  boost::dynamic_bitset<> bits(group->order());
  bits.set();
  return Thickening(std::move(group), std::move(bits));
}

Thickening Thickening::ball(std::shared_ptr<const WeylGroup> group, Index radius) {
  const Index gens[] = {radius};
  return down_closure(std::move(group), gens);
}

Thickening Thickening::from_elements(std::shared_ptr<const WeylGroup> group, std::span<const Index> elements) {
  boost::dynamic_bitset<> bits(group->order());
  for (Index w : elements) {
    if (w >= group->order()) throw Error(Errc::InvalidArgument, "element index out of range");
    bits.set(w);
  }
  return Thickening(std::move(group), std::move(bits));
}

std::vector<Index> Thickening::elements() const {
  std::vector<Index> out;
  for (auto v = members_.find_first(); v != boost::dynamic_bitset<>::npos; v = members_.find_next(v))
    out.push_back(static_cast<Index>(v));
  return out;
}

std::string Thickening::bitstring() const {
  std::string s(members_.size(), '0');
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_.test(i)) s[i] = '1';
  return s;
}

bool Thickening::is_slim() const {
  const Index w0 = group_->longest();
  for (auto v = members_.find_first(); v != boost::dynamic_bitset<>::npos; v = members_.find_next(v))
    if (members_.test(group_->multiply(w0, static_cast<Index>(v)))) return false;
  return true;
}

bool Thickening::is_fat() const {
  const Index w0 = group_->longest();
  for (Index w = 0; w < group_->order(); ++w)
    if (!members_.test(w) && !members_.test(group_->multiply(w0, w))) return false;
  return true;
}

Thickening down_closure(std::shared_ptr<const WeylGroup> group, std::span<const Index> generators) {
  boost::dynamic_bitset<> bits(group->order());
  std::vector<Index> stack;
  for (Index r : generators) {
    if (r >= group->order()) throw Error(Errc::InvalidArgument, "element index out of range");
    if (!bits.test(r)) {
      bits.set(r);
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index u : group->lower_covers(v)) {
      if (!bits.test(u)) {
        bits.set(u);
        stack.push_back(u);
      }
    }
  }
  return Thickening(std::move(group), std::move(bits));
}

namespace {

// Backtracking over the complementary pairs {w, w0 w} with constraint
// propagation: putting w in forces everything below it in; leaving w out
// forces everything above it out; w and w0 w always take opposite values.
class BalancedSearch {
 public:
  BalancedSearch(const WeylGroup& group, std::uint64_t node_cap)
      : group_(group), node_cap_(node_cap), status_(group.order(), kUnknown), partner_(group.order()) {
    const Index w0 = group.longest();
    for (Index w = 0; w < group.order(); ++w) partner_[w] = group.multiply(w0, w);
  }

  void run(const std::function<void(const std::vector<std::int8_t>&)>& on_solution) {
    on_solution_ = &on_solution;
    descend(0);
  }

 private:
  static constexpr std::int8_t kUnknown = -1;

  bool assign(Index w, std::int8_t value) {
    std::vector<std::pair<Index, std::int8_t>> queue{{w, value}};
    while (!queue.empty()) {
      auto [x, val] = queue.back();
      queue.pop_back();
      if (status_[x] == val) continue;
      if (status_[x] != kUnknown) return false;
      status_[x] = val;
      trail_.push_back(x);
      queue.emplace_back(partner_[x], static_cast<std::int8_t>(1 - val));
      if (val == 1) {
        for (Index u : group_.lower_covers(x)) queue.emplace_back(u, 1);
      } else {
        for (Index u : group_.upper_covers(x)) queue.emplace_back(u, 0);
      }
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      status_[trail_.back()] = kUnknown;
      trail_.pop_back();
    }
  }

  void descend(Index start) {
    Index next = start;
    while (next < status_.size() && status_[next] != kUnknown) ++next;
    if (next == status_.size()) {
      (*on_solution_)(status_);
      return;
    }
    for (std::int8_t val : {std::int8_t{1}, std::int8_t{0}}) {
      if (++nodes_ > node_cap_)
        throw Error(Errc::GroupTooLarge, "balanced-thickening search exceeded " + std::to_string(node_cap_) + " nodes");
      const std::size_t mark = trail_.size();
      if (assign(next, val)) descend(next + 1);
      undo(mark);
    }
  }

  const WeylGroup& group_;
  std::uint64_t node_cap_;
  std::uint64_t nodes_ = 0;
  std::vector<std::int8_t> status_;
  std::vector<Index> partner_;
  std::vector<Index> trail_;
  const std::function<void(const std::vector<std::int8_t>&)>* on_solution_ = nullptr;
};

}  // namespace

std::vector<Thickening> enumerate_balanced(const std::shared_ptr<const WeylGroup>& group,
                                           BalancedSearchOptions options) {
  std::vector<Thickening> out;
  BalancedSearch search(*group, options.node_cap);
  search.run([&](const std::vector<std::int8_t>& status) {
    boost::dynamic_bitset<> bits(status.size());
    for (std::size_t i = 0; i < status.size(); ++i)
      if (status[i] == 1) bits.set(i);
    out.emplace_back(group, std::move(bits));
  });
  std::sort(out.begin(), out.end(),
            [](const Thickening& a, const Thickening& b) { return a.bitstring() < b.bitstring(); });
  return out;
}

std::uint64_t count_balanced(const std::shared_ptr<const WeylGroup>& group, BalancedSearchOptions options) {
  std::uint64_t count = 0;
  BalancedSearch search(*group, options.node_cap);
  search.run([&](const std::vector<std::int8_t>&) { ++count; });
  return count;
}

// --- weights ---------------------------------------------------------------

WeightVector::WeightVector(std::vector<Rational> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(Errc::InvalidArgument, "weight vector must be nonempty");
  for (const auto& w : weights_)
    if (w <= 0) throw Error(Errc::InvalidArgument, "weights must be strictly positive, got " + to_string(w));
}

WeightVector WeightVector::from_doubles(std::span<const double> weights) {
  std::vector<Rational> q;
  for (double w : weights) q.push_back(rational_from_double(w));
  return WeightVector(std::move(q));
}

Rational WeightVector::total() const {
  Rational m = 0;
  for (const auto& w : weights_) m += w;
  return m;
}

std::vector<int> sign_vector(const WeylGroup& group, Index w) {
  if (!group.type().is_a1_power()) throw Error(Errc::WrongGroupType, "sign vectors need W = (Z_2)^n");
  std::vector<int> eps(static_cast<std::size_t>(group.rank()), 1);
  for (int s : group.reduced_word(w)) eps[static_cast<std::size_t>(s)] = -1;
  return eps;
}

std::optional<Index> from_sign_vector(const WeylGroup& group, std::span<const int> signs) {
  if (!group.type().is_a1_power()) throw Error(Errc::WrongGroupType, "sign vectors need W = (Z_2)^n");
  if (static_cast<int>(signs.size()) != group.rank()) return std::nullopt;
  std::vector<int> word;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] == -1) {
      word.push_back(static_cast<int>(i));
    } else if (signs[i] != 1) {
      return std::nullopt;
    }
  }
  return group.from_word(word);
}

std::pair<Thickening, Thickening> metric_thickening(const std::shared_ptr<const WeylGroup>& group,
                                                    const WeightVector& a) {
  if (!group->type().is_a1_power())
    throw Error(Errc::WrongGroupType, "metric thickenings are defined for W = (Z_2)^n, got " + group->type().to_string());
  if (static_cast<int>(a.size()) != group->rank())
    throw Error(Errc::InvalidArgument, "weight vector length " + std::to_string(a.size()) + " does not match rank " +
                                           std::to_string(group->rank()));
  boost::dynamic_bitset<> strict(group->order()), nonstrict(group->order());
  for (Index w = 0; w < group->order(); ++w) {
    const auto eps = sign_vector(*group, w);
    Rational dot = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) dot += eps[i] > 0 ? a[i] : Rational(-a[i]);
    if (dot > 0) strict.set(w);
    if (dot >= 0) nonstrict.set(w);
  }
  return {Thickening(group, std::move(strict)), Thickening(group, std::move(nonstrict))};
}

Thickening metric_thickening_general(const std::shared_ptr<const WeylGroup>& group, std::span<const Rational> a) {
  const int d = group->ambient_dim();
  if (static_cast<int>(a.size()) != d)
    throw Error(Errc::InvalidArgument, "vector length does not match the model flat dimension");
  boost::dynamic_bitset<> bits(group->order());
  for (Index w = 0; w < group->order(); ++w) {
    const auto m = group->matrix(w);
    Rational dot = 0;
    for (int i = 0; i < d; ++i) {
      Rational row = 0;
      for (int j = 0; j < d; ++j) row += Rational(m.at(i, j)) * a[static_cast<std::size_t>(j)];
      dot += a[static_cast<std::size_t>(i)] * row;
    }
    if (dot / m.denominator > 0) bits.set(w);
  }
  if (!is_lower_ideal(*group, bits))
    throw Error(Errc::NotAnIdeal, "{w : <a, w a> > 0} is not a thickening for this vector");
  return Thickening(group, std::move(bits));
}

std::optional<std::vector<int>> balance_witness(const WeightVector& a) {
  const std::size_t n = a.size();
  if (n > 30) throw Error(Errc::InvalidArgument, "balance check supports at most 30 weights");
  BigInt lcm = 1;
  for (const auto& w : a.values()) {
    const BigInt den = boost::multiprecision::denominator(w);
    lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
  }
  std::vector<BigInt> b;
  BigInt total = 0;
  for (const auto& w : a.values()) {
    b.push_back(boost::multiprecision::numerator(w) * (lcm / boost::multiprecision::denominator(w)));
    total += b.back();
  }
  if (total % 2 != 0) return std::nullopt;
  const BigInt half = total / 2;

  // Index 0 always belongs to I (I and its complement give the same equation).
  const std::size_t left_n = n / 2;
  const std::size_t right_n = n - left_n;
  std::map<BigInt, std::uint32_t> left;
  for (std::uint32_t mask = 0; mask < (1u << left_n); ++mask) {
    BigInt s = 0;
    for (std::size_t i = 0; i < left_n; ++i)
      if (mask & (1u << i)) s += b[i];
    left.emplace(s, mask);
  }
  std::optional<std::uint64_t> best;
  for (std::uint32_t mask = 0; mask < (1u << right_n); ++mask) {
    BigInt s = 0;
    for (std::size_t i = 0; i < right_n; ++i)
      if (mask & (1u << i)) s += b[left_n + i];
    if (s > half) continue;
    auto it = left.find(half - s);
    if (it == left.end()) continue;
    std::uint64_t full = (static_cast<std::uint64_t>(mask) << left_n) | it->second;
    if (!(full & 1u)) full = ((std::uint64_t{1} << n) - 1) ^ full;
    if (!best || full < *best) best = full;
  }
  if (!best) return std::nullopt;
  std::vector<int> subset;
  for (std::size_t i = 0; i < n; ++i)
    if (*best & (std::uint64_t{1} << i)) subset.push_back(static_cast<int>(i));
  return subset;
}

bool weight_is_balanced(const WeightVector& a) { return !balance_witness(a).has_value(); }

}  // namespace weylgeom
