#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "weylgeom/coxeter.hpp"
#include "weylgeom/rational.hpp"

namespace weylgeom {

// A lower ideal of the Bruhat order ("thickening of 1 in W"). Construction
// validates downward closure and throws NotAnIdeal otherwise.
class Thickening {
 public:
  Thickening(std::shared_ptr<const WeylGroup> group, boost::dynamic_bitset<> members);

  static Thickening empty(std::shared_ptr<const WeylGroup> group);
  static Thickening whole(std::shared_ptr<const WeylGroup> group);
  // B(1, r) = {w : w <= r}.
  static Thickening ball(std::shared_ptr<const WeylGroup> group, Index radius);
  static Thickening from_elements(std::shared_ptr<const WeylGroup> group, std::span<const Index> elements);

  const std::shared_ptr<const WeylGroup>& group() const { return group_; }
  bool contains(Index w) const { return members_.test(w); }
  std::size_t size() const { return members_.count(); }
  std::vector<Index> elements() const;
  const boost::dynamic_bitset<>& bits() const { return members_; }
  // '0'/'1' per element index, index 0 first; the enumeration order key.
  std::string bitstring() const;

  bool is_slim() const;
  bool is_fat() const;
  bool is_balanced() const { return is_slim() && is_fat(); }

  bool operator==(const Thickening& other) const {
    return group_ == other.group_ && members_ == other.members_;
  }

 private:
  std::shared_ptr<const WeylGroup> group_;
  boost::dynamic_bitset<> members_;
};

bool is_lower_ideal(const WeylGroup& group, const boost::dynamic_bitset<>& members);

// Smallest thickening containing every element of `generators`.
Thickening down_closure(std::shared_ptr<const WeylGroup> group, std::span<const Index> generators);

struct BalancedSearchOptions {
  // Search nodes (branch decisions) allowed before GroupTooLarge.
  std::uint64_t node_cap = 100'000;
};

// All balanced thickenings, sorted by bitstring.
std::vector<Thickening> enumerate_balanced(const std::shared_ptr<const WeylGroup>& group,
                                           BalancedSearchOptions options = {});
std::uint64_t count_balanced(const std::shared_ptr<const WeylGroup>& group, BalancedSearchOptions options = {});

// Strictly positive weights a = (a_1..a_n).
class WeightVector {
 public:
  explicit WeightVector(std::vector<Rational> weights);
  static WeightVector from_doubles(std::span<const double> weights);

  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<Rational>& values() const { return weights_; }
  Rational total() const;

 private:
  std::vector<Rational> weights_;
};

// Sign vector of an element of (Z_2)^n: -1 exactly at the generators that
// occur in its (unique) reduced word.
std::vector<int> sign_vector(const WeylGroup& group, Index w);
std::optional<Index> from_sign_vector(const WeylGroup& group, std::span<const int> signs);

// (Th_a, closure Th_a) = ({a.w > 0}, {a.w >= 0}) in W = (Z_2)^n.
std::pair<Thickening, Thickening> metric_thickening(const std::shared_ptr<const WeylGroup>& group,
                                                    const WeightVector& a);

// Experimental analogue for an arbitrary W in its reflection realization:
// {w : <a, w a> > 0}. Throws NotAnIdeal when the set is not a thickening.
Thickening metric_thickening_general(const std::shared_ptr<const WeylGroup>& group,
                                     std::span<const Rational> a);

// True iff no index set I satisfies sum_I a_i = sum_{not I} a_j (n <= 30).
bool weight_is_balanced(const WeightVector& a);
// An index set I realizing the equality, if any (lexicographically first
// among those found by the meet-in-the-middle scan; always contains 0).
std::optional<std::vector<int>> balance_witness(const WeightVector& a);

}  // namespace weylgeom
