#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "weylgeom/error.hpp"

namespace weylgeom {

using Index = std::uint32_t;

// Finite Weyl group descriptor: a direct product of irreducible factors.
// Accepted spellings: "A3", "B2", "C2" (same group as B2), "D4", "G2",
// "F4", "A1^3" (product of three A1), and "x"-separated products such as
// "A2xB2".
struct CoxeterType {
  struct Factor {
    char family;  // 'A', 'B', 'D', 'G', 'F'
    int rank;
    bool operator==(const Factor&) const = default;
  };

  std::vector<Factor> factors;

  static CoxeterType parse(std::string_view text);
  static CoxeterType a(int n) { return {{{'A', n}}}; }
  static CoxeterType b(int n) { return {{{'B', n}}}; }
  static CoxeterType d(int n) { return {{{'D', n}}}; }
  static CoxeterType g2() { return {{{'G', 2}}}; }
  static CoxeterType f4() { return {{{'F', 4}}}; }
  static CoxeterType a1_power(int n);

  int rank() const;
  // Dimension of the ambient coordinate space of the standard realization.
  int ambient_dim() const;
  // Classical order formula, computed without enumerating.
  std::uint64_t expected_order() const;
  bool is_a1_power() const;
  bool is_single_a() const { return factors.size() == 1 && factors[0].family == 'A'; }
  std::string to_string() const;

  bool operator==(const CoxeterType&) const = default;
};

// Square matrix with entries numerator/denominator where the denominator is
// shared by the whole group. Exact for every supported type.
struct ScaledIntMatrix {
  int dim = 0;
  int denominator = 1;
  std::vector<std::int64_t> numerators;  // row-major

  std::int64_t at(int r, int c) const { return numerators[static_cast<std::size_t>(r * dim + c)]; }
  Eigen::MatrixXd to_dense() const;
};

class WeylGroup;

// Handle to one element of a fixed group.
class WeylElement {
 public:
  WeylElement() = default;
  WeylElement(std::shared_ptr<const WeylGroup> group, Index index)
      : group_(std::move(group)), index_(index) {}

  const std::shared_ptr<const WeylGroup>& group() const { return group_; }
  Index index() const { return index_; }
  int length() const;
  std::string label() const;
  WeylElement inverse() const;

  friend WeylElement operator*(const WeylElement& u, const WeylElement& v);
  bool operator==(const WeylElement& other) const {
    return group_ == other.group_ && index_ == other.index_;
  }

 private:
  std::shared_ptr<const WeylGroup> group_;
  Index index_ = 0;
};

// Fully enumerated finite reflection group. Elements are indexed in
// shortlex order of their minimal reduced words, so index 0 is the
// identity and indices are nondecreasing in length. Immutable after
// construction apart from lazily built caches guarded by once-flags.
class WeylGroup : public std::enable_shared_from_this<WeylGroup> {
 public:
  static constexpr std::size_t kDefaultMaxOrder = 1'000'000;
  static constexpr std::size_t kOrderMatrixCap = 40'000;

  static std::shared_ptr<const WeylGroup> build(const CoxeterType& type,
                                                std::size_t max_order = kDefaultMaxOrder);
  // Shared A(n) instances for code that needs the symmetric group of a
  // fixed dimension repeatedly (relative positions of flags).
  static std::shared_ptr<const WeylGroup> type_a(int n);

  const CoxeterType& type() const { return type_; }
  std::size_t order() const { return lengths_.size(); }
  int rank() const { return rank_; }
  int ambient_dim() const { return dim_; }

  Index identity() const { return 0; }
  Index generator(int s) const { return generators_[static_cast<std::size_t>(s)]; }
  Index longest() const { return longest_; }
  int length(Index w) const { return lengths_[w]; }
  Index inverse(Index w) const { return inverses_[w]; }
  Index right_mul(Index w, int s) const { return right_[w * static_cast<std::size_t>(rank_) + s]; }
  Index left_mul(Index w, int s) const { return left_[w * static_cast<std::size_t>(rank_) + s]; }
  Index multiply(Index u, Index v) const;
  Index from_word(std::span<const int> word) const;
  bool has_right_descent(Index w, int s) const { return length(right_mul(w, s)) < length(w); }

  // Minimal (shortlex) reduced word, generators numbered from 0.
  const std::vector<int>& reduced_word(Index w) const { return words_[w]; }
  // Letters a, b, c, ... for generators; "e" for the identity.
  std::string label(Index w) const;
  std::optional<Index> parse_label(std::string_view label) const;

  ScaledIntMatrix matrix(Index w) const;
  std::optional<Index> find(const ScaledIntMatrix& m) const;

  // Permutation p with M e_i = e_{p(i)} (0-based) for a single type-A
  // factor; one_line_label prints the one-line notation of p^{-1}, the
  // labelling convention of the usual S_n poset pictures (left
  // multiplication by w0 reverses the string).
  std::vector<int> permutation(Index w) const;
  std::optional<Index> from_permutation(std::span<const int> p) const;
  std::string one_line_label(Index w) const;

  // Reflections = conjugates of the simple generators.
  const std::vector<Index>& reflections() const { return reflections_; }

  bool bruhat_leq(Index u, Index v) const;
  // Elements u with u -> v a covering relation (u = v r, l(u) = l(v) - 1).
  const std::vector<Index>& lower_covers(Index v) const;
  const std::vector<Index>& upper_covers(Index v) const;

  // Dense order matrix, row v = {u : u <= v}. Only for |W| <= kOrderMatrixCap.
  const std::vector<std::vector<std::uint64_t>>& order_matrix() const;

  // w0 w w0.
  Index opposition(Index w) const { return multiply(multiply(longest_, w), longest_); }

  WeylElement element(Index w) const { return WeylElement(shared_from_this(), w); }

 private:
  WeylGroup() = default;
  void enumerate(std::size_t max_order);
  void build_covers() const;

  CoxeterType type_;
  int rank_ = 0;
  int dim_ = 0;
  int den_ = 1;
  std::vector<std::vector<std::int64_t>> simple_;  // scaled generator matrices
  std::vector<std::int64_t> mats_;                 // |W| * dim * dim
  std::vector<int> lengths_;
  std::vector<Index> inverses_;
  std::vector<Index> right_;
  std::vector<Index> left_;
  std::vector<std::vector<int>> words_;
  std::vector<Index> generators_;
  std::vector<Index> reflections_;
  Index longest_ = 0;
  // Hash of matrix -> candidate indices.
  std::vector<std::vector<Index>> buckets_;

  mutable std::once_flag covers_once_;
  mutable std::vector<std::vector<Index>> lower_covers_;
  mutable std::vector<std::vector<Index>> upper_covers_;
  mutable std::once_flag order_once_;
  mutable std::vector<std::vector<std::uint64_t>> order_matrix_;

  std::uint64_t hash_matrix(const std::int64_t* data) const;
  std::optional<Index> lookup(const std::int64_t* data) const;
  const std::int64_t* mat(Index w) const { return mats_.data() + static_cast<std::size_t>(w) * dim_ * dim_; }
};

// Free-function forms operating on element handles; these check that both
// arguments come from the same group.
WeylElement multiply(const WeylElement& u, const WeylElement& v);
WeylElement longest_element(const WeylGroup& group);
bool bruhat_leq(const WeylElement& u, const WeylElement& v);
std::vector<WeylElement> bruhat_covers(const WeylElement& v);

// Opposition involution iota = w0 o (-id) acting on model-flat vectors in
// the ambient coordinates of the group's realization. For A(n-1) this is
// (v1..vn) -> (-vn..-v1).
Eigen::VectorXd opposition_involution(const WeylGroup& group, const Eigen::VectorXd& v);
WeylElement opposition_involution(const WeylElement& w);

class Thickening;

// DOT rendering of the covering graph, ranked by length. Highlighted
// elements are drawn as circles.
std::string poset_dot(const WeylGroup& group, const Thickening* highlight = nullptr);

}  // namespace weylgeom
