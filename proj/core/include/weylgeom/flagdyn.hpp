#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weylgeom/coxeter.hpp"
#include "weylgeom/linalg.hpp"
#include "weylgeom/thickenings.hpp"

namespace weylgeom {

// Complete flag in R^n: V_i is the span of the first i columns of an
// orthogonal matrix.
class Flag {
 public:
  // Gram-Schmidt order preserving orthonormalization; NearSingular when the
  // condition number reaches 1e10.
  static Flag from_basis(const Matrix& columns);
  static Flag standard(int n);
  // <e_n> c <e_n, e_{n-1}> c ...
  static Flag opposite(int n);

  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  // g . F, the flag of g B.
  Flag transformed(const Matrix& g) const;

 private:
  explicit Flag(Matrix b) : basis_(std::move(b)) {}
  Matrix basis_;
};

Flag flag_from_basis(const Matrix& columns);

// Largest principal angle between corresponding subspaces V_i, W_i.
double flag_distance(const Flag& f, const Flag& g);

struct RankOptions {
  double tau = 1e-8;
  // Accepted and rejected singular values must be separated by this factor.
  double separation = 100.0;
};

struct PositionResult {
  std::shared_ptr<const WeylGroup> group;  // A(n-1)
  Index w = 0;
  // d(i, j) = dim(V_{i+1} cap W_{j+1}), 0-based indices for i, j in [0, n).
  Eigen::MatrixXi rank_matrix;
  // Smallest singular value that was accepted as nonzero (1 if none).
  double confidence = 1.0;
  WeylElement element() const { return group->element(w); }
};

// delta(F, F'): the permutation p with p(i) = j where the rank jump matrix
// d_ij - d_{i-1,j} - d_{i,j-1} + d_{i-1,j-1} has its one in row i. Then
// delta(F,F) = e, transversal flags give w0, delta(F',F) = delta(F,F')^{-1},
// and replacing F' by its opposite in a shared apartment multiplies by w0
// on the left.
PositionResult relative_position(const Flag& f, const Flag& f_prime, RankOptions options = {});
// Same from a precomputed rank matrix (exact arithmetic callers).
Index position_from_rank_matrix(const WeylGroup& group, const Eigen::MatrixXi& d);

bool is_antipodal(const Flag& f, const Flag& f_prime, RankOptions options = {});

// Attracting flag of the powers g^k: eigenvectors by descending modulus.
// NotRegular unless g has real eigenvalues with distinct moduli.
Flag attracting_flag(const Matrix& g);
Flag repelling_flag(const Matrix& g);

struct FlagSampleEntry {
  Flag flag;
  std::string word;
  std::vector<double> margins;
};

struct FlagSample {
  std::vector<FlagSampleEntry> entries;
  std::size_t size() const { return entries.size(); }
};

struct LimitSampleOptions {
  std::size_t word_cap = 200'000;
  double dedupe_angle = 1e-6;
};

// Word alphabet for k generators: letter 2i is generator i (written 'a'+i),
// letter 2i+1 its inverse ('A'+i).
std::string word_to_string(std::span<const int> letters);
std::vector<int> word_from_string(std::string_view word, int generators);
bool word_less(std::string_view a, std::string_view b);  // length, then letter order

// Attracting flags (left singular vectors) of all freely reduced words up to
// max_word_length whose log singular value gaps are all >= margin_threshold,
// deduplicated, ordered by word. BudgetExceeded past word_cap words.
FlagSample limit_set_sample(std::span<const Matrix> generators, int max_word_length, double margin_threshold,
                            LimitSampleOptions options = {});

struct MembershipResult {
  bool member = false;
  std::optional<std::size_t> witness;  // index into the sample
  std::optional<Index> position;       // delta(F, witness)
};

// F in Th(S) iff delta(F, lambda) in Th for some lambda in S.
MembershipResult thickening_membership(const Flag& f, const FlagSample& sample, const Thickening& th,
                                       RankOptions options = {});
MembershipResult thickening_membership(const Flag& f, std::span<const Flag> sample, const Thickening& th,
                                       RankOptions options = {});

// w0 w.
Index complementary_position(const WeylGroup& group, Index w);
WeylElement complementary_position(const WeylElement& w);

struct ExpansionOptions {
  double step = 1e-5;
  // Relative Jacobian change between step and step/2 that counts as
  // nonlinearity.
  double richardson_tolerance = 1e-3;
};

// Smallest singular value of the differential of F -> g F at F, for the
// K-invariant metric in which the lower entries of a skew chart matrix are
// orthonormal coordinates.
double expansion_factor(const Matrix& g, const Flag& f, ExpansionOptions options = {});

struct NondiscretenessOptions {
  std::size_t element_budget = 2'000'000;
  // Small elements considered when forming commutator tuples.
  std::size_t tuple_pool = 48;
  double commutator_threshold = 1e-6;
  double identity_threshold = 1e-9;
};

struct NondiscretenessResult {
  enum class Status { Found, NoneFound, BudgetExceeded };
  Status status = Status::NoneFound;
  std::vector<std::string> words;  // gamma_1 .. gamma_n
  double commutator_norm = 0;      // |C - I| of the iterated commutator
  std::size_t elements_examined = 0;
  std::size_t small_elements = 0;
};

// Semi-decision search: words with |rho(w) - I| < epsilon and an n-tuple of
// them whose iterated commutator [...[[g1, g2], g3], ..., gn] is not I.
NondiscretenessResult nondiscreteness_certificate(std::span<const Matrix> generators, double epsilon, int max_len,
                                                  NondiscretenessOptions options = {});

std::string_view status_name(NondiscretenessResult::Status s);

}  // namespace weylgeom
