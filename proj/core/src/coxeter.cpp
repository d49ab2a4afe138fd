#include "weylgeom/coxeter.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#include "weylgeom/thickenings.hpp"

namespace weylgeom {

namespace {

std::uint64_t factorial(int n) {
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

// Simple roots of one irreducible factor in its own coordinates, scaled to
// integer vectors (only directions matter for reflections).
std::vector<std::vector<std::int64_t>> simple_roots(const CoxeterType::Factor& f, int& dim) {
  std::vector<std::vector<std::int64_t>> roots;
  const int n = f.rank;
  auto unit_diff = [](int d, int i, int j) {
    std::vector<std::int64_t> r(static_cast<std::size_t>(d), 0);
    r[static_cast<std::size_t>(i)] = 1;
    r[static_cast<std::size_t>(j)] = -1;
    return r;
  };
  switch (f.family) {
    case 'A':
      dim = n + 1;
      for (int i = 0; i < n; ++i) roots.push_back(unit_diff(dim, i, i + 1));
      break;
    case 'B':
      dim = n;
      for (int i = 0; i + 1 < n; ++i) roots.push_back(unit_diff(dim, i, i + 1));
      {
        std::vector<std::int64_t> r(static_cast<std::size_t>(dim), 0);
        r[static_cast<std::size_t>(n - 1)] = 1;
        roots.push_back(r);
      }
      break;
    case 'D':
      dim = n;
      for (int i = 0; i + 1 < n; ++i) roots.push_back(unit_diff(dim, i, i + 1));
      {
        std::vector<std::int64_t> r(static_cast<std::size_t>(dim), 0);
        r[static_cast<std::size_t>(n - 2)] = 1;
        r[static_cast<std::size_t>(n - 1)] = 1;
        roots.push_back(r);
      }
      break;
    case 'G':
      // Realized in the sum-zero plane of R^3: short e1-e2, long -2e1+e2+e3.
      dim = 3;
      roots.push_back({1, -1, 0});
      roots.push_back({-2, 1, 1});
      break;
    case 'F':
      dim = 4;
      roots.push_back({0, 1, -1, 0});
      roots.push_back({0, 0, 1, -1});
      roots.push_back({0, 0, 0, 1});
      roots.push_back({1, -1, -1, -1});  // (e1-e2-e3-e4)/2 up to scale
      break;
    default:
      throw Error(Errc::UnsupportedType, std::string("unsupported family ") + f.family);
  }
  return roots;
}

struct Frac {
  std::int64_t num;
  std::int64_t den;
};

Frac reduce(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

}  // namespace

CoxeterType CoxeterType::a1_power(int n) {
  CoxeterType t;
  for (int i = 0; i < n; ++i) t.factors.push_back({'A', 1});
  return t;
}

CoxeterType CoxeterType::parse(std::string_view text) {
  CoxeterType t;
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw Error(Errc::UnsupportedType, "empty Coxeter type");
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find_first_of("xX*", pos);
    if (end == std::string::npos) end = s.size();
    std::string part = s.substr(pos, end - pos);
    pos = end == s.size() ? end : end + 1;
    if (part.size() < 2) throw Error(Errc::UnsupportedType, "cannot parse Coxeter type '" + std::string(text) + "'");
    char fam = static_cast<char>(std::toupper(static_cast<unsigned char>(part[0])));
    int power = 1;
    std::string digits = part.substr(1);
    if (auto caret = digits.find('^'); caret != std::string::npos) {
      try {
        power = std::stoi(digits.substr(caret + 1));
      } catch (...) {
        throw Error(Errc::UnsupportedType, "bad exponent in '" + part + "'");
      }
      digits = digits.substr(0, caret);
    }
    int rank = 0;
    try {
      std::size_t used = 0;
      rank = std::stoi(digits, &used);
      if (used != digits.size()) throw std::invalid_argument(digits);
    } catch (...) {
      throw Error(Errc::UnsupportedType, "bad rank in '" + part + "'");
    }
    if (fam == 'C') fam = 'B';
    if (fam == 'E') throw Error(Errc::UnsupportedType, "type E groups are not supported");
    if (fam != 'A' && fam != 'B' && fam != 'D' && fam != 'G' && fam != 'F')
      throw Error(Errc::UnsupportedType, "unknown family in '" + part + "'");
    if (rank < 1 || power < 1) throw Error(Errc::UnsupportedType, "rank must be positive in '" + part + "'");
    if (fam == 'G' && rank != 2) throw Error(Errc::UnsupportedType, "G must have rank 2");
    if (fam == 'F' && rank != 4) throw Error(Errc::UnsupportedType, "F must have rank 4");
    if (fam == 'D' && rank < 2) throw Error(Errc::UnsupportedType, "D needs rank >= 2");
    for (int i = 0; i < power; ++i) t.factors.push_back({fam, rank});
  }
  return t;
}

int CoxeterType::rank() const {
  int r = 0;
  for (const auto& f : factors) r += f.rank;
  return r;
}

int CoxeterType::ambient_dim() const {
  int d = 0;
  for (const auto& f : factors) {
    int fd = 0;
    simple_roots(f, fd);
    d += fd;
  }
  return d;
}

std::uint64_t CoxeterType::expected_order() const {
  std::uint64_t order = 1;
  for (const auto& f : factors) {
    std::uint64_t o = 1;
    switch (f.family) {
      case 'A': o = factorial(f.rank + 1); break;
      case 'B': o = (std::uint64_t{1} << f.rank) * factorial(f.rank); break;
      case 'D': o = (std::uint64_t{1} << (f.rank - 1)) * factorial(f.rank); break;
      case 'G': o = 12; break;
      case 'F': o = 1152; break;
      default: throw Error(Errc::UnsupportedType, "unsupported family");
    }
    order *= o;
  }
  return order;
}

bool CoxeterType::is_a1_power() const {
  return !factors.empty() &&
         std::all_of(factors.begin(), factors.end(), [](const Factor& f) { return f.family == 'A' && f.rank == 1; });
}

std::string CoxeterType::to_string() const {
  if (is_a1_power() && factors.size() > 1) return "A1^" + std::to_string(factors.size());
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "x";
    out += factors[i].family;
    out += std::to_string(factors[i].rank);
  }
  return out;
}

Eigen::MatrixXd ScaledIntMatrix::to_dense() const {
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = static_cast<double>(at(r, c)) / denominator;
  return m;
}

// --- WeylElement ---------------------------------------------------------

int WeylElement::length() const { return group_->length(index_); }
std::string WeylElement::label() const { return group_->label(index_); }
WeylElement WeylElement::inverse() const { return WeylElement(group_, group_->inverse(index_)); }

WeylElement operator*(const WeylElement& u, const WeylElement& v) { return multiply(u, v); }

// --- WeylGroup -------------------------------------------------------------

std::shared_ptr<const WeylGroup> WeylGroup::build(const CoxeterType& type, std::size_t max_order) {
  if (type.factors.empty()) throw Error(Errc::UnsupportedType, "empty Coxeter type");
  const std::uint64_t expected = type.expected_order();
  if (expected > max_order)
    throw Error(Errc::GroupTooLarge, "group " + type.to_string() + " has order " + std::to_string(expected) +
                                         " exceeding cap " + std::to_string(max_order));
  std::shared_ptr<WeylGroup> g(new WeylGroup());
  g->type_ = type;
  g->enumerate(max_order);
  if (g->order() != expected)
    throw Error(Errc::UnsupportedType, "enumeration of " + type.to_string() + " produced " +
                                           std::to_string(g->order()) + " elements, expected " +
                                           std::to_string(expected));
  return g;
}

std::shared_ptr<const WeylGroup> WeylGroup::type_a(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const WeylGroup>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto g = build(CoxeterType::a(n));
  cache.emplace(n, g);
  return g;
}

void WeylGroup::enumerate(std::size_t max_order) {
  // Assemble block-diagonal simple reflections with exact rational entries.
  std::vector<std::vector<std::int64_t>> roots;
  dim_ = 0;
  for (const auto& f : type_.factors) {
    int fd = 0;
    auto fr = simple_roots(f, fd);
    for (auto& r : fr) {
      std::vector<std::int64_t> full(0);
      full.resize(static_cast<std::size_t>(dim_), 0);
      full.insert(full.end(), r.begin(), r.end());
      roots.push_back(std::move(full));
    }
    dim_ += fd;
  }
  for (auto& r : roots) r.resize(static_cast<std::size_t>(dim_), 0);
  rank_ = static_cast<int>(roots.size());

  std::vector<std::vector<Frac>> fracs;
  std::int64_t den = 1;
  for (const auto& r : roots) {
    std::int64_t rr = 0;
    for (auto x : r) rr += x * x;
    std::vector<Frac> m(static_cast<std::size_t>(dim_ * dim_));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        Frac f = reduce((i == j ? rr : 0) - 2 * r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)], rr);
        m[static_cast<std::size_t>(i * dim_ + j)] = f;
        den = std::lcm(den, f.den);
      }
    fracs.push_back(std::move(m));
  }
  den_ = static_cast<int>(den);
  simple_.clear();
  for (const auto& m : fracs) {
    std::vector<std::int64_t> s(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) s[k] = m[k].num * (den / m[k].den);
    simple_.push_back(std::move(s));
  }

  const std::size_t dd = static_cast<std::size_t>(dim_ * dim_);
  const std::size_t expected = static_cast<std::size_t>(type_.expected_order());
  std::size_t nb = 16;
  while (nb < 2 * expected) nb <<= 1;
  buckets_.assign(nb, {});
  mats_.reserve(expected * dd);
  right_.reserve(expected * static_cast<std::size_t>(rank_));

  auto push = [&](const std::vector<std::int64_t>& m, int len, std::vector<int> word) {
    const Index idx = static_cast<Index>(lengths_.size());
    mats_.insert(mats_.end(), m.begin(), m.end());
    lengths_.push_back(len);
    words_.push_back(std::move(word));
    buckets_[hash_matrix(m.data()) & (buckets_.size() - 1)].push_back(idx);
    return idx;
  };

  std::vector<std::int64_t> id(dd, 0);
  for (int i = 0; i < dim_; ++i) id[static_cast<std::size_t>(i * dim_ + i)] = den;
  push(id, 0, {});

  std::vector<std::int64_t> prod(dd);
  auto mul = [&](const std::int64_t* a, const std::int64_t* b, std::int64_t* out) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        std::int64_t acc = 0;
        for (int k = 0; k < dim_; ++k) acc += a[i * dim_ + k] * b[k * dim_ + j];
        if (acc % den != 0) throw Error(Errc::UnsupportedType, "realization is not closed over the denominator");
        out[i * dim_ + j] = acc / den;
      }
  };

  for (Index w = 0; w < lengths_.size(); ++w) {
    for (int s = 0; s < rank_; ++s) {
      mul(mat(w), simple_[static_cast<std::size_t>(s)].data(), prod.data());
      auto found = lookup(prod.data());
      Index idx;
      if (found) {
        idx = *found;
      } else {
        if (lengths_.size() >= max_order)
          throw Error(Errc::GroupTooLarge, "enumeration exceeded cap " + std::to_string(max_order));
        auto word = words_[w];
        word.push_back(s);
        idx = push(prod, lengths_[w] + 1, std::move(word));
      }
      right_.push_back(idx);
    }
  }

  const std::size_t n = lengths_.size();
  left_.resize(n * static_cast<std::size_t>(rank_));
  inverses_.resize(n);
  std::vector<std::int64_t> t(dd);
  for (Index w = 0; w < n; ++w) {
    for (int s = 0; s < rank_; ++s) {
      mul(simple_[static_cast<std::size_t>(s)].data(), mat(w), prod.data());
      left_[w * static_cast<std::size_t>(rank_) + s] = *lookup(prod.data());
    }
    const std::int64_t* m = mat(w);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) t[static_cast<std::size_t>(i * dim_ + j)] = m[j * dim_ + i];
    inverses_[w] = *lookup(t.data());
  }

  generators_.clear();
  for (int s = 0; s < rank_; ++s) generators_.push_back(right_mul(0, s));

  longest_ = 0;
  for (Index w = 0; w < n; ++w)
    if (lengths_[w] > lengths_[longest_]) longest_ = w;

  reflections_.clear();
  for (Index w = 1; w < n; ++w) {
    if (inverses_[w] != w) continue;
    std::int64_t tr = 0;
    for (int i = 0; i < dim_; ++i) tr += mat(w)[i * dim_ + i];
    if (tr == static_cast<std::int64_t>(dim_ - 2) * den) reflections_.push_back(w);
  }
}

std::uint64_t WeylGroup::hash_matrix(const std::int64_t* data) const {
  std::uint64_t h = 1469598103934665603ull;
  for (int k = 0; k < dim_ * dim_; ++k) {
    h ^= static_cast<std::uint64_t>(data[k] + 0x9e37);
    h *= 1099511628211ull;
  }
  return h ^ (h >> 29);
}

std::optional<Index> WeylGroup::lookup(const std::int64_t* data) const {
  const auto& bucket = buckets_[hash_matrix(data) & (buckets_.size() - 1)];
  const std::size_t dd = static_cast<std::size_t>(dim_ * dim_);
  for (Index idx : bucket) {
    if (std::equal(data, data + dd, mat(idx))) return idx;
  }
  return std::nullopt;
}

Index WeylGroup::multiply(Index u, Index v) const {
  Index w = u;
  for (int s : words_[v]) w = right_mul(w, s);
  return w;
}

Index WeylGroup::from_word(std::span<const int> word) const {
  Index w = 0;
  for (int s : word) {
    if (s < 0 || s >= rank_) throw Error(Errc::InvalidArgument, "generator index out of range");
    w = right_mul(w, s);
  }
  return w;
}

std::string WeylGroup::label(Index w) const {
  if (words_[w].empty()) return "e";
  std::string out;
  for (int s : words_[w]) {
    if (rank_ <= 26) {
      out.push_back(static_cast<char>('a' + s));
    } else {
      out += "s" + std::to_string(s + 1);
    }
  }
  return out;
}

std::optional<Index> WeylGroup::parse_label(std::string_view label) const {
  if (label == "e" || label == "1") return identity();
  if (!label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    if (!type_.is_single_a() || static_cast<int>(label.size()) != dim_) return std::nullopt;
    // One-line notation of p^{-1}.
    std::vector<int> inv(label.size());
    for (std::size_t i = 0; i < label.size(); ++i) inv[i] = label[i] - '1';
    std::vector<int> p(label.size(), -1);
    for (std::size_t i = 0; i < inv.size(); ++i) {
      if (inv[i] < 0 || inv[i] >= dim_ || p[static_cast<std::size_t>(inv[i])] != -1) return std::nullopt;
      p[static_cast<std::size_t>(inv[i])] = static_cast<int>(i);
    }
    return from_permutation(p);
  }
  std::vector<int> word;
  for (char c : label) {
    if (c < 'a' || c >= 'a' + rank_) return std::nullopt;
    word.push_back(c - 'a');
  }
  return from_word(word);
}

ScaledIntMatrix WeylGroup::matrix(Index w) const {
  ScaledIntMatrix m;
  m.dim = dim_;
  m.denominator = den_;
  m.numerators.assign(mat(w), mat(w) + dim_ * dim_);
  return m;
}

std::optional<Index> WeylGroup::find(const ScaledIntMatrix& m) const {
  if (m.dim != dim_) return std::nullopt;
  std::vector<std::int64_t> scaled(m.numerators.size());
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    const std::int64_t x = m.numerators[k] * den_;
    if (x % m.denominator != 0) return std::nullopt;
    scaled[k] = x / m.denominator;
  }
  return lookup(scaled.data());
}

std::vector<int> WeylGroup::permutation(Index w) const {
  if (!type_.is_single_a()) throw Error(Errc::WrongGroupType, "permutation() requires a single type-A factor");
  std::vector<int> p(static_cast<std::size_t>(dim_), -1);
  for (int c = 0; c < dim_; ++c)
    for (int r = 0; r < dim_; ++r)
      if (mat(w)[r * dim_ + c] == den_) p[static_cast<std::size_t>(c)] = r;
  return p;
}

std::optional<Index> WeylGroup::from_permutation(std::span<const int> p) const {
  if (!type_.is_single_a()) throw Error(Errc::WrongGroupType, "from_permutation() requires a single type-A factor");
  if (static_cast<int>(p.size()) != dim_) return std::nullopt;
  ScaledIntMatrix m;
  m.dim = dim_;
  m.denominator = 1;
  m.numerators.assign(static_cast<std::size_t>(dim_ * dim_), 0);
  for (int c = 0; c < dim_; ++c) {
    const int r = p[static_cast<std::size_t>(c)];
    if (r < 0 || r >= dim_) return std::nullopt;
    m.numerators[static_cast<std::size_t>(r * dim_ + c)] = 1;
  }
  return find(m);
}

std::string WeylGroup::one_line_label(Index w) const {
  auto p = permutation(w);
  std::vector<int> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  std::string out;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    if (dim_ > 9 && i) out += ",";
    out += std::to_string(inv[i] + 1);
  }
  return out;
}

bool WeylGroup::bruhat_leq(Index u, Index v) const {
  // Lifting property: for a right descent s of v, u <= v iff min(u, us) <= vs.
  while (true) {
    if (lengths_[u] > lengths_[v]) return false;
    if (u == v) return true;
    if (u == 0) return true;
    int s = 0;
    while (!has_right_descent(v, s)) ++s;
    const Index us = right_mul(u, s);
    if (lengths_[us] < lengths_[u]) u = us;
    v = right_mul(v, s);
  }
}

void WeylGroup::build_covers() const {
  std::call_once(covers_once_, [this] {
    const std::size_t n = order();
    lower_covers_.assign(n, {});
    upper_covers_.assign(n, {});
    for (Index v = 0; v < n; ++v) {
      for (Index r : reflections_) {
        const Index u = multiply(v, r);
        if (lengths_[u] + 1 == lengths_[v]) lower_covers_[v].push_back(u);
      }
      std::sort(lower_covers_[v].begin(), lower_covers_[v].end());
      for (Index u : lower_covers_[v]) upper_covers_[u].push_back(v);
    }
  });
}

const std::vector<Index>& WeylGroup::lower_covers(Index v) const {
  build_covers();
  return lower_covers_[v];
}

const std::vector<Index>& WeylGroup::upper_covers(Index v) const {
  build_covers();
  return upper_covers_[v];
}

const std::vector<std::vector<std::uint64_t>>& WeylGroup::order_matrix() const {
  if (order() > kOrderMatrixCap)
    throw Error(Errc::GroupTooLarge, "order matrix limited to groups of order <= " + std::to_string(kOrderMatrixCap));
  std::call_once(order_once_, [this] {
    const std::size_t n = order();
    const std::size_t words = (n + 63) / 64;
    order_matrix_.assign(n, std::vector<std::uint64_t>(words, 0));
    order_matrix_[0][0] = 1;
    // row(v) = row(vs) u row(vs)*s for a right descent s of v.
    for (Index v = 1; v < n; ++v) {
      int s = 0;
      while (!has_right_descent(v, s)) ++s;
      const auto& prev = order_matrix_[right_mul(v, s)];
      auto& row = order_matrix_[v];
      for (std::size_t k = 0; k < words; ++k) {
        std::uint64_t bits = prev[k];
        while (bits) {
          const int b = std::countr_zero(bits);
          bits &= bits - 1;
          const Index u = static_cast<Index>(k * 64 + static_cast<std::size_t>(b));
          row[u / 64] |= std::uint64_t{1} << (u % 64);
          const Index us = right_mul(u, s);
          row[us / 64] |= std::uint64_t{1} << (us % 64);
        }
      }
    }
  });
  return order_matrix_;
}

// --- free functions --------------------------------------------------------

namespace {
void require_same(const WeylElement& u, const WeylElement& v) {
  if (!u.group() || u.group() != v.group())
    throw Error(Errc::GroupMismatch, "elements belong to different groups");
}
}  // namespace

WeylElement multiply(const WeylElement& u, const WeylElement& v) {
  require_same(u, v);
  return WeylElement(u.group(), u.group()->multiply(u.index(), v.index()));
}

WeylElement longest_element(const WeylGroup& group) { return group.element(group.longest()); }

bool bruhat_leq(const WeylElement& u, const WeylElement& v) {
  require_same(u, v);
  return u.group()->bruhat_leq(u.index(), v.index());
}

std::vector<WeylElement> bruhat_covers(const WeylElement& v) {
  std::vector<WeylElement> out;
  for (Index u : v.group()->lower_covers(v.index())) out.emplace_back(v.group(), u);
  return out;
}

Eigen::VectorXd opposition_involution(const WeylGroup& group, const Eigen::VectorXd& v) {
  if (v.size() != group.ambient_dim())
    throw Error(Errc::InvalidArgument, "vector dimension does not match the group's model flat");
  return -(group.matrix(group.longest()).to_dense() * v);
}

WeylElement opposition_involution(const WeylElement& w) {
  return WeylElement(w.group(), w.group()->opposition(w.index()));
}

std::string poset_dot(const WeylGroup& group, const Thickening* highlight) {
  if (highlight && highlight->group().get() != &group)
    throw Error(Errc::GroupMismatch, "highlight thickening belongs to a different group");
  std::ostringstream out;
  out << "digraph bruhat {\n";
  out << "  label=\"Bruhat order " << group.type().to_string() << "\";\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=plaintext];\n";
  const std::size_t n = group.order();
  for (Index w = 0; w < n; ++w) {
    out << "  n" << w << " [label=\"" << group.label(w) << "\"";
    if (highlight && highlight->contains(w)) out << ", shape=circle";
    out << "];\n";
  }
  const int top = group.length(group.longest());
  for (int len = 0; len <= top; ++len) {
    out << "  { rank=same;";
    for (Index w = 0; w < n; ++w)
      if (group.length(w) == len) out << " n" << w << ";";
    out << " }\n";
  }
  for (Index v = 0; v < n; ++v)
    for (Index u : group.lower_covers(v)) out << "  n" << u << " -> n" << v << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace weylgeom
