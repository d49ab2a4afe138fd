// weylgeom command-line front end.
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"
#include "weylgeom/coxeter.hpp"
#include "weylgeom/error.hpp"
#include "weylgeom/flagdyn.hpp"
#include "weylgeom/gitconfig.hpp"
#include "weylgeom/morse.hpp"
#include "weylgeom/symspace.hpp"
#include "weylgeom/thickenings.hpp"

using namespace weylgeom;
using weylgeom::cli::Json;

namespace {

struct Globals {
  std::string out;
  std::uint64_t seed = 0;
  std::optional<double> tol;
};

Globals g_opts;

double tol_or(double fallback) { return g_opts.tol.value_or(fallback); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

Index parse_element(const WeylGroup& group, const std::string& label) {
  const auto w = group.parse_label(label);
  if (!w) throw Error(Errc::InvalidArgument, "unknown element label '" + label + "' for " + group.type().to_string());
  return *w;
}

// balanced:K | ball:LABEL | down:L1,L2 | elements:L1,L2 | empty | whole
Thickening parse_thickening(const std::shared_ptr<const WeylGroup>& group, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "empty") return Thickening::empty(group);
  if (kind == "whole") return Thickening::whole(group);
  if (kind == "balanced") {
    const auto all = enumerate_balanced(group);
    std::size_t k = 0;
    try {
      k = std::stoul(arg);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "balanced:K needs an integer index, got '" + arg + "'");
    }
    if (k >= all.size())
      throw Error(Errc::InvalidArgument, "balanced index " + arg + " out of range (" + std::to_string(all.size()) +
                                             " balanced thickenings)");
    return all[k];
  }
  std::vector<Index> elems;
  for (const auto& l : split(arg, ',')) elems.push_back(parse_element(*group, l));
  if (kind == "ball") {
    if (elems.size() != 1) throw Error(Errc::InvalidArgument, "ball:LABEL takes exactly one element");
    return Thickening::ball(group, elems[0]);
  }
  if (kind == "down") return down_closure(group, elems);
  if (kind == "elements") return Thickening::from_elements(group, elems);
  throw Error(Errc::InvalidArgument, "unknown thickening spec '" + spec + "'");
}

Json element_json(const WeylGroup& group, Index w) {
  Json j;
  j["label"] = group.label(w);
  if (group.type().is_single_a()) j["one_line"] = group.one_line_label(w);
  j["length"] = group.length(w);
  return j;
}

Json thickening_json(const Thickening& th) {
  const auto& group = *th.group();
  Json labels = Json::array();
  for (Index w : th.elements()) labels.push_back(group.type().is_single_a() ? group.one_line_label(w) : group.label(w));
  Json j;
  j["size"] = th.size();
  j["bits"] = th.bitstring();
  j["slim"] = th.is_slim();
  j["fat"] = th.is_fat();
  j["balanced"] = th.is_balanced();
  j["elements"] = labels;
  return j;
}

FinslerFunctional phi_from(const std::vector<double>& c, int n) {
  if (c.empty()) return FinslerFunctional::standard(n);
  return FinslerFunctional(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size())));
}

Vector vec(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

SymPoint point_arg(const std::string& s) { return SymPoint::from_matrix(cli::to_matrix(cli::load_json(s), "point")); }

Matrix random_sl(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  double det = g.determinant();
  if (det < 0) {
    g.col(0) *= -1;
    det = -det;
  }
  return g / std::pow(det, 1.0 / n);
}

Json position_json(const PositionResult& r) {
  Json j = element_json(*r.group, r.w);
  Json rm = Json::array();
  for (Eigen::Index i = 0; i < r.rank_matrix.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < r.rank_matrix.cols(); ++k) row.push_back(r.rank_matrix(i, k));
    rm.push_back(row);
  }
  j["rank_matrix"] = rm;
  j["confidence"] = r.confidence;
  j["antipodal"] = r.w == r.group->longest();
  return j;
}

Json certificate_json(const PathCertificate& c) {
  Json j;
  j["pass"] = c.pass;
  j["spacing_margin"] = c.spacing_margin;
  j["straightness_margin"] = c.straightness_margin ? Json(*c.straightness_margin) : Json(nullptr);
  j["segment_lengths"] = c.segment_lengths;
  j["regularity_flags"] = c.regularity_flags;
  j["vertex_angles"] = c.vertex_angles;
  if (c.first_violation) {
    j["first_violation"] = {{"kind", std::string(violation_name(c.first_violation->kind))},
                            {"index", c.first_violation->index}};
  } else {
    j["first_violation"] = nullptr;
  }
  return j;
}

Json schottky_json(const SchottkyReport& r) {
  Json j;
  j["N"] = r.N;
  j["pass"] = r.pass;
  j["spacing_margin"] = r.spacing_margin;
  j["angle_margin"] = r.angle_margin;
  Json ts = Json::array();
  for (const auto& t : r.triples) {
    Json tj;
    tj["letters"] = t.letters;
    tj["pass"] = t.pass;
    tj["spacing"] = {t.spacing[0], t.spacing[1]};
    tj["regular"] = {t.regular[0], t.regular[1]};
    tj["half_angles"] = {t.half_angles[0], t.half_angles[1]};
    tj["straightness_angle"] = t.straightness_angle;
    ts.push_back(tj);
  }
  j["triples"] = ts;
  return j;
}

Json clusters_json(const std::vector<MassCluster>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back({{"members", c.members}, {"mass", cli::from_rational(c.mass)}});
  return a;
}

using Action = std::function<std::string()>;

std::string emit(const Json& j) { return cli::dump(j); }

}  // namespace

int main(int argc, char** argv) {
  std::string echo;
  for (int i = 1; i < argc; ++i) echo += (i > 1 ? " " : "") + std::string(argv[i]);

  CLI::App app{"weylgeom: Weyl groups, thickenings, flags and symmetric space geometry"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", g_opts.out, "Write output to this file instead of stdout");
  app.add_option("--seed", g_opts.seed, "Seed for randomized runs");
  double tol_flag = 0;
  auto* tol_opt = app.add_option("--tol", tol_flag, "Tolerance override (default: $WEYLGEOM_TOL or per command)");

  Action action;
  auto set = [&action](CLI::App* sub, Action a) { sub->callback([&action, a] { action = a; }); };

  // --- coxeter ---------------------------------------------------------------
  auto* cox = app.add_subcommand("coxeter", "Coxeter groups and Bruhat order")->require_subcommand(1);
  {
    auto* poset = cox->add_subcommand("poset", "DOT rendering of the Bruhat order");
    static std::string type, highlight;
    poset->add_option("--type", type, "Group type, e.g. A3, B2, G2, A1^3")->required();
    poset->add_option("--highlight", highlight, "Thickening to circle: balanced:K, ball:W, down:W1,W2, elements:...");
    set(poset, [] {
      const auto group = WeylGroup::build(CoxeterType::parse(type));
      if (highlight.empty()) return poset_dot(*group);
      const auto th = parse_thickening(group, highlight);
      return poset_dot(*group, &th);
    });
  }

  // --- thickenings -----------------------------------------------------------
  auto* thk = app.add_subcommand("thickenings", "Thickenings of the identity in W")->require_subcommand(1);
  {
    static std::string type, spec, weights;
    static bool as_json = false;
    auto* en = thk->add_subcommand("enumerate", "List all balanced thickenings");
    en->add_option("--type", type)->required();
    set(en, [] {
      const auto group = WeylGroup::build(CoxeterType::parse(type));
      const auto all = enumerate_balanced(group);
      Json list = Json::array();
      for (std::size_t i = 0; i < all.size(); ++i) {
        Json t = thickening_json(all[i]);
        t["index"] = i;
        list.push_back(t);
      }
      return emit({{"type", group->type().to_string()}, {"order", group->order()}, {"count", all.size()}, {"thickenings", list}});
    });

    auto* cnt = thk->add_subcommand("count", "Number of balanced thickenings");
    cnt->add_option("--type", type)->required();
    cnt->add_flag("--json", as_json, "JSON instead of a bare integer");
    set(cnt, [] {
      const auto group = WeylGroup::build(CoxeterType::parse(type));
      const auto n = count_balanced(group);
      if (as_json) return emit({{"type", group->type().to_string()}, {"count", n}});
      return std::to_string(n) + "\n";
    });

    auto* chk = thk->add_subcommand("check", "Properties of a thickening, or metric thickenings from weights");
    chk->add_option("--type", type, "Group type (defaults to A1^n with --weights)");
    chk->add_option("--thickening", spec, "balanced:K, ball:W, down:W1,W2, elements:W1,W2, empty, whole");
    chk->add_option("--weights", weights, "Comma separated weights a_1..a_n for W = (Z_2)^n");
    set(chk, [] {
      if (!weights.empty()) {
        std::vector<Rational> q;
        for (const auto& s : split(weights, ',')) q.push_back(parse_rational(s));
        const WeightVector a(q);
        const auto group = WeylGroup::build(type.empty() ? CoxeterType::a1_power(static_cast<int>(q.size()))
                                                         : CoxeterType::parse(type));
        const auto [strict, closure] = metric_thickening(group, a);
        return emit({{"type", group->type().to_string()},
                     {"weights_balanced", weight_is_balanced(a)},
                     {"strict", thickening_json(strict)},
                     {"closure", thickening_json(closure)}});
      }
      if (type.empty() || spec.empty()) throw CLI::ValidationError("check needs --type and --thickening, or --weights");
      const auto group = WeylGroup::build(CoxeterType::parse(type));
      Json j = thickening_json(parse_thickening(group, spec));
      j["type"] = group->type().to_string();
      return emit(j);
    });
  }

  // --- dist ------------------------------------------------------------------
  auto* dist = app.add_subcommand("dist", "Distances on SL(n)/SO(n)")->require_subcommand(1);
  {
    static std::string x, y;
    static std::vector<double> phi;
    static int random = 0, dim = 3;
    auto add_points = [](CLI::App* s) {
      s->add_option("--x", x, "Point as a JSON matrix or file");
      s->add_option("--y", y, "Point as a JSON matrix or file");
      s->add_option("--random", random, "Check metric laws on this many random triples (uses --seed)");
      s->add_option("--dim", dim, "Dimension for --random")->check(CLI::Range(2, 12));
    };
    auto need_points = [] {
      if (x.empty() || y.empty()) throw CLI::ValidationError("--x and --y are required (or use --random)");
    };
    auto* d = dist->add_subcommand("delta", "Delta-valued distance");
    add_points(d);
    set(d, [need_points] {
      need_points();
      const auto v = delta_distance(point_arg(x), point_arg(y));
      return emit({{"delta", cli::from_vector(v.values())}, {"iota", cli::from_vector(v.iota().values())}});
    });
    auto* f = dist->add_subcommand("finsler", "Regular polyhedral Finsler distance");
    add_points(f);
    f->add_option("--phi", phi, "Functional coefficients c_1..c_n (default n+1-2i)")->delimiter(',');
    set(f, [need_points] {
      if (random > 0) {
        std::mt19937_64 rng(g_opts.seed);
        const auto fphi = phi_from(phi, dim);
        double sym = 0, tri = 0;
        for (int i = 0; i < random; ++i) {
          const auto a = SymPoint::from_group(random_sl(rng, dim));
          const auto b = SymPoint::from_group(random_sl(rng, dim));
          const auto c = SymPoint::from_group(random_sl(rng, dim));
          const double ab = finsler_distance(a, b, fphi);
          sym = std::max(sym, std::fabs(ab - finsler_distance(b, a, fphi)));
          tri = std::max(tri, ab - finsler_distance(a, c, fphi) - finsler_distance(c, b, fphi));
        }
        return emit({{"triples", random}, {"seed", g_opts.seed}, {"max_symmetry_defect", sym},
                     {"max_triangle_defect", std::max(0.0, tri)}});
      }
      need_points();
      const auto px = point_arg(x), py = point_arg(y);
      const auto fphi = phi_from(phi, px.dim());
      return emit({{"distance", finsler_distance(px, py, fphi)}, {"phi", cli::from_vector(fphi.coefficients())}});
    });
    auto* r = dist->add_subcommand("riemannian", "Riemannian distance 2|d_Delta|");
    add_points(r);
    set(r, [need_points] {
      need_points();
      return emit({{"distance", riemannian_distance(point_arg(x), point_arg(y))}});
    });
  }

  // --- seq -------------------------------------------------------------------
  auto* seq = app.add_subcommand("seq", "Sequences of group elements")->require_subcommand(1);
  {
    static std::string matrices;
    static double margin = 0.1, threshold = 1.0;
    auto* reg = seq->add_subcommand("regularity", "Singular value gaps along a sequence");
    reg->add_option("--matrices", matrices, "JSON array of matrices or file")->required();
    reg->add_option("--margin", margin, "Theta cone margin on normalized gaps");
    reg->add_option("--threshold", threshold, "Final gap needed for the regular verdict");
    set(reg, [] {
      const auto gs = cli::to_matrices(cli::load_json(matrices), "matrices");
      const auto rep = sequence_regularity(gs, RegularityCone(margin), threshold);
      return emit({{"margins", rep.margins}, {"in_cone", rep.in_cone}, {"regular", rep.regular}});
    });
  }

  // --- horo ------------------------------------------------------------------
  auto* horo = app.add_subcommand("horo", "Horofunctions")->require_subcommand(1);
  {
    static std::string p, x, frame;
    static std::vector<double> direction, times{10, 20, 40}, phi;
    auto* est = horo->add_subcommand("estimate", "Finsler horofunction along a ray");
    est->add_option("--p", p, "Base point of the ray (default origin)");
    est->add_option("--direction", direction, "Regular Delta direction")->delimiter(',')->required();
    est->add_option("--x", x, "Evaluation point")->required();
    est->add_option("--times", times, "Increasing sample times")->delimiter(',');
    est->add_option("--phi", phi, "Functional coefficients")->delimiter(',');
    est->add_option("--frame", frame, "Orthogonal frame k (JSON matrix)");
    set(est, [] {
      const auto px = point_arg(x);
      const auto pp = p.empty() ? SymPoint::origin(px.dim()) : point_arg(p);
      std::optional<Matrix> k;
      if (!frame.empty()) k = cli::to_matrix(cli::load_json(frame), "frame");
      HoroOptions opt;
      opt.tolerance = tol_or(opt.tolerance);
      const auto e = horofunction_estimate(pp, DeltaVector(vec(direction)), px, times, phi_from(phi, px.dim()), k, opt);
      return emit({{"times", e.times}, {"values", e.values}, {"final_value", e.final_value}, {"converged", e.converged}});
    });
  }

  // --- flags -----------------------------------------------------------------
  auto* flags = app.add_subcommand("flags", "Complete flags and relative position")->require_subcommand(1);
  {
    static std::string f, h;
    static int random = 0, dim = 3;
    auto* pos = flags->add_subcommand("position", "Relative position delta(F, F')");
    pos->add_option("--f", f, "Basis matrix (columns) of F")->required();
    pos->add_option("--g", h, "Basis matrix (columns) of F'")->required();
    set(pos, [] {
      RankOptions opt;
      opt.tau = tol_or(opt.tau);
      const auto a = Flag::from_basis(cli::to_matrix(cli::load_json(f), "flag"));
      const auto b = Flag::from_basis(cli::to_matrix(cli::load_json(h), "flag"));
      return emit(position_json(relative_position(a, b, opt)));
    });
    auto* anti = flags->add_subcommand("antipodal", "Antipodality test");
    anti->add_option("--f", f, "Basis matrix of F");
    anti->add_option("--g", h, "Basis matrix of F'");
    anti->add_option("--random", random, "Test this many random pairs (uses --seed)");
    anti->add_option("--dim", dim, "Dimension for --random")->check(CLI::Range(2, 10));
    set(anti, [] {
      RankOptions opt;
      opt.tau = tol_or(opt.tau);
      if (random > 0) {
        std::mt19937_64 rng(g_opts.seed);
        int count = 0;
        for (int i = 0; i < random; ++i) {
          const auto a = Flag::from_basis(random_sl(rng, dim));
          const auto b = Flag::from_basis(random_sl(rng, dim));
          count += is_antipodal(a, b, opt);
        }
        return emit({{"pairs", random}, {"seed", g_opts.seed}, {"antipodal", count}});
      }
      if (f.empty() || h.empty()) throw CLI::ValidationError("--f and --g are required (or use --random)");
      const auto a = Flag::from_basis(cli::to_matrix(cli::load_json(f), "flag"));
      const auto b = Flag::from_basis(cli::to_matrix(cli::load_json(h), "flag"));
      return emit({{"antipodal", is_antipodal(a, b, opt)}});
    });
  }

  // --- limits / domain ------------------------------------------------------
  static std::string gens;
  static int max_len = 4;
  static double margin_threshold = 1.0;
  static std::size_t word_cap = 200000;
  auto sample_from_args = [] {
    LimitSampleOptions opt;
    opt.word_cap = word_cap;
    return limit_set_sample(cli::to_generators(cli::load_json(gens)), max_len, margin_threshold, opt);
  };
  auto* limits = app.add_subcommand("limits", "Limit set samples")->require_subcommand(1);
  {
    auto* sample = limits->add_subcommand("sample", "Attracting flags of regular words");
    sample->add_option("--gens", gens, "Generators (JSON or file)")->required();
    sample->add_option("--max-len", max_len, "Maximal word length")->check(CLI::Range(1, 40));
    sample->add_option("--margin", margin_threshold, "Minimal log singular value gap");
    sample->add_option("--word-cap", word_cap, "Words examined before BudgetExceeded");
    set(sample, [sample_from_args] {
      const auto s = sample_from_args();
      Json entries = Json::array();
      for (const auto& e : s.entries)
        entries.push_back({{"word", e.word}, {"margins", e.margins}, {"basis", cli::from_matrix(e.flag.basis())}});
      return emit({{"count", s.size()}, {"entries", entries}});
    });
  }
  auto* domain = app.add_subcommand("domain", "Thickened limit sets")->require_subcommand(1);
  {
    static std::string flag, spec;
    auto* mem = domain->add_subcommand("membership", "Is a flag in Th(limit sample)?");
    mem->add_option("--flag", flag, "Basis matrix of the flag")->required();
    mem->add_option("--gens", gens, "Generators (JSON or file)")->required();
    mem->add_option("--thickening", spec, "Thickening spec in A(n-1)")->required();
    mem->add_option("--max-len", max_len, "Maximal word length")->check(CLI::Range(1, 40));
    mem->add_option("--margin", margin_threshold, "Minimal log singular value gap");
    set(mem, [sample_from_args] {
      const auto fl = Flag::from_basis(cli::to_matrix(cli::load_json(flag), "flag"));
      const auto group = WeylGroup::type_a(fl.dim());
      const auto th = parse_thickening(group, spec);
      const auto s = sample_from_args();
      RankOptions opt;
      opt.tau = tol_or(opt.tau);
      const auto r = thickening_membership(fl, s, th, opt);
      Json j{{"member", r.member}, {"sample_size", s.size()}};
      j["witness"] = r.witness ? Json(s.entries[*r.witness].word) : Json(nullptr);
      j["position"] = r.position ? element_json(*group, *r.position) : Json(nullptr);
      return emit(j);
    });
  }

  // --- expand ----------------------------------------------------------------
  auto* expand = app.add_subcommand("expand", "Infinitesimal expansion on the flag manifold")->require_subcommand(1);
  {
    static std::string gm, flag;
    static double step = 1e-5;
    auto* fac = expand->add_subcommand("factor", "Smallest singular value of dF -> gF");
    fac->add_option("--g", gm, "Matrix g")->required();
    fac->add_option("--flag", flag, "Basis of the flag (default standard)");
    fac->add_option("--step", step, "Finite difference step");
    set(fac, [] {
      const Matrix m = cli::to_matrix(cli::load_json(gm), "g");
      const Flag fl = flag.empty() ? Flag::standard(static_cast<int>(m.rows()))
                                   : Flag::from_basis(cli::to_matrix(cli::load_json(flag), "flag"));
      ExpansionOptions opt;
      opt.step = step;
      return emit({{"epsilon", expansion_factor(m, fl, opt)}});
    });
  }

  // --- discreteness ----------------------------------------------------------
  auto* disc = app.add_subcommand("discreteness", "Nondiscreteness certificates")->require_subcommand(1);
  {
    static double eps = 0.1;
    static std::size_t budget = 2'000'000;
    static int len = 12;
    auto* probe = disc->add_subcommand("probe", "Search for small words with nontrivial iterated commutator");
    probe->add_option("--gens", gens, "Generators (JSON or file)")->required();
    probe->add_option("--epsilon", eps, "Identity neighbourhood radius");
    probe->add_option("--max-len", len, "Maximal word length")->check(CLI::Range(1, 40));
    probe->add_option("--budget", budget, "Elements examined before budget_exceeded");
    set(probe, [] {
      NondiscretenessOptions opt;
      opt.element_budget = budget;
      const auto r = nondiscreteness_certificate(cli::to_generators(cli::load_json(gens)), eps, len, opt);
      return emit({{"status", std::string(status_name(r.status))},
                   {"words", r.words},
                   {"commutator_norm", r.commutator_norm},
                   {"elements_examined", r.elements_examined},
                   {"small_elements", r.small_elements}});
    });
  }

  // --- morse -----------------------------------------------------------------
  auto* morse = app.add_subcommand("morse", "Straight paths, Morse defects, Schottky certificates")->require_subcommand(1);
  {
    static std::string path;
    static double eps = 0.2, s = 10.0, cone = 0.1, B = 2, L = 2, A = 1;
    static std::vector<double> zeta, phi;
    static int N = 6, search = 0, confirm = 3;
    auto zeta_for = [](int n) { return zeta.empty() ? ZetaType::standard(n) : ZetaType(vec(zeta)); };

    auto* st = morse->add_subcommand("straightness", "Spacing and straightness certificate of a path");
    st->add_option("--path", path, "Path: matrices, {\"points\": ...} or {\"flat\": [[x,y],...]}")->required();
    st->add_option("--epsilon", eps, "Angle slack");
    st->add_option("--s", s, "Spacing");
    st->add_option("--margin", cone, "Theta cone margin");
    st->add_option("--zeta", zeta, "Zeta type")->delimiter(',');
    set(st, [zeta_for] {
      const auto p = cli::to_path(cli::load_json(path));
      return emit(certificate_json(straightness_check(p, RegularityCone(cone), zeta_for(p.front().dim()), eps, s)));
    });

    auto* df = morse->add_subcommand("defect", "Quasi-isometry margins and diamond defects of a path");
    df->add_option("--path", path, "Path")->required();
    df->add_option("--B", B, "Windows longer than B are examined");
    df->add_option("--L", L, "Multiplicative QI constant");
    df->add_option("--A", A, "Additive QI constant");
    df->add_option("--margin", cone, "Theta cone margin");
    df->add_option("--phi", phi, "Functional coefficients")->delimiter(',');
    set(df, [] {
      const auto p = cli::to_path(cli::load_json(path));
      const auto r = morse_defect_report(p, RegularityCone(cone), B, L, A, phi_from(phi, p.front().dim()));
      Json windows = Json::array();
      for (const auto& w : r.windows)
        windows.push_back({{"length", w.length}, {"max_defect", w.max_defect}, {"worst_start", w.worst_start},
                           {"min_regularity_margin", w.min_regularity_margin}});
      return emit({{"qi_lower_margin", r.qi_lower_margin},
                   {"qi_upper_margin", r.qi_upper_margin},
                   {"qi_violations", r.qi_violations},
                   {"max_defect", r.max_defect},
                   {"windows", windows}});
    });

    auto* sc = morse->add_subcommand("schottky", "Midpoint path certificate for g_i^N");
    sc->add_option("--gens", gens, "Generators (JSON or file)")->required();
    sc->add_option("--N", N, "Power")->check(CLI::Range(1, 200));
    sc->add_option("--epsilon", eps, "Angle slack");
    sc->add_option("--s", s, "Spacing");
    sc->add_option("--margin", cone, "Theta cone margin");
    sc->add_option("--zeta", zeta, "Zeta type")->delimiter(',');
    sc->add_option("--search", search, "Search the smallest N0 <= this value instead")->check(CLI::Range(1, 200));
    sc->add_option("--confirm", confirm, "Extra consecutive passes required by --search")->check(CLI::Range(0, 50));
    set(sc, [zeta_for] {
      const auto gs = cli::to_generators(cli::load_json(gens));
      SchottkyOptions opt;
      opt.epsilon = eps;
      opt.s = s;
      const auto z = zeta_for(static_cast<int>(gs.front().rows()));
      if (search > 0) {
        const auto r = schottky_search(gs, search, confirm, RegularityCone(cone), z, opt);
        Json tried = Json::array();
        for (const auto& rep : r.reports)
          tried.push_back({{"N", rep.N}, {"pass", rep.pass}, {"spacing_margin", rep.spacing_margin},
                           {"angle_margin", rep.angle_margin}});
        return emit({{"n0", r.n0 ? Json(*r.n0) : Json(nullptr)}, {"confirm", confirm}, {"tried", tried}});
      }
      return emit(schottky_json(schottky_certificate(gs, N, RegularityCone(cone), z, opt)));
    });
  }

  // --- config ----------------------------------------------------------------
  auto* config = app.add_subcommand("config", "Weighted configurations on circles and spheres")->require_subcommand(1);
  {
    static std::string cfg, other, weights;
    auto* stab = config->add_subcommand("stability", "Masses, stability and the diagonal thickening");
    stab->add_option("--config", cfg, "{\"angles\"|\"turns\"|\"points\": [...], \"weights\": [...]}")->required();
    set(stab, [] {
      const auto z = cli::to_config(cli::load_json(cfg));
      const double tol = tol_or(1e-9);
      Json j{{"total_mass", cli::from_rational(z.total_mass())},
             {"clusters", clusters_json(aggregate_masses(z, tol))},
             {"stable", is_stable(z, tol)},
             {"semistable", is_semistable(z, tol)}};
      if (z.is_circle())
        j["diagonal"] = {{"strict", diagonal_thickening_check(z, true, tol)},
                         {"closure", diagonal_thickening_check(z, false, tol)}};
      return emit(j);
    });
    auto* rel = config->add_subcommand("relpos", "Relative position in (Z_2)^n");
    rel->add_option("--config", cfg, "First configuration")->required();
    rel->add_option("--other", other, "Second configuration")->required();
    set(rel, [] {
      const auto z = cli::to_config(cli::load_json(cfg));
      const auto w = cli::to_config(cli::load_json(other));
      const auto eps = relpos_config(z, w, tol_or(1e-9));
      const auto group = WeylGroup::build(CoxeterType::a1_power(static_cast<int>(eps.size())));
      const auto idx = from_sign_vector(*group, eps);
      return emit({{"signs", eps}, {"element", idx ? Json(group->label(*idx)) : Json(nullptr)}});
    });
    auto* walls = config->add_subcommand("walls", "Walls through a weight vector and its chamber");
    walls->add_option("--weights", weights, "Comma separated rationals")->required();
    set(walls, [] {
      std::vector<Rational> q;
      for (const auto& t : split(weights, ',')) q.push_back(parse_rational(t));
      const WeightVector a(q);
      const auto r = wall_chamber_report(a);
      Json wl = Json::array();
      for (const auto& I : r.walls) wl.push_back(I);
      Json ws = Json::array();
      for (const auto& x : q) ws.push_back(cli::from_rational(x));
      return emit({{"weights", ws}, {"on_wall", r.on_wall()}, {"walls", wl}, {"signs", r.signs}});
    });
  }

  try {
    app.parse(argc, argv);
    if (tol_opt->count() > 0) {
      g_opts.tol = tol_flag;
    } else if (const char* env = std::getenv("WEYLGEOM_TOL")) {
      try {
        g_opts.tol = std::stod(env);
      } catch (const std::exception&) {
        throw CLI::ValidationError("WEYLGEOM_TOL", std::string("not a number: ") + env);
      }
    }
    if (g_opts.tol && !(*g_opts.tol > 0)) throw CLI::ValidationError("--tol", "tolerances must be positive");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string text = action();
    if (g_opts.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(g_opts.out);
      if (!out) throw Error(Errc::InvalidArgument, "cannot write '" + g_opts.out + "'");
      out << text;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cout << cli::dump({{"error", std::string(e.name())}, {"message", e.what()}, {"input", echo}});
    return 1;
  } catch (const std::exception& e) {
    std::cout << cli::dump({{"error", "InternalError"}, {"message", e.what()}, {"input", echo}});
    return 1;
  }
}
