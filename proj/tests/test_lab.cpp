#include <cmath>
#include <random>

#include "doctest.h"
#include "diophlab/lab.hpp"

using namespace diophlab;

namespace {

RealSpec fourth_root_of_two() { return RealSpec::algebraic(IntPoly({-2, 0, 0, 0, 1}), 1, 2, "2^(1/4)"); }

const MinimalPointSequence& desk_sequence() {
  static const MinimalPointSequence seq =
      minimal_points(fourth_root_of_two(), 3, mpz_class(100000), PrecisionContext{});
  return seq;
}

const LabRun& desk_run() {
  static const LabRun run = build_lab_run(desk_sequence());
  return run;
}

MinimalPointSequence sequence_of(std::vector<ApproxVector> xs) {
  MinimalPointSequence seq(fourth_root_of_two(), 3, mpz_class(1000));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    MinimalPointRecord r;
    r.index = k + 1;
    r.x = xs[k];
    r.X = sup_norm(xs[k]);
    seq.records.push_back(r);
  }
  return seq;
}

const ExactCheck* find_check(const std::vector<ExactCheck>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("C points by direct expansion") {
  ApproxVector x{1, 2, 3, 4}, y{0, 1, 0, 1}, y2{0, 2, 0, 2};
  CHECK(compute_C(x, y) == CPoint{2, -2});
  CHECK(compute_C(x, y2) == CPoint{4, -4});
  CHECK(compute_C(x, x).is_zero());
  CHECK(compute_C(y, y).is_zero());
  CHECK(CPoint{3, -7}.norm() == 7);
  CHECK_THROWS_AS(compute_C(ApproxVector{1, 2, 3}, y), std::invalid_argument);
}

TEST_CASE("determinant identity residuals vanish") {
  IntVector e1 = to_int_vector({1, 0, 0}), e2 = to_int_vector({0, 1, 0}), e3 = to_int_vector({0, 0, 1});
  IntVector ones = to_int_vector({1, 1, 1});
  IntVector zero = to_int_vector({0, 0, 0});
  CHECK(det_identity_residual(e1, e2, e3, ones) == zero);
  CHECK(det_identity_residual(ones, ones, e2, e3) == zero);
  // oracle: the first term alone is det(e1,e2,e3) z = z
  CHECK(det3(e1, e2, e3) == 1);
  CHECK(det3(e2, e1, e3) == -1);
  for (const auto& c : identity_suite(7, 10000, 1000)) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

TEST_CASE("pointy points: geometric progressions and the two bounds") {
  RealSpec s = fourth_root_of_two();
  PrecisionContext ctx;
  PointyReport r = verify_pointy(CPoint{1, 2}, ApproxVector{1, 2, 4, 8}, s, ctx);
  CHECK(r.y.is_zero());
  CHECK(r.degenerate_branch);
  CHECK(r.norm_identity);
  CHECK(r.l_ratio > 0);
  CHECK(std::isfinite(r.l_ratio));

  PointyReport r2 = verify_pointy(CPoint{1, 1}, ApproxVector{1, 2, 4, 8}, s, ctx);
  CHECK(r2.y == ApproxVector{-1, -2, -4});
  CHECK_FALSE(r2.degenerate_branch);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> small(-40, 40);
  int branch = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k < 1000; ++k) {
      long a = small(rng), b = small(rng);
      if (a == 0 && b == 0) b = 1;
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), mpz_class(a).get_mpz_t(), mpz_class(b).get_mpz_t());
      a /= g.get_si();
      b /= g.get_si();
      std::vector<mpz_class> x(n + 1);
      for (int t = 0; t <= n; ++t) {
        mpz_class pa, pb;
        mpz_pow_ui(pa.get_mpz_t(), mpz_class(a).get_mpz_t(), n - t);
        mpz_pow_ui(pb.get_mpz_t(), mpz_class(b).get_mpz_t(), t);
        x[t] = pa * pb;
      }
      PointyReport p = verify_pointy(CPoint{a, b}, ApproxVector(x), s, ctx);
      REQUIRE(p.degenerate_branch);
      CHECK(p.norm_identity);
      ++branch;
    }
  }
  CHECK(branch == 3000);

  // fitted c2 over random primitive pairs, against records of a desk run
  const double xi = std::pow(2.0, 0.25);
  double worst = 0;
  const auto& seq = desk_sequence();
  for (int k = 0; k < 300; ++k) {
    long a = small(rng), b = small(rng);
    if (a == 0 && b == 0) continue;
    const auto& x = seq.records[static_cast<std::size_t>(k) % seq.records.size()].x;
    worst = std::max(worst, verify_pointy(CPoint{a, b}, x, s, ctx).c2_needed);
  }
  CHECK(worst <= 3 * std::max(1.0, xi));
}

TEST_CASE("planes W_i on a desk run") {
  const LabRun& run = desk_run();
  REQUIRE(run.m() >= 15);
  CHECK(run.W.size() == run.m() - 1);
  for (const auto& [i, w] : run.W) {
    CHECK(w.dim() == 2);
    // the two records are a lattice basis, so their own wedge gives the height
    mpz_class top = 0;
    for (const auto& e : wedge({run.x(i - 1).coords, run.x(i).coords}, 4).entries)
      if (abs(e) > top) top = abs(e);
    CHECK(w.height_sup() == top);
  }
  const ExactCheck* basis = find_check(run.checks, "w-basis");
  REQUIRE(basis != nullptr);
  CHECK(basis->passed);
  for (const auto& c : run.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

TEST_CASE("a corrupted sequence is rejected") {
  auto seq = sequence_of({ApproxVector{1, 1, 1, 2}, ApproxVector{1, 1, 1, 2}});
  CHECK_THROWS_AS(build_W(seq), DataCorruption);

  MinimalPointSequence bad = desk_sequence();
  bad.records[5].x = ApproxVector({bad.records[5].x[0], bad.records[5].x[1], bad.records[5].x[2] + 1,
                                   bad.records[5].x[3]});
  ExactCheck replay = replay_check(bad, PrecisionContext{});
  CHECK_FALSE(replay.passed);
  CHECK(replay.detail.find("record 6") != std::string::npos);
  CHECK(replay_check(desk_sequence(), PrecisionContext{}).passed);
}

TEST_CASE("planes V_i and the index i0") {
  auto seq = sequence_of({ApproxVector{8, 12, 18, 27}, ApproxVector{1, 2, 3, 4}, ApproxVector{1, 1, 2, 3}});
  VBuild vb = build_V(seq);
  CHECK(vb.dependent == std::vector<std::size_t>{1});
  REQUIRE(vb.i0.has_value());
  CHECK(*vb.i0 == 2);
  CHECK(vb.V.count(1) == 0);
  CHECK(vb.V.at(2).dim() == 2);

  const LabRun& run = desk_run();
  REQUIRE(run.i0.has_value());
  for (std::size_t i = *run.i0; i <= run.m(); ++i)
    for (std::size_t j = *run.i0; j <= run.m(); ++j)
      CHECK((run.V.at(i) == run.V.at(j)) == compute_C(run.x(i), run.x(j)).is_zero());
}

TEST_CASE("index sets I and J") {
  const LabRun& run = desk_run();
  for (std::size_t i = 2; i + 1 <= run.m(); ++i) {
    bool in_I = std::find(run.I.begin(), run.I.end(), i) != run.I.end();
    bool rank3 = rank({run.x(i - 1).coords, run.x(i).coords, run.x(i + 1).coords}, 4) == 3;
    CHECK(in_I == rank3);
  }
  for (std::size_t j : run.J) CHECK(std::find(run.I.begin(), run.I.end(), j) != run.I.end());
  CHECK(run.J.size() < run.I.size());

  LabRun small = build_lab_run(desk_sequence().truncated(mpz_class(1000)));
  CHECK(small.I.size() < run.I.size());

  // a stretch of records inside one plane leaves I empty there
  auto flat = sequence_of({ApproxVector{1, 0, 0, 0}, ApproxVector{0, 1, 0, 0}, ApproxVector{1, 1, 0, 0},
                           ApproxVector{1, 2, 0, 0}, ApproxVector{1, 2, 1, 0}});
  IndexSets is = index_sets(flat, build_W(flat));
  CHECK(is.I == std::vector<std::size_t>{4});
}

TEST_CASE("ratio reports") {
  const LabRun& run = desk_run();
  CHECK_THROWS_AS(verify_lemma_ratios(run, "lemma9.9"), std::invalid_argument);
  CHECK(resolve_lemma_id("prop5.2") == "v-repeat");
  CHECK(resolve_lemma_id("Lemma3.1") == "plane-height");

  for (const auto& id : lemma_ids()) {
    for (const auto& r : verify_lemma_ratios(run, id)) {
      INFO(id << "/" << r.part);
      CHECK(r.lemma == id);
      CHECK(r.applicable_count == r.rows.size());
      for (const auto& row : r.rows) {
        CHECK(std::isfinite(row.ratio));
        if (id == "c-pair-determinant") CHECK(row.ratio >= 0);  // the integer determinant may vanish
        else CHECK(row.ratio > 0);
      }
      if (r.rows.empty()) CHECK(r.verdict == "no applicable index");
    }
  }

  auto repeat = verify_lemma_ratios(run, "prop5.2");
  REQUIRE(repeat.size() == 1);
  CHECK(repeat[0].applicable_count == 0);
  CHECK(repeat[0].verdict == "no applicable index");

  auto heights = verify_lemma_ratios(run, "plane-height");
  REQUIRE(heights.size() == 2);
  CHECK(heights[0].two_sided);
  CHECK(heights[0].max_ratio / heights[0].min_ratio < 1000);

  LabOptions untrimmed;
  untrimmed.trim_front = 0;
  untrimmed.trim_back = 0;
  auto pairs = verify_lemma_ratios(run, "c-point-size", untrimmed);
  std::size_t nonzero = 0;
  for (std::size_t i = 1; i <= run.m(); ++i)
    for (std::size_t j = i + 1; j <= run.m(); ++j)
      if (!compute_C(run.x(i), run.x(j)).is_zero()) ++nonzero;
  CHECK(pairs[0].applicable_count == nonzero);

  auto drift = verify_lemma_ratios(run, "plane-height");
  attach_drift(drift, run, "plane-height", LabOptions{});
  CHECK(drift[0].half_run_max_ratio.has_value());
}

TEST_CASE("proportionality of C points on consecutive elements of I") {
  const LabRun& run = desk_run();
  for (std::size_t k = 0; k + 1 < run.I.size(); ++k) {
    std::size_t i = run.I[k], j = run.I[k + 1];
    CPoint cij = compute_C(run.x(i), run.x(j));
    CPoint c1 = compute_C(run.x(i), run.x(i + 1));
    CHECK(cij.minus * c1.plus - cij.plus * c1.minus == 0);
    CHECK_FALSE(c1.is_zero());
  }
  const ExactCheck* prop = find_check(run.checks, "c-proportionality");
  REQUIRE(prop != nullptr);
  CHECK(prop->passed);
}

TEST_CASE("theorem gate") {
  ConstantSet cs = constants(lambda3_decimal());
  GateReport g = theorem_gate(desk_sequence(), cs, &desk_run());
  CHECK(g.applicable);
  CHECK(g.within_slack);
  CHECK(g.c_norm_floor_holds);
  CHECK(g.c_norm_checked > 0);
  CHECK(g.verdict.find("no desk-scale observation contradicts") != std::string::npos);

  RealSpec root2 = RealSpec::algebraic(IntPoly({-2, 0, 1}), 1, 2, "sqrt2");
  auto s = minimal_points(root2, 1, mpz_class(10000), PrecisionContext{});
  GateReport na = theorem_gate(s, cs);
  CHECK_FALSE(na.applicable);
  CHECK(na.reason.find("violated") != std::string::npos);
}
