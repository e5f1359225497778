// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "diophlab/approximation.hpp"
#include "diophlab/cli.hpp"
#include "diophlab/constants.hpp"
#include "diophlab/lab.hpp"
#include "diophlab/subspace.hpp"

using namespace diophlab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int k, const std::string& title, const std::function<void(Verdict&)>& body) {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.note << "exception: " << e.what() << "; ";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("%s criterion %d (%s): %s[%.2f s]\n", v.pass ? "PASS" : "FAIL", k, title.c_str(),
              v.note.str().c_str(), secs);
  std::fflush(stdout);
}

// Published four-place values cut the expansion rather than round it.
std::string truncated(const RealInterval& v, int places) {
  std::string d = v.decimal(40);
  return d.substr(0, d.find('.') + 1 + static_cast<std::size_t>(places));
}

RealSpec fourth_root(long a, const std::string& label) {
  return RealSpec::algebraic(IntPoly({-a, 0, 0, 0, 1}), 1, 2, label);
}

std::vector<ApproxVector> vectors_of(const MinimalPointSequence& s) {
  std::vector<ApproxVector> out;
  for (const auto& r : s.records) out.push_back(r.x);
  return out;
}

mpz_class laplace(const IntMatrix& m) {
  if (m.empty()) return 1;
  if (m.size() == 1) return m[0][0];
  mpz_class total = 0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    IntMatrix sub;
    for (std::size_t i = 1; i < m.size(); ++i) {
      IntVector r;
      for (std::size_t k = 0; k < m.size(); ++k)
        if (k != j) r.push_back(m[i][k]);
      sub.push_back(r);
    }
    mpz_class t = m[0][j] * laplace(sub);
    if (j % 2 == 0) total += t; else total -= t;
  }
  return total;
}

IntMatrix random_vectors(std::mt19937_64& rng, int count, int n, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  IntMatrix out;
  for (int i = 0; i < count; ++i) {
    IntVector v;
    for (int j = 0; j < n; ++j) v.emplace_back(d(rng));
    out.push_back(v);
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the "header" member from the pretty-printed text, leaving every other byte.
std::string without_header(const std::string& text) {
  std::size_t start = text.find("  \"header\": {");
  if (start == std::string::npos) return text;
  std::size_t end = text.find("\n  }", start);
  if (end == std::string::npos) return text;
  end += 4;
  if (end < text.size() && text[end] == ',') ++end;
  if (end < text.size() && text[end] == '\n') ++end;
  return text.substr(0, start) + text.substr(end);
}

const LabRun& big_run() {
  static const LabRun run =
      build_lab_run(minimal_points(fourth_root(2, "2^(1/4)"), 3, mpz_class(1000000), PrecisionContext{}));
  return run;
}

}  // namespace

int main() {
  criterion(1, "constant reproduction", [](Verdict& v) {
    ConstantSet cs = constants(lambda3_decimal());
    const std::string digits = "0.4245069034188409096444633261757859054950411137835";
    v.require(cs.lambda3.decimal(50).rfind(digits, 0) == 0, "lambda3 50 digits");
    v.require(cs.lambda3_alt.decimal(50).rfind(digits, 0) == 0, "second closed form 50 digits");
    v.require(truncated(cs.lambda3, 4) == "0.4245", "lambda3 0.4245");
    v.require(truncated(cs.lambda2, 4) == "0.4241", "lambda2 0.4241");
    v.require(truncated(cs.sqrt2_minus_1, 4) == "0.4142", "sqrt2-1 0.4142");
    v.require(truncated(cs.tau4, 4) == "3.3556", "tau4 3.3556");
    v.require(truncated(cs.lambda3_cofactor, 3) == "3.811", "gamma/lambda3 3.811");
    v.note << "lambda3=" << cs.lambda3.decimal(12) << " lambda2=" << cs.lambda2.decimal(12)
           << " tau4=" << cs.tau4.decimal(12) << " gamma/lambda3=" << cs.lambda3_cofactor.decimal(12)
           << " (four-place values compared by truncation) ";
  });

  criterion(2, "closed-form cross-identity", [](Verdict& v) {
    ConstantSet cs = constants(lambda3_decimal());
    double diff = (cs.lambda3 - cs.lambda3_alt).magnitude_d();
    double root = golden_quadratic(cs.lambda3, cs.gamma).magnitude_d();
    v.require(diff < 1e-45, "closed forms differ");
    v.require(root < 1e-45, "quadratic residual");
    v.note << "|difference| <= " << diff << ", |quadratic| <= " << root << " ";
  });

  criterion(3, "alpha identity at 100 random exponents", [](Verdict& v) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> num(340001, 499999);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      RealInterval lam = RealInterval::from_mpq(mpq_class(num(rng), 1000000));
      worst = std::max(worst, p2_identity_residual(lam).magnitude_d());
    }
    v.require(worst < 1e-40, "residual too large");
    v.note << "max residual <= " << worst << " ";
  });

  criterion(4, "sweep against brute force", [](Verdict& v) {
    PrecisionContext ctx;
    std::vector<RealSpec> specs{fourth_root(2, "2^(1/4)"), fourth_root(3, "3^(1/4)"),
                                RealSpec::algebraic(IntPoly({-1, -1, 0, 0, 1}), 1, 2, "x^4-x-1")};
    for (const auto& s : specs) {
      auto a = minimal_points(s, 3, mpz_class(30), ctx);
      auto b = brute_force_minimal_points(s, 3, 30, ctx);
      v.require(vectors_of(a) == vectors_of(b), s.label() + " differs from brute force");
      v.note << s.label() << ": " << a.records.size() << " records; ";
    }
    RealSpec root2 = RealSpec::algebraic(IntPoly({-2, 0, 1}), 1, 2, "sqrt2");
    const std::vector<ApproxVector> convergents{{1, 1}, {2, 3}, {5, 7}, {12, 17}, {29, 41}, {70, 99}, {169, 239}};
    auto at200 = vectors_of(minimal_points(root2, 1, mpz_class(200), ctx));
    auto at239 = vectors_of(minimal_points(root2, 1, mpz_class(239), ctx));
    v.require(at200 == std::vector<ApproxVector>(convergents.begin(), convergents.end() - 1), "sqrt2 at 200");
    v.require(at239 == convergents, "sqrt2 at 239");
    v.require(vectors_of(brute_force_minimal_points(root2, 1, 239, ctx)) == convergents, "sqrt2 brute force");
    v.note << "sqrt2: six convergent points up to norm 200, (169,239) joins at X_max = 239 since its norm is 239 ";
  });

  criterion(5, "exact identity suite", [](Verdict& v) {
    for (const auto& c : identity_suite(5, 10000, 1000)) v.require(c.passed, c.name + ": " + c.detail);

    std::mt19937_64 rng(55);
    std::uniform_int_distribution<long> d(-1000000, 1000000);
    for (int k = 0; k < 1000; ++k) {
      ApproxVector x({d(rng), d(rng), d(rng), d(rng)});
      v.require(compute_C(x, x).is_zero(), "C(x,x) nonzero");
    }

    const LabRun& run = big_run();
    std::size_t pairs = 0;
    for (std::size_t k = 0; k + 1 < run.I.size(); ++k) {
      std::size_t i = run.I[k], j = run.I[k + 1];
      CPoint a = compute_C(run.x(i), run.x(j));
      CPoint b = compute_C(run.x(i), run.x(i + 1));
      v.require(a.minus * b.plus - a.plus * b.minus == 0, "proportionality at i = " + std::to_string(i));
      ++pairs;
    }
    // the X_max = 10^5 prefix is the run the criterion names
    LabRun small = build_lab_run(run.seq.truncated(mpz_class(100000)));
    std::size_t small_pairs = 0;
    for (std::size_t k = 0; k + 1 < small.I.size(); ++k) {
      std::size_t i = small.I[k], j = small.I[k + 1];
      CPoint a = compute_C(small.x(i), small.x(j));
      CPoint b = compute_C(small.x(i), small.x(i + 1));
      v.require(a.minus * b.plus - a.plus * b.minus == 0, "proportionality (10^5) at i = " + std::to_string(i));
      ++small_pairs;
    }

    RealSpec s = fourth_root(2, "2^(1/4)");
    PrecisionContext ctx;
    std::uniform_int_distribution<long> small_d(-60, 60);
    std::size_t cases = 0;
    for (int n = 1; n <= 3; ++n) {
      for (int k = 0; k < 1000; ++k) {
        long a = small_d(rng), b = small_d(rng);
        if (a == 0 && b == 0) b = 1;
        long g = std::gcd(a, b);
        a /= g;
        b /= g;
        std::vector<mpz_class> x(static_cast<std::size_t>(n) + 1);
        for (int t = 0; t <= n; ++t) {
          mpz_class pa, pb;
          mpz_pow_ui(pa.get_mpz_t(), mpz_class(a).get_mpz_t(), static_cast<unsigned long>(n - t));
          mpz_pow_ui(pb.get_mpz_t(), mpz_class(b).get_mpz_t(), static_cast<unsigned long>(t));
          x[static_cast<std::size_t>(t)] = pa * pb;
        }
        PointyReport p = verify_pointy(CPoint{a, b}, ApproxVector(x), s, ctx);
        mpz_class c_norm = std::max(std::labs(a), std::labs(b)), expected;
        mpz_pow_ui(expected.get_mpz_t(), c_norm.get_mpz_t(), static_cast<unsigned long>(n));
        v.require(p.degenerate_branch && p.norm_identity, "pointy identity");
        v.require(sup_norm(ApproxVector(x)) == expected, "||x|| = ||C||^n by direct expansion");
        ++cases;
      }
    }
    v.note << "10^4 quadruples, 10^3 self pairs, " << small_pairs << " I-pairs at 10^5 and " << pairs
           << " at 10^6, " << cases << " progressions ";
  });

  criterion(6, "height machinery", [](Verdict& v) {
    std::mt19937_64 rng(66);
    std::size_t transforms = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 1 + trial % 5;
      int p = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
      RationalSubspace s = saturate(random_vectors(rng, p, n, 7), n);
      v.require(duality_holds(s), "duality");
      RationalSubspace perp = orthogonal_complement(s);
      v.require(perp.height_sup() == s.height_sup(), "sup height duality");
      v.require(perp.height_euclid_squared() == s.height_euclid_squared(), "euclid height duality");
      v.require(s.grassmann().satisfies_plucker(), "plucker");

      auto subsets = index_subsets(n, s.dim());
      for (std::size_t k = 0; k < subsets.size(); ++k) {
        IntMatrix minor;
        for (const auto& row : s.basis()) {
          IntVector r;
          for (int c : subsets[k]) r.push_back(row[static_cast<std::size_t>(c)]);
          minor.push_back(r);
        }
        v.require(s.grassmann().entries[k] == laplace(minor), "grassmann minor");
      }

      for (int u = 0; u < 100 && s.dim() >= 1; ++u) {
        IntMatrix b = s.basis();
        for (int step = 0; step < 8; ++step) {
          std::size_t i = rng() % b.size(), j = rng() % b.size();
          if (i == j) {
            if (rng() % 2) for (auto& e : b[i]) e = -e;
            continue;
          }
          if (rng() % 4 == 0) {
            std::swap(b[i], b[j]);
            continue;
          }
          long f = static_cast<long>(rng() % 9) - 4;
          for (std::size_t c = 0; c < b[i].size(); ++c) b[i][c] += f * b[j][c];
        }
        GrassmannVector g = wedge(b, n);
        mpz_class sup = 0, sq = 0;
        for (const auto& e : g.entries) {
          sup = std::max(sup, mpz_class(abs(e)));
          sq += e * e;
        }
        v.require(sup == s.height_sup() && sq == s.height_euclid_squared(), "height under unimodular change");
        ++transforms;
      }

      RationalSubspace t =
          saturate(random_vectors(rng, static_cast<int>(rng() % static_cast<unsigned>(n + 1)), n, 7), n);
      v.require(s.dim() + t.dim() == sum(s, t).dim() + intersect(s, t).dim(), "dimension formula");
    }
    v.note << "1000 subspaces, 1000 pairs, " << transforms << " unimodular transforms ";
  });

  criterion(7, "plane height two-sided window", [](Verdict& v) {
    const LabRun& run = big_run();
    const ExactCheck* basis = nullptr;
    for (const auto& c : run.checks)
      if (c.name == "w-basis") basis = &c;
    v.require(basis != nullptr && basis->passed, "w-basis check");
    v.require(run.all_exact_checks_pass(), "lab exact checks");

    // direct recomputation over the trimmed range
    double lo = 0, hi = 0;
    std::size_t count = 0;
    for (std::size_t i = 4; i + 2 <= run.m(); ++i) {
      double r = run.W.at(i).height_sup().get_d() / (run.X(i) * run.L(i - 1));
      lo = count == 0 ? r : std::min(lo, r);
      hi = count == 0 ? r : std::max(hi, r);
      ++count;
    }
    v.require(count > 0 && hi / lo < 1e3, "window spread");

    auto reports = verify_lemma_ratios(run, "plane-height");
    const RatioReport* asymp = nullptr;
    for (const auto& r : reports)
      if (r.part == "asymp") asymp = &r;
    v.require(asymp != nullptr && asymp->applicable_count > 0, "report rows");
    if (asymp) v.require(asymp->max_ratio / asymp->min_ratio < 1e3, "report spread");
    v.note << "m = " << run.m() << ", window [" << lo << ", " << hi << "] over " << count << " indices, spread "
           << hi / lo << " ";
  });

  criterion(8, "theorem gate", [](Verdict& v) {
    const LabRun& run = big_run();
    ConstantSet cs = constants(lambda3_decimal());
    GateReport g = theorem_gate(run.seq, cs, &run);
    v.require(g.applicable && g.within_slack && g.c_norm_floor_holds, "gate report");

    // conservative recomputation: the lower end of each L enclosure
    const double bound = cs.lambda3.upper_d() + 0.05;
    const auto& r = run.seq.records;
    double worst = 0;
    std::size_t tail = 0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
      if (r[k + 1].X <= 1000) continue;
      double hat = -std::log(r[k].L.lower().to_mpq().get_d()) / std::log(r[k + 1].X.get_d());
      worst = std::max(worst, hat);
      ++tail;
    }
    v.require(tail > 0 && worst <= bound, "estimate above lambda3 + 0.05");

    std::size_t changes = 0;
    if (run.i0) {
      for (std::size_t i = *run.i0; i + 1 <= run.m(); ++i) {
        if (run.V.at(i) == run.V.at(i + 1)) continue;
        v.require(compute_C(run.x(i), run.x(i + 1)).norm() >= 1, "||C|| >= 1 at " + std::to_string(i));
        ++changes;
      }
    }
    v.require(changes > 0, "no V change observed");
    v.note << tail << " estimates with X_(i+1) > 1000, max " << worst << " <= " << bound << "; ||C|| >= 1 at "
           << changes << " V changes ";
  });

  criterion(9, "vacuous configuration", [](Verdict& v) {
    auto dir = std::filesystem::temp_directory_path() / "diophlab_acceptance_vacuous";
    std::filesystem::remove_all(dir);
    std::ostringstream out, err;
    int code = run_cli({"verify", "--spec",
                        R"j({"kind":"algebraic","poly":[-2,0,0,0,1],"interval":["1","2"],"label":"2^(1/4)"})j",
                        "--xmax", "100000", "--lemmas", "prop5.2", "--out", dir.string()},
                       out, err);
    v.require(code == 0, "exit code " + std::to_string(code));
    std::string report = slurp(dir / "report.json");
    v.require(report.find("\"verdict\": \"no applicable index\"") != std::string::npos, "verdict");

    LabRun run = build_lab_run(big_run().seq.truncated(mpz_class(100000)));
    bool repeat = false;
    if (run.i0)
      for (std::size_t i = *run.i0; i + 1 <= run.m(); ++i) repeat = repeat || run.V.at(i) == run.V.at(i + 1);
    v.require(!repeat, "the run does have V_i = V_(i+1)");
    v.note << "exit " << code << ", V_i = V_(i+1) never occurs ";
  });

  criterion(10, "determinism", [](Verdict& v) {
    auto base = std::filesystem::temp_directory_path() / "diophlab_acceptance_det";
    std::filesystem::remove_all(base);
    std::string texts[2];
    for (int k = 0; k < 2; ++k) {
      auto dir = base / std::to_string(k);
      std::ostringstream out, err;
      int code = run_cli({"verify", "--spec",
                          R"j({"kind":"algebraic","poly":[-2,0,0,0,1],"interval":["1","2"],"label":"2^(1/4)"})j",
                          "--xmax", "100000", "--seed", "11", "--out", dir.string()},
                         out, err);
      v.require(code == 0, "exit code " + std::to_string(code));
      texts[k] = slurp(dir / "report.json");
    }
    v.require(texts[0].find("\"header\"") != std::string::npos, "header present");
    v.require(without_header(texts[0]) == without_header(texts[1]), "reports differ outside the header");
    v.note << without_header(texts[0]).size() << " bytes identical outside the header ";
  });

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
