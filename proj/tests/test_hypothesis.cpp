#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vstbench/hypothesis.hpp"
#include "vstbench/random.hpp"
#include "oracles.hpp"

using namespace vstbench;
using namespace vstbench::study;
using namespace vstbench::oracle;

namespace {

double friedman_stat_from_sums(const std::vector<double>& sums) {
  double s = 0;
  for (double v : sums) s += v * v;
  return s;
}

// All (k!)^n within-row rank arrangements, counted directly.
double enumerate_friedman(const Matrix& data) {
  const std::size_t n = data.size(), k = data[0].size();
  std::vector<std::vector<double>> rows;
  for (const auto& r : data) rows.push_back(rank_average(r));
  std::vector<double> obs(k, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < k; ++j) obs[j] += r[j];
  const double observed = friedman_stat_from_sums(obs);
  std::vector<std::vector<std::vector<double>>> perms(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = rows[i];
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      std::vector<double> arr(k);
      for (std::size_t j = 0; j < k; ++j) arr[j] = p[idx[j]];
      perms[i].push_back(arr);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  std::size_t total = 1;
  for (const auto& p : perms) total *= p.size();
  std::size_t hits = 0;
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    std::vector<double> sums(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& arr = perms[i][rem % perms[i].size()];
      rem /= perms[i].size();
      for (std::size_t j = 0; j < k; ++j) sums[j] += arr[j];
    }
    if (friedman_stat_from_sums(sums) >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("average ranks") {
  std::vector<double> v = {3, 1, 4, 1, 5};
  auto r = rank_average(v);
  CHECK(r == std::vector<double>{3, 1.5, 4, 1.5, 5});
}

TEST_CASE("friedman on identical permutation rows") {
  Matrix m(10, {1, 2, 3});
  auto t = friedman_test(m);
  CHECK(t.statistic == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(t.dof1 == 2);
  // chi-square with 2 dof survives as exp(-x/2)
  CHECK(std::abs(t.p - std::exp(-10.0)) < 1e-9);
  CHECK(t.p == doctest::Approx(4.54e-5).epsilon(1e-3));
  CHECK(friedman_exact_p(m) == doctest::Approx(std::pow(1.0 / 6.0, 9)).epsilon(1e-9));
}

TEST_CASE("friedman with ties everywhere is degenerate") {
  Matrix m = {{2, 2, 2}, {5, 5, 5}, {1, 1, 1}};
  auto t = friedman_test(m);
  CHECK(t.statistic == 0.0);
  CHECK(t.p == 1.0);
  CHECK(t.degenerate);
}

TEST_CASE("friedman p matches closed-form chi-square tails") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = trial % 2 == 0 ? 3 : 5;
    Matrix m(12, std::vector<double>(k));
    for (auto& row : m)
      for (std::size_t j = 0; j < k; ++j) row[j] = std::round(rng.normal() * 2 + 0.4 * j);
    auto t = friedman_test(m);
    if (t.degenerate) continue;
    const double x = t.statistic;
    const double oracle = k == 3 ? std::exp(-x / 2) : std::exp(-x / 2) * (1 + x / 2);
    CHECK(std::abs(t.p - oracle) < 1e-9);
  }
}

TEST_CASE("friedman exact p matches brute-force enumeration") {
  Matrix textbook = {{9.0, 7.5, 6.0}, {8.2, 8.4, 5.1}, {7.0, 6.1, 6.1}, {9.9, 8.0, 7.2}, {6.5, 6.9, 4.8}};
  CHECK(std::abs(friedman_exact_p(textbook) - enumerate_friedman(textbook)) < 1e-12);
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m(5, std::vector<double>(3));
    for (auto& row : m)
      for (auto& v : row) v = static_cast<double>(rng.below(4));
    CHECK(std::abs(friedman_exact_p(m) - enumerate_friedman(m)) < 1e-12);
  }
  Matrix big(40, {1, 2, 3, 4, 5, 6});
  CHECK_THROWS_AS(friedman_exact_p(big, 1000), std::length_error);
}

TEST_CASE("wilcoxon constant shift") {
  std::vector<double> b = {1.0, 2.5, 3.1, 0.2, 7.7, 4.4};
  std::vector<double> a;
  for (std::size_t i = 0; i < b.size(); ++i) a.push_back(b[i] + 0.5 + 0.1 * i);
  auto t = wilcoxon_signed_rank(a, b);
  CHECK(t.statistic == 0.0);
  CHECK(t.p_exact == doctest::Approx(2.0 / 64.0).epsilon(1e-12));
  CHECK(t.p == t.p_exact);
  CHECK(t.note == "a > b");
  CHECK(std::isfinite(t.p_normal));
}

TEST_CASE("wilcoxon antisymmetric differences") {
  std::vector<double> b(8, 0.0), a = {1, -1, 2, -2, 3, -3, 4, -4};
  auto t = wilcoxon_signed_rank(a, b);
  CHECK(t.p == doctest::Approx(1.0));
  CHECK(t.note == "a = b");
}

TEST_CASE("wilcoxon rejects an all-zero pairing") {
  std::vector<double> a = {1, 2, 3};
  CHECK_THROWS_AS(wilcoxon_signed_rank(a, a), std::invalid_argument);
  std::vector<double> shorter = {1, 2};
  CHECK_THROWS_AS(wilcoxon_signed_rank(a, shorter), std::invalid_argument);
}

TEST_CASE("wilcoxon exact p equals sign enumeration for n up to 12") {
  Rng rng(99);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        // coarse grid so ties and zero differences occur
        a[i] = std::round(rng.normal() * 3) / 2;
        b[i] = std::round(rng.normal() * 3) / 2;
      }
      bool all_zero = true;
      for (std::size_t i = 0; i < n; ++i) all_zero = all_zero && a[i] == b[i];
      if (all_zero) continue;
      auto t = wilcoxon_signed_rank(a, b);
      CHECK(std::abs(t.p_exact - enumerate_wilcoxon(a, b)) < 1e-12);
    }
  }
}

TEST_CASE("wilcoxon exact p agrees with a sign-flip Monte Carlo at n = 24") {
  Rng rng(5150);
  std::vector<double> a(24), b(24);
  for (std::size_t i = 0; i < 24; ++i) {
    a[i] = rng.normal() + 0.35;
    b[i] = rng.normal();
  }
  auto t = wilcoxon_signed_rank(a, b);
  REQUIRE(std::isfinite(t.p_exact));
  std::vector<double> mag;
  for (std::size_t i = 0; i < 24; ++i) mag.push_back(std::abs(a[i] - b[i]));
  auto ranks = rank_average(mag);
  const double total = std::accumulate(ranks.begin(), ranks.end(), 0.0);
  const int draws = 1'000'000;
  Rng flips(8);
  int extreme = 0;
  for (int d = 0; d < draws; ++d) {
    const std::uint64_t bits = flips.next();
    double s = 0;
    for (std::size_t i = 0; i < 24; ++i)
      if (bits >> i & 1) s += ranks[i];
    if (std::min(s, total - s) <= t.statistic + 1e-9) ++extreme;
  }
  const double p = static_cast<double>(extreme) / draws;
  const double se = std::sqrt(p * (1 - p) / draws);
  CHECK(std::abs(p - t.p_exact) < 3 * se);
  // larger samples fall back to the normal approximation
  auto approx = wilcoxon_signed_rank(a, b, 10);
  CHECK(std::isnan(approx.p_exact));
  CHECK(approx.p == approx.p_normal);
  CHECK(std::abs(approx.p_normal - t.p_exact) < 0.02);
}

TEST_CASE("rank tests are invariant under monotone transforms") {
  Rng rng(77);
  Matrix m(15, std::vector<double>(3));
  for (auto& row : m)
    for (std::size_t j = 0; j < 3; ++j) row[j] = rng.normal() + 0.3 * j;
  Matrix e = m, af = m;
  for (auto& row : e)
    for (auto& v : row) v = std::exp(v);
  for (auto& row : af)
    for (auto& v : row) v = 3.5 * v - 2.0;
  auto base = friedman_test(m);
  CHECK(friedman_test(e).statistic == doctest::Approx(base.statistic).epsilon(1e-12));
  CHECK(friedman_test(af).statistic == doctest::Approx(base.statistic).epsilon(1e-12));
  std::vector<double> a, b, a2, b2;
  for (const auto& row : m) {
    a.push_back(row[0]);
    b.push_back(row[2]);
    a2.push_back(3.5 * row[0] - 2.0);
    b2.push_back(3.5 * row[2] - 2.0);
  }
  auto w = wilcoxon_signed_rank(a, b);
  auto w2 = wilcoxon_signed_rank(a2, b2);
  CHECK(w.statistic == w2.statistic);
  CHECK(w.p == w2.p);
}

TEST_CASE("tests are invariant under relabeling participants") {
  Rng rng(12);
  Matrix m(10, std::vector<double>(3));
  for (auto& row : m)
    for (auto& v : row) v = rng.normal();
  Matrix r(m.rbegin(), m.rend());
  std::swap(r[2], r[7]);
  CHECK(friedman_test(r).statistic == doctest::Approx(friedman_test(m).statistic));
  CHECK(friedman_exact_p(r) == doctest::Approx(friedman_exact_p(m)));
  CHECK(rm_anova(r).statistic == doctest::Approx(rm_anova(m).statistic));
}

TEST_CASE("holm step-down") {
  std::vector<double> one = {0.02};
  CHECK(holm_bonferroni(one) == one);
  std::vector<double> p = {0.01, 0.04, 0.03};
  auto adj = holm_bonferroni(p);
  CHECK(adj[0] == doctest::Approx(0.03));
  CHECK(adj[1] == doctest::Approx(0.06));
  CHECK(adj[2] == doctest::Approx(0.06));
  std::vector<double> with_nan = {0.01, std::nan(""), 0.04};
  auto an = holm_bonferroni(with_nan);
  CHECK(an[0] == doctest::Approx(0.02));
  CHECK(std::isnan(an[1]));
  CHECK(an[2] == doctest::Approx(0.04));
  std::vector<double> bad = {1.2};
  CHECK_THROWS(holm_bonferroni(bad));
}

TEST_CASE("holm matches its definition on random vectors") {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(12);
    std::vector<double> p(m);
    for (auto& v : p) v = rng.uniform() < 0.2 ? rng.uniform() * 0.01 : rng.uniform();
    auto got = holm_bonferroni(p);
    auto want = holm_by_definition(p);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-15));
      CHECK(got[i] >= p[i]);
    }
    // monotone in the sorted order of the raw values
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    for (std::size_t i = 1; i < m; ++i) CHECK(got[order[i]] >= got[order[i - 1]]);
    // permutation equivariance
    std::vector<double> rev(p.rbegin(), p.rend());
    auto got_rev = holm_bonferroni(rev);
    for (std::size_t i = 0; i < m; ++i) CHECK(got_rev[m - 1 - i] == got[i]);
    // adjusting again never lowers a value
    auto twice = holm_bonferroni(got);
    for (std::size_t i = 0; i < m; ++i) CHECK(twice[i] >= got[i]);
  }
}

TEST_CASE("paired t by hand") {
  std::vector<double> a = {5.1, 4.8, 6.0, 5.5, 5.9}, b = {4.9, 4.1, 5.2, 5.6, 5.0};
  // differences 0.2 0.7 0.8 -0.1 0.9: mean 0.5, sd sqrt(0.185)
  auto t = paired_t_test(a, b);
  CHECK(t.statistic == doctest::Approx(0.5 / (std::sqrt(0.185) / std::sqrt(5.0))));
  CHECK(t.dof1 == 4);
  CHECK(t.note == "a > b");
  std::vector<double> c = {1, 2, 3};
  auto zero = paired_t_test(c, c);
  CHECK(zero.p == 1.0);
  CHECK(zero.degenerate);
}

TEST_CASE("two-condition ANOVA F equals squared paired t") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(30);
    std::vector<double> a(n), b(n);
    Matrix m(n, std::vector<double>(2));
    for (std::size_t i = 0; i < n; ++i) {
      const double subject = rng.normal() * 3;
      a[i] = subject + rng.normal() + 0.4;
      b[i] = subject + rng.normal();
      m[i] = {a[i], b[i]};
    }
    auto t = paired_t_test(a, b);
    auto f = rm_anova(m);
    CHECK(std::abs(f.statistic - t.statistic * t.statistic) < 1e-9 * std::max(1.0, f.statistic));
    CHECK(std::abs(f.p - t.p) < 1e-9);
    CHECK(f.dof1 == 1);
    CHECK(f.dof2 == static_cast<double>(n - 1));
  }
}

TEST_CASE("RM-ANOVA shape and degenerate cases") {
  Matrix same(24, std::vector<double>(3));
  for (std::size_t i = 0; i < 24; ++i) same[i] = {double(i), double(i), double(i)};
  auto z = rm_anova(same);
  CHECK(z.statistic == 0.0);
  CHECK(z.p == 1.0);
  CHECK(z.dof1 == 2);
  CHECK(z.dof2 == 46);

  Matrix m = {{1, 2, 4}, {2, 2, 5}, {0, 3, 3}, {1, 1, 6}};
  auto t = rm_anova(m);
  // by hand: grand mean 2.5, SS_cond 26, SS_subj 1.667, SS_total 35
  const double ss_err = 35.0 - 26.0 - 5.0 / 3.0;
  CHECK(t.statistic == doctest::Approx((26.0 / 2) / (ss_err / 6)));
  CHECK(t.effect == doctest::Approx(26.0 / (26.0 + ss_err)));
  Matrix ragged = {{1, 2}, {1}};
  CHECK_THROWS(rm_anova(ragged));
  Matrix missing = {{1, 2}, {1, std::nan("")}};
  CHECK_THROWS(friedman_test(missing));
}
