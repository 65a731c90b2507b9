#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "tropkm/invariants.hpp"

using namespace testing_support;
using tropkm::Rational;
using Conf = tropkm::Configuration<Fp>;

namespace {

Conf random_conf(std::mt19937_64& rng, const tropkm::Context<Fp>& ctx, std::size_t n, std::size_t k) {
  Conf c{tropkm::Group::kPGL, {}};
  for (std::size_t s = 0; s < k; ++s) c.points.push_back(random_lattice(rng, ctx, n, -1, 2));
  return c;
}

// Random composition of n into k nonnegative parts.
tropkm::Indices random_indices(std::mt19937_64& rng, std::int64_t n, std::size_t k) {
  tropkm::Indices idx(k, 0);
  for (std::int64_t r = 0; r < n; ++r) idx[rng() % k] += 1;
  return idx;
}

}  // namespace

TEST(Ft, Examples) {
  auto ctx = big();
  auto o = LFp::standard(ctx, 3);
  EXPECT_EQ(tropkm::f_t<Fp>({1, 1, 1}, Conf{tropkm::Group::kSL, {o, o, o}}).value, Rational(0));
  auto o2 = LFp::standard(ctx, 2);
  auto x2 = LFp::diagonal(ctx, {-1, 1});
  EXPECT_EQ(tropkm::f_t<Fp>({1, 1}, Conf{tropkm::Group::kSL, {o2, x2}}).value, Rational(1));
}

TEST(Ft, RejectsBadIndicesAndSlPoints) {
  auto ctx = big();
  auto o = LFp::standard(ctx, 2);
  Conf c{tropkm::Group::kPGL, {o, o}};
  EXPECT_THROW((void)tropkm::f_t<Fp>({1, 2}, c), tropkm::IndexSumMismatch);
  EXPECT_THROW((void)tropkm::f_t<Fp>({1}, c), tropkm::IndexSumMismatch);
  EXPECT_THROW((void)tropkm::f_t<Fp>({3, -1}, c), tropkm::DomainError);
  Conf sl{tropkm::Group::kSL, {o, LFp::diagonal(ctx, {1, 0})}};
  EXPECT_THROW((void)tropkm::f_t<Fp>({1, 1}, sl), tropkm::DomainError);
}

TEST(Ft, MatchesSampledDeterminants) {
  std::mt19937_64 rng(3);
  auto ctx = big();
  for (int k = 0; k < 30; ++k) {
    auto c = random_conf(rng, ctx, 3, 3);
    tropkm::Indices idx = random_indices(rng, 3, 3);
    auto v = tropkm::f_t(idx, c, k);
    std::vector<LFp> inputs;
    Rational corr(0);
    for (std::size_t s = 0; s < 3; ++s) {
      for (int r = 0; r < idx[s]; ++r) inputs.push_back(c.points[s]);
      corr += Rational(idx[s] * c.points[s].det_val(), 3);
    }
    EXPECT_EQ(v.value, Rational(-tropkm::sample_A(inputs, 30, 500 + k)) + corr);
    EXPECT_EQ((v.value * 3).denominator(), 1);
  }
}

TEST(MetricMin, EqualsInvariantAndDominatesOtherPoints) {
  std::mt19937_64 rng(5);
  auto ctx = big();
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 2 + k % 2;
    auto c = random_conf(rng, ctx, n, 3);
    auto idx = random_indices(rng, static_cast<std::int64_t>(n), 3);
    auto m = tropkm::metric_min(idx, c, k);
    EXPECT_EQ(m.value, tropkm::f_t(idx, c, k).value);
    for (int s = 0; s < 10; ++s) {
      auto p = random_lattice(rng, ctx, n, -2, 3);
      EXPECT_GE(tropkm::metric_sum(idx, p, c), m.value);
    }
    for (const auto& x : c.points) EXPECT_GE(tropkm::metric_sum(idx, x, c), m.value);
  }
}

TEST(MetricMin, AllPointsEqual) {
  std::mt19937_64 rng(7);
  auto ctx = big();
  auto x = random_lattice(rng, ctx, 3, -1, 2);
  Conf c{tropkm::Group::kPGL, {x, x, x}};
  auto m = tropkm::metric_min<Fp>({1, 1, 1}, c);
  EXPECT_EQ(m.value, Rational(0));
  EXPECT_EQ(tropkm::metric_sum<Fp>({1, 1, 1}, x, c), Rational(0));
}

TEST(Ft, PglScaleInvariance) {
  std::mt19937_64 rng(11);
  auto ctx = big();
  for (int k = 0; k < 20; ++k) {
    auto c = random_conf(rng, ctx, 3, 3);
    auto idx = random_indices(rng, 3, 3);
    auto base = tropkm::f_t(idx, c, k).value;
    auto moved = c;
    for (auto& p : moved.points) p = tropkm::scale(p, static_cast<std::int64_t>(rng() % 7) - 3);
    EXPECT_EQ(tropkm::f_t(idx, moved, k).value, base);
  }
}

TEST(Ft, PermutationEquivariance) {
  std::mt19937_64 rng(13);
  auto ctx = big();
  for (int k = 0; k < 20; ++k) {
    auto c = random_conf(rng, ctx, 3, 3);
    auto idx = random_indices(rng, 3, 3);
    std::vector<std::size_t> perm{0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    Conf pc{c.group, {}};
    tropkm::Indices pidx;
    for (auto p : perm) {
      pc.points.push_back(c.points[p]);
      pidx.push_back(idx[p]);
    }
    EXPECT_EQ(tropkm::f_t(pidx, pc, k).value, tropkm::f_t(idx, c, k).value);
  }
}

TEST(Ft, EdgeFunctionsRecoverDistance) {
  std::mt19937_64 rng(17);
  auto ctx = big();
  for (int k = 0; k < 30; ++k) {
    auto c = random_conf(rng, ctx, 3, 3);
    for (std::int64_t i = 0; i <= 3; ++i) {
      const std::int64_t j = 3 - i;
      auto v = tropkm::f_t<Fp>({i, j, 0}, c, k).value;
      EXPECT_EQ(v, tropkm::d_i(c.points[0], c.points[1], static_cast<std::size_t>(j)));
      EXPECT_EQ(v, tropkm::d_i(c.points[1], c.points[0], static_cast<std::size_t>(i)));
    }
  }
}

TEST(Exchange, AllEqualPointsGiveZeros) {
  auto ctx = big();
  auto o = LFp::standard(ctx, 4);
  auto r = tropkm::exchange_identity_check<Fp>(1, 1, 1, 1, Conf{tropkm::Group::kSL, {o, o, o, o}});
  EXPECT_TRUE(r.holds);
  for (const auto& s : r.sums) EXPECT_EQ(s, Rational(0));
}

TEST(Exchange, HoldsOnRandomQuadruples) {
  std::mt19937_64 rng(19);
  auto ctx = big();
  for (int k = 0; k < 15; ++k) {
    auto c = random_conf(rng, ctx, 4, 4);
    auto r = tropkm::exchange_identity_check<Fp>(1, 1, 1, 1, c, k);
    EXPECT_TRUE(r.holds) << tropkm::to_string(r.sums[0]) << " " << tropkm::to_string(r.sums[1]) << " "
                         << tropkm::to_string(r.sums[2]);
  }
  for (int k = 0; k < 15; ++k) {
    auto c = random_conf(rng, ctx, 3, 4);
    EXPECT_TRUE((tropkm::exchange_identity_check<Fp>(1, 1, 0, 1, c, k).holds));
  }
}

TEST(Exchange, IndicesMustStayInRange) {
  auto ctx = big();
  auto o = LFp::standard(ctx, 3);
  Conf c{tropkm::Group::kSL, {o, o, o, o}};
  EXPECT_THROW((void)tropkm::exchange_identity_check<Fp>(1, 1, 1, 0, c), tropkm::DomainError);
  EXPECT_THROW((void)tropkm::exchange_identity_check<Fp>(1, 1, 1, 1, c), tropkm::IndexSumMismatch);
}

TEST(Dual, PairingIdentity) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 4;
    tropkm::Coweight mu;
    for (std::size_t j = 0; j < n; ++j) mu.entries.push_back(static_cast<std::int64_t>(rng() % 9) - 4);
    std::sort(mu.entries.begin(), mu.entries.end(), std::greater<>());
    auto inv = tropkm::coweight_involution(mu);
    for (std::size_t i = 0; i <= n; ++i) EXPECT_EQ(inv.omega(n - i), mu.omega(i));
  }
}

TEST(Dual, Examples) {
  std::mt19937_64 rng(29);
  auto ctx = big();
  auto x = random_lattice(rng, ctx, 3, -1, 2);
  EXPECT_EQ((tropkm::dual_f_t<Fp>({2, 1}, Conf{tropkm::Group::kPGL, {x, x}}).value), Rational(0));
  for (int k = 0; k < 10; ++k) {
    auto c = random_conf(rng, ctx, 2, 2);
    EXPECT_EQ((tropkm::dual_f_t<Fp>({1, 1}, c, k).value), (tropkm::f_t<Fp>({1, 1}, c, k).value));
  }
  auto c = random_conf(rng, ctx, 3, 2);
  EXPECT_THROW((void)tropkm::dual_f_t<Fp>({1, 1}, c), tropkm::IndexSumMismatch);
}

TEST(Dual, MinimizesDualMetricSum) {
  std::mt19937_64 rng(31);
  auto ctx = big();
  for (int k = 0; k < 20; ++k) {
    auto c = random_conf(rng, ctx, 3, 3);
    tropkm::Indices idx{2, 2, 2};
    auto v = tropkm::dual_f_t(idx, c, k);
    // The dual of the dual witness attains the value on the original side.
    auto p = tropkm::dual(v.certificate.L);
    EXPECT_EQ(tropkm::metric_sum(idx, p, c), v.value);
    for (int s = 0; s < 10; ++s) EXPECT_GE(tropkm::metric_sum(idx, random_lattice(rng, ctx, 3, -2, 3), c), v.value);
  }
}

TEST(Mod1, Examples) {
  auto ctx = big();
  auto o = LFp::standard(ctx, 3);
  EXPECT_EQ(tropkm::mod1_class<Fp>({1, 1, 1}, Conf{tropkm::Group::kSL, {o, o, o}}), Rational(0));
  auto x = LFp::diagonal(ctx, {1, 0, 0});
  EXPECT_EQ(tropkm::mod1_class<Fp>({1, 1, 1}, Conf{tropkm::Group::kPGL, {o, x, o}}), Rational(1, 3));
  std::mt19937_64 rng(37);
  for (int k = 0; k < 20; ++k) {
    auto c = random_conf(rng, ctx, 3, 3);
    EXPECT_NO_THROW((void)tropkm::mod1_class(random_indices(rng, 3, 3), c, k));
  }
}

namespace {

tropkm::SeriesVector<Q> qv(std::initializer_list<const char*> e) {
  std::vector<std::string> s(e.begin(), e.end());
  return vec(s, rationals());
}

}  // namespace

TEST(Positivity, Examples) {
  auto ctx = rationals();
  auto o = tropkm::Lattice<Q>::standard(ctx, 2);
  tropkm::Configuration<Q> c{tropkm::Group::kSL, {o, o}};
  auto good = tropkm::positivity_check(c, {{qv({"1", "0"}), qv({"0", "1"})}, {qv({"1", "1"}), qv({"0", "1"})}});
  EXPECT_TRUE(good.positive) << good.first_violation;
  auto bad = tropkm::positivity_check(c, {{qv({"1", "0"}), qv({"0", "1"})}, {qv({"-1", "-1"}), qv({"0", "1"})}});
  EXPECT_FALSE(bad.positive);
  EXPECT_NE(bad.first_violation.find("leading coefficient"), std::string::npos);
  EXPECT_THROW((void)tropkm::positivity_check(c, {{qv({"t^-1", "0"}), qv({"0", "1"})}, {qv({"1", "1"}), qv({"0", "1"})}}),
               tropkm::DomainError);
}

TEST(Positivity, ThreePointsAndTriangulation) {
  auto ctx = rationals();
  auto o = tropkm::Lattice<Q>::standard(ctx, 2);
  tropkm::Configuration<Q> c{tropkm::Group::kSL, {o, o, o}};
  std::vector<std::vector<tropkm::SeriesVector<Q>>> bases{{qv({"1", "0"}), qv({"0", "1"})},
                                                          {qv({"1", "1"}), qv({"0", "1"})},
                                                          {qv({"1", "2"}), qv({"0", "1"})}};
  EXPECT_TRUE(tropkm::positivity_check(c, bases).positive);
  std::vector<std::array<std::size_t, 3>> tri{{0, 1, 2}};
  EXPECT_TRUE(tropkm::positivity_check(c, bases, tri).positive);
  std::swap(bases[1], bases[2]);
  EXPECT_FALSE(tropkm::positivity_check(c, bases).positive);
  std::vector<std::array<std::size_t, 3>> broken{{0, 0, 2}};
  EXPECT_THROW((void)tropkm::positivity_check(c, bases, broken), tropkm::DomainError);
}

TEST(Positivity, ValuationMismatchIsReported) {
  auto ctx = rationals();
  auto o = tropkm::Lattice<Q>::standard(ctx, 2);
  tropkm::Configuration<Q> c{tropkm::Group::kSL, {o, o}};
  // Same first vector: det(e1, e1 + t e2) has valuation 1 but A = 0.
  auto r = tropkm::positivity_check(c, {{qv({"1", "0"}), qv({"0", "1"})}, {qv({"1", "t"}), qv({"0", "1"})}});
  EXPECT_FALSE(r.positive);
  EXPECT_NE(r.first_violation.find("-val det"), std::string::npos);
}
