#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "tropkm/io.hpp"

using namespace testing_support;

TEST(Io, LatticeRoundTrip) {
  std::mt19937_64 rng(1);
  auto ctx = small(7);
  for (int k = 0; k < 10; ++k) {
    auto l = random_lattice(rng, ctx, 3, -2, 3);
    auto text = tropkm::format_lattice(l);
    EXPECT_EQ(tropkm::parse_lattice(text, ctx), l);
    EXPECT_EQ(tropkm::format_lattice(tropkm::parse_lattice(text, ctx)), text);
  }
  auto q = rationals();
  auto l = tropkm::parse_lattice("# comment\nn=2 field=Q\n1/2*t^-1 0\n3 t\n", q);
  EXPECT_EQ(l.det_val(), 0);
}

TEST(Io, ParseErrorsCarryLineNumbers) {
  auto ctx = small(5);
  try {
    (void)tropkm::parse_lattice("n=2 field=Fp:5\n1 0\n0\n", ctx);
    FAIL();
  } catch (const tropkm::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW((void)tropkm::parse_lattice("n=2 field=Fp:7\n1 0\n0 1\n", ctx), tropkm::ParseError);
  EXPECT_THROW((void)tropkm::parse_lattice("n=2\n1 0\n0 1\n", ctx), tropkm::ParseError);
  EXPECT_THROW((void)tropkm::parse_lattice("n=2 field=Fp:5\n1 1\n1 1\n", ctx), tropkm::ParseError);
  EXPECT_THROW((void)tropkm::parse_lattice("n=2 field=Fp:5\n1 x\n0 1\n", ctx), tropkm::ParseError);
  EXPECT_EQ(tropkm::peek_field("group=PGL\nn=1 field=Q\n1\n"), tropkm::FieldConfig::rationals());
}

TEST(Io, Configuration) {
  auto ctx = small(5);
  auto conf = tropkm::parse_configuration("group=SL\nn=2 field=Fp:5\n1 0\n0 1\n\nn=2 field=Fp:5\nt^-1 0\n0 t\n", ctx);
  EXPECT_EQ(conf.group, tropkm::Group::kSL);
  ASSERT_EQ(conf.points.size(), 2u);
  EXPECT_EQ(conf.points[1], LFp::diagonal(ctx, {-1, 1}));
  EXPECT_THROW((void)tropkm::parse_configuration("group=SL\nn=2 field=Fp:5\nt 0\n0 1\n", ctx), tropkm::DomainError);
  EXPECT_THROW((void)tropkm::parse_configuration("group=PGL\nn=2 field=Fp:5\n1 0\n0 1\n\nn=1 field=Fp:5\n1\n", ctx),
               tropkm::DimensionMismatch);
  EXPECT_THROW((void)tropkm::parse_configuration("group=GL\nn=1 field=Fp:5\n1\n", ctx), tropkm::ParseError);
}

TEST(Io, CostCsvAndTriangulation) {
  EXPECT_EQ(tropkm::parse_cost_csv("0,2\n3, 4\n"), (tropkm::CostMatrix{{0, 2}, {3, 4}}));
  EXPECT_EQ(tropkm::parse_cost_csv("-1\n"), (tropkm::CostMatrix{{-1}}));
  EXPECT_THROW((void)tropkm::parse_cost_csv("0,2\n3\n"), tropkm::ParseError);
  EXPECT_THROW((void)tropkm::parse_cost_csv("0,2,1\n3,4,5\n"), tropkm::ParseError);
  EXPECT_THROW((void)tropkm::parse_cost_csv("0,a\n3,4\n"), tropkm::ParseError);
  auto tri = tropkm::parse_triangulation("0 1 2\n# x\n0 2 3\n");
  ASSERT_EQ(tri.size(), 2u);
  EXPECT_EQ(tri[1][2], 3u);
  EXPECT_THROW((void)tropkm::parse_triangulation("0 1\n"), tropkm::ParseError);
}

TEST(Io, CertificateRoundTrip) {
  std::mt19937_64 rng(2);
  for (std::uint64_t p : {std::uint64_t{5}, tropkm::PrimeField::kDefaultPrime}) {
    auto ctx = tropkm::Context<Fp>{Fp(p), 64};
    for (int k = 0; k < 5; ++k) {
      std::vector<LFp> inputs;
      for (int i = 0; i < 3; ++i) inputs.push_back(random_lattice(rng, ctx, 3, -2, 3));
      auto cert = tropkm::witness(inputs, std::nullopt, static_cast<std::uint64_t>(k));
      auto j = tropkm::certificate_json(cert, inputs);
      auto text = j.dump(2);
      auto back = tropkm::certificate_from_json(nlohmann::json::parse(text), ctx);
      EXPECT_NO_THROW(tropkm::verify_certificate(back.certificate, back.inputs));
      EXPECT_EQ(tropkm::certificate_json(back.certificate, back.inputs).dump(2), text);
    }
  }
}

TEST(Io, TamperedCertificateFails) {
  auto ctx = small(5);
  std::vector<LFp> inputs{LFp::diagonal(ctx, {0, 2}), LFp::diagonal(ctx, {3, 4})};
  auto j = tropkm::certificate_json(tropkm::witness(inputs), inputs);
  j["A"] = j["A"].get<std::int64_t>() + 1;
  auto back = tropkm::certificate_from_json(j, ctx);
  EXPECT_THROW(tropkm::verify_certificate(back.certificate, back.inputs), tropkm::VerificationFailed);
  j.erase("trace");
  EXPECT_THROW((void)tropkm::certificate_from_json(j, ctx), tropkm::ParseError);
}
