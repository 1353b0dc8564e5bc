#include <gtest/gtest.h>

#include <cmath>

#include "caustic/expr.hpp"

using caustic::ErrorKind;
using caustic::ParamPoint;

namespace {

caustic::Error error_of(std::string_view text) {
  try {
    (void)caustic::parse_surface(text);
  } catch (const caustic::Error& e) {
    return e;
  }
  ADD_FAILURE() << "parsed: " << text;
  return caustic::Error(ErrorKind::Io, "none");
}

double at(const char* text, ParamPoint p) {
  return caustic::eval_scalar(caustic::parse_expression(text), p);
}

}  // namespace

TEST(Expr, PrecedenceAndAssociativity) {
  const ParamPoint p{2.0, 3.0};
  EXPECT_DOUBLE_EQ(at("1 + 2*u^2", p), 9.0);
  EXPECT_DOUBLE_EQ(at("-u^2", p), -4.0);
  EXPECT_DOUBLE_EQ(at("u - v - 1", p), -2.0);
  EXPECT_DOUBLE_EQ(at("u/v/2", p), 2.0 / 3.0 / 2.0);
  EXPECT_DOUBLE_EQ(at("u^2^1", p), 4.0);
  EXPECT_DOUBLE_EQ(at("2*(u + v)", p), 10.0);
}

TEST(Expr, FunctionsAndConstants) {
  const ParamPoint p{0.5, 0.25};
  EXPECT_DOUBLE_EQ(at("sin(u)*cos(v)", p), std::sin(0.5) * std::cos(0.25));
  EXPECT_DOUBLE_EQ(at("exp(u) + log(v) + sqrt(v)", p), std::exp(0.5) + std::log(0.25) + 0.5);
  EXPECT_DOUBLE_EQ(at("1.5e-1*u", p), 0.075);
}

TEST(Expr, PrintParseRoundTrip) {
  for (const char* text : {"(u, v, u^2/2 + u^4 + u^3*v)", "(sin(u)*cos(v), -(u - v)^3, exp(-u)/(1 + v^2))",
                           "(0.1 + u, v - (u - v), 1/3*u)"}) {
    const caustic::SurfaceExpr s = caustic::parse_surface(text);
    const std::string printed = caustic::to_string(s);
    EXPECT_TRUE(caustic::structurally_equal(s, caustic::parse_surface(printed))) << printed;
  }
}

TEST(Expr, ConstantsPrintWithFullPrecision) {
  const auto s = caustic::parse_surface("(u, v, 0.1*u)");
  EXPECT_NE(caustic::to_string(s).find("0.10000000000000001"), std::string::npos);
}

TEST(Expr, SyntaxErrorsCarryPositions) {
  const caustic::Error e = error_of("(u, v, u^2/2 + )");
  EXPECT_EQ(e.kind(), ErrorKind::Syntax);
  ASSERT_TRUE(e.position().has_value());
  EXPECT_EQ(*e.position(), 15u);
  EXPECT_EQ(error_of("(u, v, u^v)").kind(), ErrorKind::Syntax);
  EXPECT_EQ(error_of("(u, v, (u + 1)").kind(), ErrorKind::Syntax);
}

TEST(Expr, ArityAndNames) {
  EXPECT_EQ(error_of("(u, v)").kind(), ErrorKind::Arity);
  EXPECT_EQ(error_of("(u, v, u, v)").kind(), ErrorKind::Arity);
  EXPECT_EQ(error_of("(u, v, tan(u))").kind(), ErrorKind::UnknownFunction);
  EXPECT_EQ(error_of("(u, v, x)").kind(), ErrorKind::UnknownIdentifier);
}

TEST(Expr, DomainErrorsNameTheSubtree) {
  try {
    (void)at("1 + log(u - 1)", {0.5, 0.0});
    FAIL();
  } catch (const caustic::Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
    EXPECT_NE(std::string(e.what()).find("log(u - 1)"), std::string::npos) << e.what();
  }
  EXPECT_THROW((void)at("1/(u - v)", {1.0, 1.0}), caustic::Error);
}

TEST(Expr, LiftRejectsNonFiniteJets) {
  const auto s = caustic::parse_surface("(u, v, sqrt(u))");
  EXPECT_THROW((void)caustic::lift_surface(s, {0.0, 0.0}, 3), caustic::Error);
  EXPECT_NO_THROW((void)caustic::lift_surface(s, {1.0, 0.0}, 3));
}
