#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "fracmix/errors.hpp"
#include "fracmix/kernel.hpp"

using namespace fracmix;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

double reference_constant(double s_in) {
  const big s = s_in;
  const big pi = boost::math::constants::pi<big>();
  const big v = pow(big(2), 2 * s) * s * boost::math::tgamma((1 + 2 * s) / 2) / (sqrt(pi) * boost::math::tgamma(1 - s));
  return static_cast<double>(v);
}

DomainPartition standard(double s) {
  DomainPartition p;
  p.omega = {{-1, 1}};
  p.sigma2 = {{1, 2}};
  p.sigma1 = {{-kInf, -1}, {2, kInf}};
  p.s = s;
  return p;
}

FunctionView bubble(double s) {
  FunctionView v;
  v.value = [s](double x) { return std::pow(std::max(0.0, 1.0 - x * x), s); };
  v.breakpoints = {-1.0, 1.0};
  return v;
}

}  // namespace

TEST(Normalization, HalfIsOneOverPi) { EXPECT_NEAR(normalization_constant(0.5), 1.0 / M_PI, 1e-15); }

TEST(Normalization, MatchesHighPrecisionGamma) {
  for (double s : {0.1, 0.25, 0.4, 0.75, 0.9})
    EXPECT_NEAR(normalization_constant(s), reference_constant(s), 1e-14 * reference_constant(s)) << s;
}

TEST(Normalization, RejectsOutOfRange) {
  EXPECT_THROW(normalization_constant(0.0), InputError);
  EXPECT_THROW(normalization_constant(1.0), InputError);
}

TEST(Kernel, Evaluates) {
  const auto k = KernelParams::make(0.5);
  EXPECT_NEAR(kernel_eval(k, 0.0, 2.0), 1.0 / (4.0 * M_PI), 1e-16);
  EXPECT_NEAR(kernel_eval(k, 2.0, 0.0), kernel_eval(k, 0.0, 2.0), 0.0);
  EXPECT_THROW(kernel_eval(k, 0.3, 0.3), SingularityError);
}

TEST(TailIntegral, ClosedFormAgainstDirectIntegration) {
  const double s = 0.3;
  const Interval I{0.5, 3.0};
  const double direct = integrate([&](double y) { return std::pow(y + 1.0, -1 - 2 * s); }, 0.5, 3.0, 1e-13);
  EXPECT_NEAR(tail_integral(s, -1.0, I), direct, 1e-12);
  EXPECT_NEAR(tail_integral(0.5, 0.0, Interval{1.0, kInf}), 1.0, 1e-15);
  EXPECT_NEAR(tail_integral(0.5, 0.0, Interval{-kInf, -2.0}), 0.5, 1e-15);
  EXPECT_EQ(tail_integral(0.5, 1.0, Interval{1.0, 2.0}), kInf);
  EXPECT_THROW(tail_integral(0.5, 1.5, Interval{1.0, 2.0}), SingularityError);
}

TEST(ReflectNormalizer, MatchesHandValue) {
  const auto p = standard(0.5);
  // int_{-1}^{1} (2-y)^{-2} dy = 1 - 1/3
  EXPECT_NEAR(reflect_normalizer(p, 2.0), 1.5, 1e-14);
  EXPECT_NEAR(reflect_normalizer(p, 1.5), 1.0 / 1.6, 1e-14);
  EXPECT_THROW(reflect_normalizer(p, 0.0), DomainError);
}

TEST(PrincipalValue, ConstantIsHarmonic) {
  const auto k = KernelParams::make(0.4);
  FunctionView one;
  one.value = [](double) { return 1.0; };
  one.breakpoints = {-1.0, 1.0};
  one.exterior_left = one.exterior_right = 1.0;
  EXPECT_NEAR(pv_fractional_laplacian(k, one, 0.2), 0.0, 1e-12);
}

TEST(PrincipalValue, BubbleIsConstant) {
  for (double s : {0.25, 0.5, 0.75}) {
    const auto k = KernelParams::make(s);
    const double expected = std::tgamma(2 * s + 1);
    for (double x : {0.0, 0.3, -0.6, 0.9})
      EXPECT_NEAR(pv_fractional_laplacian(k, bubble(s), x), expected, 1e-8 * expected) << "s=" << s << " x=" << x;
  }
}

TEST(PrincipalValue, Linear) {
  const auto k = KernelParams::make(0.3);
  FunctionView u, v, w;
  u.value = [](double x) { return std::exp(-x * x) - std::exp(-1.0); };
  v.value = [](double x) { return (1 - x * x) * (1 - x * x); };
  w.value = [&](double x) { return 2.0 * u.value(x) - 3.0 * v.value(x); };
  u.breakpoints = v.breakpoints = w.breakpoints = {-1.0, 1.0};
  const double x = 0.37;
  const double lhs = pv_fractional_laplacian(k, w, x);
  const double rhs = 2.0 * pv_fractional_laplacian(k, u, x) - 3.0 * pv_fractional_laplacian(k, v, x);
  EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(rhs));
}

TEST(NeumannDerivative, IndicatorGivesNormalizer) {
  for (double s : {0.25, 0.5, 0.75}) {
    const auto p = standard(s);
    const auto k = KernelParams::make(s);
    FunctionView ind;
    ind.value = [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; };
    ind.breakpoints = {-1.0, 1.0};
    for (double x : {1.2, 1.5, 2.0})
      EXPECT_NEAR(neumann_derivative(k, ind, p, x), -k.a_ns / reflect_normalizer(p, x), 1e-10) << s << " " << x;
  }
}

TEST(NeumannDerivative, RejectsPointsInOmegaClosure) {
  const auto p = standard(0.5);
  FunctionView z;
  z.value = [](double) { return 0.0; };
  z.breakpoints = {-1.0, 1.0};
  EXPECT_THROW(neumann_derivative(KernelParams::make(0.5), z, p, 0.5), DomainError);
  EXPECT_THROW(neumann_derivative(KernelParams::make(0.5), z, p, 1.0), DomainError);
}
