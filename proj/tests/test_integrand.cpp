#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "slidekit/integrand.hpp"
#include "slidekit/sampling.hpp"

using namespace slidekit;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

ParamMap params_for(const std::string& name, int n) {
  ParamMap p{{"n", static_cast<double>(n)}};
  if (name == "allen_cahn") {
    p["well_lo"] = -0.5;
    p["well_hi"] = 1.5;
    p["well_scale"] = 2.0;
  }
  if (name == "weighted_dirichlet") p["s"] = 0.3;
  if (name == "two_phase_smoothed") p["width"] = 0.7;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("catalog examples") {
  const Integrand ac = catalog("allen_cahn", {{"n", 2}});
  const Mat H = ac.Fpp(vec({0.3, -2.0}), 0.4, vec({1.0, 1.0}));
  CHECK(H.isApprox(Mat::Identity(2, 2)));

  const Integrand wd = catalog("weighted_dirichlet", {{"n", 2}, {"s", 0.5}});
  CHECK(wd.singular_weight);
  CHECK(wd.F(vec({1.0, 0.0}), 0.0, vec({4.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(wd.F(vec({1.0, 0.0}), 0.0, vec({0.0, 0.0})), Error);

  const Integrand ex = catalog("oned_example");
  CHECK(ex.F(vec({1.0}), 1.0, vec({0.0})) == 0.0);
  const Integrand ex2 = catalog("oned_example2");
  CHECK(ex2.F(vec({1.0}), -3.0, vec({0.0})) == 1.0);
  CHECK(ex2.F(vec({1.0}), 0.5, vec({0.0})) == 0.75);
  const Integrand ab = catalog("abs_example");
  CHECK(ab.F(vec({-3.0}), 7.0, vec({0.0})) == 9.0);
  const Integrand di = catalog("dirichlet", {{"n", 3}});
  CHECK(di.F(vec({1.0, 2.0, 2.0}), 0.0, vec({0.0, 0.0, 0.0})) == 4.5);
}

TEST_CASE("catalog errors") {
  CHECK_THROWS_AS(catalog("nonesuch"), Error);
  CHECK_THROWS_AS(catalog("weighted_dirichlet", {{"s", 1.0}}), Error);
  CHECK_THROWS_AS(catalog("weighted_dirichlet", {{"s", 0.0}}), Error);
  CHECK_THROWS_AS(catalog("two_phase_smoothed", {{"width", 0.0}}), Error);
  CHECK_THROWS_AS(catalog("dirichlet", {{"n", 4}}), Error);
  CHECK(catalog_names().size() == 7);
}

TEST_CASE("analytic derivatives match finite differences") {
  const double e = 1e-5;
  for (const auto& name : catalog_names()) {
    for (int n = 1; n <= 3; ++n) {
      const Integrand f = catalog(name, params_for(name, n));
      sampling::Stream rng(17, static_cast<std::uint64_t>(n));
      double worst_p = 0.0, worst_pp = 0.0, worst_z = 0.0, worst_sym = 0.0;
      for (int k = 0; k < 1000; ++k) {
        Vec p(n), x(n);
        for (int a = 0; a < n; ++a) {
          p[a] = rng.uniform(-2.0, 2.0);
          x[a] = rng.uniform(0.1, 3.0);
        }
        double z = rng.uniform(-2.0, 2.0);
        if (name == "oned_example2" && std::abs(z) < 1e-3) z += 0.01;  // kink of max{z,0}^2
        if (!f.smooth(p, z, x)) continue;
        const Vec Fp = f.Fp(p, z, x);
        const Mat H = f.Fpp(p, z, x);
        for (int a = 0; a < n; ++a) {
          Vec dp = Vec::Zero(n);
          dp[a] = e;
          worst_p = std::max(worst_p, rel((f.F(p + dp, z, x) - f.F(p - dp, z, x)) / (2 * e), Fp[a]));
          const Vec col = (f.Fp(p + dp, z, x) - f.Fp(p - dp, z, x)) / (2 * e);
          for (int b = 0; b < n; ++b) worst_pp = std::max(worst_pp, rel(col[b], H(b, a)));
          worst_p = std::max(worst_p, rel((f.Fz(p + dp, z, x) - f.Fz(p - dp, z, x)) / (2 * e), f.Fpz(p, z, x)[a]));
        }
        worst_z = std::max(worst_z, rel((f.F(p, z + e, x) - f.F(p, z - e, x)) / (2 * e), f.Fz(p, z, x)));
        worst_z = std::max(worst_z, rel((f.Fz(p, z + e, x) - f.Fz(p, z - e, x)) / (2 * e), f.Fzz(p, z, x)));
        worst_sym = std::max(worst_sym, (H - H.transpose()).cwiseAbs().maxCoeff());
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(H)).eigenvalues().minCoeff() >= -1e-12);
      }
      INFO(name << " n=" << n);
      CHECK(worst_p <= 1e-6);
      CHECK(worst_pp <= 1e-6);
      CHECK(worst_z <= 1e-6);
      CHECK(worst_sym <= 1e-12);
    }
  }
}

TEST_CASE("missing derivatives are filled by finite differences") {
  Integrand quartic;
  quartic.name = "quartic";
  quartic.dim = 2;
  quartic.value = [](const Vec& p, double z, const Vec&) { return p.squaredNorm() * p.squaredNorm() + z * z * z; };
  const Integrand f = complete_derivatives(quartic);
  const Vec p = vec({0.4, 1.0}), x = vec({0.0, 0.0});
  CHECK(f.Fp(p, 0.5, x)[1] == doctest::Approx(4.0 * 1.16 * 1.0).epsilon(1e-8));
  CHECK(f.Fz(p, 0.5, x) == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(f.Fzz(p, 0.5, x) == doctest::Approx(3.0).epsilon(1e-5));
  // F_pp = 4|p|^2 I + 8 p p^T
  CHECK(f.Fpp(p, 0.5, x)(0, 1) == doctest::Approx(8.0 * 0.4).epsilon(1e-5));
}

TEST_CASE("check_h2 constants") {
  std::vector<H2Sample> samples;
  sampling::Stream rng(5, 0);
  for (int k = 0; k < 100; ++k) {
    H2Sample s;
    s.p = vec({rng.uniform(-1, 1), rng.uniform(0.5, 2.0)});
    s.q = vec({0.2 * s.p[1] * rng.uniform(-1, 1), 0.2 * s.p[1] * rng.uniform(-1, 1)});
    s.z = rng.uniform(-1, 1);
    s.x = vec({rng.uniform(0.5, 2.0), 0.0});
    samples.push_back(s);
  }
  CHECK(std::abs(check_h2(catalog("dirichlet", {{"n", 2}}), samples).worst_ratio - 1.0) <= 1e-12);
  CHECK(std::abs(check_h2(catalog("allen_cahn", {{"n", 2}}), samples).worst_ratio - 1.0) <= 1e-12);
  CHECK(std::abs(check_h2(catalog("weighted_dirichlet", {{"n", 2}}), samples).worst_ratio - 1.0) <= 1e-12);

  // |p|^4: F_pp(p) = 4|p|^2 I + 8 p p^T. At p = (0,1): diag(4, 12); at p+q = (0,3/2): diag(9, 27).
  Integrand quartic;
  quartic.dim = 2;
  quartic.value = [](const Vec& p, double, const Vec&) { return p.squaredNorm() * p.squaredNorm(); };
  quartic.hess_pp = [](const Vec& p, double, const Vec&) -> Mat {
    return 4.0 * p.squaredNorm() * Mat::Identity(2, 2) + 8.0 * p * p.transpose();
  };
  const Integrand f = complete_derivatives(quartic);
  H2Sample s{vec({0.0, 1.0}), vec({0.0, 0.5}), 0.0, vec({0.0, 0.0})};
  CHECK(check_h2(f, {s}).worst_ratio == doctest::Approx(27.0 / 12.0).epsilon(1e-14));
  CHECK(check_h2(f, {s}, MatrixNorm::frobenius).worst_ratio ==
        doctest::Approx(std::sqrt(81.0 + 729.0) / std::sqrt(16.0 + 144.0)).epsilon(1e-14));

  H2Sample bad{vec({0.0, 1.0}), vec({0.0, 0.6}), 0.0, vec({0.0, 0.0})};
  CHECK_THROWS_AS(check_h2(f, {bad}), Error);
  H2Sample outside{vec({0.0, 1.0}), vec({0.0, 0.1}), 0.0, vec({-1.0, 0.0})};
  CHECK_THROWS_AS(check_h2(catalog("weighted_dirichlet", {{"n", 2}}), {outside}), Error);
}

TEST_CASE("boundary integrand derivative") {
  BoundaryIntegrand g;
  g.value = [](double z, const Vec& x) { return std::sin(z) * (1.0 + x[0]); };
  const BoundaryIntegrand c = complete_derivatives(g);
  const Vec x = vec({0.5});
  CHECK(c.d_z(0.3, x) == doctest::Approx(std::cos(0.3) * 1.5).epsilon(1e-9));
}
