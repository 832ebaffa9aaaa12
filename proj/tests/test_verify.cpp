#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <lieflow/verify.hpp>

using namespace lieflow;

namespace {

template <class T>
CoefficientSet<T> unit_coeffs(const SiteLattice& lat, int max_grade = 1) {
  CoefficientSet<T> cf;
  cf.max_grade = max_grade;
  for (int k = 1; k <= max_grade; ++k)
    for (int i = 0; i + k < lat.size(); ++i) {
      int r = lat.site(i).R + 1, c = lat.site(i + k).R + 1;
      PolyMat<T> pb(r, c), pl(c, r);
      for (int d = 0; d < std::min(r, c); ++d) {
        pb.at(d, d) = Poly<T>::constant(T(1));
        pl.at(d, d) = Poly<T>::constant(T(1));
      }
      cf.pbar[{k, i}] = pb;
      cf.p[{k, i}] = pl;
    }
  return cf;
}

template <class T>
CoefficientSet<T> zero_coeffs(const SiteLattice& lat) {
  CoefficientSet<T> cf;
  cf.max_grade = 1;
  for (int i = 0; i + 1 < lat.size(); ++i) {
    cf.pbar[{1, i}] = PolyMat<T>(lat.site(i).R + 1, lat.site(i + 1).R + 1);
    cf.p[{1, i}] = PolyMat<T>(lat.site(i + 1).R + 1, lat.site(i).R + 1);
  }
  return cf;
}

std::vector<double> axis(double extent, double h) {
  std::vector<double> ts;
  int n = static_cast<int>(std::lround(extent / h));
  for (int i = 0; i <= n; ++i) ts.push_back(i * h);
  return ts;
}

double worst(const std::map<std::string, double>& m) {
  double out = 0;
  for (const auto& [name, v] : m) out = std::max(out, v);
  return out;
}

}  // namespace

TEST_CASE("least-squares order recovers exact power laws") {
  ConvergenceReport two{{1e-2, 5e-3, 2.5e-3}, {4e-4, 1e-4, 2.5e-5}};
  CHECK(two.order() == doctest::Approx(2.0).epsilon(1e-9));
  ConvergenceReport one{{8e-3, 4e-3, 2e-3}, {8e-3, 4e-3, 2e-3}};
  CHECK(one.order() == doctest::Approx(1.0).epsilon(1e-9));
  ConvergenceReport single{{1e-2}, {1.0}};
  CHECK(single.order() == 0.0);

  ConvergenceReport floored{{1e-2, 5e-3}, {3e-13, 8e-14}};
  CHECK(floored.at_floor());
  ConvergenceReport live{{1e-2, 5e-3}, {3e-13, 1e-11}};
  CHECK(!live.at_floor());
  ConvergenceReport empty;
  CHECK(!empty.at_floor());
}

TEST_CASE("scans insist on an interior") {
  auto alg = get_algebra(3);
  SiteLattice lat = build_site_lattice(3, parse_grading("0,1,0", 3));
  auto cf = zero_coeffs<double>(lat);
  FieldExtractor<double> ex(alg, lat);
  auto tiny = picard_flows<double>(alg, lat, cf, 0.0, 0.0).sample({0.0, 0.1}, {0.0, 0.1});
  CHECK_THROWS_AS(residual_scan(tiny, ex, cf), ConfigError);
  CHECK_THROWS_AS(reduced_residual_scan(tiny, ex), ConfigError);
  CHECK_THROWS_AS(goursat_march(tiny, ex, cf), ConfigError);
}

TEST_CASE("constant fields have vanishing residuals and deviations") {
  auto alg = get_algebra(3);
  SiteLattice lat = build_site_lattice(3, parse_grading("0,1,0", 3));
  auto cf = zero_coeffs<double>(lat);
  FieldExtractor<double> ex(alg, lat);
  std::vector<double> ts = axis(0.4, 0.1);
  auto sol = picard_flows<double>(alg, lat, cf, 0.0, 0.0).sample(ts, ts);

  auto res = residual_scan(sol, ex, cf);
  CHECK(res.count("lattice-site0") == 1);
  CHECK(res.count("lattice-site1") == 1);
  CHECK(res.count("corr-raising-i0") == 1);
  CHECK(res.count("corr-lowering-i0") == 1);
  CHECK(res.count("raising-flow-r1-i0") == 0);  // no grades below the top
  for (const auto& [name, v] : res) {
    CAPTURE(name);
    CHECK(v == 0.0);
  }
  // The reduced scan presumes unit coefficients; frozen fields leave its
  // one-sided neighbor terms fully unbalanced, a defect of exactly one.
  CHECK(worst(reduced_residual_scan(sol, ex)) == 1.0);
  CHECK(goursat_march(sol, ex, cf).max_deviation == 0.0);
}

TEST_CASE("residuals of integrated flows shrink at second order") {
  auto alg = get_algebra(3);
  SiteLattice lat = build_site_lattice(3, parse_grading("0,1,0", 3));
  auto cf = unit_coeffs<double>(lat);
  FieldExtractor<double> ex(alg, lat);
  auto poly = picard_flows<double>(alg, lat, cf, 0.0, 0.0);
  ConvergenceReport conv;
  for (double h : {2e-2, 1e-2}) {
    std::vector<double> ts = axis(1.0, h);
    auto res = residual_scan(poly.sample(ts, ts), ex, cf);
    conv.hs.push_back(h);
    conv.values.push_back(worst(res));
  }
  CHECK(conv.order() > 1.7);
  CHECK(conv.order() < 2.3);
}

TEST_CASE("unit coefficients collapse the dressed equation to the plain chain") {
  auto alg = get_algebra(3);
  SiteLattice lat = build_site_lattice(3, parse_grading("0,1,0", 3));
  auto cf = unit_coeffs<double>(lat);
  FieldExtractor<double> ex(alg, lat);
  std::vector<double> ts = axis(0.5, 2.5e-2);
  auto sol = picard_flows<double>(alg, lat, cf, 0.0, 0.0).sample(ts, ts);
  auto full = residual_scan(sol, ex, cf);
  auto reduced = reduced_residual_scan(sol, ex);
  for (int s = 0; s < lat.size(); ++s) {
    double a = full.at("lattice-site" + std::to_string(s));
    double b = reduced.at("reduced-chain-site" + std::to_string(s));
    CHECK(a == b);
  }
}

TEST_CASE("boundary re-integration reproduces the interior fields") {
  auto alg = get_algebra(3);
  SiteLattice lat = build_site_lattice(3, parse_grading("0,1,0", 3));
  auto cf = unit_coeffs<double>(lat);
  FieldExtractor<double> ex(alg, lat);
  std::vector<double> ts = axis(1.0, 1e-2);
  auto sol = picard_flows<double>(alg, lat, cf, 0.0, 0.0).sample(ts, ts);
  GoursatResult g = goursat_march(sol, ex, cf);
  CHECK(g.max_deviation > 0.0);
  CHECK(g.max_deviation < 1e-6);
  CHECK(g.per_site.size() == 2);
  for (const auto& [name, v] : g.per_site) CHECK(v <= g.max_deviation);
}
