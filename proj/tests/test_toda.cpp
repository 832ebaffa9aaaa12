#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <lieflow/toda.hpp>

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

double rel_gap(const Mat<double>& a, const Mat<double>& b) {
  return abs_max<double>(a - b) / std::max({abs_max(a), abs_max(b), 1.0});
}

}  // namespace

TEST_CASE("antidiagonal conjugator alternates along the antidiagonal") {
  CHECK(antidiagonal_conjugator(0) == MatQ::Identity(1, 1));
  MatQ t1(2, 2);
  t1 << 0, 1, -1, 0;
  CHECK(antidiagonal_conjugator(1) == t1);
  MatQ t2 = antidiagonal_conjugator(2);
  CHECK(t2(0, 2) == 1);
  CHECK(t2(1, 1) == -1);
  CHECK(t2(2, 0) == 1);
  CHECK(t2(0, 0) == 0);
}

TEST_CASE("calibration samples are reproducible and regular") {
  auto alg = get_algebra(3);
  KPoint<Rational> a = calibration_point(alg, 7);
  KPoint<Rational> b = calibration_point(alg, 7);
  for (int j = 0; j <= 4; ++j) {
    CHECK(a.rep(j) == b.rep(j));
    CHECK(a.highest(j) != 0);
  }
  KPoint<Rational> c = calibration_point(alg, 8);
  CHECK(a.rep(1) != c.rep(1));
}

TEST_CASE("chain bases and fields reduce to the identity at the identity element") {
  auto alg = get_algebra(4);
  SiteLattice lat = build_site_lattice(4, parse_grading("0,1,0,1", 4));
  FieldExtractor<Rational> ex(alg, lat);
  KPoint<Rational> id = KPoint<Rational>::identity(alg);
  for (int s = 0; s < ex.sites(); ++s) {
    int n = lat.site(s).R + 1;
    CHECK(static_cast<int>(ex.start_basis(s).size()) == n);
    CHECK(static_cast<int>(ex.end_basis(s).size()) == n);
    CHECK(ex.u_start(id, s) == MatQ::Identity(n, n));
    CHECK(ex.u_end(id, s) == MatQ::Identity(n, n));
    CHECK(ex.y_field(id, s) == MatQ::Identity(n, n));
    CHECK(ex.z_field(id, s) == MatQ::Identity(n, n));
  }
  // Correction blocks: identity on the diagonal, zero across distinct sites.
  for (int i = 0; i < ex.sites(); ++i)
    for (int j = 0; j <= i; ++j) {
      int r = lat.site(i).R + 1, c = lat.site(j).R + 1;
      MatQ ab = ex.abar_corr(id, i, j);
      MatQ bb = ex.bbar_corr(id, i, j);
      MatQ al = ex.a_corr(id, j, i);
      MatQ bl = ex.b_corr(id, j, i);
      if (j == i) {
        CHECK(ab == MatQ::Identity(r, c));
        CHECK(al == MatQ::Identity(c, r));
      } else {
        CHECK(ab == MatQ::Zero(r, c));
        CHECK(bb == MatQ::Zero(r, c));
        CHECK(al == MatQ::Zero(c, r));
        CHECK(bl == MatQ::Zero(c, r));
      }
    }
}

TEST_CASE("block gram determinants factor into principal elements") {
  for (auto [rank, grading] : {std::pair<int, const char*>{3, "0,1,0"}, {4, "0,1,0,1"}}) {
    auto alg = get_algebra(rank);
    SiteLattice lat = build_site_lattice(rank, parse_grading(grading, rank));
    FieldExtractor<Rational> ex(alg, lat);
    for (unsigned long salt : {11ul, 12ul}) {
      KPoint<Rational> k = calibration_point(alg, salt);
      for (int s = 0; s < ex.sites(); ++s) {
        const RedBlock& blk = lat.site(s);
        int b = blk.black_after();
        CHECK(determinant<Rational>(ex.u_start(k, s)) ==
              pow_int(k.highest(blk.m - 1), blk.R) * k.highest(b));
        CHECK(determinant<Rational>(ex.u_end(k, s)) ==
              pow_int(k.highest(b), blk.R) * k.highest(blk.m - 1));
      }
    }
  }
}

TEST_CASE("mirror block fields are sign-conjugated inverse transposes") {
  for (auto [rank, grading] : {std::pair<int, const char*>{3, "0,1,0"}, {4, "0,1,0,1"}}) {
    auto alg = get_algebra(rank);
    SiteLattice lat = build_site_lattice(rank, parse_grading(grading, rank));
    FieldExtractor<Rational> ex(alg, lat);
    KPoint<Rational> k = calibration_point(alg, 21);
    for (int s = 0; s < ex.sites(); ++s) {
      CHECK(determinant<Rational>(ex.y_field(k, s)) * determinant<Rational>(ex.z_field(k, s)) ==
            1);
      CHECK(inverse_transpose_check<Rational>(ex, k, s).exact());
    }
  }
}

TEST_CASE("dressing folds higher-grade blocks through the corrections") {
  auto alg = get_algebra(4);
  SiteLattice lat = build_site_lattice(4, parse_grading("0,1,0,1", 4));
  FieldExtractor<Rational> ex(alg, lat);
  KPoint<Rational> k = calibration_point(alg, 5);
  // Distinct entries so misplaced indices cannot cancel.
  std::map<std::pair<int, int>, MatQ> pb, pl;
  pb[{1, 0}] = (MatQ(2, 2) << rat(1, 2), rat(-1, 3), rat(2, 5), rat(1)).finished();
  pb[{1, 1}] = (MatQ(2, 1) << rat(3, 4), rat(-2, 7)).finished();
  pb[{2, 0}] = (MatQ(2, 1) << rat(1, 5), rat(4, 3)).finished();
  pl[{1, 0}] = (MatQ(2, 2) << rat(1), rat(1, 6), rat(-3, 5), rat(2)).finished();
  pl[{1, 1}] = (MatQ(1, 2) << rat(-1, 2), rat(5, 6)).finished();
  pl[{2, 0}] = (MatQ(1, 2) << rat(2, 9), rat(-1, 4)).finished();
  std::map<std::pair<int, int>, MatQ> pibar, pi;
  dress_coefficients<Rational>(ex, k, pb, pl, 2, pibar, pi);

  CHECK(pibar.at({1, 0}) == pb.at({1, 0}) + pb.at({2, 0}) * ex.bbar_corr(k, 2, 1));
  CHECK(pibar.at({1, 1}) == pb.at({1, 1}) - ex.abar_corr(k, 1, 0) * pb.at({2, 0}));
  CHECK(pibar.at({2, 0}) == pb.at({2, 0}));
  CHECK(pi.at({1, 0}) == pl.at({1, 0}) + ex.b_corr(k, 1, 2) * pl.at({2, 0}));
  CHECK(pi.at({1, 1}) == pl.at({1, 1}) - pl.at({2, 0}) * ex.a_corr(k, 0, 1));
  CHECK(pi.at({2, 0}) == pl.at({2, 0}));
}

TEST_CASE("lattice equation right sides assemble the documented sums") {
  auto alg = get_algebra(4);
  SiteLattice lat = build_site_lattice(4, parse_grading("0,1,0,1", 4));
  FieldExtractor<Rational> ex(alg, lat);
  KPoint<Rational> k = calibration_point(alg, 6);
  CoefficientSet<Rational> cf = unit_coeffs<Rational>(lat, 2);
  cf.pbar[{1, 0}].at(0, 1) = Poly<Rational>(std::vector<Rational>{rat(1, 3), rat(1, 2)});
  cf.p[{2, 0}].at(0, 1) = Poly<Rational>(std::vector<Rational>{rat(-2, 5)});
  PointFields<Rational> f = point_fields<Rational>(ex, k, cf, rat(2, 3), rat(-1, 5));

  auto yi = [&](int s) { return inverse<Rational>(f.y[s]); };
  MatQ r0 = yi(0) * f.pibar.at({1, 0}) * f.y[1] * f.pi.at({1, 0}) +
            yi(0) * f.pibar.at({2, 0}) * f.y[2] * f.pi.at({2, 0});
  MatQ r1 = yi(1) * f.pibar.at({1, 1}) * f.y[2] * f.pi.at({1, 1}) -
            f.pi.at({1, 0}) * yi(0) * f.pibar.at({1, 0}) * f.y[1];
  MatQ r2 = MatQ::Zero(1, 1) - f.pi.at({1, 1}) * yi(1) * f.pibar.at({1, 1}) * f.y[2] -
            f.pi.at({2, 0}) * yi(0) * f.pibar.at({2, 0}) * f.y[2];
  CHECK(toda_rhs<Rational>(f, 2, 0) == r0);
  CHECK(toda_rhs<Rational>(f, 2, 1) == r1);
  CHECK(toda_rhs<Rational>(f, 2, 2) == r2);

  CHECK(pibar_x_rhs<Rational>(f, 2, 1, 0) ==
        f.pibar.at({2, 0}) * f.y[2] * f.pi.at({1, 1}) * yi(1));
  CHECK(pibar_x_rhs<Rational>(f, 2, 1, 1) ==
        MatQ::Zero(2, 1) - f.y[1] * f.pi.at({1, 0}) * yi(0) * f.pibar.at({2, 0}));
  CHECK(pibar_x_rhs<Rational>(f, 2, 2, 0) == MatQ::Zero(2, 1));
  CHECK(pi_y_rhs<Rational>(f, 2, 1, 0) ==
        yi(1) * f.pibar.at({1, 1}) * f.y[2] * f.pi.at({2, 0}));
  CHECK(pi_y_rhs<Rational>(f, 2, 1, 1) ==
        MatQ::Zero(1, 2) - f.pi.at({2, 0}) * yi(0) * f.pibar.at({1, 0}) * f.y[1]);
  CHECK(pi_y_rhs<Rational>(f, 2, 2, 0) == MatQ::Zero(1, 2));
}

TEST_CASE("extracted fields solve the lattice equations along the flows") {
  // Flows with M = 1: second-order equation for y plus the correction flows,
  // finite differences at second order against the assembled right sides.
  auto alg = get_algebra(3);
  SiteLattice lat = build_site_lattice(3, parse_grading("0,1,0", 3));
  CoefficientSet<double> cf = unit_coeffs<double>(lat);
  auto poly = picard_flows<double>(alg, lat, cf, 0.0, 0.0);
  FieldExtractor<double> ex(alg, lat);
  const double x0 = 0.3, y0 = 0.2, h = 5e-3;
  auto yf = [&](int site, double x, double y) { return ex.y_field(poly.k_at(x, y), site); };
  PointFields<double> f = point_fields<double>(ex, poly.k_at(x0, y0), cf, x0, y0);
  for (int site = 0; site < lat.size(); ++site) {
    auto g = [&](double x, double y) {
      Mat<double> dydx = (yf(site, x + h, y) - yf(site, x - h, y)) / (2 * h);
      return Mat<double>(inverse<double>(yf(site, x, y)) * dydx);
    };
    Mat<double> lhs = (g(x0, y0 + h) - g(x0, y0 - h)) / (2 * h);
    CHECK(rel_gap(lhs, toda_rhs<double>(f, cf.max_grade, site)) < 1e-4);
  }
  auto ab = [&](double x, double y) { return ex.abar_corr(poly.k_at(x, y), 1, 0); };
  auto al = [&](double x, double y) { return ex.a_corr(poly.k_at(x, y), 0, 1); };
  Mat<double> dab = (ab(x0 + h, y0) - ab(x0 - h, y0)) / (2 * h);
  Mat<double> dal = (al(x0, y0 + h) - al(x0, y0 - h)) / (2 * h);
  CHECK(rel_gap(dab, abar_x_rhs<double>(f, 0)) < 1e-4);
  CHECK(rel_gap(dal, alow_y_rhs<double>(f, 0)) < 1e-4);
}

TEST_CASE("dressed coefficients flow as the grade-resolved equations state") {
  auto alg = get_algebra(4);
  SiteLattice lat = build_site_lattice(4, parse_grading("0,1,0,1", 4));
  CoefficientSet<double> cf = unit_coeffs<double>(lat, 2);
  cf.pbar[{1, 0}].at(0, 1) = Poly<double>(std::vector<double>{0.3, 0.2});
  cf.p[{2, 0}].at(0, 1) = Poly<double>(std::vector<double>{-0.4, 0.1});
  auto poly = picard_flows<double>(alg, lat, cf, 0.0, 0.0);
  FieldExtractor<double> ex(alg, lat);
  const double x0 = 0.25, y0 = 0.15, h = 5e-3;
  auto fields = [&](double x, double y) {
    return point_fields<double>(ex, poly.k_at(x, y), cf, x, y);
  };
  PointFields<double> fc = fields(x0, y0);
  PointFields<double> fxp = fields(x0 + h, y0), fxm = fields(x0 - h, y0);
  PointFields<double> fyp = fields(x0, y0 + h), fym = fields(x0, y0 - h);
  for (int i = 0; i <= 1; ++i) {
    Mat<double> dpb = (fxp.pibar.at({1, i}) - fxm.pibar.at({1, i})) / (2 * h);
    Mat<double> dpl = (fyp.pi.at({1, i}) - fym.pi.at({1, i})) / (2 * h);
    CHECK(rel_gap(dpb, pibar_x_rhs<double>(fc, 2, 1, i)) < 1e-4);
    CHECK(rel_gap(dpl, pi_y_rhs<double>(fc, 2, 1, i)) < 1e-4);
  }
}

TEST_CASE("single-row sites reduce the equation to principal element ratios") {
  auto alg = get_algebra(2);
  SiteLattice lat = build_site_lattice(2, parse_grading("1,1", 2));
  FieldExtractor<Rational> ex(alg, lat);
  KPoint<Rational> k = calibration_point(alg, 9);
  CoefficientSet<Rational> cf = unit_coeffs<Rational>(lat);
  PointFields<Rational> f = point_fields<Rational>(ex, k, cf, rat(1, 2), rat(1, 3));
  auto y = [&](int s) { return f.y[s](0, 0); };
  CHECK(toda_rhs<Rational>(f, 1, 0)(0, 0) == y(1) / y(0));
  CHECK(toda_rhs<Rational>(f, 1, 1)(0, 0) == y(2) / y(1) - y(1) / y(0));
  CHECK(toda_rhs<Rational>(f, 1, 2)(0, 0) == -(y(2) / y(1)));
  // And the single-row field itself is the ratio of principal elements.
  for (int s = 0; s <= 2; ++s) CHECK(y(s) == k.highest(s + 1) / k.highest(s));
}

TEST_CASE("bordered determinants expand through the adjacent black roots") {
  auto alg = get_algebra(4);
  SiteLattice lat = build_site_lattice(4, parse_grading("0,1,0,1", 4));
  FieldExtractor<Rational> ex(alg, lat);
  for (unsigned long salt : {31ul, 32ul}) {
    KPoint<Rational> k = calibration_point(alg, salt);
    // First site starts at the first root: only the forward and through-block
    // expansions are defined.
    CHECK(ext_det_ff_check<Rational>(ex, k, 0).exact());
    CHECK(cross_term_expansion_check<Rational>(ex, k, 0).exact());
    CHECK_THROWS_AS(ext_det_bb_check<Rational>(ex, k, 0), ConstructionError);
    CHECK_THROWS_AS(ext_det_fs_check<Rational>(ex, k, 0), ConstructionError);
    CHECK_THROWS_AS(ext_det_bs_check<Rational>(ex, k, 0), ConstructionError);
    CHECK_THROWS_AS(ext_det_ss_check<Rational>(ex, k, 0), ConstructionError);
    // Interior site: every expansion closes.
    CHECK(ext_det_ff_check<Rational>(ex, k, 1).exact());
    CHECK(ext_det_bb_check<Rational>(ex, k, 1).exact());
    CHECK(ext_det_fs_check<Rational>(ex, k, 1).exact());
    CHECK(ext_det_bs_check<Rational>(ex, k, 1).exact());
    CHECK(ext_det_ss_check<Rational>(ex, k, 1).exact());
    CHECK(cross_term_expansion_check<Rational>(ex, k, 1).exact());
    // Trailing site past the last black root has no extensions at all.
    CHECK_THROWS_AS(ext_det_ff_check<Rational>(ex, k, 2), ConstructionError);
    CHECK_THROWS_AS(cross_term_expansion_check<Rational>(ex, k, 2), ConstructionError);
  }

  // A block ending at the last root supports the backward expansion but none
  // that reach past the rank.
  auto alg3 = get_algebra(3);
  SiteLattice lat3 = build_site_lattice(3, parse_grading("0,1,0", 3));
  FieldExtractor<Rational> ex3(alg3, lat3);
  KPoint<Rational> k3 = calibration_point(alg3, 33);
  CHECK(ext_det_ff_check<Rational>(ex3, k3, 0).exact());
  CHECK(cross_term_expansion_check<Rational>(ex3, k3, 0).exact());
  CHECK(ext_det_bb_check<Rational>(ex3, k3, 1).exact());
  CHECK_THROWS_AS(ext_det_ff_check<Rational>(ex3, k3, 1), ConstructionError);
  CHECK_THROWS_AS(ext_det_fs_check<Rational>(ex3, k3, 1), ConstructionError);
  CHECK_THROWS_AS(ext_det_bs_check<Rational>(ex3, k3, 1), ConstructionError);
  CHECK_THROWS_AS(ext_det_ss_check<Rational>(ex3, k3, 1), ConstructionError);
  CHECK_THROWS_AS(cross_term_expansion_check<Rational>(ex3, k3, 1), ConstructionError);
}
