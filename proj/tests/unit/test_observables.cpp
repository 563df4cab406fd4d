#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lhs/integrators.hpp"
#include "lhs/observables.hpp"
#include "lhs/sampling.hpp"
#include "lhs/series.hpp"
#include "oracles.hpp"

using namespace lhs;

namespace {

CMatrix cols(std::initializer_list<CVector> vs) {
  CMatrix m(vs.begin()->size(), static_cast<Index>(vs.size()));
  Index j = 0;
  for (const auto& v : vs) m.col(j++) = v;
  return m;
}

CVector e(Index d, Index k) { return UnitVector::basis(d, k).vec(); }

double r2(const CMatrix& z) { return oracle::inner(column_mean(z), column_mean(z)).real(); }

// Richardson-extrapolated centered difference of R^2 along the flow at t = 0.
double fd_r2_rate(const Ensemble& ens, double h) {
  auto at = [&](double s) {
    if (s == 0.0) return r2(ens.states());
    return r2(step_rk4(ens, std::abs(s), s > 0 ? TimeDirection::kForward : TimeDirection::kBackward).states());
  };
  const double d1 = (at(h) - at(-h)) / (2.0 * h);
  const double d2 = (at(2 * h) - at(-2 * h)) / (4.0 * h);
  return (4.0 * d1 - d2) / 3.0;
}

}  // namespace

TEST_CASE("F and G examples") {
  Rng rng = make_rng(51);
  const CVector z = random_unit(3, rng);
  const CMatrix same = cols({z, z, z});
  CHECK(functional_F(same) < 1e-15);
  CHECK(functional_G(same) == 0.0);

  const CMatrix anti = cols({e(2, 0), -e(2, 0)});
  CHECK(functional_F(anti) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(functional_G(anti) == doctest::Approx(2.0).epsilon(1e-15));

  const CMatrix quarter = cols({e(2, 0), kImag * e(2, 0)});
  CHECK(std::abs(functional_F(quarter) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(functional_G(quarter) - std::sqrt(2.0)) < 1e-15);
  CHECK(functional_G(quarter) <= 2.0 * std::sqrt(functional_F(quarter)));

  for (int t = 0; t < 200; ++t) {
    const CMatrix s = random_states(2 + t % 10, 1 + t % 4, rng);
    double F = 0.0;
    double G = 0.0;
    for (Index k = 0; k < s.cols(); ++k)
      for (Index l = 0; l < s.cols(); ++l) {
        F = std::max(F, std::abs(1.0 - oracle::inner(s.col(k), s.col(l))));
        G = std::max(G, (s.col(k) - s.col(l)).norm());
      }
    CHECK(std::abs(functional_F(s) - F) <= 1e-14);
    CHECK(std::abs(functional_G(s) - G) <= 1e-14);
    CHECK(functional_G(s) <= 2.0 * std::sqrt(functional_F(s)) + 1e-12);
    const auto pf = pair_functionals(s);
    CHECK(pf.exact);
    CHECK(pf.F == functional_F(s));
    CHECK(pf.G == functional_G(s));
  }
}

TEST_CASE("subsampled pair scan is flagged") {
  Rng rng = make_rng(52);
  const CMatrix s = random_states(50, 2, rng);
  const auto pf = pair_functionals(s, 10, 500, 3);
  CHECK_FALSE(pf.exact);
  CHECK(pf.F <= functional_F(s));
  CHECK(pf.G <= functional_G(s));
  const auto again = pair_functionals(s, 10, 500, 3);
  CHECK(pf.F == again.F);
}

TEST_CASE("centroid, J and order parameter examples") {
  Rng rng = make_rng(53);
  const CVector z = random_unit(4, rng);
  const CMatrix same = cols({z, z});
  CHECK((centroid(same) - z).norm() < 1e-15);
  CHECK(order_parameter(EmpiricalMeasure::uniform(same)) == doctest::Approx(1.0).epsilon(1e-15));

  const CMatrix anti = cols({z, -z});
  CHECK(centroid(anti).norm() == 0.0);
  CHECK(order_parameter(EmpiricalMeasure::uniform(anti)) == 0.0);

  const CMatrix two = cols({e(3, 0), e(3, 1)});
  const CVector c = centroid(two);
  CHECK(c[0] == Complex(0.5));
  CHECK(c[1] == Complex(0.5));
  CHECK(c[2] == Complex(0.0));
  CHECK(std::abs(order_parameter(EmpiricalMeasure::uniform(two)) - 1.0 / std::sqrt(2.0)) < 1e-15);

  RVector w(2);
  w << 0.25, 0.75;
  const EmpiricalMeasure weighted(two, w);
  CHECK((j_vector(weighted) - (0.25 * e(3, 0) + 0.75 * e(3, 1))).norm() < 1e-15);
  RVector bad(2);
  bad << 0.5, 0.6;
  CHECK_THROWS_AS(EmpiricalMeasure(two, bad), std::invalid_argument);
}

TEST_CASE("r_squared_rate and centroid_rate") {
  Rng rng = make_rng(54);
  const CVector z = random_unit(3, rng);
  CHECK(std::abs(r_squared_rate(EmpiricalMeasure::uniform(cols({z, z, z})), 1.0, 0.3)) < 1e-15);
  CHECK(std::abs(centroid_rate(cols({z, z, z}), 1.0, 0.3)) < 1e-15);
  CHECK(r_squared_rate(EmpiricalMeasure::uniform(cols({z, -z})), 1.0, 0.3) == 0.0);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const CMatrix s = random_states(2 + t % 20, 1 + t % 5, rng);
    const double k0 = u(rng);
    const double k1 = u(rng);
    const double a = r_squared_rate(EmpiricalMeasure::uniform(s), k0, k1);
    CHECK(std::abs(a - centroid_rate(s, k0, k1)) <= 1e-12);
    // d|z_c|^2/dt = 2 Re<z_c, dz_c/dt> directly from the field.
    const auto ens = Ensemble::homogeneous(s, SkewHermitian::zero(s.rows()), {k0, k1});
    const double direct = 2.0 * oracle::inner(column_mean(s), column_mean(lhs_rhs(ens))).real();
    CHECK(std::abs(a - direct) <= 1e-12);
    if (k0 > 0 && k0 + 2 * k1 >= 0) CHECK(a >= -1e-15);
  }
}

TEST_CASE("r_squared_rate matches finite differences along the flow") {
  Rng rng = make_rng(55);
  for (int t = 0; t < 20; ++t) {
    const auto ens = sample_admissible(16, 3, {1.0, 0.1}, 0.1, 100 + static_cast<std::uint64_t>(t));
    const double analytic = r_squared_rate(ens.empirical_measure(), 1.0, 0.1);
    const double fd = fd_r2_rate(ens, 1e-3);
    CHECK(std::abs(analytic - fd) <= 1e-5 * std::abs(analytic));
  }
  for (int t = 0; t < 10; ++t) {
    const auto ens = Ensemble::homogeneous(random_states(12, 2, rng), random_skew(2, 1.0, rng), {1.0, -0.3});
    const double analytic = centroid_rate(ens.states(), 1.0, -0.3);
    CHECK(std::abs(analytic - fd_r2_rate(ens, 1e-3)) <= 1e-5 * std::abs(analytic));
  }
}

TEST_CASE("aggregation defect") {
  Rng rng = make_rng(56);
  const CVector z = random_unit(3, rng);
  CHECK(aggregation_defect(EmpiricalMeasure::uniform(cols({z, z}))) < 1e-15);
  CHECK(aggregation_defect(EmpiricalMeasure::uniform(cols({z, -z}))) == 0.0);
  CHECK(std::abs(aggregation_defect(EmpiricalMeasure::uniform(cols({e(3, 0), e(3, 1)}))) - 0.25) < 1e-15);
  for (int t = 0; t < 100; ++t) {
    const auto mu = EmpiricalMeasure::uniform(random_states(2 + t % 9, 1 + t % 4, rng));
    const CVector J = j_vector(mu);
    double ref = 0.0;
    for (Index j = 0; j < mu.size(); ++j) {
      const double proj = oracle::rdot(mu.atoms().col(j), J);
      ref += mu.weight(j) * (J.squaredNorm() - proj * proj);
    }
    const double d = aggregation_defect(mu);
    CHECK(d >= -1e-12);
    CHECK(std::abs(d - ref) <= 1e-13);
  }
}

TEST_CASE("dJ/dt bound") {
  Rng rng = make_rng(57);
  const CVector z = random_unit(3, rng);
  CHECK(dj_dt_norm_bound_check(EmpiricalMeasure::uniform(cols({z, z})), 1.0, 0.2).value < 1e-15);
  const auto anti = dj_dt_norm_bound_check(EmpiricalMeasure::uniform(cols({z, -z})), 1.0, 0.0);
  CHECK(anti.value == 0.0);
  CHECK(anti.bound == 2.0);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  for (int t = 0; t < 1000; ++t) {
    const double k1 = u(rng);
    const auto ens = sample_admissible(2 + t % 10, 1 + t % 4, {1.0, k1}, 0.05, 7000 + static_cast<std::uint64_t>(t));
    const auto mu = ens.empirical_measure();
    const auto chk = dj_dt_norm_bound_check(mu, 1.0, k1);
    CHECK(chk.holds());
    CHECK(chk.bound == doctest::Approx(2.0 * (1.0 + k1)));
    // dJ/dt = mean of the coupling field for a common frequency of zero.
    const auto flat = Ensemble::homogeneous(ens.states(), SkewHermitian::zero(ens.dim()), {1.0, k1});
    CHECK(std::abs(chk.value - column_mean(lhs_rhs(flat)).norm()) <= 1e-13);
  }
}

TEST_CASE("lp distance") {
  Rng rng = make_rng(58);
  const CMatrix a = random_states(5, 3, rng);
  CHECK(lp_distance(a, a, 1.0) == 0.0);
  for (double p : {1.0, 2.0, 4.0, 7.5}) {
    CHECK(std::abs(lp_distance(cols({e(2, 0)}), cols({e(2, 1)}), p) - std::sqrt(2.0)) < 1e-15);
  }
  const CMatrix b = random_states(5, 3, rng);
  RVector flat_a(30);
  RVector flat_b(30);
  for (Index j = 0; j < 5; ++j) {
    flat_a.segment(6 * j, 6) = oracle::to_real(a.col(j));
    flat_b.segment(6 * j, 6) = oracle::to_real(b.col(j));
  }
  CHECK(std::abs(lp_distance(a, b, 2.0) - (flat_a - flat_b).norm()) < 1e-14);
  CHECK_THROWS_AS(lp_distance(a, random_states(4, 3, rng), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(lp_distance(a, b, 0.5), std::invalid_argument);
}

TEST_CASE("correlations") {
  Rng rng = make_rng(59);
  const CVector z = random_unit(3, rng);
  const auto same = correlations(cols({z, z, z}));
  CHECK((same.h - CMatrix::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(same.imag_part().cwiseAbs().maxCoeff() < 1e-15);
  CHECK(same.defect_part().cwiseAbs().maxCoeff() < 1e-15);

  for (int t = 0; t < 50; ++t) {
    const CMatrix s = random_states(2 + t % 12, 1 + t % 4, rng);
    const auto c = correlations(s);
    for (Index i = 0; i < s.cols(); ++i) {
      CHECK(std::abs(c.h(i, i) - 1.0) <= 1e-14);
      for (Index j = 0; j < s.cols(); ++j) {
        CHECK(c.h(i, j) == std::conj(c.h(j, i)));
        CHECK(std::abs(c.h(i, j)) <= 1.0 + 1e-12);
        CHECK(std::abs(c.h(i, j) - oracle::inner(s.col(i), s.col(j))) <= 1e-15);
      }
    }
    CHECK(std::abs(c.functional_F() - functional_F(s)) <= 1e-13);
  }
}

TEST_CASE("min alignment") {
  const CMatrix two = cols({e(2, 0), e(2, 1)});
  CHECK(std::abs(min_alignment(EmpiricalMeasure::uniform(two)) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(min_alignment(EmpiricalMeasure::uniform(cols({e(2, 0), -e(2, 0)}))) == -1.0);
}

TEST_CASE("observable series serialization") {
  Rng rng = make_rng(60);
  const CMatrix s = random_states(4, 2, rng);
  ObservableSeries series;
  series.record(0.0, s, {1.0, 0.1});
  series.record(0.5, s, {1.0, 0.1});
  CHECK(series.size() == 2);
  const auto header = series.csv_header();
  REQUIRE(header.size() == 10);
  CHECK(header[0] == "t");
  CHECK(header[1] == "F");
  std::ostringstream os;
  series.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 3);
  const auto j = series.to_json();
  CHECK(j["times"].size() == 2);
  CHECK(j["series"]["F"][0].get<double>() == functional_F(s));

  std::ostringstream bad;
  CHECK_THROWS_AS(write_csv(bad, {"a", "b"}, {{1.0}}), std::invalid_argument);
  std::ostringstream digits;
  write_csv(digits, {"x"}, {{0.1}});
  CHECK(digits.str() == "x\n0.10000000000000001\n");
}
