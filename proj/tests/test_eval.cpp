#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "volcast/errors.hpp"
#include "volcast/eval.hpp"
#include "volcast/timeseries.hpp"

using namespace volcast;
using namespace volcast::eval;

TEST_CASE("perfect forecasts score zero error") {
	const std::vector<double> truth{1.0, 4.0, 0.25};
	const MetricReport r = evaluate_values(truth, truth);
	CHECK(r.mae == 0.0);
	CHECK(r.mse == 0.0);
	CHECK(r.n == 3);
	CHECK(r.sigma_scale);
}

TEST_CASE("a constant sigma offset shows up as mae delta and mse delta squared") {
	// variances (4, 9) vs (1, 4) are sigmas (2, 3) vs (1, 2): offset 1
	const std::vector<double> hat{4.0, 9.0};
	const std::vector<double> truth{1.0, 4.0};
	const MetricReport r = evaluate_values(hat, truth);
	CHECK(r.mae == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(r.mse == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("three-point metric example by hand") {
	// sigma pairs: (1,2), (2,1), (3,3) -> abs errors 1,1,0; squares 1,1,0
	const std::vector<double> hat{1.0, 4.0, 9.0};
	const std::vector<double> truth{4.0, 1.0, 9.0};
	const MetricReport r = evaluate_values(hat, truth);
	CHECK(r.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
	CHECK(r.mse == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("variance-scale metrics skip the square root") {
	const std::vector<double> hat{4.0, 9.0};
	const std::vector<double> truth{1.0, 4.0};
	const MetricReport r = evaluate_values(hat, truth, false);
	CHECK_FALSE(r.sigma_scale);
	CHECK(r.mae == doctest::Approx(4.0).epsilon(1e-12));   // |4-1| and |9-4|
	CHECK(r.mse == doctest::Approx(17.0).epsilon(1e-12));  // (9 + 25) / 2
}

TEST_CASE("metric errors are permutation invariant in aggregate") {
	std::mt19937 rng(3u);
	std::uniform_real_distribution<double> u(0.1, 5.0);
	std::vector<double> hat(50), truth(50);
	for (std::size_t i = 0; i < hat.size(); ++i) {
		hat[i] = u(rng);
		truth[i] = u(rng);
	}
	const MetricReport a = evaluate_values(hat, truth);
	std::vector<double> hat_r(hat.rbegin(), hat.rend());
	std::vector<double> truth_r(truth.rbegin(), truth.rend());
	const MetricReport b = evaluate_values(hat_r, truth_r);
	CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-13));
	CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-13));
}

TEST_CASE("evaluate_values rejects bad input shapes and values") {
	const std::vector<double> a{1.0, 2.0};
	const std::vector<double> b{1.0};
	CHECK_THROWS_AS(evaluate_values(a, b), std::invalid_argument);
	CHECK_THROWS_AS(evaluate_values(std::vector<double>{}, std::vector<double>{}), DataError);
	CHECK_THROWS_AS(evaluate_values(std::vector<double>{0.0}, std::vector<double>{1.0}),
	                std::invalid_argument);
}

TEST_CASE("evaluate aligns forecasts to truth by target date and drops strays") {
	VolSeries truth;
	for (int i = 0; i < 5; ++i) {
		truth.stamps.push_back(Day(100 + i));
		truth.sigma_sq.push_back(double(i + 1));
		truth.sigma.push_back(std::sqrt(double(i + 1)));
	}
	ForecastSeries fc;
	fc.horizon = 1;
	// two alignable dates, one stray that must be dropped
	fc.anchor_stamps = {Day(99), Day(101), Day(200)};
	fc.target_stamps = {Day(100), Day(102), Day(201)};
	fc.sigma_hat_sq = {1.0, 3.0, 9.0};
	const MetricReport r = evaluate(fc, truth);
	CHECK(r.n == 2);
	// both matched pairs are exact: (1 vs 1), (3 vs 3)
	CHECK(r.mae == 0.0);

	ForecastSeries none;
	none.target_stamps = {Day(999)};
	none.sigma_hat_sq = {1.0};
	CHECK_THROWS_AS(evaluate(none, truth), DataError);

	ForecastSeries ragged;
	ragged.target_stamps = {Day(100), Day(101)};
	ragged.sigma_hat_sq = {1.0};
	CHECK_THROWS_AS(evaluate(ragged, truth), std::invalid_argument);
}

TEST_CASE("var_limits scale sigma by the multiplier on both sides") {
	const std::vector<double> sigma{1.0, 0.5, 0.0};
	const VarLimits lim = var_limits(sigma);
	REQUIRE(lim.upper.size() == 3);
	CHECK(lim.upper[0] == doctest::Approx(1.65).epsilon(1e-12));
	CHECK(lim.lower[0] == doctest::Approx(-1.65).epsilon(1e-12));
	CHECK(lim.upper[1] == doctest::Approx(0.825).epsilon(1e-12));
	CHECK(lim.upper[2] == 0.0);
	CHECK(lim.multiplier == 1.65);
	CHECK_THROWS_AS(var_limits(std::vector<double>{-1.0}), std::invalid_argument);

	const VarLimits wide = var_limits(sigma, 2.0);
	CHECK(wide.upper[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("var_violations counts strict breaches on each side") {
	const std::vector<double> sigma{1.0, 1.0, 1.0, 1.0, 1.0};
	const VarLimits lim = var_limits(sigma);
	// exactly one upper breach; touching the limit is not a breach
	const std::vector<double> returns{0.0, 1.65, 1.66, -1.65, -1.0};
	const VarReport r = var_violations(returns, lim);
	CHECK(r.n == 5);
	CHECK(r.upper_count == 1);
	CHECK(r.lower_count == 0);
	CHECK(r.upper_rate == doctest::Approx(0.2).epsilon(1e-12));
	CHECK(r.total_rate == doctest::Approx(0.2).epsilon(1e-12));
	CHECK_THROWS_AS(var_violations(std::vector<double>{1.0}, lim), std::invalid_argument);
}

TEST_CASE("var violation rates are invariant under a common scale") {
	std::mt19937 rng(11u);
	std::normal_distribution<double> z(0.0, 1.0);
	std::vector<double> returns(400), sigma(400, 1.0);
	for (double& r : returns) r = z(rng);
	const VarReport base = var_violations(returns, var_limits(sigma));

	std::vector<double> returns2(returns), sigma2(sigma);
	for (double& r : returns2) r *= 7.0;
	for (double& s : sigma2) s *= 7.0;
	const VarReport scaled = var_violations(returns2, var_limits(sigma2));
	CHECK(base.upper_count == scaled.upper_count);
	CHECK(base.lower_count == scaled.lower_count);
}

TEST_CASE("gaussian returns breach 1.65-sigma limits about ten percent of the time") {
	// two-sided tail mass 2 * Phi(-1.65) is roughly 0.099
	std::mt19937 rng(2024u);
	std::normal_distribution<double> z(0.0, 1.0);
	const std::size_t n = 200000;
	std::vector<double> returns(n), sigma(n, 1.0);
	for (double& r : returns) r = z(rng);
	const VarReport r = var_violations(returns, var_limits(sigma));
	CHECK(r.total_rate == doctest::Approx(0.0989).epsilon(0.05));
	// symmetric distribution: both sides carry about half the breaches
	CHECK(double(r.upper_count) / double(r.lower_count) == doctest::Approx(1.0).epsilon(0.15));
}
