#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "volcast/autodiff.hpp"
#include "volcast/errors.hpp"
#include "volcast/garch.hpp"
#include "volcast/losses.hpp"
#include "volcast/math_util.hpp"
#include "volcast/nn.hpp"

using namespace volcast;
using namespace volcast::nn;

namespace {

std::vector<double> random_shocks(std::size_t n, unsigned seed, double sd = 1.0) {
	std::mt19937 rng(seed);
	std::normal_distribution<double> z(0.0, sd);
	std::vector<double> eps(n);
	for (double& e : eps) e = z(rng);
	return eps;
}

// Mean one-step likelihood loss of a value-path roll, used as the scalar
// objective for finite-difference gradient checks.
double roll_loss(const Model& model, std::span<const double> eps, double init_var) {
	CellState st = initial_state(model, init_var);
	const auto out = roll_values(model, eps.first(eps.size() - 1), st);
	double acc = 0.0;
	for (std::size_t i = 0; i < out.size(); ++i) {
		acc += point_loss(LossKind::n(), eps[i + 1] * eps[i + 1], out[i]);
	}
	return acc / double(out.size());
}

}  // namespace

TEST_CASE("architecture names round trip") {
	CHECK(parse_arch("counterpart") == Arch::counterpart);
	CHECK(parse_arch("garch-lstm") == Arch::garch_lstm);
	CHECK(parse_arch(arch_name(Arch::counterpart)) == Arch::counterpart);
	CHECK(parse_arch(arch_name(Arch::garch_lstm)) == Arch::garch_lstm);
	CHECK_THROWS_AS(parse_arch("lstm"), std::invalid_argument);
}

TEST_CASE("raw vector sizes follow the kernel and the gate block") {
	CHECK(Model::raw_size({Arch::counterpart, garch::ModelKind::garch11}) == 3);
	CHECK(Model::raw_size({Arch::counterpart, garch::ModelKind::gjr}) == 4);
	CHECK(Model::raw_size({Arch::counterpart, garch::ModelKind::figarch}) == 4);
	CHECK(Model::raw_size({Arch::garch_lstm, garch::ModelKind::garch11}) == 13);
	CHECK(Model::raw_size({Arch::garch_lstm, garch::ModelKind::figarch}) == 14);
}

TEST_CASE("from_params and kernel_params round trip the constrained values") {
	SUBCASE("garch11") {
		const garch::Garch11Params p{0.07, 0.12, 0.8};
		const Model m = Model::from_params({Arch::counterpart, garch::ModelKind::garch11}, p);
		const auto& q = std::get<garch::Garch11Params>(m.kernel_params());
		CHECK(q.omega == doctest::Approx(p.omega).epsilon(1e-12));
		CHECK(q.alpha == doctest::Approx(p.alpha).epsilon(1e-12));
		CHECK(q.beta == doctest::Approx(p.beta).epsilon(1e-12));
	}
	SUBCASE("gjr") {
		const garch::GjrParams p{0.05, 0.06, 0.1, 0.75};
		const Model m = Model::from_params({Arch::counterpart, garch::ModelKind::gjr}, p);
		const auto& q = std::get<garch::GjrParams>(m.kernel_params());
		CHECK(q.omega == doctest::Approx(p.omega).epsilon(1e-12));
		CHECK(q.alpha == doctest::Approx(p.alpha).epsilon(1e-12));
		CHECK(q.lambda_asym == doctest::Approx(p.lambda_asym).epsilon(1e-12));
		CHECK(q.beta == doctest::Approx(p.beta).epsilon(1e-12));
	}
	SUBCASE("figarch carries the truncation and intercept convention") {
		garch::FigarchParams p{0.2, 0.3, 0.2, 0.4, 24, true};
		const Model m = Model::from_params({Arch::counterpart, garch::ModelKind::figarch}, p);
		const auto& q = std::get<garch::FigarchParams>(m.kernel_params());
		CHECK(q.omega == doctest::Approx(p.omega).epsilon(1e-12));
		CHECK(q.beta == doctest::Approx(p.beta).epsilon(1e-12));
		CHECK(q.phi == doctest::Approx(p.phi).epsilon(1e-12));
		CHECK(q.d == doctest::Approx(p.d).epsilon(1e-12));
		CHECK(q.truncation == 24);
		CHECK(q.scaled_intercept);
	}
	SUBCASE("kind mismatch is rejected") {
		CHECK_THROWS_AS(Model::from_params({Arch::counterpart, garch::ModelKind::gjr},
		                                   garch::Garch11Params{0.1, 0.2, 0.7}),
		                std::invalid_argument);
	}
}

TEST_CASE("init builds a feasible model scaled to the data variance") {
	for (garch::ModelKind kind :
	     {garch::ModelKind::garch11, garch::ModelKind::gjr, garch::ModelKind::figarch}) {
		ModelSpec spec{Arch::counterpart, kind, 30, false};
		const Model m = Model::init(spec, 2.0);
		CHECK_NOTHROW(garch::validate(m.kernel_params()));
		CHECK(weights_feasible(m));
		CHECK(m.blend() == 0.0);
	}
	const Model lstm = Model::init({Arch::garch_lstm, garch::ModelKind::garch11}, 1.0);
	CHECK(lstm.blend() == doctest::Approx(0.1).epsilon(1e-9));
	CHECK_THROWS_AS(Model::init({Arch::counterpart, garch::ModelKind::garch11}, 0.0),
	                std::invalid_argument);
}

TEST_CASE("counterpart roll reproduces the classical filter bit for bit") {
	const auto eps = random_shocks(200, 101);
	const double init_var = garch::sample_variance(eps);

	auto check_kernel = [&](const garch::ModelParams& params) {
		const ModelSpec spec{Arch::counterpart, garch::kind_of(params),
		                     std::holds_alternative<garch::FigarchParams>(params)
		                         ? std::get<garch::FigarchParams>(params).truncation
		                         : 50,
		                     false};
		const Model m = Model::from_params(spec, params);
		// compare at the decoded snapshot so both routes consume identical doubles
		const auto snapshot = m.kernel_params();
		const auto trace =
		    garch::filter_series(snapshot, eps, garch::VarianceInit::fixed(init_var));
		CellState st = initial_state(m, init_var);
		const auto out = roll_values(m, std::span<const double>(eps).first(eps.size() - 1), st);
		REQUIRE(out.size() == eps.size() - 1);
		for (std::size_t i = 0; i < out.size(); ++i) {
			CHECK(out[i] == trace[i + 1]);  // exact equality, not approximate
		}
	};

	check_kernel(garch::Garch11Params{0.05, 0.1, 0.85});
	check_kernel(garch::GjrParams{0.05, 0.05, 0.1, 0.8});
	check_kernel(garch::FigarchParams{0.05, 0.3, 0.2, 0.4, 20, false});
}

TEST_CASE("counterpart roll matches the filter at the original parameters to 1e-12") {
	// same comparison through the encode/decode round trip: agreement is no
	// longer exact but must stay inside the equivalence tolerance
	const auto eps = random_shocks(150, 55);
	const double init_var = garch::sample_variance(eps);
	const garch::ModelParams params = garch::GjrParams{0.08, 0.07, 0.12, 0.72};
	const Model m = Model::from_params({Arch::counterpart, garch::ModelKind::gjr}, params);
	const auto trace = garch::filter_series(params, eps, garch::VarianceInit::fixed(init_var));
	CellState st = initial_state(m, init_var);
	const auto out = roll_values(m, std::span<const double>(eps).first(eps.size() - 1), st);
	for (std::size_t i = 0; i < out.size(); ++i) {
		CHECK(out[i] == doctest::Approx(trace[i + 1]).epsilon(1e-12));
	}
}

TEST_CASE("gjr counterpart splits the shock mass by sign") {
	const garch::GjrParams p{0.1, 0.1, 0.2, 0.5};
	const Model m = Model::from_params({Arch::counterpart, garch::ModelKind::gjr}, p);
	CellState plus = initial_state(m, 1.0);
	CellState minus = initial_state(m, 1.0);
	const double up = step_value(m, 1.0, plus);
	const double down = step_value(m, -1.0, minus);
	CHECK(up == doctest::Approx(0.7).epsilon(1e-9));
	CHECK(down == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("garch-lstm with zero blend reduces to the bare kernel exactly") {
	const auto eps = random_shocks(80, 7);
	const garch::ModelParams params = garch::Garch11Params{0.05, 0.1, 0.85};
	Model lstm = Model::from_params({Arch::garch_lstm, garch::ModelKind::garch11}, params);
	const Model bare = Model::from_params({Arch::counterpart, garch::ModelKind::garch11}, params);
	// activate the gates so the cell path is genuinely alive
	std::mt19937 rng(3u);
	std::uniform_real_distribution<double> u(-0.5, 0.5);
	for (std::size_t i = 3; i + 1 < lstm.raw().size(); ++i) lstm.raw()[i] = u(rng);
	lstm.force_blend_zero();
	CHECK(lstm.blend() == 0.0);

	CellState a = initial_state(lstm, 1.0);
	CellState b = initial_state(bare, 1.0);
	const auto out_lstm = roll_values(lstm, eps, a);
	const auto out_bare = roll_values(bare, eps, b);
	for (std::size_t i = 0; i < out_lstm.size(); ++i) {
		CHECK(out_lstm[i] == out_bare[i]);  // sigma^2 = o * (1 + 0 * tanh(c)) exactly
	}
	CHECK_THROWS_AS(
	    [&] {
		    Model c = Model::from_params({Arch::counterpart, garch::ModelKind::garch11}, params);
		    c.force_blend_zero();
	    }(),
	    std::invalid_argument);
}

TEST_CASE("a single garch-lstm step is monotone in the blend weight") {
	const garch::ModelParams params = garch::Garch11Params{0.05, 0.1, 0.85};
	Model m = Model::from_params({Arch::garch_lstm, garch::ModelKind::garch11}, params);
	// push the candidate path away from zero so tanh(c) has a definite sign
	m.raw()[9] = 0.8;   // Wc
	m.raw()[11] = 0.6;  // bc
	double prev = -1.0;
	for (double b : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
		m.raw().back() = b;
		CellState st = initial_state(m, 1.0);
		const double out = step_value(m, 0.5, st);
		CHECK(out > prev);
		prev = out;
	}
}

TEST_CASE("garch-lstm outputs stay positive for any gate weights") {
	// |blend * tanh(c)| < 1 keeps the multiplicative correction above zero
	const auto eps = random_shocks(120, 17, 1.5);
	std::mt19937 rng(23u);
	std::uniform_real_distribution<double> u(-3.0, 3.0);
	for (garch::ModelKind kind :
	     {garch::ModelKind::garch11, garch::ModelKind::gjr, garch::ModelKind::figarch}) {
		Model m = Model::init({Arch::garch_lstm, kind, 16, false}, 1.0);
		for (std::size_t i = (kind == garch::ModelKind::garch11 ? 3u : 4u); i < m.raw().size();
		     ++i) {
			m.raw()[i] = u(rng);
		}
		CellState st = initial_state(m, 1.0);
		for (double s : roll_values(m, eps, st)) CHECK(s > 0.0);
	}
}

TEST_CASE("tape roll reproduces the value path exactly") {
	const auto eps = random_shocks(40, 31);
	for (Arch arch : {Arch::counterpart, Arch::garch_lstm}) {
		for (garch::ModelKind kind :
		     {garch::ModelKind::garch11, garch::ModelKind::gjr, garch::ModelKind::figarch}) {
			Model m = Model::init({arch, kind, 12, false}, 1.3);
			if (arch == Arch::garch_lstm) {
				std::mt19937 rng(5u);
				std::uniform_real_distribution<double> u(-0.4, 0.4);
				for (std::size_t i = (kind == garch::ModelKind::garch11 ? 3u : 4u);
				     i + 1 < m.raw().size(); ++i) {
					m.raw()[i] = u(rng);
				}
			}
			CellState value_state = initial_state(m, 1.3);
			const auto value_out = roll_values(m, eps, value_state);

			ad::Tape tape;
			const TapeRoll roll = roll_chunk(tape, m, eps, initial_state(m, 1.3));
			REQUIRE(roll.out.size() == value_out.size());
			for (std::size_t i = 0; i < value_out.size(); ++i) {
				CHECK(roll.out[i].value() == value_out[i]);
			}
			CHECK(roll.end_state.sigma_sq == value_state.sigma_sq);
			CHECK(roll.end_state.c == value_state.c);
			CHECK(roll.end_state.eps_sq == value_state.eps_sq);
		}
	}
}

TEST_CASE("tape gradients agree with central finite differences") {
	const auto eps = random_shocks(21, 47, 0.8);
	const double init_var = 1.1;

	auto check_grads = [&](Model m) {
		ad::Tape tape;
		const CellState start = initial_state(m, init_var);
		const TapeRoll roll = roll_chunk(tape, m, eps, start);
		ad::Var loss = tape.constant(0.0);
		for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
			loss = loss + point_loss(LossKind::n(), eps[i + 1] * eps[i + 1], roll.out[i]);
		}
		loss = loss / double(eps.size() - 1);
		// the value-path objective must agree before gradients mean anything
		CHECK(loss.value() == doctest::Approx(roll_loss(m, eps, init_var)).epsilon(1e-13));
		const auto adj = tape.backward(loss);

		for (std::size_t i = 0; i < m.raw().size(); ++i) {
			const double saved = m.raw()[i];
			const double step = 1e-6 * std::max(1.0, std::fabs(saved));
			m.raw()[i] = saved + step;
			const double up = roll_loss(m, eps, init_var);
			m.raw()[i] = saved - step;
			const double down = roll_loss(m, eps, init_var);
			m.raw()[i] = saved;
			const double fd = (up - down) / (2.0 * step);
			const double ad_grad = adj[std::size_t(roll.raw[i].id())];
			CHECK(std::fabs(ad_grad - fd) <=
			      1e-6 + 1e-4 * std::max(std::fabs(ad_grad), std::fabs(fd)));
		}
	};

	SUBCASE("garch11 counterpart") {
		check_grads(Model::init({Arch::counterpart, garch::ModelKind::garch11}, 1.0));
	}
	SUBCASE("gjr counterpart") {
		check_grads(Model::init({Arch::counterpart, garch::ModelKind::gjr}, 1.0));
	}
	SUBCASE("figarch counterpart differentiates through the weight expansion") {
		check_grads(Model::init({Arch::counterpart, garch::ModelKind::figarch, 12, false}, 1.0));
	}
	SUBCASE("garch-lstm with live gates") {
		Model m = Model::init({Arch::garch_lstm, garch::ModelKind::garch11}, 1.0);
		std::mt19937 rng(13u);
		std::uniform_real_distribution<double> u(-0.3, 0.3);
		for (std::size_t i = 3; i + 1 < m.raw().size(); ++i) m.raw()[i] = u(rng);
		check_grads(m);
	}
}

TEST_CASE("infeasible long-memory weights are reported, not silently used") {
	Model m = Model::init({Arch::counterpart, garch::ModelKind::figarch, 16, false}, 1.0);
	// beta far above phi + d drives lambda_1 = d + phi - beta negative
	m.raw()[1] = logit(0.8);
	m.raw()[2] = logit(0.05);
	m.raw()[3] = logit(0.1);
	CHECK_FALSE(weights_feasible(m));
	ad::Tape tape;
	CHECK_THROWS_AS(roll_chunk(tape, m, std::vector<double>{0.5, -0.5}, initial_state(m, 1.0)),
	                NumericalError);
}

TEST_CASE("figarch cell state window is validated") {
	const Model m = Model::init({Arch::counterpart, garch::ModelKind::figarch, 10, false}, 1.0);
	CellState st = initial_state(m, 1.0);
	CHECK(st.eps_sq.size() == 9);
	st.eps_sq.pop_back();
	CHECK_THROWS_AS(step_value(m, 0.5, st), std::invalid_argument);
}

TEST_CASE("forecast_window returns the final output of the rolled window") {
	const auto eps = random_shocks(25, 61);
	const Model m = Model::init({Arch::counterpart, garch::ModelKind::gjr}, 1.0);
	CellState st = initial_state(m, 1.0);
	const auto out = roll_values(m, eps, st);
	CHECK(forecast_window(m, eps, initial_state(m, 1.0)) == out.back());
	CHECK_THROWS_AS(forecast_window(m, std::vector<double>{}, initial_state(m, 1.0)),
	                std::invalid_argument);
}
