#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "volcast/autodiff.hpp"

using volcast::ad::Tape;
using volcast::ad::Var;

namespace {

// Central finite difference of a scalar function of one raw slot.
template <class F>
double central_diff(F f, double x, double step = 1e-6) {
	return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace

TEST_CASE("recorded primitives compute eagerly") {
	Tape tape;
	const Var x = tape.input(2.0);
	const Var y = tape.input(3.0);
	CHECK(tape.mul(x, y).value() == 6.0);
	CHECK(tape.add(x, y).value() == 5.0);
	CHECK(tape.log(tape.constant(1.0)).value() == 0.0);
	CHECK(tape.tanh(tape.constant(0.0)).value() == 0.0);
	CHECK(tape.sigmoid(tape.constant(0.0)).value() == 0.5);
	CHECK(tape.sqrt(tape.constant(4.0)).value() == 2.0);
}

TEST_CASE("square rule: d(x^2)/dx = 2x") {
	Tape tape;
	const Var x = tape.input(3.0);
	const Var y = x * x;
	const auto grads = tape.backward(y);
	CHECK(grads[std::size_t(x.id())] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("fan-out accumulates: f = a*b + a at a=1,b=2 gives df/da = 3") {
	Tape tape;
	const Var a = tape.input(1.0);
	const Var b = tape.input(2.0);
	const Var f = a * b + a;
	const auto grads = tape.backward(f);
	CHECK(grads[std::size_t(a.id())] == doctest::Approx(3.0).epsilon(1e-12));
	CHECK(grads[std::size_t(b.id())] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("division and negation adjoints") {
	Tape tape;
	const Var a = tape.input(3.0);
	const Var b = tape.input(2.0);
	const Var f = -(a / b);  // df/da = -1/b, df/db = a/b^2
	const auto grads = tape.backward(f);
	CHECK(grads[std::size_t(a.id())] == doctest::Approx(-0.5).epsilon(1e-12));
	CHECK(grads[std::size_t(b.id())] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("unary primitive gradients match finite differences") {
	auto check_unary = [](auto build, double x0) {
		Tape tape;
		const Var x = tape.input(x0);
		const Var y = build(x);
		const auto grads = tape.backward(y);
		const double fd = central_diff(
		    [&](double v) {
			    Tape t2;
			    return build(t2.input(v)).value();
		    },
		    x0);
		CHECK(grads[std::size_t(x.id())] == doctest::Approx(fd).epsilon(1e-5));
	};
	check_unary([](Var v) { return log(v); }, 0.7);
	check_unary([](Var v) { return exp(v); }, 0.3);
	check_unary([](Var v) { return sqrt(v); }, 2.5);
	check_unary([](Var v) { return tanh(v); }, 0.4);
	check_unary([](Var v) { return sigmoid(v); }, -1.2);
	check_unary([](Var v) { return softplus(v); }, 0.9);
	check_unary([](Var v) { return abs(v); }, -0.8);
}

TEST_CASE("five-step recursion gradients match finite differences") {
	// sigma_{t} = w + a*e_{t-1}^2 + b*sigma_{t-1}, loss = sum log(sigma_t) + 1/sigma_t
	const std::vector<double> eps = {0.3, -0.9, 1.4, -0.2, 0.6};
	auto loss_at = [&](double w, double a, double b) {
		Tape tape;
		const Var vw = tape.input(w), va = tape.input(a), vb = tape.input(b);
		Var sigma = tape.constant(1.0);
		Var loss = tape.constant(0.0);
		for (double e : eps) {
			sigma = vw + va * (e * e) + vb * sigma;
			loss = loss + log(sigma) + 1.0 / sigma;
		}
		return std::tuple{tape.backward(loss), vw.id(), va.id(), vb.id(), loss.value()};
	};
	const double w0 = 0.1, a0 = 0.2, b0 = 0.7;
	const auto [grads, iw, ia, ib, f0] = loss_at(w0, a0, b0);

	auto value_at = [&](double w, double a, double b) {
		double sigma = 1.0, loss = 0.0;
		for (double e : eps) {
			sigma = w + a * e * e + b * sigma;
			loss += std::log(sigma) + 1.0 / sigma;
		}
		return loss;
	};
	CHECK(f0 == doctest::Approx(value_at(w0, a0, b0)).epsilon(1e-14));
	CHECK(grads[std::size_t(iw)] ==
	      doctest::Approx(central_diff([&](double v) { return value_at(v, a0, b0); }, w0))
	          .epsilon(1e-5));
	CHECK(grads[std::size_t(ia)] ==
	      doctest::Approx(central_diff([&](double v) { return value_at(w0, v, b0); }, a0))
	          .epsilon(1e-5));
	CHECK(grads[std::size_t(ib)] ==
	      doctest::Approx(central_diff([&](double v) { return value_at(w0, a0, v); }, b0))
	          .epsilon(1e-5));
}

TEST_CASE("constants carry no gradient") {
	Tape tape;
	const Var x = tape.input(2.0);
	const Var c = tape.constant(5.0);
	const Var f = x * c;
	const auto grads = tape.backward(f);
	CHECK(grads[std::size_t(x.id())] == 5.0);
	CHECK(grads[std::size_t(c.id())] == 0.0);  // reported but never fed back
}

TEST_CASE("backward is deterministic") {
	auto run = [] {
		Tape tape;
		const Var x = tape.input(1.3);
		const Var y = tape.input(-0.4);
		Var f = sigmoid(x * y) + tanh(x) * exp(y);
		const auto g = tape.backward(f);
		return std::pair{g[std::size_t(x.id())], g[std::size_t(y.id())]};
	};
	const auto a = run();
	const auto b = run();
	CHECK(a.first == b.first);
	CHECK(a.second == b.second);
}

TEST_CASE("domain errors on log and sqrt") {
	Tape tape;
	CHECK_THROWS_AS(tape.log(tape.constant(0.0)), std::domain_error);
	CHECK_THROWS_AS(tape.log(tape.constant(-1.0)), std::domain_error);
	CHECK_THROWS_AS(tape.sqrt(tape.constant(-4.0)), std::domain_error);
}

TEST_CASE("mixing tapes is rejected") {
	Tape t1, t2;
	const Var a = t1.input(1.0);
	const Var b = t2.input(2.0);
	CHECK_THROWS_AS(t1.add(a, b), std::logic_error);
}

TEST_CASE("backward of a long random expression matches finite differences") {
	std::mt19937_64 rng(99);
	std::uniform_real_distribution<double> unif(-1.5, 1.5);
	for (int rep = 0; rep < 20; ++rep) {
		const double x0 = unif(rng), y0 = unif(rng);
		auto value = [](double x, double y) {
			double acc = 0.3;
			for (int i = 0; i < 8; ++i) {
				acc = std::tanh(acc * x) + std::exp(-acc * acc) * y;
			}
			return acc;
		};
		Tape tape;
		const Var x = tape.input(x0), y = tape.input(y0);
		Var acc = tape.constant(0.3);
		for (int i = 0; i < 8; ++i) {
			acc = tanh(acc * x) + exp(-(acc * acc)) * y;
		}
		CHECK(acc.value() == doctest::Approx(value(x0, y0)).epsilon(1e-13));
		const auto g = tape.backward(acc);
		const double gx = central_diff([&](double v) { return value(v, y0); }, x0);
		const double gy = central_diff([&](double v) { return value(x0, v); }, y0);
		CHECK(g[std::size_t(x.id())] == doctest::Approx(gx).epsilon(2e-5));
		CHECK(g[std::size_t(y.id())] == doctest::Approx(gy).epsilon(2e-5));
	}
}
