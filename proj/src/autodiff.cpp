#include "volcast/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace volcast::ad {

namespace {

double stable_sigmoid(double x) {
	if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
	const double e = std::exp(x);
	return e / (1.0 + e);
}

double stable_softplus(double x) {
	// log(1 + e^x) without overflow for large |x|
	if (x > 0.0) return x + std::log1p(std::exp(-x));
	return std::log1p(std::exp(x));
}

}  // namespace

Var Tape::push(Op op, int a, int b, double value) {
	nodes_.push_back(Node{op, a, b, value});
	return Var(this, static_cast<int>(nodes_.size()) - 1, value);
}

int Tape::require(Var v) const {
	if (v.tape() != this || v.id() < 0 || v.id() >= static_cast<int>(nodes_.size()))
		throw std::logic_error("ad: variable does not live on this tape");
	return v.id();
}

Var Tape::input(double value) { return push(Op::input, -1, -1, value); }
Var Tape::constant(double value) { return push(Op::constant, -1, -1, value); }

Var Tape::add(Var a, Var b) { return push(Op::add, require(a), require(b), a.value() + b.value()); }
Var Tape::sub(Var a, Var b) { return push(Op::sub, require(a), require(b), a.value() - b.value()); }
Var Tape::mul(Var a, Var b) { return push(Op::mul, require(a), require(b), a.value() * b.value()); }
Var Tape::div(Var a, Var b) { return push(Op::div, require(a), require(b), a.value() / b.value()); }
Var Tape::neg(Var a) { return push(Op::neg, require(a), -1, -a.value()); }

Var Tape::log(Var a) {
	if (!(a.value() > 0.0)) throw std::domain_error("ad: log of non-positive value");
	return push(Op::log, require(a), -1, std::log(a.value()));
}

Var Tape::exp(Var a) { return push(Op::exp, require(a), -1, std::exp(a.value())); }

Var Tape::sqrt(Var a) {
	if (a.value() < 0.0) throw std::domain_error("ad: sqrt of negative value");
	return push(Op::sqrt, require(a), -1, std::sqrt(a.value()));
}

Var Tape::abs(Var a) { return push(Op::abs, require(a), -1, std::fabs(a.value())); }
Var Tape::tanh(Var a) { return push(Op::tanh, require(a), -1, std::tanh(a.value())); }
Var Tape::sigmoid(Var a) { return push(Op::sigmoid, require(a), -1, stable_sigmoid(a.value())); }
Var Tape::softplus(Var a) { return push(Op::softplus, require(a), -1, stable_softplus(a.value())); }

std::vector<double> Tape::backward(Var output) const {
	const int out = require(output);
	std::vector<double> adj(nodes_.size(), 0.0);
	adj[out] = 1.0;
	for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
		const double g = adj[i];
		if (g == 0.0) continue;
		const Node& n = nodes_[i];
		switch (n.op) {
			case Op::input:
			case Op::constant:
				break;
			case Op::add:
				adj[n.a] += g;
				adj[n.b] += g;
				break;
			case Op::sub:
				adj[n.a] += g;
				adj[n.b] -= g;
				break;
			case Op::mul:
				adj[n.a] += g * nodes_[n.b].value;
				adj[n.b] += g * nodes_[n.a].value;
				break;
			case Op::div: {
				const double bv = nodes_[n.b].value;
				adj[n.a] += g / bv;
				adj[n.b] -= g * n.value / bv;  // n.value = a/b, so a/b^2 = value/b
				break;
			}
			case Op::neg:
				adj[n.a] -= g;
				break;
			case Op::log:
				adj[n.a] += g / nodes_[n.a].value;
				break;
			case Op::exp:
				adj[n.a] += g * n.value;
				break;
			case Op::sqrt:
				adj[n.a] += g * 0.5 / n.value;
				break;
			case Op::abs: {
				const double x = nodes_[n.a].value;
				adj[n.a] += g * (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
				break;
			}
			case Op::tanh:
				adj[n.a] += g * (1.0 - n.value * n.value);
				break;
			case Op::sigmoid:
				adj[n.a] += g * n.value * (1.0 - n.value);
				break;
			case Op::softplus:
				adj[n.a] += g * stable_sigmoid(nodes_[n.a].value);
				break;
		}
	}
	// Constants are literals, not differentiable leaves: their slots read zero
	// even when an operation accumulated into them during the sweep.
	for (std::size_t i = 0; i < nodes_.size(); ++i) {
		if (nodes_[i].op == Op::constant) adj[i] = 0.0;
	}
	return adj;
}

namespace {
Tape& tape_of(Var a) { return *a.tape(); }
}  // namespace

Var operator+(Var a, Var b) { return tape_of(a).add(a, b); }
Var operator-(Var a, Var b) { return tape_of(a).sub(a, b); }
Var operator*(Var a, Var b) { return tape_of(a).mul(a, b); }
Var operator/(Var a, Var b) { return tape_of(a).div(a, b); }
Var operator-(Var a) { return tape_of(a).neg(a); }

Var operator+(Var a, double b) { return tape_of(a).add(a, tape_of(a).constant(b)); }
Var operator+(double a, Var b) { return tape_of(b).add(tape_of(b).constant(a), b); }
Var operator-(Var a, double b) { return tape_of(a).sub(a, tape_of(a).constant(b)); }
Var operator-(double a, Var b) { return tape_of(b).sub(tape_of(b).constant(a), b); }
Var operator*(Var a, double b) { return tape_of(a).mul(a, tape_of(a).constant(b)); }
Var operator*(double a, Var b) { return tape_of(b).mul(tape_of(b).constant(a), b); }
Var operator/(Var a, double b) { return tape_of(a).div(a, tape_of(a).constant(b)); }
Var operator/(double a, Var b) { return tape_of(b).div(tape_of(b).constant(a), b); }

Var log(Var a) { return tape_of(a).log(a); }
Var exp(Var a) { return tape_of(a).exp(a); }
Var sqrt(Var a) { return tape_of(a).sqrt(a); }
Var abs(Var a) { return tape_of(a).abs(a); }
Var tanh(Var a) { return tape_of(a).tanh(a); }
Var sigmoid(Var a) { return tape_of(a).sigmoid(a); }
Var softplus(Var a) { return tape_of(a).softplus(a); }

}  // namespace volcast::ad
