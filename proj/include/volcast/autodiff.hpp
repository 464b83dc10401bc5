#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace volcast::ad {

class Tape;

// Handle to a scalar recorded on a Tape. Cheap to copy; values are
// computed eagerly so value() is always available.
class Var {
public:
	Var() = default;
	double value() const { return value_; }
	int id() const { return id_; }
	Tape* tape() const { return tape_; }

private:
	friend class Tape;
	Var(Tape* tape, int id, double value) : tape_(tape), id_(id), value_(value) {}
	Tape* tape_ = nullptr;
	int id_ = -1;
	double value_ = 0.0;
};

// Append-only record of scalar primitives in topological order.
// One tape per loss evaluation; backward() walks it once in reverse.
class Tape {
public:
	Var input(double value);     // differentiable leaf
	Var constant(double value);  // literal; zero adjoint

	Var add(Var a, Var b);
	Var sub(Var a, Var b);
	Var mul(Var a, Var b);
	Var div(Var a, Var b);
	Var neg(Var a);
	Var log(Var a);
	Var exp(Var a);
	Var sqrt(Var a);
	Var abs(Var a);  // derivative sign(x), 0 at x = 0 (piecewise constant)
	Var tanh(Var a);
	Var sigmoid(Var a);
	Var softplus(Var a);

	// Adjoints of `output` w.r.t. every node, indexed by Var::id().
	std::vector<double> backward(Var output) const;

	std::size_t size() const { return nodes_.size(); }
	void clear() { nodes_.clear(); }
	void reserve(std::size_t n) { nodes_.reserve(n); }

private:
	enum class Op : std::uint8_t {
		input, constant,
		add, sub, mul, div, neg,
		log, exp, sqrt, abs, tanh, sigmoid, softplus,
	};
	struct Node {
		Op op;
		int a = -1;
		int b = -1;
		double value = 0.0;
	};

	Var push(Op op, int a, int b, double value);
	int require(Var v) const;  // same-tape guard

	std::vector<Node> nodes_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

Var log(Var a);
Var exp(Var a);
Var sqrt(Var a);
Var abs(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var softplus(Var a);

}  // namespace volcast::ad
