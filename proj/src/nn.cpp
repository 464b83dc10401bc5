#include "volcast/nn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "volcast/errors.hpp"
#include "volcast/math_util.hpp"

namespace volcast::nn {

namespace {

void require(bool ok, const std::string& msg) {
	if (!ok) throw std::invalid_argument(msg);
}

// Scalar adapters so the cell formulas instantiate for plain values and for
// tape variables alike.
template <class S>
struct Ops;

template <>
struct Ops<double> {
	static double sigmoid(double x) { return volcast::sigmoid(x); }
	static double softplus(double x) { return volcast::softplus(x); }
	static double tanh(double x) { return std::tanh(x); }
};

template <>
struct Ops<ad::Var> {
	static ad::Var sigmoid(ad::Var x) { return ad::sigmoid(x); }
	static ad::Var softplus(ad::Var x) { return ad::softplus(x); }
	static ad::Var tanh(ad::Var x) { return ad::tanh(x); }
};

// First T-1 weights (lambda_1..lambda_{T-1}) of the truncated long-memory
// expansion, written to match the classical recurrence operation for
// operation so both routes produce identical doubles.
template <class S>
std::vector<S> expand_weights(S beta, S phi, S d, int T) {
	std::vector<S> lam;
	lam.reserve(std::size_t(T - 1));
	S pi = -d;            // pi_1
	S c = pi - phi;       // c_1 = pi_1 - phi * pi_0
	S a = c + beta;       // a_1 = c_1 + beta * a_0
	lam.push_back(-a);
	for (int j = 2; j < T; ++j) {
		S pj = pi * (double(j) - 1.0 - d) / double(j);
		c = pj - phi * pi;
		a = c + beta * a;
		lam.push_back(-a);
		pi = pj;
	}
	return lam;
}

template <class S>
struct Decoded {
	garch::ModelKind kind = garch::ModelKind::garch11;
	bool has_gates = false;
	int T = 0;
	S omega, alpha, beta;  // garch11 / gjr
	S lambda_asym;         // gjr
	S intercept;           // figarch additive constant
	std::vector<S> lam;    // figarch lambda_1..lambda_{T-1}
	S Wf, Uf, bf, Wi, Ui, bi, Wc, Uc, bc, blend;
};

template <class S, class Lift>
Decoded<S> decode(const Model& m, Lift lift) {
	const ModelSpec& spec = m.spec();
	Decoded<S> p;
	p.kind = spec.kernel;
	std::size_t next = 0;
	switch (spec.kernel) {
		case garch::ModelKind::garch11: {
			p.omega = Ops<S>::softplus(lift(0));
			S u = Ops<S>::sigmoid(lift(1));
			S v = Ops<S>::sigmoid(lift(2));
			p.alpha = u * (1.0 - v);
			p.beta = u * v;
			next = 3;
			break;
		}
		case garch::ModelKind::gjr: {
			p.omega = Ops<S>::softplus(lift(0));
			S u = Ops<S>::sigmoid(lift(1));
			S v = Ops<S>::sigmoid(lift(2));
			S w = Ops<S>::sigmoid(lift(3));
			S rest = u * (1.0 - v);
			p.beta = u * v;
			p.alpha = rest * (1.0 - w);
			p.lambda_asym = 2.0 * (rest * w);
			next = 4;
			break;
		}
		case garch::ModelKind::figarch: {
			p.T = spec.truncation;
			p.omega = Ops<S>::softplus(lift(0));
			S fbeta = Ops<S>::sigmoid(lift(1));
			S fphi = Ops<S>::sigmoid(lift(2));
			S fd = Ops<S>::sigmoid(lift(3));
			p.beta = fbeta;
			p.intercept = spec.scaled_intercept ? p.omega / (1.0 - fbeta) : p.omega;
			p.lam = expand_weights<S>(fbeta, fphi, fd, spec.truncation);
			next = 4;
			break;
		}
	}
	if (spec.arch == Arch::garch_lstm) {
		p.has_gates = true;
		p.Wf = lift(next + 0);
		p.Uf = lift(next + 1);
		p.bf = lift(next + 2);
		p.Wi = lift(next + 3);
		p.Ui = lift(next + 4);
		p.bi = lift(next + 5);
		p.Wc = lift(next + 6);
		p.Uc = lift(next + 7);
		p.bc = lift(next + 8);
		p.blend = Ops<S>::sigmoid(lift(next + 9));
	}
	return p;
}

template <class S>
struct StateT {
	S sigma_sq;
	S c;
	std::vector<double> eps_sq;  // shocks are data on both paths
};

template <class S>
S kernel_step(const Decoded<S>& p, double eps_prev, const StateT<S>& st) {
	const double eps_sq = eps_prev * eps_prev;
	switch (p.kind) {
		case garch::ModelKind::garch11:
			return p.omega + p.alpha * eps_sq + p.beta * st.sigma_sq;
		case garch::ModelKind::gjr:
			if (eps_prev < 0.0) {
				return p.omega + p.alpha * eps_sq + p.lambda_asym * eps_sq + p.beta * st.sigma_sq;
			}
			return p.omega + p.alpha * eps_sq + p.beta * st.sigma_sq;
		case garch::ModelKind::figarch: {
			const std::size_t T = std::size_t(p.T);
			S acc = p.intercept;
			for (std::size_t j = 1; j < T; ++j) {
				acc = acc + p.lam[j - 1] * st.eps_sq[T - 1 - j];
			}
			return acc;
		}
	}
	throw std::logic_error("unknown kernel kind");
}

// One cell update: gates read the previous state, the kernel produces o_t,
// and the blended output becomes the recurrent variance.
template <class S>
S cell_step(const Decoded<S>& p, double eps_prev, StateT<S>& st) {
	if (p.kind == garch::ModelKind::figarch) {
		st.eps_sq.erase(st.eps_sq.begin());
		st.eps_sq.push_back(eps_prev * eps_prev);
	}
	S o = kernel_step(p, eps_prev, st);
	if (!p.has_gates) {
		st.sigma_sq = o;
		return o;
	}
	S f = Ops<S>::sigmoid(p.Wf * eps_prev + p.Uf * st.sigma_sq + p.bf);
	S i = Ops<S>::sigmoid(p.Wi * eps_prev + p.Ui * st.sigma_sq + p.bi);
	S cand = Ops<S>::tanh(p.Wc * eps_prev + p.Uc * st.sigma_sq + p.bc);
	S c = f * st.c + i * cand;
	S out = o * (1.0 + p.blend * Ops<S>::tanh(c));
	st.c = c;
	st.sigma_sq = out;
	return out;
}

Decoded<double> decode_values(const Model& m) {
	return decode<double>(m, [&](std::size_t i) { return m.raw()[i]; });
}

std::size_t kernel_raw_count(garch::ModelKind kind) {
	return kind == garch::ModelKind::garch11 ? 3 : 4;
}

void check_window(const Model& m, const CellState& st) {
	if (m.spec().kernel == garch::ModelKind::figarch) {
		const std::size_t want = std::size_t(m.spec().truncation - 1);
		require(st.eps_sq.size() == want,
		        "cell state window length must be truncation - 1");
	}
}

double safe_logit(double p) {
	return logit(std::clamp(p, 1e-9, 1.0 - 1e-9));
}

}  // namespace

const char* arch_name(Arch arch) {
	return arch == Arch::counterpart ? "counterpart" : "garch-lstm";
}

Arch parse_arch(const std::string& name) {
	if (name == "counterpart") return Arch::counterpart;
	if (name == "garch-lstm") return Arch::garch_lstm;
	throw std::invalid_argument("unknown architecture '" + name + "'");
}

std::size_t Model::raw_size(const ModelSpec& spec) {
	return kernel_raw_count(spec.kernel) + (spec.arch == Arch::garch_lstm ? 10 : 0);
}

Model Model::from_params(const ModelSpec& spec, const garch::ModelParams& params) {
	garch::validate(params);
	require(garch::kind_of(params) == spec.kernel, "parameter kind does not match the kernel");
	Model m;
	m.spec_ = spec;
	m.raw_.assign(raw_size(spec), 0.0);
	if (const auto* gp = std::get_if<garch::Garch11Params>(&params)) {
		const double u = gp->alpha + gp->beta;
		m.raw_[0] = softplus_inv(gp->omega);
		m.raw_[1] = safe_logit(u);
		m.raw_[2] = safe_logit(u > 0.0 ? gp->beta / u : 0.5);
	} else if (const auto* jp = std::get_if<garch::GjrParams>(&params)) {
		const double u = jp->alpha + jp->lambda_asym / 2.0 + jp->beta;
		const double v = u > 0.0 ? jp->beta / u : 0.5;
		const double rest = u * (1.0 - v);
		m.raw_[0] = softplus_inv(jp->omega);
		m.raw_[1] = safe_logit(u);
		m.raw_[2] = safe_logit(v);
		m.raw_[3] = safe_logit(rest > 0.0 ? (jp->lambda_asym / 2.0) / rest : 0.5);
	} else {
		const auto& fp = std::get<garch::FigarchParams>(params);
		m.spec_.truncation = fp.truncation;
		m.spec_.scaled_intercept = fp.scaled_intercept;
		m.raw_[0] = softplus_inv(fp.omega);
		m.raw_[1] = safe_logit(fp.beta);
		m.raw_[2] = safe_logit(fp.phi);
		m.raw_[3] = safe_logit(fp.d);
	}
	if (spec.arch == Arch::garch_lstm) {
		m.raw_[m.raw_.size() - 1] = safe_logit(0.1);
	}
	return m;
}

Model Model::init(const ModelSpec& spec, double sample_var) {
	require(sample_var > 0.0, "init: sample variance must be > 0");
	garch::ModelParams params;
	switch (spec.kernel) {
		case garch::ModelKind::garch11:
			params = garch::Garch11Params{0.10 * sample_var, 0.05, 0.85};
			break;
		case garch::ModelKind::gjr:
			params = garch::GjrParams{0.10 * sample_var, 0.03, 0.04, 0.85};
			break;
		case garch::ModelKind::figarch: {
			garch::FigarchParams fp;
			fp.omega = 0.10 * sample_var;
			fp.beta = 0.3;
			fp.phi = 0.2;
			fp.d = 0.4;
			fp.truncation = spec.truncation;
			fp.scaled_intercept = spec.scaled_intercept;
			params = fp;
			break;
		}
	}
	return from_params(spec, params);
}

garch::ModelParams Model::kernel_params() const {
	const Decoded<double> p = decode_values(*this);
	switch (spec_.kernel) {
		case garch::ModelKind::garch11:
			return garch::Garch11Params{p.omega, p.alpha, p.beta};
		case garch::ModelKind::gjr:
			return garch::GjrParams{p.omega, p.alpha, p.lambda_asym, p.beta};
		case garch::ModelKind::figarch: {
			garch::FigarchParams fp;
			fp.omega = p.omega;
			fp.beta = sigmoid(raw_[1]);
			fp.phi = sigmoid(raw_[2]);
			fp.d = sigmoid(raw_[3]);
			fp.truncation = spec_.truncation;
			fp.scaled_intercept = spec_.scaled_intercept;
			return fp;
		}
	}
	throw std::logic_error("unknown kernel kind");
}

double Model::blend() const {
	if (spec_.arch != Arch::garch_lstm) return 0.0;
	return sigmoid(raw_.back());
}

void Model::force_blend_zero() {
	require(spec_.arch == Arch::garch_lstm, "force_blend_zero: model has no blend weight");
	raw_.back() = -std::numeric_limits<double>::infinity();
}

CellState initial_state(const Model& model, double init_var) {
	require(init_var > 0.0, "initial_state: init variance must be > 0");
	CellState st;
	st.sigma_sq = init_var;
	st.c = 0.0;
	if (model.spec().kernel == garch::ModelKind::figarch) {
		st.eps_sq.assign(std::size_t(model.spec().truncation - 1), 0.0);
	}
	return st;
}

bool weights_feasible(const Model& model) {
	if (model.spec().kernel != garch::ModelKind::figarch) return true;
	const auto lam = expand_weights<double>(sigmoid(model.raw()[1]), sigmoid(model.raw()[2]),
	                                        sigmoid(model.raw()[3]), model.spec().truncation);
	for (double l : lam) {
		if (l < 0.0) return false;
	}
	return true;
}

double step_value(const Model& model, double eps_prev, CellState& state) {
	check_window(model, state);
	const Decoded<double> p = decode_values(model);
	StateT<double> st{state.sigma_sq, state.c, std::move(state.eps_sq)};
	const double out = cell_step(p, eps_prev, st);
	state = CellState{st.sigma_sq, st.c, std::move(st.eps_sq)};
	return out;
}

std::vector<double> roll_values(const Model& model, std::span<const double> eps,
                                CellState& state) {
	check_window(model, state);
	const Decoded<double> p = decode_values(model);
	StateT<double> st{state.sigma_sq, state.c, std::move(state.eps_sq)};
	std::vector<double> out;
	out.reserve(eps.size());
	for (double e : eps) {
		out.push_back(cell_step(p, e, st));
	}
	state = CellState{st.sigma_sq, st.c, std::move(st.eps_sq)};
	return out;
}

TapeRoll roll_chunk(ad::Tape& tape, const Model& model, std::span<const double> eps,
                    const CellState& start) {
	check_window(model, start);
	TapeRoll roll;
	roll.raw.reserve(model.raw().size());
	for (double v : model.raw()) {
		roll.raw.push_back(tape.input(v));
	}
	const Decoded<ad::Var> p =
	    decode<ad::Var>(model, [&](std::size_t i) { return roll.raw[i]; });
	for (const ad::Var& l : p.lam) {
		if (l.value() < 0.0) {
			throw NumericalError("roll_chunk: infeasible long-memory weights on the tape");
		}
	}
	StateT<ad::Var> st{tape.constant(start.sigma_sq), tape.constant(start.c), start.eps_sq};
	roll.out.reserve(eps.size());
	for (double e : eps) {
		roll.out.push_back(cell_step(p, e, st));
	}
	roll.end_state = CellState{st.sigma_sq.value(), st.c.value(), std::move(st.eps_sq)};
	return roll;
}

double forecast_window(const Model& model, std::span<const double> window, CellState state) {
	require(!window.empty(), "forecast_window: empty window");
	const auto out = roll_values(model, window, state);
	return out.back();
}

}  // namespace volcast::nn
