#pragma once

#include <span>
#include <vector>

#include "volcast/autodiff.hpp"
#include "volcast/garch.hpp"

namespace volcast::nn {

enum class Arch { counterpart, garch_lstm };

const char* arch_name(Arch arch);
Arch parse_arch(const std::string& name);

struct ModelSpec {
	Arch arch = Arch::counterpart;
	garch::ModelKind kernel = garch::ModelKind::garch11;
	int truncation = 50;  // figarch kernel only
	bool scaled_intercept = false;
};

// Trainable model over an unconstrained raw vector. Constrained values are
// produced through softplus (positivity) and logistic (unit-interval /
// simplex-share) transforms, so every raw vector maps into the feasible
// region except for the figarch weight condition, which is handled by the
// trainer's projection.
//
// Raw layout: kernel slots first
//   garch11: [omega, u, v]            alpha = s(u)(1-s(v)), beta = s(u)s(v)
//   gjr:     [omega, u, v, w]         asymmetric share w of the non-beta mass
//   figarch: [omega, beta, phi, d]
// then, for garch_lstm, the gate slots
//   [Wf, Uf, bf, Wi, Ui, bi, Wc, Uc, bc, blend]
class Model {
public:
	Model() = default;

	// Kernel near the persistent-GARCH baseline, gates at zero, blend near
	// 0.1; omega scaled to the data variance.
	static Model init(const ModelSpec& spec, double sample_var);

	// Exact raw encoding of the given kernel parameters (gates zero).
	static Model from_params(const ModelSpec& spec, const garch::ModelParams& params);

	const ModelSpec& spec() const { return spec_; }
	std::vector<double>& raw() { return raw_; }
	const std::vector<double>& raw() const { return raw_; }

	garch::ModelParams kernel_params() const;  // constrained snapshot
	double blend() const;                      // w; 0 for counterpart arch
	// Pins the blend weight to exactly 0 (raw -inf), reducing the cell to
	// its bare kernel.
	void force_blend_zero();

	static std::size_t raw_size(const ModelSpec& spec);

private:
	ModelSpec spec_;
	std::vector<double> raw_;
};

// Recurrent state between steps. The figarch window holds the last T-1
// observed squared shocks (oldest first, zero-padded); shocks are data, so
// the window is plain doubles on both the value and tape paths.
struct CellState {
	double sigma_sq = 0.0;
	double c = 0.0;
	std::vector<double> eps_sq;
};

// State before any shock is consumed: sigma_sq = init_var (ignored by the
// figarch kernel arithmetic but still fed to the gates), c = 0, zero window.
CellState initial_state(const Model& model, double init_var);

// False when the figarch kernel's current weights violate non-negativity.
bool weights_feasible(const Model& model);

// Value path: consumes one shock, advances the state, returns sigma_sq.
// Matches the classical step arithmetic bit for bit at equal parameters.
double step_value(const Model& model, double eps_prev, CellState& state);

// Value path over a span; out[i] is the variance after consuming eps[i].
std::vector<double> roll_values(const Model& model, std::span<const double> eps,
                                CellState& state);

// Tape path for training: raw parameters become input leaves, the
// constrained transforms and figarch weights are recorded once, and the
// recursion is unrolled over the span.
struct TapeRoll {
	std::vector<ad::Var> raw;   // leaves, same order as Model::raw()
	std::vector<ad::Var> out;   // variance per consumed shock
	CellState end_state;        // detached, for carrying across chunks
};
TapeRoll roll_chunk(ad::Tape& tape, const Model& model, std::span<const double> eps,
                    const CellState& start);

// Direct h-step forecast: consume the window, return the final output. The
// horizon is implicit in what the model was trained against.
double forecast_window(const Model& model, std::span<const double> window, CellState state);

}  // namespace volcast::nn
