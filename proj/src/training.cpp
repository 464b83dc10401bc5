#include "volcast/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volcast/errors.hpp"
#include "volcast/garch.hpp"

namespace volcast::train {

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
	if (params.size() != grads.size()) {
		throw std::invalid_argument("adam_step: parameter/gradient size mismatch");
	}
	if (state.m.empty()) {
		state.m.assign(params.size(), 0.0);
		state.v.assign(params.size(), 0.0);
	}
	if (state.m.size() != params.size()) {
		throw std::invalid_argument("adam_step: moment state size mismatch");
	}
	++state.step;
	const double bc1 = 1.0 - std::pow(beta1, double(state.step));
	const double bc2 = 1.0 - std::pow(beta2, double(state.step));
	for (std::size_t i = 0; i < params.size(); ++i) {
		state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
		state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
		const double m_hat = state.m[i] / bc1;
		const double v_hat = state.v[i] / bc2;
		params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
	}
}

namespace {

double region_mean_square(std::span<const double> eps, std::size_t count) {
	double acc = 0.0;
	for (std::size_t i = 0; i < count; ++i) acc += eps[i] * eps[i];
	const double v = acc / double(count);
	if (!(v > 0.0)) {
		throw DataError("training task: zero variance over the train region");
	}
	return v;
}

std::vector<int> record_anchors(const WindowedDataset& part) {
	std::vector<int> anchors;
	anchors.reserve(part.size());
	for (const auto& rec : part.records) anchors.push_back(rec.anchor);
	return anchors;
}

}  // namespace

SeriesTask make_task(const ReturnSeries& returns, const SplitDataset& split, TargetKind target,
                     int horizon) {
	check_no_leakage(split);
	if (split.train.size() == 0 || split.val.size() == 0) {
		throw DataError("training task: empty train or val partition");
	}
	if (horizon != split.train.h) {
		throw std::invalid_argument("training task: horizon does not match the dataset");
	}
	SeriesTask task;
	task.train_anchors = record_anchors(split.train);
	task.val_anchors = record_anchors(split.val);

	auto targets_of = [&](const WindowedDataset& part) {
		std::vector<double> t;
		t.reserve(part.size());
		for (const auto& rec : part.records) {
			if (target == TargetKind::realized_var) {
				t.push_back(rec.target_sq);
			} else {
				const double e = returns.values.at(std::size_t(rec.anchor + horizon));
				t.push_back(e * e);
			}
		}
		return t;
	};
	task.train_targets = targets_of(split.train);
	task.val_targets = targets_of(split.val);

	const std::size_t upto = std::size_t(task.val_anchors.back()) + 1;
	task.eps.assign(returns.values.begin(), returns.values.begin() + std::ptrdiff_t(upto));
	task.init_var = region_mean_square(task.eps, std::size_t(task.train_anchors.back()) + 1);
	return task;
}

SeriesTask make_onestep_task(std::span<const double> eps, double val_fraction) {
	if (eps.size() < 20) {
		throw DataError("training task: series too short");
	}
	if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
		throw std::invalid_argument("training task: val fraction must be in (0,1)");
	}
	// Output at anchor i predicts the variance of the next shock.
	const std::size_t n_anchor = eps.size() - 1;
	const std::size_t n_val = std::max<std::size_t>(1, std::size_t(double(n_anchor) * val_fraction));
	const std::size_t n_train = n_anchor - n_val;
	if (n_train == 0) {
		throw DataError("training task: no training anchors left");
	}
	SeriesTask task;
	task.eps.assign(eps.begin(), eps.end() - 1);
	for (std::size_t i = 0; i < n_anchor; ++i) {
		const double target = eps[i + 1] * eps[i + 1];
		if (i < n_train) {
			task.train_anchors.push_back(int(i));
			task.train_targets.push_back(target);
		} else {
			task.val_anchors.push_back(int(i));
			task.val_targets.push_back(target);
		}
	}
	task.init_var = region_mean_square(task.eps, n_train);
	return task;
}

namespace {

double anchors_loss(std::span<const double> outputs, std::span<const int> anchors,
                    std::span<const double> targets, const LossKind& loss) {
	double acc = 0.0;
	for (std::size_t i = 0; i < anchors.size(); ++i) {
		acc += point_loss(loss, targets[i], outputs[std::size_t(anchors[i])]);
	}
	return acc / double(anchors.size());
}

// Keeps the figarch kernel inside the non-negative-weight region: if an
// update leaves it, walk d back toward the last feasible value (the other
// raw slots keep their new values), reverting the whole triple when even
// that d is infeasible under the new (beta, phi).
class FeasibilityGuard {
public:
	explicit FeasibilityGuard(const nn::Model& model)
	    : active_(model.spec().kernel == garch::ModelKind::figarch) {
		if (active_) remember(model);
	}

	void project(nn::Model& model) {
		if (!active_) return;
		if (nn::weights_feasible(model)) {
			remember(model);
			return;
		}
		auto& raw = model.raw();
		const double d_new = raw[3];
		raw[3] = d_last_;
		if (!nn::weights_feasible(model)) {
			raw[1] = beta_last_;
			raw[2] = phi_last_;
			return;
		}
		double lo = d_last_, hi = d_new;
		for (int iter = 0; iter < 20; ++iter) {
			const double mid = 0.5 * (lo + hi);
			raw[3] = mid;
			(nn::weights_feasible(model) ? lo : hi) = mid;
		}
		raw[3] = lo;
		remember(model);
	}

private:
	void remember(const nn::Model& model) {
		beta_last_ = model.raw()[1];
		phi_last_ = model.raw()[2];
		d_last_ = model.raw()[3];
	}
	bool active_;
	double beta_last_ = 0.0, phi_last_ = 0.0, d_last_ = 0.0;
};

}  // namespace

double task_loss(const nn::Model& model, const SeriesTask& task, const LossKind& loss,
                 bool validation) {
	const auto& anchors = validation ? task.val_anchors : task.train_anchors;
	const auto& targets = validation ? task.val_targets : task.train_targets;
	if (anchors.empty()) {
		throw std::invalid_argument("task_loss: no anchors");
	}
	nn::CellState state = nn::initial_state(model, task.init_var);
	const std::size_t upto = std::size_t(anchors.back()) + 1;
	const auto out = roll_values(model, std::span(task.eps).first(upto), state);
	return anchors_loss(out, anchors, targets, loss);
}

std::pair<nn::Model, TrainHistory> train(const nn::Model& start, const SeriesTask& task,
                                         const TrainConfig& cfg) {
	if (task.train_anchors.empty() || task.val_anchors.empty()) {
		throw std::invalid_argument("train: task has empty anchor sets");
	}
	if (task.train_anchors.size() != task.train_targets.size() ||
	    task.val_anchors.size() != task.val_targets.size()) {
		throw std::invalid_argument("train: anchor/target size mismatch");
	}
	if (!nn::weights_feasible(start)) {
		throw std::invalid_argument("train: start model has infeasible weights");
	}

	TrainHistory history;
	history.best_val = std::numeric_limits<double>::infinity();
	nn::Model model = start;
	if (cfg.max_epochs <= 0) {
		return {model, history};
	}

	AdamState adam;
	FeasibilityGuard guard(model);
	double lr = cfg.lr;
	std::vector<double> best_raw = model.raw();
	int plateau = 0, since_best = 0;

	const nn::CellState state0 = nn::initial_state(model, task.init_var);
	const std::size_t train_upto = std::size_t(task.train_anchors.back()) + 1;

	auto check_finite = [](double loss, int epoch, const char* what) {
		if (!std::isfinite(loss)) {
			throw NumericalError("train: non-finite " + std::string(what) + " loss at epoch " +
			                     std::to_string(epoch));
		}
	};

	for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
		double train_loss = 0.0;
		if (cfg.regime == Regime::full_sequence) {
			ad::Tape tape;
			const auto roll =
			    nn::roll_chunk(tape, model, std::span(task.eps).first(train_upto), state0);
			ad::Var loss_var;
			for (std::size_t i = 0; i < task.train_anchors.size(); ++i) {
				ad::Var term = point_loss(cfg.loss, task.train_targets[i],
				                          roll.out[std::size_t(task.train_anchors[i])]);
				loss_var = i == 0 ? term : loss_var + term;
			}
			loss_var = loss_var / double(task.train_anchors.size());
			train_loss = loss_var.value();
			check_finite(train_loss, epoch, "train");
			const auto adjoints = tape.backward(loss_var);
			std::vector<double> grads(model.raw().size());
			for (std::size_t i = 0; i < grads.size(); ++i) {
				grads[i] = adjoints[std::size_t(roll.raw[i].id())];
			}
			adam_step(model.raw(), grads, adam, lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
			guard.project(model);
		} else {
			nn::CellState state = state0;
			std::size_t consumed = 0;
			double loss_sum = 0.0;
			std::size_t batches = 0;
			for (std::size_t b = 0; b < task.train_anchors.size(); b += std::size_t(cfg.batch_size)) {
				const std::size_t e = std::min(b + std::size_t(cfg.batch_size),
				                               task.train_anchors.size());
				const std::size_t last = std::size_t(task.train_anchors[e - 1]);
				ad::Tape tape;
				const auto chunk = std::span(task.eps).subspan(consumed, last + 1 - consumed);
				const auto roll = nn::roll_chunk(tape, model, chunk, state);
				ad::Var loss_var;
				for (std::size_t i = b; i < e; ++i) {
					const std::size_t idx = std::size_t(task.train_anchors[i]) - consumed;
					ad::Var term = point_loss(cfg.loss, task.train_targets[i], roll.out[idx]);
					loss_var = i == b ? term : loss_var + term;
				}
				loss_var = loss_var / double(e - b);
				check_finite(loss_var.value(), epoch, "batch");
				loss_sum += loss_var.value();
				++batches;
				const auto adjoints = tape.backward(loss_var);
				std::vector<double> grads(model.raw().size());
				for (std::size_t i = 0; i < grads.size(); ++i) {
					grads[i] = adjoints[std::size_t(roll.raw[i].id())];
				}
				adam_step(model.raw(), grads, adam, lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
				guard.project(model);
				// State crosses the batch boundary as detached values under
				// the pre-update parameters.
				state = roll.end_state;
				consumed = last + 1;
			}
			train_loss = loss_sum / double(batches);
		}

		const double val_loss = task_loss(model, task, cfg.loss, true);
		check_finite(val_loss, epoch, "val");
		history.epochs.push_back({epoch, train_loss, val_loss, lr});

		if (val_loss < history.best_val) {
			history.best_val = val_loss;
			history.best_epoch = epoch;
			best_raw = model.raw();
			plateau = 0;
			since_best = 0;
		} else {
			++plateau;
			++since_best;
			if (since_best >= cfg.early_stop_patience) {
				history.stop_reason = "early-stop";
				break;
			}
			if (plateau >= cfg.plateau_patience) {
				lr *= cfg.plateau_factor;
				plateau = 0;
			}
		}
	}
	if (history.stop_reason.empty()) {
		history.stop_reason = "max-epochs";
	}
	model.raw() = best_raw;
	return {model, history};
}

}  // namespace volcast::train
