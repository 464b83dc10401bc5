#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "volcast/errors.hpp"
#include "volcast/eval.hpp"
#include "volcast/garch.hpp"
#include "volcast/kvio.hpp"
#include "volcast/mle.hpp"
#include "volcast/nn.hpp"
#include "volcast/timeseries.hpp"
#include "volcast/training.hpp"

namespace {

using namespace volcast;

constexpr const char* kVersion = "1.0.0";
const double kUnset = std::numeric_limits<double>::quiet_NaN();

std::string out_path(const std::string& dir, const std::string& name) {
	return (std::filesystem::path(dir) / name).string();
}

// Every command writes its artifacts plus a manifest that echoes the run
// configuration. Nothing here depends on the clock, so identical invocations
// produce byte-identical directories.
struct Outputs {
	std::string dir;
	kvio::Doc manifest;
	std::vector<std::string> names;

	Outputs(std::string out_dir, const std::string& command) : dir(std::move(out_dir)) {
		if (dir.empty()) throw std::invalid_argument("--out directory is required");
		std::filesystem::create_directories(dir);
		manifest.put("command", command);
		manifest.put("version", std::string(kVersion));
	}
	void doc(const std::string& name, const kvio::Doc& d) {
		kvio::write_doc(out_path(dir, name), d);
		names.push_back(name);
	}
	void table(const std::string& name, const kvio::Table& t) {
		kvio::write_table(out_path(dir, name), t);
		names.push_back(name);
	}
	void finish() {
		std::string joined;
		for (const auto& n : names) {
			if (!joined.empty()) joined += ',';
			joined += n;
		}
		manifest.put("outputs", joined);
		kvio::write_doc(out_path(dir, "manifest.kv"), manifest);
		std::cout << "wrote " << names.size() + 1 << " files under " << dir << "\n";
	}
};

struct DataOptions {
	std::string path;
	double scale = 100.0;
	int k = 5;
};

void add_data_flags(CLI::App* cmd, DataOptions& data) {
	cmd->add_option("--data", data.path, "price table with Date and Close columns")->required();
	cmd->add_option("--scale", data.scale, "log-return multiplier (default 100)");
	cmd->add_option("--k", data.k, "realized-variance window in days (default 5)");
}

// Ingestion shared by every data-driven command: prices -> returns ->
// realized volatility -> anchored records -> ordered train/val/test split.
struct Pipeline {
	ReturnSeries returns;
	VolSeries vol;
	SplitDataset split;
	double train_init_var = 0.0;  // mean squared return over the train region
	int last_train_anchor = 0;
	int last_val_anchor = 0;
};

Pipeline load_pipeline(const DataOptions& data, int horizon) {
	if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
	Pipeline p;
	const PriceSeries prices = load_prices(data.path);
	p.returns = log_returns(prices, data.scale);
	p.vol = realized_volatility(p.returns, data.k);
	const WindowedDataset ds = build_dataset(p.returns, p.vol, data.k, horizon);
	p.split = split_dataset(ds);
	check_no_leakage(p.split);
	p.last_train_anchor = p.split.train.records.back().anchor;
	p.last_val_anchor = p.split.val.records.back().anchor;
	const std::size_t upto = std::size_t(p.last_train_anchor) + 1;
	double acc = 0.0;
	for (std::size_t i = 0; i < upto; ++i) acc += p.returns.values[i] * p.returns.values[i];
	p.train_init_var = acc / double(upto);
	return p;
}

LossKind make_loss(const std::string& name, double dof) {
	if (name == "n") return LossKind::n();
	if (name == "t") return LossKind::t(dof);
	if (name == "mse") return LossKind::mse();
	throw std::invalid_argument("unknown loss '" + name + "'");
}

std::vector<int> normalize_horizons(std::vector<int> horizons) {
	if (horizons.empty()) throw std::invalid_argument("at least one horizon is required");
	for (int h : horizons) {
		if (h < 1) throw std::invalid_argument("horizons must be >= 1");
	}
	std::sort(horizons.begin(), horizons.end());
	horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
	return horizons;
}

std::string join_ints(const std::vector<int>& values) {
	std::string joined;
	for (int v : values) {
		if (!joined.empty()) joined += ',';
		joined += std::to_string(v);
	}
	return joined;
}

std::string label_of(const std::string& path) {
	return std::filesystem::path(path).stem().string();
}

// Generator / ground-truth parameter flags; NaN means "use the per-model
// default", so one flag set serves all three kinds.
struct ParamFlags {
	double omega = kUnset;
	double alpha = kUnset;
	double lambda = kUnset;
	double beta = kUnset;
	double phi = kUnset;
	double d = kUnset;
	int truncation = 50;
};

void add_param_flags(CLI::App* cmd, ParamFlags& p) {
	cmd->add_option("--omega", p.omega, "variance intercept (default 0.1)");
	cmd->add_option("--alpha", p.alpha, "shock coefficient");
	cmd->add_option("--lambda", p.lambda, "negative-shock add-on (gjr)");
	cmd->add_option("--beta", p.beta, "persistence");
	cmd->add_option("--phi", p.phi, "short-memory coefficient (figarch)");
	cmd->add_option("--d", p.d, "fractional order (figarch)");
	cmd->add_option("--truncation", p.truncation, "figarch weight count (default 50)");
}

double pick(double flag, double fallback) {
	return std::isnan(flag) ? fallback : flag;
}

garch::ModelParams resolve_params(garch::ModelKind kind, const ParamFlags& f) {
	garch::ModelParams params;
	switch (kind) {
		case garch::ModelKind::garch11:
			params = garch::Garch11Params{pick(f.omega, 0.1), pick(f.alpha, 0.1), pick(f.beta, 0.8)};
			break;
		case garch::ModelKind::gjr:
			params = garch::GjrParams{pick(f.omega, 0.1), pick(f.alpha, 0.1), pick(f.lambda, 0.1),
			                          pick(f.beta, 0.7)};
			break;
		case garch::ModelKind::figarch: {
			garch::FigarchParams fp;
			fp.omega = pick(f.omega, 0.1);
			fp.beta = pick(f.beta, 0.3);
			fp.phi = pick(f.phi, 0.2);
			fp.d = pick(f.d, 0.4);
			fp.truncation = f.truncation;
			params = fp;
			break;
		}
	}
	garch::validate(params);
	return params;
}

std::vector<std::pair<std::string, double>> numeric_fields(const garch::ModelParams& params) {
	std::vector<std::pair<std::string, double>> fields;
	const kvio::Doc doc = kvio::params_to_doc(params);
	for (const auto& [key, value] : doc.items()) {
		if (key == "kind" || key == "truncation" || key == "scaled_intercept") continue;
		fields.emplace_back(key, kvio::parse_double(value));
	}
	return fields;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
	std::string model = "garch11";
	std::size_t n = 5000;
	std::uint64_t seed = 1;
	int batch_seeds = 0;  // 0 = single series
	bool emit_prices = false;
	std::string innov = "normal";
	double dof = 5.0;
	double scale = 100.0;
	std::string out;
};

void cmd_simulate(const SimulateOptions& o, const ParamFlags& pf) {
	const garch::ModelKind kind = garch::parse_kind(o.model);
	const garch::ModelParams truth = resolve_params(kind, pf);
	const garch::Innovations innov =
	    o.innov == "t" ? garch::Innovations::student_t(o.dof) : garch::Innovations::normal();
	if (o.batch_seeds < 0) throw std::invalid_argument("--batch-seeds must be >= 0");

	Outputs outputs(o.out, "simulate");
	const Day start = parse_date("2000-01-03");
	const int groups = std::max(1, o.batch_seeds);
	for (int g = 0; g < groups; ++g) {
		const std::uint64_t seed = o.seed + std::uint64_t(g);
		const garch::SimResult sim = garch::simulate(truth, o.n, seed, innov);
		const std::string tag = groups == 1 ? "" : "_seed" + std::to_string(seed);

		kvio::Table returns;
		returns.header = {"Date", "Return"};
		kvio::Table sigma;
		sigma.header = {"Date", "SigmaSq"};
		for (std::size_t t = 0; t < sim.eps.size(); ++t) {
			const std::string date = format_date(start + Day(t));
			returns.add_row({date, kvio::format_double(sim.eps[t])});
			sigma.add_row({date, kvio::format_double(sim.sigma_sq[t])});
		}
		outputs.table("returns" + tag + ".csv", returns);
		outputs.table("sigma" + tag + ".csv", sigma);

		if (o.emit_prices) {
			// invertible by the ingestion path: r_t = scale * ln(P_t / P_{t-1})
			kvio::Table prices;
			prices.header = {"Date", "Close"};
			double close = 100.0;
			prices.add_row({format_date(start - 1), kvio::format_double(close)});
			for (std::size_t t = 0; t < sim.eps.size(); ++t) {
				close *= std::exp(sim.eps[t] / o.scale);
				prices.add_row({format_date(start + Day(t)), kvio::format_double(close)});
			}
			outputs.table("prices" + tag + ".csv", prices);
		}
	}

	kvio::Doc truth_doc = kvio::params_to_doc(truth);
	truth_doc.put("innovations", o.innov == "t" ? std::string("student_t") : std::string("normal"));
	if (o.innov == "t") truth_doc.put("innovation_dof", o.dof);
	truth_doc.put("n", static_cast<long long>(o.n));
	truth_doc.put("seed", static_cast<long long>(o.seed));
	outputs.doc("truth.kv", truth_doc);

	outputs.manifest.put("model", o.model);
	outputs.manifest.put("n", static_cast<long long>(o.n));
	outputs.manifest.put("seed", static_cast<long long>(o.seed));
	outputs.manifest.put("batch_seeds", o.batch_seeds);
	outputs.manifest.put("innovations", o.innov);
	outputs.manifest.put("scale", o.scale);
	outputs.manifest.put("emit_prices", o.emit_prices ? 1 : 0);
	outputs.finish();
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
	DataOptions data;
	std::string model = "garch11";
	std::string loss = "n";
	double dof = 5.0;
	int horizon = 1;
	int truncation = 50;
	std::string out;
};

void cmd_fit(const FitOptions& o) {
	const Pipeline p = load_pipeline(o.data, o.horizon);
	// the likelihood consumes shocks through the last validation anchor;
	// test days stay unseen
	const std::span<const double> eps(p.returns.values);
	const auto eps_fit = eps.first(std::size_t(p.last_val_anchor) + 1);
	garch::FitConfig cfg;
	cfg.loss = make_loss(o.loss, o.dof);
	cfg.figarch_truncation = o.truncation;
	const auto [params, report] = garch::fit_mle(garch::parse_kind(o.model), eps_fit, cfg);

	Outputs outputs(o.out, "fit");
	outputs.doc("params.kv", kvio::params_to_doc(params));
	kvio::Doc rep;
	rep.put("iterations", report.iterations);
	rep.put("evaluations", report.evaluations);
	rep.put("initial_loss", report.initial_loss);
	rep.put("final_loss", report.final_loss);
	rep.put("converged", report.converged ? 1 : 0);
	outputs.doc("fit_report.kv", rep);

	outputs.manifest.put("data", o.data.path);
	outputs.manifest.put("model", o.model);
	outputs.manifest.put("loss", o.loss);
	if (o.loss == "t") outputs.manifest.put("dof", o.dof);
	outputs.manifest.put("k", o.data.k);
	outputs.manifest.put("horizon", o.horizon);
	outputs.manifest.put("scale", o.data.scale);
	outputs.manifest.put("leakage_check", std::string("pass"));
	outputs.finish();
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
	DataOptions data;
	std::string model = "garch-lstm";
	std::string kernel = "gjr";
	bool counterpart = false;
	std::string loss = "n";
	double dof = 5.0;
	std::vector<int> horizons{1};
	std::string target = "auto";  // auto | eps | realized
	double lr = 1e-2;
	int max_epochs = 150;
	int batch_size = 64;
	bool grid = false;
	std::uint64_t seed = 0;
	int truncation = 50;
	std::string out;
};

nn::ModelSpec resolve_spec(const TrainOptions& o) {
	nn::ModelSpec spec;
	if (o.model == "garch-lstm") {
		if (o.counterpart) {
			throw std::invalid_argument("--counterpart applies to classical kernels, not garch-lstm");
		}
		spec.arch = nn::Arch::garch_lstm;
		spec.kernel = garch::parse_kind(o.kernel);
	} else {
		if (!o.counterpart) {
			throw std::invalid_argument(
			    "train builds NN models: pass --counterpart for a classical kernel, or use fit");
		}
		spec.arch = nn::Arch::counterpart;
		spec.kernel = garch::parse_kind(o.model);
	}
	spec.truncation = o.truncation;
	return spec;
}

// Five log-spaced learning rates across [3e-4, 3e-2], largest first.
std::vector<double> grid_rates() {
	std::vector<double> rates;
	for (int i = 0; i < 5; ++i) rates.push_back(3e-2 * std::pow(10.0, -0.5 * double(i)));
	return rates;
}

void cmd_train(const TrainOptions& o) {
	const nn::ModelSpec spec = resolve_spec(o);
	const std::vector<int> horizons = normalize_horizons(o.horizons);
	train::TargetKind target;
	if (o.target == "eps") {
		target = train::TargetKind::eps_sq;
	} else if (o.target == "realized") {
		target = train::TargetKind::realized_var;
	} else {
		// counterparts fit the one-step likelihood; the lstm learns the
		// horizon's realized variance directly
		target = spec.arch == nn::Arch::counterpart ? train::TargetKind::eps_sq
		                                            : train::TargetKind::realized_var;
	}

	Outputs outputs(o.out, "train");
	std::string chosen_lrs;
	for (int h : horizons) {
		const Pipeline p = load_pipeline(o.data, h);
		const train::SeriesTask task = train::make_task(p.returns, p.split, target, h);
		train::TrainConfig cfg;
		cfg.lr = o.lr;
		cfg.loss = make_loss(o.loss, o.dof);
		cfg.horizon = h;
		cfg.max_epochs = o.max_epochs;
		cfg.batch_size = o.batch_size;
		cfg.seed = o.seed;
		cfg.regime = spec.arch == nn::Arch::counterpart ? train::Regime::full_sequence
		                                                : train::Regime::minibatch;
		cfg.target = target;

		const nn::Model start = nn::Model::init(spec, task.init_var);
		nn::Model best_model;
		train::TrainHistory best_history;
		double chosen_lr = cfg.lr;
		if (o.grid) {
			kvio::Table grid;
			grid.header = {"LR", "BestEpoch", "BestVal", "Epochs"};
			bool first = true;
			for (double lr : grid_rates()) {
				cfg.lr = lr;
				auto [model, history] = train::train(start, task, cfg);
				grid.add_row({kvio::format_double(lr), std::to_string(history.best_epoch),
				              kvio::format_double(history.best_val),
				              std::to_string(history.epochs.size())});
				if (first || history.best_val < best_history.best_val) {
					best_model = std::move(model);
					best_history = std::move(history);
					chosen_lr = lr;
					first = false;
				}
			}
			outputs.table("grid_h" + std::to_string(h) + ".csv", grid);
		} else {
			auto [model, history] = train::train(start, task, cfg);
			best_model = std::move(model);
			best_history = std::move(history);
		}

		const std::string hs = std::to_string(h);
		kvio::Doc ckpt = kvio::checkpoint_to_doc(best_model);
		ckpt.put("horizon", h);
		outputs.doc("checkpoint_h" + hs + ".kv", ckpt);

		kvio::Table history_table;
		history_table.header = {"Epoch", "TrainLoss", "ValLoss", "LR"};
		for (const auto& e : best_history.epochs) {
			history_table.add_row({std::to_string(e.epoch), kvio::format_double(e.train_loss),
			                       kvio::format_double(e.val_loss), kvio::format_double(e.lr)});
		}
		outputs.table("history_h" + hs + ".csv", history_table);

		kvio::Doc rep;
		rep.put("horizon", h);
		rep.put("lr", chosen_lr);
		rep.put("best_epoch", best_history.best_epoch);
		rep.put("best_val", best_history.best_val);
		rep.put("epochs", static_cast<long long>(best_history.epochs.size()));
		rep.put("stop_reason", best_history.stop_reason.empty() ? std::string("none")
		                                                        : best_history.stop_reason);
		outputs.doc("train_report_h" + hs + ".kv", rep);

		if (spec.arch == nn::Arch::counterpart) {
			outputs.doc("params_h" + hs + ".kv", kvio::params_to_doc(best_model.kernel_params()));
		}
		if (!chosen_lrs.empty()) chosen_lrs += ',';
		chosen_lrs += kvio::format_double(chosen_lr);
	}

	outputs.manifest.put("data", o.data.path);
	outputs.manifest.put("arch", std::string(nn::arch_name(spec.arch)));
	outputs.manifest.put("kernel", std::string(garch::kind_name(spec.kernel)));
	outputs.manifest.put("loss", o.loss);
	if (o.loss == "t") outputs.manifest.put("dof", o.dof);
	outputs.manifest.put("target", target == train::TargetKind::eps_sq ? std::string("eps")
	                                                                   : std::string("realized"));
	outputs.manifest.put("horizons", join_ints(horizons));
	outputs.manifest.put("lr", chosen_lrs);
	outputs.manifest.put("grid", o.grid ? 1 : 0);
	outputs.manifest.put("max_epochs", o.max_epochs);
	outputs.manifest.put("seed", static_cast<long long>(o.seed));
	outputs.manifest.put("k", o.data.k);
	outputs.manifest.put("scale", o.data.scale);
	outputs.manifest.put("leakage_check", std::string("pass"));
	outputs.finish();
}

// ---------------------------------------------------------------------------
// forecast / evaluate

eval::ForecastSeries classical_forecasts(const garch::ModelParams& params, const Pipeline& p,
                                         int h) {
	eval::ForecastSeries fc;
	fc.horizon = h;
	const auto trace =
	    garch::filter_series(params, p.returns.values, garch::VarianceInit::fixed(p.train_init_var));
	const std::span<const double> eps(p.returns.values);
	for (const auto& rec : p.split.test.records) {
		fc.anchor_stamps.push_back(rec.stamp);
		fc.target_stamps.push_back(rec.target_stamp);
		fc.sigma_hat_sq.push_back(garch::forecast_realized(params,
		                                                   eps.first(std::size_t(rec.anchor) + 1),
		                                                   trace[std::size_t(rec.anchor)], h,
		                                                   p.vol.window));
	}
	return fc;
}

// One pass across the series; the output after consuming the anchor day is
// the model's trained h-step prediction.
eval::ForecastSeries direct_forecasts(const nn::Model& model, const Pipeline& p, int h) {
	eval::ForecastSeries fc;
	fc.horizon = h;
	nn::CellState state = nn::initial_state(model, p.train_init_var);
	const std::size_t upto = std::size_t(p.split.test.records.back().anchor) + 1;
	const auto out = nn::roll_values(model, std::span(p.returns.values).first(upto), state);
	for (const auto& rec : p.split.test.records) {
		fc.anchor_stamps.push_back(rec.stamp);
		fc.target_stamps.push_back(rec.target_stamp);
		fc.sigma_hat_sq.push_back(out[std::size_t(rec.anchor)]);
	}
	return fc;
}

kvio::Table forecast_table(const eval::ForecastSeries& fc) {
	kvio::Table t;
	t.header = {"AnchorDate", "TargetDate", "SigmaHatSq"};
	for (std::size_t i = 0; i < fc.size(); ++i) {
		t.add_row({format_date(fc.anchor_stamps[i]), format_date(fc.target_stamps[i]),
		           kvio::format_double(fc.sigma_hat_sq[i])});
	}
	return t;
}

struct ForecastOptions {
	DataOptions data;
	std::string params_path;
	std::string checkpoint_path;
	std::vector<int> horizons{1, 3, 5, 10, 21};
	std::string out;
};

void cmd_forecast(const ForecastOptions& o) {
	const bool have_params = !o.params_path.empty();
	const bool have_ckpt = !o.checkpoint_path.empty();
	if (have_params == have_ckpt) {
		throw std::invalid_argument("pass exactly one of --params or --checkpoint");
	}
	Outputs outputs(o.out, "forecast");
	std::vector<int> emitted;
	if (have_params) {
		const garch::ModelParams params = kvio::params_from_doc(kvio::read_doc(o.params_path));
		for (int h : normalize_horizons(o.horizons)) {
			const Pipeline p = load_pipeline(o.data, h);
			outputs.table("forecast_h" + std::to_string(h) + ".csv",
			              forecast_table(classical_forecasts(params, p, h)));
			emitted.push_back(h);
		}
		outputs.manifest.put("params", o.params_path);
	} else {
		// direct models carry their trained horizon; the horizon list does
		// not apply
		const kvio::Doc doc = kvio::read_doc(o.checkpoint_path);
		const nn::Model model = kvio::checkpoint_from_doc(doc);
		const int h = doc.has("horizon") ? int(doc.get_int("horizon")) : 1;
		const Pipeline p = load_pipeline(o.data, h);
		outputs.table("forecast_h" + std::to_string(h) + ".csv",
		              forecast_table(direct_forecasts(model, p, h)));
		emitted.push_back(h);
		outputs.manifest.put("checkpoint", o.checkpoint_path);
	}
	outputs.manifest.put("data", o.data.path);
	outputs.manifest.put("horizons", join_ints(emitted));
	outputs.manifest.put("k", o.data.k);
	outputs.manifest.put("scale", o.data.scale);
	outputs.finish();
}

struct EvaluateOptions {
	DataOptions data;
	std::vector<std::string> params_paths;
	std::vector<std::string> checkpoints;
	std::vector<int> horizons{1, 3, 5, 10, 21};
	bool variance_scale = false;
	std::string out;
};

void cmd_evaluate(const EvaluateOptions& o) {
	if (o.params_paths.empty() && o.checkpoints.empty()) {
		throw std::invalid_argument("pass at least one --params or --checkpoint");
	}
	const std::vector<int> horizons = normalize_horizons(o.horizons);

	std::map<int, Pipeline> cache;
	auto pipeline_for = [&](int h) -> const Pipeline& {
		auto it = cache.find(h);
		if (it == cache.end()) it = cache.emplace(h, load_pipeline(o.data, h)).first;
		return it->second;
	};

	Outputs outputs(o.out, "evaluate");
	kvio::Table table;
	table.header = {"Model", "Horizon", "N", "MAE", "MSE"};
	auto add_row = [&](const std::string& label, int h, const eval::MetricReport& r) {
		table.add_row({label, std::to_string(h), std::to_string(r.n), kvio::format_double(r.mae),
		               kvio::format_double(r.mse)});
	};

	for (const auto& path : o.params_paths) {
		const garch::ModelParams params = kvio::params_from_doc(kvio::read_doc(path));
		for (int h : horizons) {
			const Pipeline& p = pipeline_for(h);
			add_row(label_of(path), h,
			        eval::evaluate(classical_forecasts(params, p, h), p.vol, !o.variance_scale));
		}
	}
	for (const auto& path : o.checkpoints) {
		const kvio::Doc doc = kvio::read_doc(path);
		const nn::Model model = kvio::checkpoint_from_doc(doc);
		const int h = doc.has("horizon") ? int(doc.get_int("horizon")) : 1;
		const Pipeline& p = pipeline_for(h);
		add_row(label_of(path), h,
		        eval::evaluate(direct_forecasts(model, p, h), p.vol, !o.variance_scale));
	}
	outputs.table("metrics.csv", table);

	outputs.manifest.put("data", o.data.path);
	outputs.manifest.put("horizons", join_ints(horizons));
	outputs.manifest.put("metric_scale", o.variance_scale ? std::string("variance")
	                                                      : std::string("sigma"));
	outputs.manifest.put("k", o.data.k);
	outputs.manifest.put("scale", o.data.scale);
	outputs.finish();
}

// ---------------------------------------------------------------------------
// var-backtest

struct VarOptions {
	DataOptions data;
	std::string params_path;
	std::string checkpoint_path;
	double multiplier = 1.65;
	std::string out;
};

void cmd_var_backtest(const VarOptions& o) {
	const bool have_params = !o.params_path.empty();
	const bool have_ckpt = !o.checkpoint_path.empty();
	if (have_params == have_ckpt) {
		throw std::invalid_argument("pass exactly one of --params or --checkpoint");
	}
	const Pipeline p = load_pipeline(o.data, 1);
	const auto& test = p.split.test.records;

	// one-day conditional variance per day, built from information through
	// the previous day only
	std::vector<double> var_by_day;
	if (have_params) {
		const garch::ModelParams params = kvio::params_from_doc(kvio::read_doc(o.params_path));
		var_by_day = garch::filter_series(params, p.returns.values,
		                                  garch::VarianceInit::fixed(p.train_init_var));
	} else {
		const kvio::Doc doc = kvio::read_doc(o.checkpoint_path);
		const nn::Model model = kvio::checkpoint_from_doc(doc);
		nn::CellState state = nn::initial_state(model, p.train_init_var);
		const std::size_t upto = std::size_t(test.back().anchor);
		const auto out = nn::roll_values(model, std::span(p.returns.values).first(upto), state);
		var_by_day.assign(p.returns.size(), p.train_init_var);
		for (std::size_t i = 0; i < out.size(); ++i) var_by_day[i + 1] = out[i];
	}

	std::vector<double> sigma_hat, test_returns;
	std::vector<Day> dates;
	for (const auto& rec : test) {
		const std::size_t day = std::size_t(rec.anchor);
		sigma_hat.push_back(std::sqrt(var_by_day[day]));
		test_returns.push_back(p.returns.values[day]);
		dates.push_back(rec.stamp);
	}
	const eval::VarLimits limits = eval::var_limits(sigma_hat, o.multiplier);
	const eval::VarReport report = eval::var_violations(test_returns, limits);

	Outputs outputs(o.out, "var-backtest");
	kvio::Table trace;
	trace.header = {"Date", "Return", "Upper", "Lower", "Breach"};
	for (std::size_t i = 0; i < dates.size(); ++i) {
		const bool breach = test_returns[i] > limits.upper[i] || test_returns[i] < limits.lower[i];
		trace.add_row({format_date(dates[i]), kvio::format_double(test_returns[i]),
		               kvio::format_double(limits.upper[i]), kvio::format_double(limits.lower[i]),
		               breach ? "1" : "0"});
	}
	outputs.table("var_trace.csv", trace);

	kvio::Doc rep;
	rep.put("multiplier", report.multiplier);
	rep.put("n", static_cast<long long>(report.n));
	rep.put("upper_count", static_cast<long long>(report.upper_count));
	rep.put("lower_count", static_cast<long long>(report.lower_count));
	rep.put("upper_rate", report.upper_rate);
	rep.put("lower_rate", report.lower_rate);
	rep.put("total_rate", report.total_rate);
	outputs.doc("var_report.kv", rep);

	outputs.manifest.put("data", o.data.path);
	if (have_params) outputs.manifest.put("params", o.params_path);
	if (have_ckpt) outputs.manifest.put("checkpoint", o.checkpoint_path);
	outputs.manifest.put("multiplier", o.multiplier);
	outputs.manifest.put("k", o.data.k);
	outputs.manifest.put("scale", o.data.scale);
	outputs.finish();
}

// ---------------------------------------------------------------------------
// equivalence-check

struct EquivOptions {
	std::string model = "garch11";
	std::size_t n = 5000;
	int seeds = 8;
	std::uint64_t seed = 1;
	std::string innov = "normal";
	double dof = 5.0;
	std::string loss = "n";
	double lr = 1e-2;
	int max_epochs = 150;
	std::string out;
};

void cmd_equivalence_check(const EquivOptions& o, const ParamFlags& pf) {
	const garch::ModelKind kind = garch::parse_kind(o.model);
	const garch::ModelParams truth = resolve_params(kind, pf);
	const garch::Innovations innov =
	    o.innov == "t" ? garch::Innovations::student_t(o.dof) : garch::Innovations::normal();
	if (o.seeds < 1) throw std::invalid_argument("--seeds must be >= 1");

	const auto truth_fields = numeric_fields(truth);
	std::vector<double> mse_mle(truth_fields.size(), 0.0);
	std::vector<double> mse_nn(truth_fields.size(), 0.0);

	kvio::Table closeness;
	closeness.header = {"Seed", "MAEBetween", "MSEBetween", "MLEvsTrueMAE", "CounterpartVsTrueMAE"};

	for (int g = 0; g < o.seeds; ++g) {
		const std::uint64_t seed = o.seed + std::uint64_t(g);
		const garch::SimResult sim = garch::simulate(truth, o.n, seed, innov);
		const std::size_t n_test = o.n / 10;
		if (n_test == 0 || o.n - n_test < 20) throw DataError("equivalence-check: series too short");
		const std::size_t m = o.n - n_test;
		const std::span<const double> eps(sim.eps);

		garch::FitConfig fit_cfg;
		fit_cfg.loss = make_loss(o.loss, o.dof);
		fit_cfg.figarch_truncation = pf.truncation;
		const auto [params_mle, fit_report] = garch::fit_mle(kind, eps.first(m), fit_cfg);

		// same information for the gradient path: the pre-test prefix, its
		// own tail as validation
		const train::SeriesTask task = train::make_onestep_task(eps.first(m), 1.0 / 9.0);
		nn::ModelSpec spec;
		spec.arch = nn::Arch::counterpart;
		spec.kernel = kind;
		spec.truncation = pf.truncation;
		train::TrainConfig cfg;
		cfg.lr = o.lr;
		cfg.loss = make_loss(o.loss, o.dof);
		cfg.max_epochs = o.max_epochs;
		cfg.seed = seed;
		cfg.regime = train::Regime::full_sequence;
		const auto [model, history] = train::train(nn::Model::init(spec, task.init_var), task, cfg);
		const garch::ModelParams params_nn = model.kernel_params();

		const auto fields_mle = numeric_fields(params_mle);
		const auto fields_nn = numeric_fields(params_nn);
		for (std::size_t i = 0; i < truth_fields.size(); ++i) {
			const double de = fields_mle[i].second - truth_fields[i].second;
			const double dn = fields_nn[i].second - truth_fields[i].second;
			mse_mle[i] += de * de;
			mse_nn[i] += dn * dn;
		}

		// one-day variance paths over the held-out tail
		const auto trace_mle =
		    garch::filter_series(params_mle, eps, garch::VarianceInit::fixed(task.init_var));
		const auto trace_nn =
		    garch::filter_series(params_nn, eps, garch::VarianceInit::fixed(task.init_var));
		const std::vector<double> tail_mle(trace_mle.begin() + std::ptrdiff_t(m), trace_mle.end());
		const std::vector<double> tail_nn(trace_nn.begin() + std::ptrdiff_t(m), trace_nn.end());
		const std::vector<double> tail_true(sim.sigma_sq.begin() + std::ptrdiff_t(m),
		                                    sim.sigma_sq.end());
		const auto between = eval::evaluate_values(tail_nn, tail_mle);
		const auto mle_true = eval::evaluate_values(tail_mle, tail_true);
		const auto nn_true = eval::evaluate_values(tail_nn, tail_true);
		closeness.add_row({std::to_string(seed), kvio::format_double(between.mae),
		                   kvio::format_double(between.mse), kvio::format_double(mle_true.mae),
		                   kvio::format_double(nn_true.mae)});
	}

	Outputs outputs(o.out, "equivalence-check");
	kvio::Table params_table;
	params_table.header = {"Parameter", "Truth", "MLE_MSE", "Counterpart_MSE"};
	for (std::size_t i = 0; i < truth_fields.size(); ++i) {
		params_table.add_row({truth_fields[i].first, kvio::format_double(truth_fields[i].second),
		                      kvio::format_double(mse_mle[i] / double(o.seeds)),
		                      kvio::format_double(mse_nn[i] / double(o.seeds))});
	}
	outputs.table("param_mse.csv", params_table);
	outputs.table("forecast_closeness.csv", closeness);

	outputs.manifest.put("model", o.model);
	outputs.manifest.put("n", static_cast<long long>(o.n));
	outputs.manifest.put("seeds", o.seeds);
	outputs.manifest.put("seed", static_cast<long long>(o.seed));
	outputs.manifest.put("innovations", o.innov);
	outputs.manifest.put("loss", o.loss);
	if (o.loss == "t") outputs.manifest.put("dof", o.dof);
	outputs.manifest.put("lr", o.lr);
	outputs.manifest.put("max_epochs", o.max_epochs);
	outputs.finish();
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"volcast: GARCH-family volatility forecasting with classical fitters and their "
	             "trainable NN twins"};
	app.require_subcommand(1);

	SimulateOptions sim_opt;
	ParamFlags sim_params;
	auto* sim = app.add_subcommand("simulate", "draw a return series from a chosen generator");
	sim->add_option("--model", sim_opt.model, "generator kind")
	    ->check(CLI::IsMember({"garch11", "gjr", "figarch"}));
	sim->add_option("--n", sim_opt.n, "series length (default 5000)");
	sim->add_option("--seed", sim_opt.seed, "base RNG seed");
	sim->add_option("--batch-seeds", sim_opt.batch_seeds,
	                "emit one series per seed for this many consecutive seeds");
	sim->add_flag("--emit-prices", sim_opt.emit_prices,
	              "also write a price table the ingestion path can read back");
	sim->add_option("--innov", sim_opt.innov, "innovation distribution")
	    ->check(CLI::IsMember({"normal", "t"}));
	sim->add_option("--dof", sim_opt.dof, "Student-t degrees of freedom (default 5)");
	sim->add_option("--scale", sim_opt.scale, "log-return multiplier for emitted prices");
	add_param_flags(sim, sim_params);
	sim->add_option("--out", sim_opt.out, "output directory")->required();
	sim->callback([&] { cmd_simulate(sim_opt, sim_params); });

	FitOptions fit_opt;
	auto* fit = app.add_subcommand("fit", "classical maximum-likelihood fit on the train region");
	add_data_flags(fit, fit_opt.data);
	fit->add_option("--model", fit_opt.model, "model kind")
	    ->check(CLI::IsMember({"garch11", "gjr", "figarch"}));
	fit->add_option("--loss", fit_opt.loss, "likelihood kind")->check(CLI::IsMember({"n", "t"}));
	fit->add_option("--dof", fit_opt.dof, "Student-t degrees of freedom (default 5)");
	fit->add_option("--horizon", fit_opt.horizon, "dataset horizon used for the split (default 1)");
	fit->add_option("--truncation", fit_opt.truncation, "figarch weight count (default 50)");
	fit->add_option("--out", fit_opt.out, "output directory")->required();
	fit->callback([&] { cmd_fit(fit_opt); });

	TrainOptions train_opt;
	auto* tr = app.add_subcommand("train", "gradient-train an NN model on the train region");
	add_data_flags(tr, train_opt.data);
	tr->add_option("--model", train_opt.model, "garch-lstm, or a classical kind with --counterpart")
	    ->check(CLI::IsMember({"garch11", "gjr", "figarch", "garch-lstm"}));
	tr->add_option("--kernel", train_opt.kernel, "garch-lstm kernel (default gjr)")
	    ->check(CLI::IsMember({"garch11", "gjr", "figarch"}));
	tr->add_flag("--counterpart", train_opt.counterpart,
	             "train the NN twin of the classical --model");
	tr->add_option("--loss", train_opt.loss, "training loss")
	    ->check(CLI::IsMember({"n", "t", "mse"}));
	tr->add_option("--dof", train_opt.dof, "Student-t degrees of freedom (default 5)");
	tr->add_option("--horizon", train_opt.horizons, "forecast horizons, one model each")
	    ->delimiter(',');
	tr->add_option("--target", train_opt.target, "per-anchor target")
	    ->check(CLI::IsMember({"auto", "eps", "realized"}));
	tr->add_option("--lr", train_opt.lr, "initial learning rate (default 1e-2)");
	tr->add_option("--max-epochs", train_opt.max_epochs, "epoch cap (default 150)");
	tr->add_option("--batch-size", train_opt.batch_size, "minibatch size (default 64)");
	tr->add_flag("--grid", train_opt.grid,
	             "pick the learning rate from five log-spaced points in [3e-4, 3e-2] by val loss");
	tr->add_option("--seed", train_opt.seed, "seed recorded with the run");
	tr->add_option("--truncation", train_opt.truncation, "figarch weight count (default 50)");
	tr->add_option("--out", train_opt.out, "output directory")->required();
	tr->callback([&] { cmd_train(train_opt); });

	ForecastOptions fc_opt;
	auto* fc = app.add_subcommand("forecast", "write per-horizon forecasts for the test anchors");
	add_data_flags(fc, fc_opt.data);
	fc->add_option("--params", fc_opt.params_path, "classical parameter document");
	fc->add_option("--checkpoint", fc_opt.checkpoint_path, "trained model checkpoint");
	fc->add_option("--horizon", fc_opt.horizons, "horizons (default 1,3,5,10,21)")->delimiter(',');
	fc->add_option("--out", fc_opt.out, "output directory")->required();
	fc->callback([&] { cmd_forecast(fc_opt); });

	EvaluateOptions ev_opt;
	auto* ev = app.add_subcommand("evaluate", "score forecasts against realized volatility");
	add_data_flags(ev, ev_opt.data);
	ev->add_option("--params", ev_opt.params_paths, "classical parameter documents")
	    ->delimiter(',');
	ev->add_option("--checkpoint", ev_opt.checkpoints, "trained model checkpoints")->delimiter(',');
	ev->add_option("--horizon", ev_opt.horizons, "horizons (default 1,3,5,10,21)")->delimiter(',');
	ev->add_flag("--variance-scale", ev_opt.variance_scale,
	             "compare variances instead of sigmas");
	ev->add_option("--out", ev_opt.out, "output directory")->required();
	ev->callback([&] { cmd_evaluate(ev_opt); });

	VarOptions var_opt;
	auto* var = app.add_subcommand("var-backtest",
	                               "count breaches of the +/- multiplier*sigma limits on test days");
	add_data_flags(var, var_opt.data);
	var->add_option("--params", var_opt.params_path, "classical parameter document");
	var->add_option("--checkpoint", var_opt.checkpoint_path,
	                "trained one-day model checkpoint");
	var->add_option("--multiplier", var_opt.multiplier, "limit multiplier (default 1.65)");
	var->add_option("--out", var_opt.out, "output directory")->required();
	var->callback([&] { cmd_var_backtest(var_opt); });

	EquivOptions eq_opt;
	ParamFlags eq_params;
	auto* eq = app.add_subcommand(
	    "equivalence-check", "simulate, fit both ways, compare parameters and forecasts");
	eq->add_option("--model", eq_opt.model, "model kind")
	    ->check(CLI::IsMember({"garch11", "gjr", "figarch"}));
	eq->add_option("--n", eq_opt.n, "series length per seed (default 5000)");
	eq->add_option("--seeds", eq_opt.seeds, "number of simulated series (default 8)");
	eq->add_option("--seed", eq_opt.seed, "base RNG seed");
	eq->add_option("--innov", eq_opt.innov, "innovation distribution")
	    ->check(CLI::IsMember({"normal", "t"}));
	eq->add_option("--dof", eq_opt.dof, "Student-t degrees of freedom (default 5)");
	eq->add_option("--loss", eq_opt.loss, "likelihood kind")->check(CLI::IsMember({"n", "t"}));
	eq->add_option("--lr", eq_opt.lr, "counterpart learning rate (default 1e-2)");
	eq->add_option("--max-epochs", eq_opt.max_epochs, "counterpart epoch cap (default 150)");
	add_param_flags(eq, eq_params);
	eq->add_option("--out", eq_opt.out, "output directory")->required();
	eq->callback([&] { cmd_equivalence_check(eq_opt, eq_params); });

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : 1;
	} catch (const std::invalid_argument& e) {
		std::cerr << "usage error: " << e.what() << "\n";
		return 1;
	} catch (const DataError& e) {
		std::cerr << "data error: " << e.what() << "\n";
		return 2;
	} catch (const NumericalError& e) {
		std::cerr << "numerical failure: " << e.what() << "\n";
		return 3;
	} catch (const std::exception& e) {
		std::cerr << "failure: " << e.what() << "\n";
		return 3;
	}
	return 0;
}
