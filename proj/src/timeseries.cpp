#include "volcast/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace volcast {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
	std::vector<std::string> fields;
	std::string field;
	std::istringstream ss(line);
	while (std::getline(ss, field, delim)) {
		fields.push_back(field);
	}
	if (!line.empty() && line.back() == delim) {
		fields.emplace_back();
	}
	return fields;
}

std::string trim(const std::string& s) {
	std::size_t a = s.find_first_not_of(" \t\r\n");
	if (a == std::string::npos) return "";
	std::size_t b = s.find_last_not_of(" \t\r\n");
	return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text, const std::string& what, std::size_t line_no) {
	const std::string t = trim(text);
	double out = 0.0;
	auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
	if (ec != std::errc() || ptr != t.data() + t.size()) {
		throw DataError("line " + std::to_string(line_no) + ": cannot parse " + what +
		                " value '" + t + "'");
	}
	return out;
}

}  // namespace

Day parse_date(const std::string& text) {
	const std::string t = trim(text);
	int y = 0, m = 0, d = 0;
	char dash1 = 0, dash2 = 0;
	std::istringstream ss(t);
	ss >> y >> dash1 >> m >> dash2 >> d;
	if (ss.fail() || !ss.eof() || dash1 != '-' || dash2 != '-' || t.size() != 10) {
		throw DataError("bad date '" + t + "', expected YYYY-MM-DD");
	}
	const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
	                                      std::chrono::day{unsigned(d)}};
	if (!ymd.ok()) {
		throw DataError("invalid calendar date '" + t + "'");
	}
	return std::chrono::sys_days(ymd).time_since_epoch().count();
}

std::string format_date(Day day) {
	const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
	              unsigned(ymd.day()));
	return buf;
}

PriceSeries load_prices(const std::string& path, const CsvLayout& layout) {
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot open price file '" + path + "'");
	}
	std::string line;
	if (!std::getline(in, line)) {
		throw DataError("price file '" + path + "' is empty");
	}
	if (!line.empty() && line.front() == '\xEF') {
		// strip UTF-8 BOM if present
		if (line.size() >= 3 && line[1] == '\xBB' && line[2] == '\xBF') line.erase(0, 3);
	}
	const auto header = split_line(line, layout.delimiter);
	int date_idx = -1, close_idx = -1;
	for (std::size_t i = 0; i < header.size(); ++i) {
		const std::string name = trim(header[i]);
		if (name == layout.date_column) date_idx = int(i);
		if (name == layout.close_column) close_idx = int(i);
	}
	if (date_idx < 0) {
		throw DataError("column '" + layout.date_column + "' not found in '" + path + "'");
	}
	if (close_idx < 0) {
		throw DataError("column '" + layout.close_column + "' not found in '" + path + "'");
	}

	PriceSeries prices;
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) continue;
		const auto fields = split_line(line, layout.delimiter);
		const std::size_t need = std::size_t(std::max(date_idx, close_idx)) + 1;
		if (fields.size() < need) {
			throw DataError("line " + std::to_string(line_no) + ": expected at least " +
			                std::to_string(need) + " fields, got " + std::to_string(fields.size()));
		}
		Day day = 0;
		try {
			day = parse_date(fields[std::size_t(date_idx)]);
		} catch (const DataError& e) {
			throw DataError("line " + std::to_string(line_no) + ": " + e.what());
		}
		const double close = parse_double(fields[std::size_t(close_idx)], "close", line_no);
		if (!(close > 0.0)) {
			throw DataError("line " + std::to_string(line_no) + ": non-positive close " +
			                std::to_string(close));
		}
		prices.stamps.push_back(day);
		prices.closes.push_back(close);
	}
	if (prices.size() < 2) {
		throw DataError("price file '" + path + "' has fewer than 2 rows");
	}

	std::vector<std::size_t> order(prices.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		return prices.stamps[a] < prices.stamps[b];
	});
	PriceSeries sorted;
	sorted.stamps.reserve(prices.size());
	sorted.closes.reserve(prices.size());
	for (std::size_t i : order) {
		sorted.stamps.push_back(prices.stamps[i]);
		sorted.closes.push_back(prices.closes[i]);
	}
	for (std::size_t i = 1; i < sorted.size(); ++i) {
		if (sorted.stamps[i] == sorted.stamps[i - 1]) {
			throw DataError("duplicate date " + format_date(sorted.stamps[i]) + " in '" + path + "'");
		}
	}
	return sorted;
}

ReturnSeries log_returns(const PriceSeries& prices, double scale) {
	if (prices.size() < 2) {
		throw DataError("need at least 2 prices to form returns");
	}
	ReturnSeries out;
	out.stamps.reserve(prices.size() - 1);
	out.values.reserve(prices.size() - 1);
	for (std::size_t t = 1; t < prices.size(); ++t) {
		out.stamps.push_back(prices.stamps[t]);
		out.values.push_back(scale * std::log(prices.closes[t] / prices.closes[t - 1]));
	}
	return out;
}

VolSeries realized_volatility(const ReturnSeries& returns, int k) {
	if (k < 1) {
		throw std::invalid_argument("realized_volatility: window must be >= 1");
	}
	const std::size_t n = returns.size();
	if (n < std::size_t(k)) {
		throw DataError("realized_volatility: series shorter than window");
	}
	VolSeries out;
	out.window = k;
	out.offset = k - 1;
	out.stamps.reserve(n - std::size_t(k) + 1);
	for (std::size_t t = std::size_t(k) - 1; t < n; ++t) {
		double sum_sq = 0.0;
		for (int i = 0; i < k; ++i) {
			const double e = returns.values[t - std::size_t(i)];
			sum_sq += e * e;
		}
		out.stamps.push_back(returns.stamps[t]);
		out.sigma_sq.push_back(sum_sq);
		out.sigma.push_back(std::sqrt(sum_sq));
	}
	return out;
}

WindowedDataset build_dataset(const ReturnSeries& returns, const VolSeries& vol, int k, int h) {
	if (h < 1) {
		throw std::invalid_argument("build_dataset: horizon must be >= 1");
	}
	if (vol.window != k) {
		throw std::invalid_argument("build_dataset: vol series built with different window");
	}
	const int n = int(returns.size());
	if (n - k - h + 1 <= 0) {
		throw DataError("build_dataset: series too short for window " + std::to_string(k) +
		                " and horizon " + std::to_string(h));
	}
	WindowedDataset ds;
	ds.k = k;
	ds.h = h;
	ds.records.reserve(std::size_t(n - k - h + 1));
	for (int t = k - 1; t <= n - 1 - h; ++t) {
		WindowRecord rec;
		rec.anchor = t;
		rec.stamp = returns.stamps[std::size_t(t)];
		rec.target_stamp = returns.stamps[std::size_t(t + h)];
		rec.window.assign(returns.values.begin() + (t - k + 1), returns.values.begin() + (t + 1));
		rec.target_sq = vol.sigma_sq[std::size_t(t + h - vol.offset)];
		ds.records.push_back(std::move(rec));
	}
	return ds;
}

SplitDataset split_dataset(const WindowedDataset& ds, const SplitRatios& ratios) {
	if (ratios.train <= 0 || ratios.val <= 0 || ratios.test <= 0) {
		throw std::invalid_argument("split_dataset: ratios must be positive");
	}
	const std::size_t n = ds.size();
	const int total = ratios.train + ratios.val + ratios.test;
	const std::size_t n_train = n * std::size_t(ratios.train) / std::size_t(total);
	const std::size_t n_val = n * std::size_t(ratios.val) / std::size_t(total);
	const std::size_t n_test = n - n_train - n_val;
	if (n_train == 0 || n_val == 0 || n_test == 0) {
		throw DataError("split_dataset: not enough records (" + std::to_string(n) +
		                ") for a non-empty train/val/test split");
	}
	auto slice = [&](std::size_t from, std::size_t count) {
		WindowedDataset part;
		part.k = ds.k;
		part.h = ds.h;
		part.records.assign(ds.records.begin() + std::ptrdiff_t(from),
		                    ds.records.begin() + std::ptrdiff_t(from + count));
		return part;
	};
	SplitDataset split;
	split.train = slice(0, n_train);
	split.val = slice(n_train, n_val);
	split.test = slice(n_train + n_val, n_test);
	return split;
}

void check_no_leakage(const SplitDataset& split) {
	auto check_sorted = [](const WindowedDataset& part, const char* name) {
		for (std::size_t i = 1; i < part.size(); ++i) {
			if (part.records[i].anchor <= part.records[i - 1].anchor) {
				throw DataError(std::string("leakage check: ") + name + " partition not strictly ordered");
			}
		}
	};
	check_sorted(split.train, "train");
	check_sorted(split.val, "val");
	check_sorted(split.test, "test");
	if (split.train.size() && split.val.size() &&
	    split.train.records.back().anchor >= split.val.records.front().anchor) {
		throw DataError("leakage check: train overlaps val");
	}
	if (split.val.size() && split.test.size() &&
	    split.val.records.back().anchor >= split.test.records.front().anchor) {
		throw DataError("leakage check: val overlaps test");
	}
	auto check_contiguous = [](const WindowedDataset& a, const WindowedDataset& b, const char* what) {
		if (a.size() && b.size() && b.records.front().anchor != a.records.back().anchor + 1) {
			throw DataError(std::string("leakage check: gap between ") + what);
		}
	};
	check_contiguous(split.train, split.val, "train and val");
	check_contiguous(split.val, split.test, "val and test");
}

void dump_dataset(const WindowedDataset& ds, const std::string& path) {
	std::ofstream out(path);
	if (!out) {
		throw DataError("cannot write dataset dump '" + path + "'");
	}
	out << "anchor_date,target_date,target_sq";
	for (int i = 0; i < ds.k; ++i) {
		out << ",eps" << i;
	}
	out << "\n";
	char buf[32];
	for (const auto& rec : ds.records) {
		out << format_date(rec.stamp) << ',' << format_date(rec.target_stamp);
		std::snprintf(buf, sizeof buf, "%.17g", rec.target_sq);
		out << ',' << buf;
		for (double e : rec.window) {
			std::snprintf(buf, sizeof buf, "%.17g", e);
			out << ',' << buf;
		}
		out << "\n";
	}
	if (!out) {
		throw DataError("write failure on dataset dump '" + path + "'");
	}
}

}  // namespace volcast
