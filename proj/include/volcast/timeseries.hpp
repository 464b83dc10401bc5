#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "volcast/errors.hpp"

namespace volcast {

// Calendar date as days since 1970-01-01. Gaps (weekends, holidays) are
// treated as consecutive trading steps; only ordering matters.
using Day = std::int64_t;

Day parse_date(const std::string& text);      // "YYYY-MM-DD", validated
std::string format_date(Day day);

struct PriceSeries {
	std::vector<Day> stamps;
	std::vector<double> closes;
	std::size_t size() const { return stamps.size(); }
};

struct ReturnSeries {
	std::vector<Day> stamps;  // stamp of the later day of each pair
	std::vector<double> values;
	std::size_t size() const { return stamps.size(); }
};

struct VolSeries {
	std::vector<Day> stamps;
	std::vector<double> sigma;
	std::vector<double> sigma_sq;
	int window = 0;   // k used to build it
	int offset = 0;   // index into the source return series of stamps[0] (= k-1)
	std::size_t size() const { return stamps.size(); }
};

struct WindowRecord {
	int anchor = 0;          // index of the window's last element in the return series
	Day stamp = 0;           // date of the anchor
	Day target_stamp = 0;    // date of the target (anchor + h)
	std::vector<double> window;  // eps, oldest first, length k
	double target_sq = 0.0;      // realized variance at anchor + h
};

struct WindowedDataset {
	std::vector<WindowRecord> records;
	int k = 0;
	int h = 0;
	std::size_t size() const { return records.size(); }
};

struct SplitRatios {
	int train = 8;
	int val = 1;
	int test = 1;
};

struct SplitDataset {
	WindowedDataset train;
	WindowedDataset val;
	WindowedDataset test;
};

struct CsvLayout {
	std::string date_column = "Date";
	std::string close_column = "Close";
	char delimiter = ',';
};

// Reads a delimited text table with a header row. Rows are sorted by
// date; duplicate dates, missing columns, unparseable fields and
// non-positive prices are rejected with a DataError naming the problem.
PriceSeries load_prices(const std::string& path, const CsvLayout& layout = {});

// values[t] = scale * ln(closes[t+1] / closes[t])
ReturnSeries log_returns(const PriceSeries& prices, double scale = 100.0);

// sigma[t] = sqrt(sum of the k most recent squared returns ending at t),
// defined from return index k-1 onward.
VolSeries realized_volatility(const ReturnSeries& returns, int k = 5);

// One record per anchor t in [k-1, n-1-h]: window eps[t-k+1..t], target
// realized variance at t+h.
WindowedDataset build_dataset(const ReturnSeries& returns, const VolSeries& vol, int k, int h);

// Contiguous time-ordered partition with sizes floor(n*r0/R), floor(n*r1/R),
// remainder. Throws if any partition would be empty.
SplitDataset split_dataset(const WindowedDataset& ds, const SplitRatios& ratios = {});

// Leakage guard: partitions must be contiguous, disjoint and time ordered
// (train < val < test by anchor). Throws on violation.
void check_no_leakage(const SplitDataset& split);

// Line-oriented numeric dump for inspection: anchor date, window, target.
void dump_dataset(const WindowedDataset& ds, const std::string& path);

}  // namespace volcast
