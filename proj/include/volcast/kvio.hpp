#pragma once

#include <string>
#include <utility>
#include <vector>

#include "volcast/garch.hpp"
#include "volcast/nn.hpp"

namespace volcast::kvio {

// Decimal text (%.17g) that round-trips the exact double, infinities included.
std::string format_double(double x);
double parse_double(const std::string& text);

// Ordered key = value document; keys unique.
class Doc {
public:
	void put(const std::string& key, const std::string& value);
	void put(const std::string& key, double value);
	void put(const std::string& key, long long value);
	void put(const std::string& key, int value) { put(key, static_cast<long long>(value)); }

	bool has(const std::string& key) const;
	const std::string& get(const std::string& key) const;  // throws DataError when absent
	double get_double(const std::string& key) const;
	long long get_int(const std::string& key) const;

	const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

private:
	std::vector<std::pair<std::string, std::string>> items_;
};

// Atomic writes: content lands under a temporary name and is renamed into
// place, so readers never observe a partial file.
void write_text(const std::string& path, const std::string& content);
void write_doc(const std::string& path, const Doc& doc);
Doc read_doc(const std::string& path);

struct Table {
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;
	void add_row(std::vector<std::string> row);
};

void write_table(const std::string& path, const Table& table, char delimiter = ',');
Table read_table(const std::string& path, char delimiter = ',');

Doc params_to_doc(const garch::ModelParams& params);
garch::ModelParams params_from_doc(const Doc& doc);

// Checkpoints carry the spec and the exact raw vector; constrained kernel
// values are echoed for readability but ignored on load.
Doc checkpoint_to_doc(const nn::Model& model);
nn::Model checkpoint_from_doc(const Doc& doc);

}  // namespace volcast::kvio
