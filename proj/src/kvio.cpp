#include "volcast/kvio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "volcast/errors.hpp"

namespace volcast::kvio {

std::string format_double(double x) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", x);
	return buf;
}

double parse_double(const std::string& text) {
	// strtod rather than from_chars: checkpoint raw slots may hold "inf"
	// forms, which from_chars does not accept in all library versions.
	const char* begin = text.c_str();
	char* end = nullptr;
	errno = 0;
	const double v = std::strtod(begin, &end);
	if (end == begin || *end != '\0' || errno == ERANGE) {
		throw DataError("cannot parse number '" + text + "'");
	}
	return v;
}

void Doc::put(const std::string& key, const std::string& value) {
	for (const auto& [k, _] : items_) {
		if (k == key) throw std::invalid_argument("duplicate key '" + key + "'");
	}
	if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos) {
		throw std::invalid_argument("key '" + key + "' contains a delimiter");
	}
	if (value.find('\n') != std::string::npos) {
		throw std::invalid_argument("value for '" + key + "' contains a newline");
	}
	items_.emplace_back(key, value);
}

void Doc::put(const std::string& key, double value) { put(key, format_double(value)); }

void Doc::put(const std::string& key, long long value) { put(key, std::to_string(value)); }

bool Doc::has(const std::string& key) const {
	for (const auto& [k, _] : items_) {
		if (k == key) return true;
	}
	return false;
}

const std::string& Doc::get(const std::string& key) const {
	for (const auto& [k, v] : items_) {
		if (k == key) return v;
	}
	throw DataError("missing key '" + key + "'");
}

double Doc::get_double(const std::string& key) const { return parse_double(get(key)); }

long long Doc::get_int(const std::string& key) const {
	const std::string& s = get(key);
	try {
		std::size_t used = 0;
		const long long v = std::stoll(s, &used);
		if (used != s.size()) throw std::invalid_argument(s);
		return v;
	} catch (const std::exception&) {
		throw DataError("cannot parse integer '" + s + "' for key '" + key + "'");
	}
}

void write_text(const std::string& path, const std::string& content) {
	const std::string tmp = path + ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out) throw DataError("cannot open '" + tmp + "' for writing");
		out << content;
		out.flush();
		if (!out) throw DataError("write failure on '" + tmp + "'");
	}
	if (std::rename(tmp.c_str(), path.c_str()) != 0) {
		throw DataError("cannot move '" + tmp + "' into place: " + std::strerror(errno));
	}
}

void write_doc(const std::string& path, const Doc& doc) {
	std::string content;
	for (const auto& [k, v] : doc.items()) {
		content += k;
		content += " = ";
		content += v;
		content += '\n';
	}
	write_text(path, content);
}

Doc read_doc(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw DataError("cannot open '" + path + "'");
	Doc doc;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (line.empty() || line[0] == '#') continue;
		const std::size_t eq = line.find('=');
		if (eq == std::string::npos) {
			throw DataError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
		}
		auto strip = [](std::string s) {
			const std::size_t a = s.find_first_not_of(" \t\r");
			if (a == std::string::npos) return std::string();
			const std::size_t b = s.find_last_not_of(" \t\r");
			return s.substr(a, b - a + 1);
		};
		doc.put(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
	}
	return doc;
}

void Table::add_row(std::vector<std::string> row) {
	if (row.size() != header.size()) {
		throw std::invalid_argument("table row width does not match the header");
	}
	rows.push_back(std::move(row));
}

void write_table(const std::string& path, const Table& table, char delimiter) {
	auto join = [&](const std::vector<std::string>& cells) {
		std::string line;
		for (std::size_t i = 0; i < cells.size(); ++i) {
			if (cells[i].find(delimiter) != std::string::npos ||
			    cells[i].find('\n') != std::string::npos) {
				throw std::invalid_argument("table cell contains the delimiter: '" + cells[i] + "'");
			}
			if (i) line += delimiter;
			line += cells[i];
		}
		line += '\n';
		return line;
	};
	std::string content = join(table.header);
	for (const auto& row : table.rows) content += join(row);
	write_text(path, content);
}

Table read_table(const std::string& path, char delimiter) {
	std::ifstream in(path);
	if (!in) throw DataError("cannot open '" + path + "'");
	Table table;
	std::string line;
	auto split = [&](const std::string& s) {
		std::vector<std::string> cells;
		std::string cell;
		std::istringstream ss(s);
		while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
		if (!s.empty() && s.back() == delimiter) cells.emplace_back();
		return cells;
	};
	if (!std::getline(in, line)) throw DataError("empty table '" + path + "'");
	if (!line.empty() && line.back() == '\r') line.pop_back();
	table.header = split(line);
	while (std::getline(in, line)) {
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line.empty()) continue;
		table.add_row(split(line));
	}
	return table;
}

Doc params_to_doc(const garch::ModelParams& params) {
	Doc doc;
	doc.put("kind", std::string(garch::kind_name(garch::kind_of(params))));
	if (const auto* gp = std::get_if<garch::Garch11Params>(&params)) {
		doc.put("omega", gp->omega);
		doc.put("alpha", gp->alpha);
		doc.put("beta", gp->beta);
	} else if (const auto* jp = std::get_if<garch::GjrParams>(&params)) {
		doc.put("omega", jp->omega);
		doc.put("alpha", jp->alpha);
		doc.put("lambda", jp->lambda_asym);
		doc.put("beta", jp->beta);
	} else {
		const auto& fp = std::get<garch::FigarchParams>(params);
		doc.put("omega", fp.omega);
		doc.put("beta", fp.beta);
		doc.put("phi", fp.phi);
		doc.put("d", fp.d);
		doc.put("truncation", fp.truncation);
		doc.put("scaled_intercept", static_cast<long long>(fp.scaled_intercept ? 1 : 0));
	}
	return doc;
}

garch::ModelParams params_from_doc(const Doc& doc) {
	const garch::ModelKind kind = garch::parse_kind(doc.get("kind"));
	garch::ModelParams params;
	switch (kind) {
		case garch::ModelKind::garch11:
			params = garch::Garch11Params{doc.get_double("omega"), doc.get_double("alpha"),
			                              doc.get_double("beta")};
			break;
		case garch::ModelKind::gjr:
			params = garch::GjrParams{doc.get_double("omega"), doc.get_double("alpha"),
			                          doc.get_double("lambda"), doc.get_double("beta")};
			break;
		case garch::ModelKind::figarch: {
			garch::FigarchParams fp;
			fp.omega = doc.get_double("omega");
			fp.beta = doc.get_double("beta");
			fp.phi = doc.get_double("phi");
			fp.d = doc.get_double("d");
			fp.truncation = int(doc.get_int("truncation"));
			fp.scaled_intercept = doc.get_int("scaled_intercept") != 0;
			params = fp;
			break;
		}
	}
	garch::validate(params);
	return params;
}

Doc checkpoint_to_doc(const nn::Model& model) {
	Doc doc;
	doc.put("arch", std::string(nn::arch_name(model.spec().arch)));
	doc.put("kernel", std::string(garch::kind_name(model.spec().kernel)));
	doc.put("truncation", model.spec().truncation);
	doc.put("scaled_intercept", static_cast<long long>(model.spec().scaled_intercept ? 1 : 0));
	doc.put("raw_count", static_cast<long long>(model.raw().size()));
	for (std::size_t i = 0; i < model.raw().size(); ++i) {
		doc.put("raw_" + std::to_string(i), model.raw()[i]);
	}
	const Doc kernel = params_to_doc(model.kernel_params());
	for (const auto& [k, v] : kernel.items()) {
		if (k == "kind") continue;
		doc.put("value_" + k, v);
	}
	if (model.spec().arch == nn::Arch::garch_lstm) {
		doc.put("value_blend", model.blend());
	}
	return doc;
}

nn::Model checkpoint_from_doc(const Doc& doc) {
	nn::ModelSpec spec;
	spec.arch = nn::parse_arch(doc.get("arch"));
	spec.kernel = garch::parse_kind(doc.get("kernel"));
	spec.truncation = int(doc.get_int("truncation"));
	spec.scaled_intercept = doc.get_int("scaled_intercept") != 0;
	const std::size_t count = std::size_t(doc.get_int("raw_count"));
	if (count != nn::Model::raw_size(spec)) {
		throw DataError("checkpoint raw_count does not match the model layout");
	}
	nn::Model model = nn::Model::init(spec, 1.0);
	for (std::size_t i = 0; i < count; ++i) {
		model.raw()[i] = doc.get_double("raw_" + std::to_string(i));
	}
	return model;
}

}  // namespace volcast::kvio
