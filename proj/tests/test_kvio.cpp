#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "volcast/errors.hpp"
#include "volcast/garch.hpp"
#include "volcast/kvio.hpp"
#include "volcast/nn.hpp"

using namespace volcast;
using namespace volcast::kvio;

namespace {

std::string temp_path(const std::string& stem) {
	static std::uint64_t counter = 0;
	const auto dir = std::filesystem::temp_directory_path();
	return (dir / (stem + "_" + std::to_string(++counter) + ".txt")).string();
}

}  // namespace

TEST_CASE("decimal text round-trips doubles exactly") {
	std::mt19937_64 rng(99u);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (int i = 0; i < 200; ++i) {
		const double x = u(rng) * std::pow(10.0, double(i % 40) - 20.0);
		CHECK(parse_double(format_double(x)) == x);
	}
	const double inf = std::numeric_limits<double>::infinity();
	CHECK(parse_double(format_double(inf)) == inf);
	CHECK(parse_double(format_double(-inf)) == -inf);
	CHECK(parse_double("0.1") == 0.1);
	CHECK_THROWS_AS(parse_double("abc"), DataError);
	CHECK_THROWS_AS(parse_double("1.5x"), DataError);
	CHECK_THROWS_AS(parse_double(""), DataError);
}

TEST_CASE("doc rejects duplicate keys and embedded delimiters") {
	Doc doc;
	doc.put("alpha", 0.1);
	CHECK_THROWS_AS(doc.put("alpha", 0.2), std::invalid_argument);
	CHECK_THROWS_AS(doc.put("bad=key", 1.0), std::invalid_argument);
	CHECK_THROWS_AS(doc.put("bad\nkey", 1.0), std::invalid_argument);
	CHECK_THROWS_AS(doc.put("k", std::string("line\nbreak")), std::invalid_argument);
	CHECK(doc.has("alpha"));
	CHECK_FALSE(doc.has("beta"));
	CHECK_THROWS_AS(doc.get("beta"), DataError);
	doc.put("count", 7);
	CHECK(doc.get_int("count") == 7);
	CHECK_THROWS_AS(doc.get_int("alpha"), DataError);  // "0.1..." is not an integer
}

TEST_CASE("atomic writes leave no temporary behind") {
	const std::string path = temp_path("atomic");
	write_text(path, "payload\n");
	CHECK(std::filesystem::exists(path));
	CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
	// overwrite goes through the same rename
	write_text(path, "second\n");
	std::ifstream in(path);
	std::string line;
	std::getline(in, line);
	CHECK(line == "second");
	std::filesystem::remove(path);
}

TEST_CASE("doc files round-trip and tolerate comments") {
	const std::string path = temp_path("doc");
	Doc doc;
	doc.put("name", std::string("volcast"));
	doc.put("omega", 0.1234567890123456789);
	doc.put("epochs", 250);
	write_doc(path, doc);
	const Doc back = read_doc(path);
	CHECK(back.items() == doc.items());
	CHECK(back.get_double("omega") == doc.get_double("omega"));

	write_text(path, "# comment line\n\nkey = spaced value\n");
	const Doc sparse = read_doc(path);
	CHECK(sparse.items().size() == 1);
	CHECK(sparse.get("key") == "spaced value");

	write_text(path, "no delimiter here\n");
	CHECK_THROWS_AS(read_doc(path), DataError);
	std::filesystem::remove(path);
	CHECK_THROWS_AS(read_doc(path), DataError);  // missing file
}

TEST_CASE("tables enforce rectangular shape and clean cells") {
	Table t;
	t.header = {"a", "b"};
	t.add_row({"1", "2"});
	CHECK_THROWS_AS(t.add_row({"1"}), std::invalid_argument);

	const std::string path = temp_path("table");
	t.add_row({"x,y", "3"});
	CHECK_THROWS_AS(write_table(path, t), std::invalid_argument);  // comma inside a cell
	t.rows.pop_back();
	t.add_row({"", "4"});  // empty cell is fine
	write_table(path, t);
	const Table back = read_table(path);
	CHECK(back.header == t.header);
	CHECK(back.rows == t.rows);

	write_text(path, "a,b\r\n1,\r\n");
	const Table crlf = read_table(path);
	CHECK(crlf.rows.size() == 1);
	CHECK(crlf.rows[0][0] == "1");
	CHECK(crlf.rows[0][1] == "");

	write_text(path, "");
	CHECK_THROWS_AS(read_table(path), DataError);
	std::filesystem::remove(path);
}

TEST_CASE("classical parameter docs round-trip every kind exactly") {
	const std::string path = temp_path("params");
	const garch::ModelParams cases[] = {
		garch::Garch11Params{0.0123456789012345, 0.07, 0.9},
		garch::GjrParams{0.05, 0.03, 0.11, 0.8},
		[] {
			garch::FigarchParams fp;
			fp.omega = 0.2;
			fp.beta = 0.3;
			fp.phi = 0.2;
			fp.d = 0.4;
			fp.truncation = 64;
			fp.scaled_intercept = true;
			return fp;
		}(),
	};
	for (const auto& params : cases) {
		write_doc(path, params_to_doc(params));
		const garch::ModelParams back = params_from_doc(read_doc(path));
		CHECK(garch::kind_of(back) == garch::kind_of(params));
		const Doc a = params_to_doc(params);
		const Doc b = params_to_doc(back);
		CHECK(a.items() == b.items());  // exact double round trip
	}
	std::filesystem::remove(path);
}

TEST_CASE("loading an infeasible parameter doc fails validation") {
	Doc doc;
	doc.put("kind", std::string("garch11"));
	doc.put("omega", 0.1);
	doc.put("alpha", 0.6);
	doc.put("beta", 0.6);  // alpha + beta >= 1
	CHECK_THROWS_AS(params_from_doc(doc), std::invalid_argument);
}

TEST_CASE("checkpoints restore the exact raw vector for every architecture") {
	const std::string path = temp_path("ckpt");
	std::mt19937 rng(5u);
	std::uniform_real_distribution<double> u(-0.8, 0.8);
	for (const auto arch : {nn::Arch::counterpart, nn::Arch::garch_lstm}) {
		for (const auto kernel :
		     {garch::ModelKind::garch11, garch::ModelKind::gjr, garch::ModelKind::figarch}) {
			nn::ModelSpec spec;
			spec.arch = arch;
			spec.kernel = kernel;
			spec.truncation = 24;
			nn::Model m = nn::Model::init(spec, 1.7);
			for (double& r : m.raw()) r += u(rng);
			write_doc(path, checkpoint_to_doc(m));
			const nn::Model back = checkpoint_from_doc(read_doc(path));
			CHECK(back.spec().arch == spec.arch);
			CHECK(back.spec().kernel == spec.kernel);
			CHECK(back.spec().truncation == spec.truncation);
			REQUIRE(back.raw().size() == m.raw().size());
			for (std::size_t i = 0; i < m.raw().size(); ++i) CHECK(back.raw()[i] == m.raw()[i]);
		}
	}
	std::filesystem::remove(path);
}

TEST_CASE("a pinned blend survives the checkpoint round trip") {
	nn::ModelSpec spec;
	spec.arch = nn::Arch::garch_lstm;
	nn::Model m = nn::Model::init(spec, 1.0);
	m.force_blend_zero();
	const nn::Model back = checkpoint_from_doc(checkpoint_to_doc(m));
	CHECK(back.raw().back() == -std::numeric_limits<double>::infinity());
	CHECK(back.blend() == 0.0);
}

TEST_CASE("checkpoint docs echo readable kernel values") {
	nn::ModelSpec spec;
	spec.arch = nn::Arch::garch_lstm;
	spec.kernel = garch::ModelKind::gjr;
	const nn::Model m = nn::Model::init(spec, 2.0);
	const Doc doc = checkpoint_to_doc(m);
	CHECK(doc.has("value_omega"));
	CHECK(doc.has("value_alpha"));
	CHECK(doc.has("value_lambda"));
	CHECK(doc.has("value_beta"));
	CHECK(doc.has("value_blend"));
	// echoes are ignored on load: corrupting one changes nothing
	Doc tampered;
	for (const auto& [k, v] : doc.items()) {
		tampered.put(k, k == "value_omega" ? std::string("999") : v);
	}
	const nn::Model back = checkpoint_from_doc(tampered);
	CHECK(back.raw() == m.raw());
}

TEST_CASE("checkpoint layout mismatches are rejected") {
	nn::ModelSpec spec;
	const nn::Model m = nn::Model::init(spec, 1.0);
	const Doc good = checkpoint_to_doc(m);
	Doc bad;
	for (const auto& [k, v] : good.items()) {
		bad.put(k, k == "raw_count" ? std::string("11") : v);
	}
	CHECK_THROWS_AS(checkpoint_from_doc(bad), DataError);
}
