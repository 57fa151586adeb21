#include "smp/error.hpp"
#include "smp/srcmetrics.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace smp::srcmetrics;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> expected(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::size_t as_size(const std::string& s) { return static_cast<std::size_t>(std::stoul(s)); }

}  // namespace

TEST_CASE("hand-counted fixtures match the extractor") {
  const fs::path dir = fs::path(SMP_FIXTURE_DIR) / "src";
  for (const char* name : {"max.c", "sum.cpp", "Grade.java"}) {
    CAPTURE(name);
    const auto e = expected(dir / (std::string(name) + ".expected"));
    const auto* profile = profile_for_path(dir / name);
    REQUIRE(profile != nullptr);
    const auto m = measure(slurp(dir / name), *profile);
    CHECK(m.halstead.eta1 == as_size(e.at("eta1")));
    CHECK(m.halstead.eta2 == as_size(e.at("eta2")));
    CHECK(m.halstead.n1 == as_size(e.at("N1")));
    CHECK(m.halstead.n2 == as_size(e.at("N2")));
    CHECK(m.cyclomatic == as_size(e.at("cyclomatic")));
    CHECK(m.loc.total == as_size(e.at("loc_total")));
    CHECK(m.loc.source == as_size(e.at("loc_source")));
    CHECK(m.loc.comment == as_size(e.at("loc_comment")));
    CHECK(m.loc.blank == as_size(e.at("loc_blank")));
    const double n = static_cast<double>(as_size(e.at("N1")) + as_size(e.at("N2")));
    const double eta = static_cast<double>(as_size(e.at("eta1")) + as_size(e.at("eta2")));
    CHECK(std::abs(m.halstead.volume - n * std::log2(eta)) < 1e-9);
  }
}

TEST_CASE("comments and strings hide their contents from the token stream") {
  const auto tokens = tokenize("x = \"if (a && b)\"; // while\n/* for */ y = 'c';\n", c_profile());
  std::vector<std::string> lexemes;
  for (const auto& t : tokens) lexemes.push_back(t.lexeme);
  CHECK(lexemes == std::vector<std::string>{"x", "=", "\"if (a && b)\"", ";", "y", "=", "'c'", ";"});
  CHECK(cyclomatic(tokens, c_profile()) == 1);
}

TEST_CASE("escaped quotes stay inside the literal") {
  const auto tokens = tokenize(R"(s = "a\"b"; t = '\'';)", cpp_profile());
  REQUIRE(tokens.size() == 8);
  CHECK(tokens[2].lexeme == R"("a\"b")");
  CHECK(tokens[6].lexeme == R"('\'')");
}

TEST_CASE("raw strings and java text blocks are single literals") {
  const auto cpp = tokenize("auto s = R\"x(if \"quoted\" && )x\";\n", cpp_profile());
  REQUIRE(cpp.size() == 5);
  CHECK(cpp[3].cls == TokenClass::literal);
  CHECK(cyclomatic(cpp, cpp_profile()) == 1);
  const auto java = tokenize("String s = \"\"\"\n  if (x) { }\n\"\"\";\n", java_profile());
  REQUIRE(java.size() == 5);
  CHECK(java[3].cls == TokenClass::literal);
}

TEST_CASE("preprocessor lines count as source but emit no tokens") {
  const std::string src = "#define MAX(a, b) \\\n  ((a) > (b) ? (a) : (b))\nint x;\n";
  const auto tokens = tokenize(src, c_profile());
  CHECK(tokens.size() == 3);
  const auto loc = loc_stats(src, c_profile());
  CHECK(loc.total == 3);
  CHECK(loc.source == 3);
}

TEST_CASE("longest operator match") {
  const auto tokens = tokenize("a >>= b->c; d <=> e; x::y", cpp_profile());
  std::vector<std::string> ops;
  for (const auto& t : tokens) {
    if (t.cls == TokenClass::op) ops.push_back(t.lexeme);
  }
  CHECK(ops == std::vector<std::string>{">>=", "->", "<=>", "::"});
}

TEST_CASE("unterminated constructs raise DataError in the tokenizer only") {
  CHECK_THROWS_AS(tokenize("int x; /* never closed", c_profile()), smp::DataError);
  CHECK_THROWS_AS(tokenize("s = \"open\n", c_profile()), smp::DataError);
  const auto loc = loc_stats("int x; /* never closed\nstill comment\n", c_profile());
  CHECK(loc.total == 2);
  CHECK(loc.comment == 2);
}

TEST_CASE("cyclomatic counts decisions, short circuits and the ternary") {
  const auto tokens = tokenize("if (a || b) while (c) for (;;) switch (d) { case 1: case 2: x = e ? 1 : 2; }",
                               c_profile());
  CHECK(cyclomatic(tokens, c_profile()) == 1 + 1 + 1 + 1 + 1 + 2 + 1);
  const auto java = tokenize("try { f(); } catch (E e) { }", java_profile());
  CHECK(cyclomatic(java, java_profile()) == 2);
}

TEST_CASE("LOC counts blank, comment-only and mixed lines") {
  const std::string src = "\n// only comment\nint a; // mixed\n\n/* a\n   b */ int c;\n";
  const auto loc = loc_stats(src, c_profile());
  CHECK(loc.total == 6);
  CHECK(loc.blank == 2);
  CHECK(loc.comment == 4);
  CHECK(loc.source == 2);
  CHECK(std::abs(loc.comment_fraction - 4.0 / 6.0) < 1e-15);
}

TEST_CASE("file_mi floors a zero volume at one") {
  const auto r = file_mi("x\n", c_profile(), smp::mi::Variant::visual_studio);
  CHECK(r.metrics.halstead.volume == 0.0);
  const double expected = (171.0 - 0.23 * 1 - 16.2 * std::log(1.0)) * 100.0 / 171.0;
  CHECK(std::abs(r.score.value - expected) < 1e-12);
}

TEST_CASE("profile lookup") {
  CHECK(profile_for_path("a/b.HPP") == &cpp_profile());
  CHECK(profile_for_path("x.java") == &java_profile());
  CHECK(profile_for_path("x.py") == nullptr);
  CHECK(&profile_by_name("C++") == &cpp_profile());
  CHECK_THROWS_AS(profile_by_name("rust"), smp::ConfigError);
}
