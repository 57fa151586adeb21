#pragma once

#include "smp/mi.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smp::srcmetrics {

/// Lexical description of a C-family language.
struct LanguageProfile {
  std::string name;
  std::string line_comment = "//";
  std::string block_open = "/*";
  std::string block_close = "*/";
  bool preprocessor = false;  // '#' directive lines (C, C++)
  bool raw_strings = false;   // C++ R"delim(...)delim"
  std::vector<std::string> operators;        // longest first after construction
  std::vector<std::string> keywords;
  std::vector<std::string> literal_keywords; // true/false/null: operands, not keywords
  std::vector<std::string> decision_keywords;
  std::vector<std::string> short_circuit;
};

const LanguageProfile& c_profile();
const LanguageProfile& cpp_profile();
const LanguageProfile& java_profile();
/// "c", "cpp"/"c++", "java"; throws ConfigError.
const LanguageProfile& profile_by_name(std::string_view name);
/// Picks a profile from the file extension, or nullptr when unknown.
const LanguageProfile* profile_for_path(const std::filesystem::path& path);

enum class TokenClass { identifier, literal, op, keyword, punctuation };

struct Token {
  std::string lexeme;
  TokenClass cls = TokenClass::identifier;
  std::size_t line = 0;  // 1-based
};

using TokenStream = std::vector<Token>;

/// Throws DataError for an unterminated block comment or string literal.
TokenStream tokenize(std::string_view source, const LanguageProfile& profile);

struct HalsteadCounts {
  std::size_t eta1 = 0;  // distinct operators
  std::size_t eta2 = 0;  // distinct operands
  std::size_t n1 = 0;    // total operators
  std::size_t n2 = 0;    // total operands
  double volume = 0.0;
};

HalsteadCounts halstead(const TokenStream& tokens, const LanguageProfile& profile);

/// 1 + decision keywords + short-circuit operators + ternary '?'.
std::size_t cyclomatic(const TokenStream& tokens, const LanguageProfile& profile);

struct LocStats {
  std::size_t total = 0;
  std::size_t source = 0;
  std::size_t comment = 0;
  std::size_t blank = 0;
  double comment_fraction = 0.0;
};

/// Never throws; unterminated constructs run to end of file.
LocStats loc_stats(std::string_view source, const LanguageProfile& profile);

struct FileMetrics {
  HalsteadCounts halstead;
  std::size_t cyclomatic = 0;
  LocStats loc;
};

FileMetrics measure(std::string_view source, const LanguageProfile& profile);

struct FileReport {
  FileMetrics metrics;
  mi::Score score;
};

/// Metrics plus MI with L = source lines and C = comment fraction. A zero
/// Halstead volume (fewer than two distinct lexemes) enters the formula as 1.
FileReport file_mi(std::string_view source, const LanguageProfile& profile, mi::Variant variant);

}  // namespace smp::srcmetrics
