#include "smp/srcmetrics.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace smp::srcmetrics {

namespace {

const std::vector<std::string> kCOperators = {
    ">>=", "<<=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=",
    "*=",  "/=",  "%=",  "&=", "|=", "^=", "+",  "-",  "*",  "/",  "%",  "<",  ">",  "!",  "~",  "&",
    "|",   "^",   "=",   "?",  ":",  ".",
};

const std::vector<std::string> kCKeywords = {
    "auto",   "break",    "case",     "char",   "const",    "continue", "default", "do",
    "double", "else",     "enum",     "extern", "float",    "for",      "goto",    "if",
    "inline", "int",      "long",     "register", "restrict", "return", "short",   "signed",
    "sizeof", "static",   "struct",   "switch", "typedef",  "union",    "unsigned", "void",
    "volatile", "while",  "_Bool",
};

const std::vector<std::string> kCppExtraKeywords = {
    "alignas", "alignof", "bool", "catch", "class", "constexpr", "const_cast", "decltype", "delete",
    "dynamic_cast", "explicit", "export", "friend", "mutable", "namespace", "new", "noexcept", "operator",
    "private", "protected", "public", "reinterpret_cast", "static_assert", "static_cast", "template", "this",
    "thread_local", "throw", "try", "typeid", "typename", "using", "virtual", "wchar_t", "char8_t",
    "char16_t", "char32_t", "concept", "requires", "co_await", "co_return", "co_yield", "consteval",
    "constinit",
};

const std::vector<std::string> kJavaKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp", "super",
    "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void", "volatile", "while",
    "var", "record", "yield",
};

void sort_operators(LanguageProfile& p) {
  std::stable_sort(p.operators.begin(), p.operators.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

LanguageProfile make_c() {
  LanguageProfile p;
  p.name = "c";
  p.preprocessor = true;
  p.operators = kCOperators;
  p.keywords = kCKeywords;
  p.decision_keywords = {"if", "while", "for", "case"};
  p.short_circuit = {"&&", "||"};
  sort_operators(p);
  return p;
}

LanguageProfile make_cpp() {
  LanguageProfile p = make_c();
  p.name = "cpp";
  p.raw_strings = true;
  p.operators.insert(p.operators.end(), {"::", "->*", ".*", "<=>"});
  p.keywords.insert(p.keywords.end(), kCppExtraKeywords.begin(), kCppExtraKeywords.end());
  p.literal_keywords = {"true", "false", "nullptr"};
  p.decision_keywords = {"if", "while", "for", "case", "catch"};
  sort_operators(p);
  return p;
}

LanguageProfile make_java() {
  LanguageProfile p;
  p.name = "java";
  p.operators = kCOperators;
  p.operators.insert(p.operators.end(), {">>>", ">>>=", "::", "@"});
  p.keywords = kJavaKeywords;
  p.literal_keywords = {"true", "false", "null"};
  p.decision_keywords = {"if", "while", "for", "case", "catch"};
  p.short_circuit = {"&&", "||"};
  sort_operators(p);
  return p;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

/// One pass over the text: emits tokens and flags each physical line as
/// holding code and/or comment content.
class Scanner {
 public:
  Scanner(std::string_view src, const LanguageProfile& profile, bool strict)
      : src_(src), profile_(profile), strict_(strict) {
    std::size_t lines = 0;
    for (char c : src_) lines += c == '\n';
    if (!src_.empty() && src_.back() != '\n') ++lines;
    code_.assign(lines + 1, false);
    comment_.assign(lines + 1, false);
  }

  void run() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        if (!continuation_) directive_ = false;
        continuation_ = false;
        at_line_start_ = true;
        ++line_;
        ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
        continue;
      }
      if (directive_ && c == '\\' && next_is_newline(pos_ + 1)) {
        continuation_ = true;
        ++pos_;
        continue;
      }
      continuation_ = false;
      if (starts(profile_.line_comment)) {
        mark_comment(line_);
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (starts(profile_.block_open)) {
        scan_block_comment();
        continue;
      }
      if (at_line_start_ && profile_.preprocessor && c == '#') {
        directive_ = true;
        at_line_start_ = false;
        mark_code(line_);
        ++pos_;
        continue;
      }
      at_line_start_ = false;
      scan_token();
    }
  }

  TokenStream tokens;
  std::vector<bool> code_;
  std::vector<bool> comment_;

 private:
  bool starts(std::string_view s) const { return !s.empty() && src_.substr(pos_, s.size()) == s; }

  bool next_is_newline(std::size_t at) const {
    while (at < src_.size() && src_[at] == '\r') ++at;
    return at < src_.size() && src_[at] == '\n';
  }

  void mark_code(std::size_t line) {
    if (line < code_.size()) code_[line] = true;
  }
  void mark_comment(std::size_t line) {
    if (line < comment_.size()) comment_[line] = true;
  }

  void emit(std::string lexeme, TokenClass cls, std::size_t line) {
    mark_code(line);
    if (directive_) return;
    tokens.push_back(Token{std::move(lexeme), cls, line});
  }

  void scan_block_comment() {
    const auto start_line = line_;
    pos_ += profile_.block_open.size();
    mark_comment(line_);
    while (pos_ < src_.size() && !starts(profile_.block_close)) {
      if (src_[pos_] == '\n') {
        ++line_;
        mark_comment(line_);
      }
      ++pos_;
    }
    if (pos_ >= src_.size()) {
      if (strict_) throw DataError(fmt::format("line {}: unterminated block comment", start_line));
      return;
    }
    pos_ += profile_.block_close.size();
  }

  void scan_quoted(std::size_t begin, char quote) {
    const auto start_line = line_;
    ++pos_;  // opening quote
    while (pos_ < src_.size() && src_[pos_] != quote) {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
        if (src_[pos_ + 1] == '\n') ++line_;
        pos_ += 2;
        continue;
      }
      if (src_[pos_] == '\n') break;
      ++pos_;
    }
    if (pos_ >= src_.size() || src_[pos_] != quote) {
      if (strict_) {
        throw DataError(fmt::format("line {}: unterminated {} literal", start_line, quote == '"' ? "string" : "character"));
      }
      emit(std::string(src_.substr(begin, pos_ - begin)), TokenClass::literal, start_line);
      return;
    }
    ++pos_;
    emit(std::string(src_.substr(begin, pos_ - begin)), TokenClass::literal, start_line);
  }

  void scan_delimited(std::size_t begin, std::string_view close) {
    const auto start_line = line_;
    while (pos_ < src_.size() && !starts(close)) {
      if (src_[pos_] == '\n') {
        ++line_;
        mark_code(line_);
      }
      ++pos_;
    }
    if (pos_ >= src_.size()) {
      if (strict_) throw DataError(fmt::format("line {}: unterminated string literal", start_line));
    } else {
      pos_ += close.size();
    }
    emit(std::string(src_.substr(begin, pos_ - begin)), TokenClass::literal, start_line);
  }

  void scan_raw_string(std::size_t begin) {
    // pos_ at the opening quote of R"delim(
    const auto open = src_.find('(', pos_);
    if (open == std::string_view::npos) {
      if (strict_) throw DataError(fmt::format("line {}: malformed raw string literal", line_));
      pos_ = src_.size();
      return;
    }
    const std::string close = ")" + std::string(src_.substr(pos_ + 1, open - pos_ - 1)) + "\"";
    pos_ = open + 1;
    scan_delimited(begin, close);
  }

  void scan_token() {
    const char c = src_[pos_];
    const auto begin = pos_;
    if (profile_.name == "java" && starts("\"\"\"")) {
      pos_ += 3;
      scan_delimited(begin, "\"\"\"");
      return;
    }
    if (c == '"' || c == '\'') {
      scan_quoted(begin, c);
      return;
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      const auto word = src_.substr(begin, pos_ - begin);
      if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && profile_.preprocessor) {
        static const std::set<std::string_view> prefixes = {"L", "u", "U", "u8"};
        static const std::set<std::string_view> raw_prefixes = {"R", "LR", "uR", "UR", "u8R"};
        if (profile_.raw_strings && src_[pos_] == '"' && raw_prefixes.count(word)) {
          scan_raw_string(begin);
          return;
        }
        if (prefixes.count(word)) {
          scan_quoted(begin, src_[pos_]);
          return;
        }
      }
      TokenClass cls = TokenClass::identifier;
      if (contains(profile_.literal_keywords, word)) {
        cls = TokenClass::literal;
      } else if (contains(profile_.keywords, word)) {
        cls = TokenClass::keyword;
      }
      emit(std::string(word), cls, line_);
      return;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      ++pos_;
      while (pos_ < src_.size()) {
        const char d = src_[pos_];
        const char prev = src_[pos_ - 1];
        if (is_ident_char(d) || d == '.' || (d == '\'' && pos_ + 1 < src_.size() && is_ident_char(src_[pos_ + 1]))) {
          ++pos_;
        } else if ((d == '+' || d == '-') && (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P')) {
          ++pos_;
        } else {
          break;
        }
      }
      emit(std::string(src_.substr(begin, pos_ - begin)), TokenClass::literal, line_);
      return;
    }
    for (const auto& op : profile_.operators) {
      if (starts(op)) {
        pos_ += op.size();
        emit(op, TokenClass::op, line_);
        return;
      }
    }
    ++pos_;
    emit(std::string(1, c), TokenClass::punctuation, line_);
  }

  std::string_view src_;
  const LanguageProfile& profile_;
  bool strict_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  bool at_line_start_ = true;
  bool directive_ = false;
  bool continuation_ = false;
};

}  // namespace

const LanguageProfile& c_profile() {
  static const LanguageProfile p = make_c();
  return p;
}

const LanguageProfile& cpp_profile() {
  static const LanguageProfile p = make_cpp();
  return p;
}

const LanguageProfile& java_profile() {
  static const LanguageProfile p = make_java();
  return p;
}

const LanguageProfile& profile_by_name(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "c") return c_profile();
  if (s == "cpp" || s == "c++" || s == "cxx") return cpp_profile();
  if (s == "java") return java_profile();
  throw ConfigError(fmt::format("unknown language profile '{}' (expected c, cpp, java)", name));
}

const LanguageProfile* profile_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".c" || ext == ".h") return &c_profile();
  if (ext == ".cc" || ext == ".cpp" || ext == ".cxx" || ext == ".hpp" || ext == ".hh" || ext == ".hxx") {
    return &cpp_profile();
  }
  if (ext == ".java") return &java_profile();
  return nullptr;
}

TokenStream tokenize(std::string_view source, const LanguageProfile& profile) {
  Scanner s(source, profile, true);
  s.run();
  return std::move(s.tokens);
}

HalsteadCounts halstead(const TokenStream& tokens, const LanguageProfile& /*profile*/) {
  std::set<std::string> operators;
  std::set<std::string> operands;
  HalsteadCounts h;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    switch (t.cls) {
      case TokenClass::identifier:
      case TokenClass::literal:
        operands.insert(t.lexeme);
        ++h.n2;
        break;
      case TokenClass::op:
      case TokenClass::keyword:
        operators.insert(t.lexeme);
        ++h.n1;
        break;
      case TokenClass::punctuation:
        // Calls count their parentheses once; subscripts count '[]'.
        if (t.lexeme == "(" && i > 0 && tokens[i - 1].cls == TokenClass::identifier) {
          operators.insert("()");
          ++h.n1;
        } else if (t.lexeme == "[") {
          operators.insert("[]");
          ++h.n1;
        }
        break;
    }
  }
  h.eta1 = operators.size();
  h.eta2 = operands.size();
  const auto vocabulary = h.eta1 + h.eta2;
  if (vocabulary >= 2) {
    h.volume = static_cast<double>(h.n1 + h.n2) * std::log2(static_cast<double>(vocabulary));
  }
  return h;
}

std::size_t cyclomatic(const TokenStream& tokens, const LanguageProfile& profile) {
  std::size_t decisions = 0;
  for (const auto& t : tokens) {
    if (t.cls == TokenClass::keyword && contains(profile.decision_keywords, t.lexeme)) ++decisions;
    if (t.cls == TokenClass::op && (contains(profile.short_circuit, t.lexeme) || t.lexeme == "?")) ++decisions;
  }
  return 1 + decisions;
}

LocStats loc_stats(std::string_view source, const LanguageProfile& profile) {
  Scanner s(source, profile, false);
  s.run();
  LocStats st;
  st.total = s.code_.size() - 1;
  for (std::size_t line = 1; line <= st.total; ++line) {
    st.source += s.code_[line];
    st.comment += s.comment_[line];
    st.blank += !s.code_[line] && !s.comment_[line];
  }
  st.comment_fraction = static_cast<double>(st.comment) / static_cast<double>(std::max<std::size_t>(1, st.total));
  return st;
}

FileMetrics measure(std::string_view source, const LanguageProfile& profile) {
  const auto tokens = tokenize(source, profile);
  FileMetrics m;
  m.halstead = halstead(tokens, profile);
  m.cyclomatic = cyclomatic(tokens, profile);
  m.loc = loc_stats(source, profile);
  return m;
}

FileReport file_mi(std::string_view source, const LanguageProfile& profile, mi::Variant variant) {
  FileReport r;
  r.metrics = measure(source, profile);
  mi::Inputs in;
  in.volume = std::max(1.0, r.metrics.halstead.volume);
  in.cyclomatic = static_cast<double>(r.metrics.cyclomatic);
  in.loc = static_cast<double>(r.metrics.loc.source);
  in.comment_fraction = r.metrics.loc.comment_fraction;
  r.score = mi::compute(in, variant);
  return r;
}

}  // namespace smp::srcmetrics
