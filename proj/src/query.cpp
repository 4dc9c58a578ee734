#include "covaudit/query.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <fstream>

#include "covaudit/error.hpp"
#include "strutil.hpp"

namespace covaudit {

namespace {

bool is_apostrophe(UChar32 c) {
  return c == U'\'' || c == 0x2019 || c == 0x2018 || c == 0x02BC;
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr)
    throw Error("ICU NFC normalizer unavailable");
  return *n;
}

icu::UnicodeString to_nfc(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(s, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return out;
}

// Shared core of both normalizations. With keep_apostrophes, apostrophe
// variants become a plain ' instead of a space.
std::string normalize_core(std::string_view title, bool keep_apostrophes) {
  icu::UnicodeString src = to_nfc(icu::UnicodeString::fromUTF8(
      icu::StringPiece(title.data(), static_cast<int32_t>(title.size()))));
  icu::UnicodeString mapped;
  bool pending_space = false;
  for (int32_t i = 0; i < src.length(); i = src.moveIndex32(i, 1)) {
    UChar32 c = u_tolower(src.char32At(i));
    bool keep = u_isalpha(c) || u_isdigit(c);
    if (keep_apostrophes && is_apostrophe(c)) {
      c = U'\'';
      keep = true;
    }
    if (!keep) {
      pending_space = true;
      continue;
    }
    if (pending_space && !mapped.isEmpty()) mapped.append(UChar32(U' '));
    pending_space = false;
    mapped.append(c);
  }
  std::string out;
  to_nfc(mapped).toUTF8String(out);
  return out;
}

std::size_t codepoints(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

bool all_digits(std::string_view word) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(word.data(), static_cast<int32_t>(word.size())));
  if (u.isEmpty()) return false;
  for (int32_t i = 0; i < u.length(); i = u.moveIndex32(i, 1))
    if (!u_isdigit(u.char32At(i))) return false;
  return true;
}

std::string_view longest_apostrophe_part(std::string_view word) {
  std::string_view best;
  std::size_t best_len = 0;
  for (auto part : strutil::split(word, '\'')) {
    auto n = codepoints(part);
    if (n > best_len) {
      best = part;
      best_len = n;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(QueryMode m) noexcept {
  return m == QueryMode::title_exact ? "title_exact" : "title_words";
}

std::optional<QueryMode> parse_query_mode(std::string_view s) noexcept {
  if (s == "title_exact" || s == "ti_ex") return QueryMode::title_exact;
  if (s == "title_words" || s == "ti_wo") return QueryMode::title_words;
  return std::nullopt;
}

StopwordList::StopwordList(std::initializer_list<std::string_view> words) {
  for (auto w : words) add(w);
}

void StopwordList::add(std::string_view word) {
  auto w = strutil::trim(word);
  if (w.empty()) return;
  for (char c : w)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
      throw Error("stopword contains whitespace: '" + std::string(w) + "'");
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(w.data(), static_cast<int32_t>(w.size())));
  std::string lowered;
  to_nfc(u.toLower(icu::Locale::getRoot())).toUTF8String(lowered);
  words_.insert(std::move(lowered));
}

bool StopwordList::contains(std::string_view word) const {
  return words_.find(word) != words_.end();
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file " + path.string());
  StopwordList list;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = strutil::trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      list.add(t);
    } catch (const Error& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno), e.what());
    }
  }
  return list;
}

std::string normalize_exact_title(std::string_view title) {
  std::string out = normalize_core(title, false);
  if (out.empty())
    throw EmptyTitleError("title has no letters or digits: '" +
                          std::string(title) + "'");
  return out;
}

std::vector<std::string> tokenize_for_words(std::string_view title,
                                            const StopwordList& stopwords) {
  std::string norm = normalize_core(title, true);
  std::set<std::string> tokens;
  for (auto word : strutil::split(norm, ' ')) {
    if (word.empty() || stopwords.contains(word)) continue;
    std::string_view term = word;
    if (word.find('\'') != std::string_view::npos) {
      term = longest_apostrophe_part(word);
      if (term.empty() || stopwords.contains(term)) continue;
    }
    if (all_digits(term)) continue;
    tokens.emplace(term);
  }
  if (tokens.empty())
    throw EmptyTokenListError("no query words left in title '" +
                              std::string(title) + "'");
  return {tokens.begin(), tokens.end()};
}

QueryExpression build_words_query(const std::vector<std::string>& tokens) {
  if (tokens.empty())
    throw EmptyTokenListError("words query needs at least one token");
  std::string expr = "W='" + tokens.front() + "'";
  for (std::size_t i = 1; i < tokens.size(); ++i)
    expr = "And(" + expr + ",W='" + tokens[i] + "')";
  return {QueryMode::title_words, std::move(expr), tokens.size()};
}

QueryExpression build_exact_query(std::string_view title) {
  return {QueryMode::title_exact, "Ti='" + normalize_exact_title(title) + "'",
          0};
}

QueryExpression build_query(QueryMode mode, std::string_view title,
                            const StopwordList& stopwords) {
  if (mode == QueryMode::title_exact) return build_exact_query(title);
  return build_words_query(tokenize_for_words(title, stopwords));
}

}  // namespace covaudit
