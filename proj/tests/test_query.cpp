#include <doctest.h>

#include <algorithm>
#include <clocale>
#include <cwctype>
#include <random>
#include <set>

#include "covaudit/error.hpp"
#include "covaudit/query.hpp"
#include "support.hpp"

using namespace covaudit;

namespace {

const char* kHeeGer =
    "HEE-GER: a systematic review of German economic evaluations of health "
    "care published 1990-2004";

// Reference normalizer: wide characters under C.UTF-8, no ICU.
std::string reference_normalize(const std::string& in) {
  static const bool locale_ok = std::setlocale(LC_CTYPE, "C.UTF-8") != nullptr;
  REQUIRE(locale_ok);
  std::wstring w(in.size() + 1, L'\0');
  std::size_t n = std::mbstowcs(w.data(), in.c_str(), w.size());
  REQUIRE(n != static_cast<std::size_t>(-1));
  w.resize(n);
  std::wstring out;
  bool pending_space = false;
  for (wchar_t c : w) {
    if (std::iswalnum(static_cast<wint_t>(c))) {
      if (pending_space && !out.empty()) out.push_back(L' ');
      pending_space = false;
      out.push_back(static_cast<wchar_t>(std::towlower(static_cast<wint_t>(c))));
    } else {
      pending_space = true;
    }
  }
  std::string bytes(out.size() * 4 + 1, '\0');
  std::size_t m = std::wcstombs(bytes.data(), out.c_str(), bytes.size());
  REQUIRE(m != static_cast<std::size_t>(-1));
  bytes.resize(m);
  return bytes;
}

void append_utf8(std::string& s, char32_t c) {
  if (c < 0x80) {
    s.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    s.push_back(static_cast<char>(0xC0 | (c >> 6)));
    s.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    s.push_back(static_cast<char>(0xE0 | (c >> 12)));
    s.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

// Printable ASCII, Latin-1 letters and symbols, basic Greek.
std::vector<char32_t> code_point_pool() {
  std::vector<char32_t> pool;
  for (char32_t c = 0x20; c < 0x7F; ++c) pool.push_back(c);
  for (char32_t c : {0xA1, 0xA9, 0xAB, 0xB0, 0xBB, 0xBF, 0xD7, 0xF7}) pool.push_back(c);
  for (char32_t c = 0xC0; c <= 0xFF; ++c)
    if (c != 0xD7 && c != 0xF7) pool.push_back(c);
  for (char32_t c = 0x391; c <= 0x3A9; ++c)
    if (c != 0x3A2) pool.push_back(c);
  for (char32_t c = 0x3AC; c <= 0x3C9; ++c) pool.push_back(c);
  return pool;
}

std::string random_title(std::mt19937_64& rng, const std::vector<char32_t>& pool) {
  std::uniform_int_distribution<std::size_t> len(1, 40);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) append_utf8(s, pool[pick(rng)]);
  return s;
}

// Test-only parser for words queries: recovers the W= terms in order and
// checks left nesting.
struct WordsParser {
  std::string_view s;
  std::size_t pos = 0;

  bool eat(std::string_view lit) {
    if (s.substr(pos, lit.size()) != lit) return false;
    pos += lit.size();
    return true;
  }
  std::string term() {
    REQUIRE(eat("W='"));
    auto end = s.find('\'', pos);
    REQUIRE(end != std::string_view::npos);
    std::string t(s.substr(pos, end - pos));
    pos = end + 1;
    return t;
  }
  // expr := term | And(expr,term)
  std::vector<std::string> expr() {
    if (eat("And(")) {
      auto left = expr();
      REQUIRE(eat(","));
      left.push_back(term());
      REQUIRE(eat(")"));
      return left;
    }
    return {term()};
  }
  std::vector<std::string> parse() {
    auto out = expr();
    REQUIRE(pos == s.size());
    return out;
  }
};

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

StopwordList shipped() {
  return StopwordList::load(testsupport::data_dir() / "stopwords.txt");
}

}  // namespace

TEST_CASE("exact title normalization of the documented example") {
  CHECK(normalize_exact_title(kHeeGer) ==
        "hee ger a systematic review of german economic evaluations of health "
        "care published 1990 2004");
  CHECK(normalize_exact_title("abc") == "abc");
  CHECK(normalize_exact_title("  α-Helix   (Test)!! ") == reference_normalize("  α-Helix   (Test)!! "));
  CHECK(normalize_exact_title("  α-Helix   (Test)!! ") == "α helix test");
}

TEST_CASE("exact title normalization rejects titles without letters or digits") {
  CHECK_THROWS_AS(normalize_exact_title("?!-- ..."), EmptyTitleError);
  CHECK_THROWS_AS(normalize_exact_title(""), EmptyTitleError);
  CHECK_THROWS_AS(build_exact_query("::"), EmptyTitleError);
}

TEST_CASE("decomposed input is composed before classification") {
  // e + combining acute vs precomposed é
  CHECK(normalize_exact_title("Caf\x65\xCC\x81 Society") == "caf\xC3\xA9 society");
}

TEST_CASE("random titles agree with the reference normalizer") {
  std::mt19937_64 rng(7);
  auto pool = code_point_pool();
  int compared = 0;
  for (int i = 0; i < 3000; ++i) {
    auto title = random_title(rng, pool);
    auto expected = reference_normalize(title);
    if (expected.empty()) {
      CHECK_THROWS_AS(normalize_exact_title(title), EmptyTitleError);
      continue;
    }
    auto got = normalize_exact_title(title);
    CHECK_MESSAGE(got == expected, "title: " << title);
    CHECK(build_exact_query(title).text == "Ti='" + expected + "'");
    ++compared;
  }
  CHECK(compared > 2500);
}

TEST_CASE("exact normalization is idempotent and yields words separated by single spaces") {
  std::mt19937_64 rng(11);
  auto pool = code_point_pool();
  for (int i = 0; i < 2000; ++i) {
    auto title = random_title(rng, pool);
    std::string once;
    try {
      once = normalize_exact_title(title);
    } catch (const EmptyTitleError&) {
      continue;
    }
    CHECK(normalize_exact_title(once) == once);
    CHECK(once.front() != ' ');
    CHECK(once.back() != ' ');
    CHECK(once.find("  ") == std::string::npos);
    CHECK(reference_normalize(once) == once);
  }
}

TEST_CASE("title words of the documented example") {
  auto sw = shipped();
  CHECK(sw.contains("a"));
  CHECK(sw.contains("of"));
  auto tokens = tokenize_for_words(kHeeGer, sw);
  CHECK(tokens == std::vector<std::string>{"care", "economic", "evaluations", "ger",
                                           "german", "health", "hee", "published",
                                           "review", "systematic"});
}

TEST_CASE("words query serialization") {
  CHECK(build_words_query({"care", "economic"}).text == "And(W='care',W='economic')");
  CHECK(build_words_query({"x"}).text == "W='x'");
  CHECK(build_words_query({"x"}).token_count == 1);
  CHECK_THROWS_AS(build_words_query({}), EmptyTokenListError);
  auto q = build_query(QueryMode::title_words, kHeeGer, shipped());
  CHECK(q.text ==
        "And(And(And(And(And(And(And(And(And(W='care',W='economic'),"
        "W='evaluations'),W='ger'),W='german'),W='health'),W='hee'),"
        "W='published'),W='review'),W='systematic')");
  CHECK(q.token_count == 10);
  auto e = build_query(QueryMode::title_exact, kHeeGer, shipped());
  CHECK(e.text ==
        "Ti='hee ger a systematic review of german economic evaluations of "
        "health care published 1990 2004'");
  CHECK(e.token_count == 0);
}

TEST_CASE("fully filtered titles signal an empty token list") {
  StopwordList sw{"the", "of", "and"};
  CHECK_THROWS_AS(tokenize_for_words("the of and", sw), EmptyTokenListError);
  CHECK_THROWS_AS(tokenize_for_words("1990 - 2004", sw), EmptyTokenListError);
  CHECK_THROWS_AS(build_query(QueryMode::title_words, "The, of AND", sw),
                  EmptyTokenListError);
}

TEST_CASE("apostrophe words keep their longer part") {
  auto sw = shipped();
  auto t = tokenize_for_words("l'analyse économique", sw);
  CHECK(std::find(t.begin(), t.end(), "analyse") != t.end());
  CHECK(std::find(t.begin(), t.end(), "l") == t.end());

  StopwordList none;
  CHECK(tokenize_for_words("rock'n'roll", none) == std::vector<std::string>{"rock"});
  CHECK(tokenize_for_words("ab'cd", none) == std::vector<std::string>{"ab"});
  CHECK(tokenize_for_words("parents'", none) == std::vector<std::string>{"parents"});
  // Typographic apostrophes behave like the straight one.
  CHECK(tokenize_for_words("children\xE2\x80\x99s", none) ==
        std::vector<std::string>{"children"});
  CHECK(tokenize_for_words("O\xCA\xBCNeill", none) == std::vector<std::string>{"neill"});
  // Lengths are in code points, so "ab" and "öl" tie and the left part wins.
  CHECK(tokenize_for_words("ab'öl", none) == std::vector<std::string>{"ab"});
  CHECK(tokenize_for_words("a'öle", none) == std::vector<std::string>{"öle"});
  // A stopword fragment is dropped entirely.
  StopwordList sw2{"dell"};
  CHECK_THROWS_AS(tokenize_for_words("dell'a", sw2), EmptyTokenListError);
  // Digit-only fragments are numbers.
  CHECK_THROWS_AS(tokenize_for_words("1990's", none), EmptyTokenListError);
}

TEST_CASE("stopword list semantics") {
  StopwordList sw{"The", "ÜBER"};
  CHECK(sw.contains("the"));
  CHECK(sw.contains("über"));
  CHECK_FALSE(sw.contains("The"));
  CHECK_THROWS_AS(StopwordList({"two words"}), Error);
  auto shipped_list = shipped();
  CHECK(shipped_list.size() > 1000);
  for (auto w : {"hee", "ger", "care", "economic", "evaluations", "german", "health",
                 "published", "review", "systematic"})
    CHECK_FALSE(shipped_list.contains(w));

  testsupport::TempDir dir;
  testsupport::spit(dir / "bad.txt", "# header\nfine\nnot fine\n");
  CHECK_THROWS_AS(StopwordList::load(dir / "bad.txt"), ParseError);
  CHECK_THROWS_AS(StopwordList::load(dir / "missing.txt"), Error);
}

TEST_CASE("token list properties over random titles") {
  std::mt19937_64 rng(23);
  auto pool = code_point_pool();
  auto sw = shipped();
  std::vector<std::string> words = {"care", "the", "of", "l'eau", "2004", "ÉTAT",
                                    "d'analyse", "x1", "don't", "αβγ", "über"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    std::string title = (i % 2) ? random_title(rng, pool) : "";
    for (int k = 0; k < 4; ++k) title += " " + words[pick(rng)];
    std::vector<std::string> tokens;
    try {
      tokens = tokenize_for_words(title, sw);
    } catch (const EmptyTokenListError&) {
      continue;
    }
    CHECK(std::is_sorted(tokens.begin(), tokens.end()));
    CHECK(std::adjacent_find(tokens.begin(), tokens.end()) == tokens.end());
    auto norm = " " + normalize_exact_title(title) + " ";
    for (const auto& t : tokens) {
      CHECK_FALSE(sw.contains(t));
      CHECK_FALSE(std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }));
      CHECK(t.find(' ') == std::string::npos);
      CHECK_MESSAGE(norm.find(" " + t + " ") != std::string::npos, title);
    }

    auto q = build_words_query(tokens);
    CHECK(count_of(q.text, "W='") == tokens.size());
    CHECK(count_of(q.text, "And(") == tokens.size() - 1);
    CHECK(WordsParser{q.text}.parse() == tokens);
  }
}

TEST_CASE("query mode names") {
  CHECK(parse_query_mode("ti_ex") == QueryMode::title_exact);
  CHECK(parse_query_mode("title_words") == QueryMode::title_words);
  CHECK_FALSE(parse_query_mode("title"));
  CHECK(to_string(QueryMode::title_words) == "title_words");
}
