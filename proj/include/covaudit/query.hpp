#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace covaudit {

enum class QueryMode { title_exact, title_words };

inline constexpr QueryMode kAllModes[] = {QueryMode::title_exact,
                                          QueryMode::title_words};

std::string_view to_string(QueryMode m) noexcept;
/// Accepts "title_exact"/"ti_ex" and "title_words"/"ti_wo".
std::optional<QueryMode> parse_query_mode(std::string_view s) noexcept;

/// Lowercase words dropped from title-word queries.
class StopwordList {
 public:
  StopwordList() = default;
  /// Entries are lowercased; throws Error if one contains whitespace.
  StopwordList(std::initializer_list<std::string_view> words);

  /// UTF-8, one word per line, '#' starts a comment line.
  static StopwordList load(const std::filesystem::path& path);

  void add(std::string_view word);
  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }
  const std::set<std::string, std::less<>>& words() const noexcept { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
};

struct QueryExpression {
  QueryMode mode = QueryMode::title_exact;
  std::string text;
  std::size_t token_count = 0;  // 0 for title_exact
};

/// Lowercases, turns every character that is not a letter or digit into a
/// space, collapses space runs and trims. Input is NFC-normalized first.
/// Throws EmptyTitleError when nothing survives.
std::string normalize_exact_title(std::string_view title);

/// Title words for a words query: stopwords and all-digit words removed,
/// apostrophe words reduced to their longest apostrophe-free part (left part
/// on a tie), then de-duplicated and sorted bytewise.
/// Throws EmptyTokenListError when nothing survives.
std::vector<std::string> tokenize_for_words(std::string_view title,
                                            const StopwordList& stopwords);

/// Left-nested And(...) over W='<token>' terms in list order; a single
/// token yields the bare term.
QueryExpression build_words_query(const std::vector<std::string>& tokens);

/// Ti='<normalized title>'.
QueryExpression build_exact_query(std::string_view title);

/// Convenience: the query for `mode`.
QueryExpression build_query(QueryMode mode, std::string_view title,
                            const StopwordList& stopwords);

}  // namespace covaudit
