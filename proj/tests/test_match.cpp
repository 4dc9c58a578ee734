#include <doctest.h>

#include <bitset>
#include <random>

#include "covaudit/match.hpp"
#include "support.hpp"

using namespace covaudit;

namespace {

PublicationRecord record(std::string id = "R1") {
  PublicationRecord r;
  r.record_id = std::move(id);
  r.title = "Soil nitrogen: a review";
  return r;
}

ReturnedEntity entity(std::string id, int rank, std::string title = "something else") {
  ReturnedEntity e;
  e.entity_id = std::move(id);
  e.rank = rank;
  e.title = std::move(title);
  return e;
}

ResultSet results(std::vector<ReturnedEntity> es) {
  ResultSet rs;
  rs.entities = std::move(es);
  return rs;
}

MatchResult result(std::string rid, std::string eid, MatchType t, int rank = 1) {
  MatchResult m;
  m.record_id = std::move(rid);
  m.entity_id = std::move(eid);
  m.match_type = t;
  m.rank = rank;
  return m;
}

// ASCII-only oracle helpers.
std::string lower_trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  std::string out = s.substr(b, e - b + 1);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string clean_title(const std::string& s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (gap && !out.empty()) out += ' ';
      gap = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      gap = true;
    }
  }
  return out;
}

bool eq_present(const std::optional<std::string>& a, const std::optional<std::string>& b) {
  return a && b && !lower_trim(*a).empty() && lower_trim(*a) == lower_trim(*b);
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::optional<std::string> maybe(std::mt19937_64& rng, const std::vector<std::string>& v) {
  if (std::bernoulli_distribution(0.2)(rng)) return std::nullopt;
  return pick(rng, v);
}

}  // namespace

TEST_CASE("each rule in isolation") {
  auto r = record();
  r.doi = " 10.1000/ABC ";
  auto e = entity("1", 1);
  e.doi = "10.1000/abc";
  CHECK(match_entity(r, e) == MatchSet{true, false, false});

  r.doi.reset();
  e.doi.reset();
  e.title = "SOIL NITROGEN -- A REVIEW.";
  CHECK(match_entity(r, e) == MatchSet{false, true, false});

  e.title = "different";
  r.journal_title = "Journal of Soil";
  r.volume = "12";
  r.issue = "3";
  r.first_page = "45";
  e.journal = NamedRef{"journal of soil ", 1};
  e.volume = "12";
  e.issue = "3";
  e.first_page = " 45";
  CHECK(match_entity(r, e) == MatchSet{false, false, true});
  e.issue.reset();
  CHECK(match_entity(r, e).empty());
  e.issue = "3";
  e.journal.reset();
  e.venue = "JOURNAL OF SOIL";
  CHECK(match_entity(r, e).bib);
}

TEST_CASE("bib comparison folds case beyond ASCII") {
  auto r = record();
  r.journal_title = "Zeitschrift für Geschichte";
  r.volume = r.issue = r.first_page = "1";
  auto e = entity("1", 1);
  e.journal = NamedRef{"ZEITSCHRIFT FÜR GESCHICHTE", 2};
  e.volume = e.issue = e.first_page = "1";
  CHECK(match_entity(r, e).bib);
}

TEST_CASE("titles that normalize to nothing never match") {
  auto r = record();
  r.title = "???";
  auto e = entity("1", 1, "!!!");
  CHECK(match_entity(r, e).empty());
}

TEST_CASE("match predicate agrees with an independent oracle") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> dois = {"10.1/a", "10.1/A", " 10.1/a", "10.2/b", "", "  "};
  const std::vector<std::string> titles = {"Soil study", "soil-study!", "SOIL  STUDY",
                                           "Soil studies", "--", "soil study 2"};
  const std::vector<std::string> journals = {"J Soil", "j soil ", "J. Soil", ""};
  const std::vector<std::string> small = {"1", " 1", "2", "01", ""};
  for (int i = 0; i < 20000; ++i) {
    PublicationRecord r;
    r.record_id = "R";
    r.title = pick(rng, titles);
    r.doi = maybe(rng, dois);
    r.journal_title = maybe(rng, journals);
    r.volume = maybe(rng, small);
    r.issue = maybe(rng, small);
    r.first_page = maybe(rng, small);
    ReturnedEntity e;
    e.entity_id = "E";
    e.rank = 1;
    e.title = pick(rng, titles);
    e.doi = maybe(rng, dois);
    if (auto j = maybe(rng, journals)) e.journal = NamedRef{*j, 1};
    e.venue = maybe(rng, journals);
    e.volume = maybe(rng, small);
    e.issue = maybe(rng, small);
    e.first_page = maybe(rng, small);

    std::optional<std::string> ejournal;
    if (e.journal && !e.journal->name.empty()) ejournal = e.journal->name;
    else ejournal = e.venue;
    MatchSet expected;
    expected.doi = eq_present(r.doi, e.doi);
    auto ct = clean_title(r.title);
    expected.title = !ct.empty() && ct == clean_title(e.title);
    expected.bib = eq_present(r.journal_title, ejournal) && eq_present(r.volume, e.volume) &&
                   eq_present(r.issue, e.issue) && eq_present(r.first_page, e.first_page);
    auto got = match_entity(r, e);
    REQUIRE(got == expected);

    // symmetric in which side was cleaned first
    ReturnedEntity pre = e;
    pre.title = clean_title(e.title).empty() ? e.title : clean_title(e.title);
    PublicationRecord rpre = r;
    rpre.title = ct.empty() ? r.title : ct;
    CHECK(match_entity(rpre, e).title == match_entity(r, pre).title);
  }
}

TEST_CASE("priority beats rank") {
  auto r = record();
  r.doi = "10.1/x";
  auto e1 = entity("a", 1, r.title);
  auto e3 = entity("c", 3);
  e3.doi = "10.1/X";
  e3.year = 2011;
  e3.citation_count = 4;
  auto best = select_best(r, results({e1, entity("b", 2), e3}), QueryMode::title_words);
  REQUIRE(best);
  CHECK(best->entity_id == "c");
  CHECK(best->match_type == MatchType::doi);
  CHECK(best->rank == 3);
  CHECK(best->mode == QueryMode::title_words);
  CHECK(best->matched_year == 2011);
  CHECK(best->matched_doi == "10.1/X");
  CHECK(best->matched_citation_count == 4);

  std::vector<ReturnedEntity> none;
  for (int i = 1; i <= 10; ++i) none.push_back(entity(std::to_string(i), i));
  CHECK_FALSE(select_best(r, results(none), QueryMode::title_exact));
  CHECK_FALSE(select_best(r, results({}), QueryMode::title_exact));
}

TEST_CASE("selection equals exhaustive enumeration over entity and match type") {
  std::mt19937_64 rng(29);
  auto r = record();
  r.doi = "10.1/x";
  r.journal_title = "J";
  r.volume = r.issue = r.first_page = "1";
  std::bernoulli_distribution coin(0.3);
  for (int round = 0; round < 3000; ++round) {
    std::vector<ReturnedEntity> es;
    int n = std::uniform_int_distribution<int>(0, 10)(rng);
    for (int i = 1; i <= n; ++i) {
      auto e = entity("E" + std::to_string(i), i);
      if (coin(rng)) e.doi = "10.1/x";
      if (coin(rng)) e.title = r.title;
      if (coin(rng)) {
        e.venue = "J";
        e.volume = e.issue = e.first_page = "1";
      }
      es.push_back(e);
    }
    // enumerate (type, rank) pairs in priority order, first hit wins
    std::optional<std::pair<MatchType, std::string>> expected;
    for (auto t : kMatchTypesByPriority) {
      for (const auto& e : es) {
        if (match_entity(r, e).contains(t)) {
          expected = {t, e.entity_id};
          break;
        }
      }
      if (expected) break;
    }
    auto got = select_best(r, results(es), QueryMode::title_exact);
    REQUIRE(got.has_value() == expected.has_value());
    if (got) {
      CHECK(got->match_type == expected->first);
      CHECK(got->entity_id == expected->second);
      for (const auto& e : es)
        if (auto b = match_entity(r, e).best()) CHECK_FALSE(outranks(*b, got->match_type));
    }
  }
}

TEST_CASE("cross-mode verdicts") {
  auto same = reconcile_modes("R1", result("R1", "E1", MatchType::title),
                              result("R1", "E1", MatchType::title));
  CHECK(same.status == CrossModeStatus::both_same_id);
  CHECK_FALSE(same.false_positive_candidate());
  auto diff = reconcile_modes("R1", result("R1", "E1", MatchType::doi),
                              result("R1", "E2", MatchType::doi));
  CHECK(diff.status == CrossModeStatus::both_different_id);
  CHECK(diff.false_positive_candidate());
  CHECK(diff.duplicate_candidate());
  CHECK(*diff.exact_entity != *diff.words_entity);
  auto mixed = reconcile_modes("R1", result("R1", "E1", MatchType::doi),
                               result("R1", "E2", MatchType::title));
  CHECK_FALSE(mixed.duplicate_candidate());
  CHECK(reconcile_modes("R1", result("R1", "E1", MatchType::bib), std::nullopt).status ==
        CrossModeStatus::only_exact);
  CHECK(reconcile_modes("R1", std::nullopt, result("R1", "E1", MatchType::bib)).status ==
        CrossModeStatus::only_words);
  CHECK(reconcile_modes("R1", std::nullopt, std::nullopt).status == CrossModeStatus::neither);
  CHECK_THROWS_AS(reconcile_modes("R1", result("R2", "E", MatchType::doi), std::nullopt),
                  std::logic_error);
}

TEST_CASE("reconciliation table and merge against bit-level oracles") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> bits(0, 15);
  std::uniform_int_distribution<int> type(0, 2);
  for (int round = 0; round < 50; ++round) {
    std::vector<CrossModeVerdict> verdicts;
    std::vector<MergedMatch> merged;
    std::size_t or_count = 0, both_diff = 0, both = 0, dup = 0;
    std::size_t cells[2][2] = {{0, 0}, {0, 0}};  // [id differs][type differs]
    for (int i = 0; i < 300; ++i) {
      std::bitset<4> b(static_cast<unsigned>(bits(rng)));  // exact?, words?, same id?, same type?
      std::string id = "R" + std::to_string(i);
      std::optional<MatchResult> ex, wo;
      auto te = static_cast<MatchType>(type(rng));
      auto tw = b[3] ? te : static_cast<MatchType>((static_cast<int>(te) + 1 + type(rng) % 2) % 3);
      if (b[0]) ex = result(id, "E" + std::to_string(i), te);
      if (b[1]) wo = result(id, b[2] ? "E" + std::to_string(i) : "F" + std::to_string(i), tw);
      verdicts.push_back(reconcile_modes(id, ex, wo));
      merged.push_back(merge_mode_results(id, ex, wo));
      or_count += (b[0] || b[1]);
      if (b[0] && b[1]) {
        ++both;
        ++cells[!b[2]][!b[3]];
        both_diff += !b[2];
        dup += !b[2] && te == MatchType::doi && tw == MatchType::doi;
      }
    }
    auto t = tabulate(verdicts);
    CHECK(t.same_id_same_type == cells[0][0]);
    CHECK(t.same_id_diff_type == cells[0][1]);
    CHECK(t.diff_id_same_type == cells[1][0]);
    CHECK(t.diff_id_diff_type == cells[1][1]);
    CHECK(t.both() == both);
    CHECK(t.different_id() == both_diff);
    CHECK(t.duplicate_doi == dup);
    CHECK(t.diff_id_same_type_by[0] + t.diff_id_same_type_by[1] + t.diff_id_same_type_by[2] ==
          t.diff_id_same_type);
    CHECK(t.both() + t.only_exact + t.only_words + t.neither == 300);
    std::size_t matched = 0;
    for (const auto& m : merged) matched += m.matched();
    CHECK(matched == or_count);
  }
}

TEST_CASE("preferred result of a merged match") {
  auto m = merge_mode_results("R1", result("R1", "E1", MatchType::title),
                              result("R1", "E2", MatchType::doi));
  CHECK(m.preferred()->entity_id == "E2");
  m = merge_mode_results("R1", result("R1", "E1", MatchType::title),
                         result("R1", "E2", MatchType::title));
  CHECK(m.preferred()->entity_id == "E1");
  m = merge_mode_results("R1", std::nullopt, result("R1", "E2", MatchType::bib));
  CHECK(m.matched());
  CHECK(m.preferred()->entity_id == "E2");
  m = merge_mode_results("R1", std::nullopt, std::nullopt);
  CHECK_FALSE(m.matched());
  CHECK(m.preferred() == nullptr);
}

TEST_CASE("doi normalization") {
  CHECK(normalize_doi("  10.1000/AbC\t") == "10.1000/abc");
  CHECK(to_string(MatchType::bib) == "bib");
  CHECK(outranks(MatchType::doi, MatchType::title));
  CHECK_FALSE(outranks(MatchType::bib, MatchType::title));
}
