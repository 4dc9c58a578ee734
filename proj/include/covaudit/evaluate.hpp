#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covaudit {

/// Entity attributes requested from the Evaluate endpoint. E carries the
/// extended metadata (DOI, venue, volume, issue, pages).
inline const std::vector<std::string> kDefaultAttributes = {
    "Id",     "Ti",      "Y",      "D",      "CC",    "ECC",
    "AA.AuN", "AA.AuId", "AA.AfN", "AA.AfId", "F.FN", "F.FId",
    "J.JN",   "J.JId",   "C.CN",   "C.CId",  "RId",   "E"};

struct EvaluateRequest {
  std::string expr;
  int count = 10;
  std::string model = "latest";
  int offset = 0;
  std::vector<std::string> attributes = kDefaultAttributes;

  /// Comma-joined attribute list as sent on the wire.
  std::string attribute_list() const;
  /// Throws Error when count < 1, offset < 0 or attributes is empty.
  void validate() const;
};

struct EntityAuthor {
  std::string name;                     // AA.AuN
  std::optional<std::int64_t> id;       // AA.AuId
  std::optional<std::string> affiliation;     // AA.AfN
  std::optional<std::int64_t> affiliation_id; // AA.AfId
};

struct NamedRef {
  std::string name;
  std::optional<std::int64_t> id;
};

struct ReturnedEntity {
  std::string entity_id;  // Id, kept as its decimal text
  std::string title;      // Ti
  std::optional<int> year;
  std::optional<std::string> date;
  std::optional<long long> citation_count;            // CC
  std::optional<long long> estimated_citation_count;  // ECC, stored only
  std::vector<EntityAuthor> authors;
  std::vector<NamedRef> fields_of_study;
  std::optional<NamedRef> journal;
  std::optional<NamedRef> conference;
  std::vector<std::int64_t> reference_ids;

  // Parsed from the extended metadata attribute E.
  std::optional<std::string> doi;
  std::optional<std::string> venue;  // BV
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;

  double log_probability = 0.0;
  int rank = 0;  // 1-based position in the response

  /// Distinct authors; AA lists one entry per author/affiliation pair.
  std::size_t author_count() const;
  /// Journal name for bibliographic matching: J.JN, else E.BV.
  std::optional<std::string> journal_title() const;
};

struct ResultSet {
  EvaluateRequest request;
  std::vector<ReturnedEntity> entities;
  std::string raw;
  /// Recoverable payload problems, e.g. log probabilities out of order.
  std::vector<std::string> warnings;
};

/// Parses an Evaluate JSON body. Ranks follow response order.
/// Throws MalformedPayloadError when the body is not valid JSON, lacks an
/// "entities" array, an entity lacks Id or logprob, or more than
/// request.count entities are present.
ResultSet parse_evaluate_response(std::string_view body,
                                  const EvaluateRequest& request);

}  // namespace covaudit
