#include "covaudit/evaluate.hpp"

#include <json.hpp>
#include <set>

#include "covaudit/error.hpp"

namespace covaudit {

using nlohmann::json;

namespace {

std::optional<std::string> text_of(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) {
    auto s = it->get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
  }
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  if (it->is_number()) return it->dump();
  return std::nullopt;
}

template <typename Int>
std::optional<Int> int_of(const json& obj, const char* key,
                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return it->get<Int>();
  if (it->is_string()) {
    try {
      std::size_t pos = 0;
      auto s = it->get<std::string>();
      long long v = std::stoll(s, &pos);
      if (pos == s.size()) return static_cast<Int>(v);
    } catch (const std::exception&) {
    }
  }
  throw MalformedPayloadError(where + ": attribute " + key +
                              " is not an integer");
}

void parse_extended(const json& e, ReturnedEntity& ent,
                    std::vector<std::string>& warnings,
                    const std::string& where) {
  json meta;
  if (e.is_string()) {
    try {
      meta = json::parse(e.get<std::string>());
    } catch (const json::parse_error&) {
      warnings.push_back(where + ": extended metadata E is not valid JSON");
      return;
    }
  } else {
    meta = e;
  }
  if (!meta.is_object()) {
    warnings.push_back(where + ": extended metadata E is not an object");
    return;
  }
  ent.doi = text_of(meta, "DOI");
  ent.venue = text_of(meta, "BV");
  ent.volume = text_of(meta, "V");
  ent.issue = text_of(meta, "I");
  ent.first_page = text_of(meta, "FP");
}

NamedRef named_ref(const json& obj, const char* name_key, const char* id_key,
                   const std::string& where) {
  NamedRef r;
  r.name = text_of(obj, name_key).value_or("");
  r.id = int_of<std::int64_t>(obj, id_key, where);
  return r;
}

}  // namespace

std::string EvaluateRequest::attribute_list() const {
  std::string s;
  for (const auto& a : attributes) {
    if (!s.empty()) s += ',';
    s += a;
  }
  return s;
}

void EvaluateRequest::validate() const {
  if (count < 1) throw Error("request count must be >= 1");
  if (offset < 0) throw Error("request offset must be >= 0");
  if (attributes.empty()) throw Error("request attributes must not be empty");
}

std::size_t ReturnedEntity::author_count() const {
  std::set<std::int64_t> ids;
  std::size_t anonymous = 0;
  for (const auto& a : authors) {
    if (a.id)
      ids.insert(*a.id);
    else
      ++anonymous;
  }
  return ids.size() + anonymous;
}

std::optional<std::string> ReturnedEntity::journal_title() const {
  if (journal && !journal->name.empty()) return journal->name;
  return venue;
}

ResultSet parse_evaluate_response(std::string_view body,
                                  const EvaluateRequest& request) {
  ResultSet rs;
  rs.request = request;
  rs.raw = std::string(body);

  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedPayloadError(std::string("response is not JSON: ") +
                                e.what());
  }
  if (!doc.is_object()) throw MalformedPayloadError("response is not an object");
  auto ents = doc.find("entities");
  if (ents == doc.end() || !ents->is_array())
    throw MalformedPayloadError("response has no entities array");
  if (ents->size() > static_cast<std::size_t>(request.count))
    throw MalformedPayloadError(
        "response has " + std::to_string(ents->size()) +
        " entities, more than count=" + std::to_string(request.count));

  int rank = 0;
  for (const auto& e : *ents) {
    ++rank;
    const std::string where = "entity " + std::to_string(rank);
    if (!e.is_object()) throw MalformedPayloadError(where + " is not an object");
    ReturnedEntity ent;
    ent.rank = rank;

    auto id = e.find("Id");
    if (id == e.end() || !(id->is_number_integer() || id->is_string()))
      throw MalformedPayloadError(where + " has no Id");
    ent.entity_id = id->is_string() ? id->get<std::string>()
                                    : std::to_string(id->get<long long>());

    auto lp = e.find("logprob");
    if (lp == e.end() || !lp->is_number())
      throw MalformedPayloadError(where + " has no logprob");
    ent.log_probability = lp->get<double>();

    ent.title = text_of(e, "Ti").value_or("");
    ent.year = int_of<int>(e, "Y", where);
    ent.date = text_of(e, "D");
    ent.citation_count = int_of<long long>(e, "CC", where);
    ent.estimated_citation_count = int_of<long long>(e, "ECC", where);

    if (auto aa = e.find("AA"); aa != e.end() && aa->is_array()) {
      for (const auto& a : *aa) {
        if (!a.is_object()) continue;
        EntityAuthor au;
        au.name = text_of(a, "AuN").value_or("");
        au.id = int_of<std::int64_t>(a, "AuId", where);
        au.affiliation = text_of(a, "AfN");
        au.affiliation_id = int_of<std::int64_t>(a, "AfId", where);
        ent.authors.push_back(std::move(au));
      }
    }
    if (auto f = e.find("F"); f != e.end() && f->is_array())
      for (const auto& x : *f)
        if (x.is_object()) ent.fields_of_study.push_back(named_ref(x, "FN", "FId", where));
    if (auto j = e.find("J"); j != e.end() && j->is_object())
      ent.journal = named_ref(*j, "JN", "JId", where);
    if (auto c = e.find("C"); c != e.end() && c->is_object())
      ent.conference = named_ref(*c, "CN", "CId", where);
    if (auto r = e.find("RId"); r != e.end() && r->is_array())
      for (const auto& x : *r)
        if (x.is_number_integer()) ent.reference_ids.push_back(x.get<std::int64_t>());
    if (auto ext = e.find("E"); ext != e.end() && !ext->is_null())
      parse_extended(*ext, ent, rs.warnings, where);

    if (!rs.entities.empty() &&
        ent.log_probability > rs.entities.back().log_probability)
      rs.warnings.push_back("malformed payload: log probability increases at rank " +
                            std::to_string(rank));
    rs.entities.push_back(std::move(ent));
  }
  return rs;
}

}  // namespace covaudit
