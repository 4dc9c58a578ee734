#include "covaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "covaudit/error.hpp"
#include "strutil.hpp"

namespace covaudit {

namespace {

struct DocTypeName {
  DocumentType type;
  std::string_view name;
};

constexpr DocTypeName kDocTypeNames[] = {
    {DocumentType::journal_article, "journal_article"},
    {DocumentType::monograph, "monograph"},
    {DocumentType::edited_volume, "edited_volume"},
    {DocumentType::book_section, "book_section"},
    {DocumentType::conference_item, "conference_item"},
    {DocumentType::working_paper, "working_paper"},
    {DocumentType::newspaper_article, "newspaper_article"},
    {DocumentType::dissertation, "dissertation"},
    {DocumentType::habilitation, "habilitation"},
    {DocumentType::research_report, "research_report"},
    {DocumentType::other, "other"},
};

const std::vector<std::string_view> kKnownColumns = {
    "record_id", "title",  "doi",    "year",       "doc_type",
    "language",  "access", "institutes", "author_count", "journal",
    "volume",    "issue",  "first_page"};

const std::vector<std::string_view> kRequiredColumns = {
    "record_id", "title", "year", "doc_type", "access"};

using Row = std::map<std::string, std::string, std::less<>>;

std::optional<std::string> opt_cell(const Row& row, std::string_view key) {
  auto it = row.find(key);
  if (it == row.end()) return std::nullopt;
  auto v = strutil::trim(it->second);
  if (v.empty()) return std::nullopt;
  return std::string(v);
}

bool parse_bool(std::string_view s, bool& out) {
  auto v = strutil::ascii_lower(strutil::trim(s));
  if (v.empty() || v == "0" || v == "false" || v == "no" || v == "n") {
    out = false;
    return true;
  }
  if (v == "1" || v == "true" || v == "yes" || v == "y") {
    out = true;
    return true;
  }
  return false;
}

PublicationRecord record_from_row(const Row& row, const std::string& where) {
  PublicationRecord r;
  auto id = opt_cell(row, "record_id");
  if (!id) throw ParseError(where, "empty record_id");
  r.record_id = *id;

  auto title = row.find("title");
  r.title = title == row.end() ? std::string{} : title->second;
  if (strutil::trim(r.title).empty())
    throw ParseError(where, "empty title for record '" + r.record_id + "'");

  r.doi = opt_cell(row, "doi");

  if (auto y = opt_cell(row, "year")) {
    auto v = strutil::parse_int<int>(*y);
    if (!v) throw ParseError(where, "invalid year '" + *y + "'");
    r.publication_year = *v;
  }

  auto dt = opt_cell(row, "doc_type");
  if (!dt) throw ParseError(where, "empty doc_type");
  auto parsed_dt = parse_document_type(*dt);
  if (!parsed_dt) throw ParseError(where, "unknown doc_type '" + *dt + "'");
  r.document_type = *parsed_dt;

  r.language = opt_cell(row, "language");

  auto acc = opt_cell(row, "access");
  if (!acc) throw ParseError(where, "empty access");
  auto parsed_acc = parse_access_status(*acc);
  if (!parsed_acc) throw ParseError(where, "unknown access '" + *acc + "'");
  r.access_status = *parsed_acc;

  if (auto inst = opt_cell(row, "institutes")) {
    for (auto part : strutil::split(*inst, '|')) {
      auto t = strutil::trim(part);
      if (t.empty()) continue;
      std::string s(t);
      if (std::find(r.institute_ids.begin(), r.institute_ids.end(), s) ==
          r.institute_ids.end())
        r.institute_ids.push_back(std::move(s));
    }
  }

  if (auto ac = opt_cell(row, "author_count")) {
    auto v = strutil::parse_int<int>(*ac);
    if (!v || *v < 0) throw ParseError(where, "invalid author_count '" + *ac + "'");
    r.author_count = *v;
  }

  r.journal_title = opt_cell(row, "journal");
  r.volume = opt_cell(row, "volume");
  r.issue = opt_cell(row, "issue");
  r.first_page = opt_cell(row, "first_page");

  for (const auto& [key, value] : row) {
    std::string db;
    bool is_cites = false;
    if (key.rfind("covered_", 0) == 0) {
      db = key.substr(8);
    } else if (key.rfind("cites_", 0) == 0) {
      db = key.substr(6);
      is_cites = true;
    } else {
      continue;
    }
    if (db.empty()) continue;
    auto& entry = r.benchmark[db];
    if (is_cites) {
      auto t = strutil::trim(value);
      if (t.empty()) continue;
      auto v = strutil::parse_int<long long>(t);
      if (!v || *v < 0)
        throw ParseError(where, "invalid " + key + " '" + std::string(t) + "'");
      entry.citation_count = *v;
    } else if (!parse_bool(value, entry.covered)) {
      throw ParseError(where, "invalid " + key + " '" + value + "'");
    }
  }
  for (const auto& [db, entry] : r.benchmark) {
    if (entry.citation_count && !entry.covered)
      throw ParseError(where, "cites_" + db + " given but covered_" + db +
                                  " is false for record '" + r.record_id + "'");
  }
  return r;
}

bool is_known_column(std::string_view c) {
  if (c.rfind("covered_", 0) == 0 || c.rfind("cites_", 0) == 0) return true;
  return std::find(kKnownColumns.begin(), kKnownColumns.end(), c) !=
         kKnownColumns.end();
}

bool skip_line(std::string_view line) {
  auto t = strutil::trim(line);
  return t.empty() || t.front() == '#';
}

Corpus load_tsv(const std::filesystem::path& path, std::ifstream& in) {
  const std::string file = path.string();
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line)) continue;
    for (auto h : strutil::split(line, '\t'))
      header.emplace_back(strutil::trim(h));
    break;
  }
  if (header.empty()) throw ParseError(file, "no header line");

  std::vector<std::string> warnings;
  for (auto req : kRequiredColumns)
    if (std::find(header.begin(), header.end(), req) == header.end())
      throw MissingColumnError(file, std::string(req));
  for (const auto& h : header)
    if (!is_known_column(h))
      warnings.push_back(file + ": ignoring unknown column '" + h + "'");

  std::vector<PublicationRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line)) continue;
    const std::string where = file + ":" + std::to_string(lineno);
    auto cells = strutil::split(line, '\t');
    if (cells.size() != header.size())
      throw ParseError(where, "expected " + std::to_string(header.size()) +
                                  " fields, found " +
                                  std::to_string(cells.size()));
    Row row;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (is_known_column(header[i]))
        row[header[i]] = strutil::tsv_unescape(cells[i]);
    records.push_back(record_from_row(row, where));
  }
  return Corpus(std::move(records), std::move(warnings));
}

std::string json_cell(const nlohmann::json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += '|';
      s += json_cell(e);
    }
    return s;
  }
  return v.dump();
}

Corpus load_jsonl(const std::filesystem::path& path, std::ifstream& in) {
  const std::string file = path.string();
  std::string line;
  std::size_t lineno = 0;
  std::vector<PublicationRecord> records;
  std::set<std::string> unknown;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    const std::string where = file + ":" + std::to_string(lineno);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where, e.what());
    }
    if (!obj.is_object()) throw ParseError(where, "expected a JSON object");
    for (auto req : kRequiredColumns)
      if (!obj.contains(std::string(req)))
        throw MissingColumnError(where, std::string(req));
    Row row;
    for (const auto& [k, v] : obj.items()) {
      if (!is_known_column(k)) {
        unknown.insert(k);
        continue;
      }
      row[k] = json_cell(v);
    }
    records.push_back(record_from_row(row, where));
  }
  std::vector<std::string> warnings;
  for (const auto& k : unknown)
    warnings.push_back(file + ": ignoring unknown column '" + k + "'");
  return Corpus(std::move(records), std::move(warnings));
}

}  // namespace

bool is_main_type(DocumentType t) noexcept {
  switch (t) {
    case DocumentType::journal_article:
    case DocumentType::conference_item:
    case DocumentType::monograph:
    case DocumentType::book_section:
    case DocumentType::edited_volume:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(DocumentType t) noexcept {
  for (const auto& d : kDocTypeNames)
    if (d.type == t) return d.name;
  return "other";
}

std::optional<DocumentType> parse_document_type(std::string_view s) noexcept {
  for (const auto& d : kDocTypeNames)
    if (d.name == s) return d.type;
  return std::nullopt;
}

std::string_view to_string(AccessStatus a) noexcept {
  switch (a) {
    case AccessStatus::public_: return "public";
    case AccessStatus::not_public: return "not_public";
    case AccessStatus::no_text_deposited: return "no_text_deposited";
  }
  return "no_text_deposited";
}

std::optional<AccessStatus> parse_access_status(std::string_view s) noexcept {
  if (s == "public") return AccessStatus::public_;
  if (s == "not_public") return AccessStatus::not_public;
  if (s == "no_text_deposited") return AccessStatus::no_text_deposited;
  return std::nullopt;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view s) noexcept {
  if (s == "tsv") return CorpusFormat::tsv;
  if (s == "jsonl") return CorpusFormat::jsonl;
  return std::nullopt;
}

Corpus::Corpus(std::vector<PublicationRecord> records,
               std::vector<std::string> warnings)
    : records_(std::move(records)), warnings_(std::move(warnings)) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (strutil::trim(r.title).empty())
      throw Error("empty title for record '" + r.record_id + "'");
    if (!index_.emplace(r.record_id, i).second)
      throw DuplicateIdError(r.record_id);
  }
}

const PublicationRecord* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<std::string> Corpus::benchmark_names() const {
  std::set<std::string> names;
  for (const auto& r : records_)
    for (const auto& [db, _] : r.benchmark) names.insert(db);
  return {names.begin(), names.end()};
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return format == CorpusFormat::jsonl ? load_jsonl(path, in)
                                       : load_tsv(path, in);
}

CorpusFilter CorpusFilter::permissive() {
  CorpusFilter f;
  f.year_min = std::numeric_limits<int>::min();
  f.year_max = std::numeric_limits<int>::max();
  f.require_institute = false;
  f.allowed_document_types = {std::begin(kAllDocumentTypes),
                              std::end(kAllDocumentTypes)};
  return f;
}

bool CorpusFilter::admits(const PublicationRecord& r) const {
  if (!r.publication_year) return false;
  if (*r.publication_year < year_min || *r.publication_year > year_max)
    return false;
  if (require_institute && r.institute_ids.empty()) return false;
  return allowed_document_types.count(r.document_type) > 0;
}

Subset derive_subset(const Corpus& corpus, const CorpusFilter& filter) {
  SubsetReport rep;
  rep.input = corpus.size();
  std::vector<PublicationRecord> kept;
  for (const auto& r : corpus) {
    if (!r.publication_year)
      ++rep.missing_year;
    else if (*r.publication_year < filter.year_min ||
             *r.publication_year > filter.year_max)
      ++rep.outside_years;
    if (filter.require_institute && r.institute_ids.empty()) ++rep.no_institute;
    if (!filter.allowed_document_types.count(r.document_type)) ++rep.excluded_type;
    if (filter.admits(r)) kept.push_back(r);
  }
  rep.retained = kept.size();
  return {Corpus(std::move(kept), corpus.warnings()), rep};
}

void FieldMapping::add(const std::string& institute_id, FosField field) {
  if (!map_.emplace(institute_id, std::move(field)).second)
    throw Error("institute '" + institute_id + "' mapped more than once");
}

const FosField* FieldMapping::lookup(std::string_view institute_id) const {
  auto it = map_.find(institute_id);
  return it == map_.end() ? nullptr : &it->second;
}

FieldMapping load_field_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open field mapping " + path.string());
  const std::string file = path.string();
  std::string line;
  std::size_t lineno = 0;
  char delim = ',';
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line)) continue;
    if (line.find('\t') != std::string::npos)
      delim = '\t';
    else if (line.find(';') != std::string::npos)
      delim = ';';
    for (auto& h : strutil::split_csv(line, delim))
      header.emplace_back(strutil::trim(h));
    break;
  }
  auto col = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumnError(file, std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_inst = col("institute_id");
  const auto c_major = col("major_field");
  const auto c_sub = col("subfield");

  FieldMapping mapping;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line)) continue;
    const std::string where = file + ":" + std::to_string(lineno);
    auto cells = strutil::split_csv(line, delim);
    if (cells.size() != header.size())
      throw ParseError(where, "expected " + std::to_string(header.size()) +
                                  " fields, found " +
                                  std::to_string(cells.size()));
    std::string inst(strutil::trim(cells[c_inst]));
    FosField f{std::string(strutil::trim(cells[c_major])),
               std::string(strutil::trim(cells[c_sub]))};
    if (inst.empty() || f.major.empty() || f.sub.empty())
      throw ParseError(where, "empty institute_id, major_field or subfield");
    try {
      mapping.add(inst, std::move(f));
    } catch (const Error& e) {
      throw ParseError(where, e.what());
    }
  }
  return mapping;
}

double FieldAssignedCorpus::mean_fields_per_publication() const {
  if (fields.empty()) return 0.0;
  return static_cast<double>(assignments) / static_cast<double>(fields.size());
}

std::vector<std::string> FieldAssignedCorpus::majors(std::size_t i) const {
  std::vector<std::string> out;
  for (const auto& f : fields.at(i))
    if (std::find(out.begin(), out.end(), f.major) == out.end())
      out.push_back(f.major);
  std::sort(out.begin(), out.end());
  return out;
}

FieldAssignedCorpus assign_fields(const Corpus& corpus,
                                  const FieldMapping& mapping) {
  FieldAssignedCorpus out;
  std::set<std::string> unmapped;
  out.fields.reserve(corpus.size());
  for (const auto& r : corpus) {
    std::set<FosField> fs;
    for (const auto& inst : r.institute_ids) {
      if (const auto* f = mapping.lookup(inst))
        fs.insert(*f);
      else
        unmapped.insert(inst);
    }
    out.assignments += fs.size();
    out.fields.emplace_back(fs.begin(), fs.end());
  }
  out.unmapped_institutes.assign(unmapped.begin(), unmapped.end());
  return out;
}

}  // namespace covaudit
