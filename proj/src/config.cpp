#include "covaudit/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "covaudit/error.hpp"

namespace covaudit {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& root, std::filesystem::path base, bool check_paths)
      : root_(root), base_(std::move(base)), check_paths_(check_paths) {}

  std::vector<std::string> problems;

  void fail(const std::string& field, const std::string& msg) {
    problems.push_back(field + ": " + msg);
  }

  const json* get(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  void read(const json& obj, const std::string& prefix, const std::string& key,
            T& out) {
    const json* v = get(obj, key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      fail(prefix + key, "wrong type (" + std::string(v->type_name()) + ")");
    }
  }

  std::filesystem::path path(const json& obj, const std::string& prefix,
                             const std::string& key, bool required,
                             bool must_exist, bool directory = false) {
    std::string s;
    read(obj, prefix, key, s);
    if (s.empty()) {
      if (required) fail(prefix + key, "is required");
      return {};
    }
    std::filesystem::path p(s);
    if (p.is_relative()) p = base_ / p;
    p = p.lexically_normal();
    if (must_exist && check_paths_) {
      if (directory ? !std::filesystem::is_directory(p)
                    : !std::filesystem::is_regular_file(p))
        fail(prefix + key, (directory ? "directory " : "file ") + p.string() +
                               " does not exist");
    }
    return p;
  }

  void unknown_keys(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> known) {
    for (const auto& [k, _] : obj.items()) {
      bool ok = false;
      for (const char* kn : known) ok = ok || k == kn;
      if (!ok) fail(prefix + k, "unknown setting");
    }
  }

  const json& root_;
  std::filesystem::path base_;
  bool check_paths_;
};

}  // namespace

RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir, bool check_paths) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: not valid JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"config: top level must be an object"});

  RunConfig cfg;
  Reader r(root, base_dir, check_paths);
  r.unknown_keys(root, "",
                 {"corpus", "corpus_format", "field_mapping", "stopwords",
                  "transport", "request", "modes", "parallelism", "output_dir",
                  "english_tags", "benchmarks", "database_name", "subset",
                  "retry", "requests_per_second"});

  cfg.corpus = r.path(root, "", "corpus", true, true);
  std::string fmt = "tsv";
  r.read(root, "", "corpus_format", fmt);
  if (auto f = parse_corpus_format(fmt))
    cfg.corpus_format = *f;
  else
    r.fail("corpus_format", "unknown format '" + fmt + "' (tsv, jsonl)");
  cfg.field_mapping = r.path(root, "", "field_mapping", true, true);
  cfg.stopwords = r.path(root, "", "stopwords", true, true);
  cfg.output_dir = r.path(root, "", "output_dir", true, false);

  if (const json* t = r.get(root, "transport"); !t) {
    r.fail("transport", "is required");
  } else if (!t->is_object()) {
    r.fail("transport", "must be an object");
  } else {
    std::string kind;
    r.read(*t, "transport.", "kind", kind);
    if (kind == "fixture") {
      r.unknown_keys(*t, "transport.", {"kind", "dir"});
      cfg.transport.kind = TransportConfig::Kind::fixture;
      cfg.transport.fixture_dir = r.path(*t, "transport.", "dir", true, true, true);
    } else if (kind == "http") {
      r.unknown_keys(*t, "transport.",
                     {"kind", "endpoint", "key_env", "key_header",
                      "timeout_seconds"});
      cfg.transport.kind = TransportConfig::Kind::http;
      r.read(*t, "transport.", "endpoint", cfg.transport.endpoint.url);
      if (cfg.transport.endpoint.url.rfind("http://", 0) != 0 &&
          cfg.transport.endpoint.url.rfind("https://", 0) != 0)
        r.fail("transport.endpoint", "must be an http(s) URL");
      r.read(*t, "transport.", "key_env", cfg.transport.key_env);
      r.read(*t, "transport.", "key_header", cfg.transport.endpoint.key_header);
      long long timeout = cfg.transport.endpoint.timeout.count();
      r.read(*t, "transport.", "timeout_seconds", timeout);
      if (timeout < 1) r.fail("transport.timeout_seconds", "must be >= 1");
      cfg.transport.endpoint.timeout = std::chrono::seconds(timeout);
    } else {
      r.fail("transport.kind", "unknown transport '" + kind + "' (fixture, http)");
    }
  }

  if (const json* q = r.get(root, "request")) {
    if (!q->is_object()) {
      r.fail("request", "must be an object");
    } else {
      r.unknown_keys(*q, "request.", {"count", "model", "offset", "attributes"});
      r.read(*q, "request.", "count", cfg.request.count);
      r.read(*q, "request.", "model", cfg.request.model);
      r.read(*q, "request.", "offset", cfg.request.offset);
      r.read(*q, "request.", "attributes", cfg.request.attributes);
      if (cfg.request.count < 1) r.fail("request.count", "must be >= 1");
      if (cfg.request.offset < 0) r.fail("request.offset", "must be >= 0");
      if (cfg.request.attributes.empty())
        r.fail("request.attributes", "must not be empty");
      if (cfg.request.model.empty()) r.fail("request.model", "must not be empty");
    }
  }

  if (const json* m = r.get(root, "modes")) {
    if (!m->is_array() || m->empty()) {
      r.fail("modes", "must be a non-empty list");
    } else {
      cfg.modes.clear();
      for (std::size_t i = 0; i < m->size(); ++i) {
        const auto& v = (*m)[i];
        auto mode = v.is_string() ? parse_query_mode(v.get<std::string>())
                                  : std::nullopt;
        const std::string field = "modes[" + std::to_string(i) + "]";
        if (!mode)
          r.fail(field, "unknown mode " + v.dump() + " (title_exact, title_words)");
        else if (std::find(cfg.modes.begin(), cfg.modes.end(), *mode) != cfg.modes.end())
          r.fail(field, "duplicate mode");
        else
          cfg.modes.push_back(*mode);
      }
    }
  }

  long long par = static_cast<long long>(cfg.parallelism);
  r.read(root, "", "parallelism", par);
  if (par < 1)
    r.fail("parallelism", "must be >= 1");
  else
    cfg.parallelism = static_cast<std::size_t>(par);

  std::vector<std::string> tags(cfg.english_tags.begin(), cfg.english_tags.end());
  r.read(root, "", "english_tags", tags);
  cfg.english_tags = {tags.begin(), tags.end()};

  r.read(root, "", "benchmarks", cfg.benchmarks);
  r.read(root, "", "database_name", cfg.database_name);
  if (cfg.database_name.empty()) r.fail("database_name", "must not be empty");
  for (std::size_t i = 0; i < cfg.benchmarks.size(); ++i)
    if (cfg.benchmarks[i] == cfg.database_name)
      r.fail("benchmarks[" + std::to_string(i) + "]",
             "clashes with database_name");

  if (const json* s = r.get(root, "subset")) {
    if (!s->is_object()) {
      r.fail("subset", "must be an object");
    } else {
      r.unknown_keys(*s, "subset.",
                     {"year_min", "year_max", "require_institute", "document_types"});
      r.read(*s, "subset.", "year_min", cfg.subset.year_min);
      r.read(*s, "subset.", "year_max", cfg.subset.year_max);
      r.read(*s, "subset.", "require_institute", cfg.subset.require_institute);
      if (cfg.subset.year_min > cfg.subset.year_max)
        r.fail("subset.year_min", "must not exceed year_max");
      if (const json* dts = r.get(*s, "document_types")) {
        cfg.subset.allowed_document_types.clear();
        if (!dts->is_array()) {
          r.fail("subset.document_types", "must be a list");
        } else {
          for (std::size_t i = 0; i < dts->size(); ++i) {
            const auto& v = (*dts)[i];
            auto dt = v.is_string() ? parse_document_type(v.get<std::string>())
                                    : std::nullopt;
            if (!dt)
              r.fail("subset.document_types[" + std::to_string(i) + "]",
                     "unknown document type " + v.dump());
            else
              cfg.subset.allowed_document_types.insert(*dt);
          }
        }
      }
    }
  }

  if (const json* rt = r.get(root, "retry")) {
    if (!rt->is_object()) {
      r.fail("retry", "must be an object");
    } else {
      r.unknown_keys(*rt, "retry.",
                     {"max_attempts", "initial_delay_ms", "multiplier", "max_delay_ms"});
      r.read(*rt, "retry.", "max_attempts", cfg.retry.max_attempts);
      long long init = cfg.retry.initial_delay.count();
      long long max = cfg.retry.max_delay.count();
      r.read(*rt, "retry.", "initial_delay_ms", init);
      r.read(*rt, "retry.", "max_delay_ms", max);
      r.read(*rt, "retry.", "multiplier", cfg.retry.multiplier);
      cfg.retry.initial_delay = std::chrono::milliseconds(init);
      cfg.retry.max_delay = std::chrono::milliseconds(max);
      if (cfg.retry.max_attempts < 1) r.fail("retry.max_attempts", "must be >= 1");
      if (init < 0) r.fail("retry.initial_delay_ms", "must be >= 0");
      if (max < init) r.fail("retry.max_delay_ms", "must be >= initial_delay_ms");
      if (cfg.retry.multiplier < 1.0) r.fail("retry.multiplier", "must be >= 1");
    }
  }

  r.read(root, "", "requests_per_second", cfg.requests_per_second);
  if (cfg.requests_per_second < 0)
    r.fail("requests_per_second", "must be >= 0");

  if (!r.problems.empty()) throw ConfigError(std::move(r.problems));
  return cfg;
}

RunConfig validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot read " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = path.has_parent_path() ? path.parent_path()
                                     : std::filesystem::path(".");
  return parse_config(ss.str(), base);
}

}  // namespace covaudit
