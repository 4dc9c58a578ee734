#include "covaudit/citation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>

#include "covaudit/error.hpp"

namespace covaudit {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::domain_error("correlation: vectors differ in length");
  if (x.size() < 2) throw std::domain_error("correlation: need n >= 2");
}

std::int64_t tie_pairs(std::span<const double> sorted) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Sorts v ascending and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                         std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::string coefficient_note(const std::exception& e) { return e.what(); }

}  // namespace

double citations_per_publication(std::span<const long long> citations,
                                 std::size_t n) {
  if (n == 0) throw std::domain_error("citations per publication: n == 0");
  long double sum = 0;
  for (auto c : citations) sum += c;
  return static_cast<double>(sum / static_cast<long double>(n));
}

double uncited_share(std::span<const long long> citations) {
  if (citations.empty()) throw std::domain_error("uncited share: empty set");
  auto zeros = std::count(citations.begin(), citations.end(), 0LL);
  return static_cast<double>(zeros) / static_cast<double>(citations.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    throw std::domain_error("correlation: zero variance");
  long double r = sxy / std::sqrt(sxx * syy);
  return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

double pearson(const CitationVectorPair& p) { return pearson(p.x, p.y); }

std::vector<double> mean_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    // positions i+1 .. j share their mean
    double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman_mean_rank(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto rx = mean_ranks(x);
  auto ry = mean_ranks(y);
  return pearson(rx, ry);
}

double spearman_mean_rank(const CitationVectorPair& p) {
  return spearman_mean_rank(p.x, p.y);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::int64_t n1 = tie_pairs(xs);
  std::int64_t n3 = 0, run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      n3 += run * (run - 1) / 2;
      run = 1;
    }
  }
  std::vector<double> buf(n);
  const std::int64_t swaps = merge_count(ys, buf, 0, n);
  const std::int64_t n2 = tie_pairs(ys);  // ys is sorted now
  const std::int64_t n0 = static_cast<std::int64_t>(n) *
                          static_cast<std::int64_t>(n - 1) / 2;
  if (n0 == n1 || n0 == n2)
    throw std::domain_error("kendall tau-b: one side is entirely tied");
  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;
  const double denom = std::sqrt(static_cast<double>(n0 - n1) *
                                 static_cast<double>(n0 - n2));
  return std::clamp(static_cast<double>(s) / denom, -1.0, 1.0);
}

double kendall_tau_b(const CitationVectorPair& p) {
  return kendall_tau_b(p.x, p.y);
}

std::size_t CitationMatrix::index_of(std::string_view db) const {
  auto it = std::find(databases.begin(), databases.end(), db);
  if (it == databases.end())
    throw Error("unknown database '" + std::string(db) + "'");
  return static_cast<std::size_t>(it - databases.begin());
}

CitationVectorPair make_pair(const CitationMatrix& m, std::size_t a,
                             std::size_t b, const std::vector<std::size_t>* rows) {
  CitationVectorPair p;
  p.a = m.databases.at(a);
  p.b = m.databases.at(b);
  auto visit = [&](std::size_t i) {
    if (!m.covered[i][a] || !m.covered[i][b]) return;
    const auto& ca = m.counts[i][a];
    const auto& cb = m.counts[i][b];
    if (!ca || !cb) {
      ++p.excluded;
      return;
    }
    p.x.push_back(static_cast<double>(*ca));
    p.y.push_back(static_cast<double>(*cb));
  };
  if (rows) {
    for (auto i : *rows) visit(i);
  } else {
    for (std::size_t i = 0; i < m.covered.size(); ++i) visit(i);
  }
  return p;
}

namespace {

// "All fields" first, then major fields in name order, "Other" last.
std::vector<std::pair<std::string, std::vector<std::size_t>>> field_groups(
    std::size_t n_records, const FieldAssignedCorpus& fields) {
  if (fields.fields.size() != n_records)
    throw Error("field assignment does not align with citation data");
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> groups;
  std::vector<std::size_t> all(n_records);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_records; ++i) {
    auto majors = fields.majors(i);
    if (majors.empty()) groups[{1, "Other"}].push_back(i);
    for (const auto& m : majors) groups[{0, m}].push_back(i);
  }
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  out.emplace_back(kAllFields, std::move(all));
  for (auto& [key, rows] : groups) out.emplace_back(key.second, std::move(rows));
  return out;
}

}  // namespace

std::vector<CitationSummaryRow> citation_summary(
    const CitationMatrix& m, const FieldAssignedCorpus& fields) {
  std::vector<CitationSummaryRow> out;
  for (const auto& [field, rows] : field_groups(m.covered.size(), fields)) {
    for (std::size_t d = 0; d < m.databases.size(); ++d) {
      CitationSummaryRow row;
      row.field = field;
      row.database = m.databases[d];
      std::vector<long long> counts;
      for (auto i : rows) {
        if (!m.covered[i][d]) continue;
        if (m.counts[i][d])
          counts.push_back(*m.counts[i][d]);
        else
          ++row.excluded;
      }
      if (counts.empty()) continue;
      row.covered = counts.size();
      for (auto c : counts) {
        row.citations += c;
        if (c == 0) ++row.uncited;
      }
      row.cpp = citations_per_publication(counts, counts.size());
      row.uncited_share = uncited_share(counts);
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::vector<CorrelationCell> correlation_report(
    const CitationMatrix& m, const FieldAssignedCorpus& fields) {
  std::vector<CorrelationCell> out;
  for (const auto& [field, rows] : field_groups(m.covered.size(), fields)) {
    for (std::size_t a = 0; a < m.databases.size(); ++a) {
      for (std::size_t b = a + 1; b < m.databases.size(); ++b) {
        auto pair = make_pair(m, a, b, &rows);
        CorrelationCell cell;
        cell.field = field;
        cell.a = pair.a;
        cell.b = pair.b;
        cell.n = pair.n();
        cell.excluded = pair.excluded;
        if (pair.n() < 2) {
          cell.note = "n < 2";
        } else {
          try {
            cell.pearson = pearson(pair);
          } catch (const std::domain_error& e) {
            cell.note = coefficient_note(e);
          }
          try {
            cell.spearman = spearman_mean_rank(pair);
          } catch (const std::domain_error& e) {
            cell.note = coefficient_note(e);
          }
          try {
            cell.kendall = kendall_tau_b(pair);
          } catch (const std::domain_error& e) {
            cell.note = coefficient_note(e);
          }
        }
        out.push_back(std::move(cell));
      }
    }
  }
  return out;
}

}  // namespace covaudit
