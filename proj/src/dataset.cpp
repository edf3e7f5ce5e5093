#include "mrgen/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

namespace {

// Minimal RFC-4180 reader: quoted fields, "" escapes, embedded commas and
// newlines, optional BOM and CRLF line endings.
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',':
        row.push_back(field);
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.push_back(field);
        field.clear();
        rows.push_back(row);
        row.clear();
        break;
      default: field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  if (!any) return {};
  // Strip UTF-8 BOM from the first cell if present.
  if (!rows.empty() && !rows[0].empty() && rows[0][0].rfind("\xEF\xBB\xBF", 0) == 0)
    rows[0][0] = rows[0][0].substr(3);
  return rows;
}

Dataset load_e2e_csv(const std::string& path, Split split, Domain domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  auto rows = read_csv(in);
  if (rows.empty()) throw IoError("empty dataset file: " + path);
  std::size_t first = 0;
  if (!rows[0].empty() && to_lower(rows[0][0]) == "mr") first = 1;  // header row
  Dataset ds;
  ds.domain = domain;
  ds.split = split;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    if (row.size() < 2)
      throw ParseError(path + ": row " + std::to_string(r) + ": expected mr,ref");
    Sample s;
    try {
      s.mr = parse_mr(row[0], Dialect::e2e);
    } catch (const ParseError& e) {
      throw ParseError(path + ": row " + std::to_string(r) + ": " + e.what());
    }
    s.reference = normalize_ws(row[1]);
    if (s.reference.empty())
      throw ParseError(path + ": row " + std::to_string(r) + ": empty reference");
    s.id = std::to_string(ds.samples.size());
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw ParseError("no samples in " + path);
  return ds;
}

Dataset load_rnnlg_json(const std::string& path, Split split, Domain domain,
                        const RequestImputation& imputation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty()) throw ParseError(path + ": expected a non-empty array");
  Dataset ds;
  ds.domain = domain;
  ds.split = split;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const auto& entry = doc[r];
    if (!entry.is_array() || entry.size() < 2 || !entry[0].is_string() || !entry[1].is_string())
      throw ParseError(path + ": row " + std::to_string(r) +
                       ": expected [da_string, reference, ...]");
    Sample s;
    try {
      s.mr = parse_mr(entry[0].get<std::string>(), Dialect::rnnlg);
    } catch (const ParseError& e) {
      throw ParseError(path + ": row " + std::to_string(r) + ": " + e.what());
    }
    if (domain == Domain::tv && s.mr.slots.empty()) {
      auto it = imputation.find(s.mr.da_type);
      if (it != imputation.end())
        for (const auto& slot : it->second) s.mr.slots.push_back({slot, ""});
    }
    s.reference = normalize_ws(entry[1].get<std::string>());
    if (s.reference.empty())
      throw ParseError(path + ": row " + std::to_string(r) + ": empty reference");
    s.id = std::to_string(r);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace

const RequestImputation& default_request_imputation() {
  static const RequestImputation table = {
      {"?request", {"pricerange"}},
  };
  return table;
}

Dataset load_dataset(const std::string& path, Dialect dialect, Split split) {
  return load_dataset(path, dialect, split,
                      dialect == Dialect::e2e ? Domain::e2e : Domain::tv);
}

Dataset load_dataset(const std::string& path, Dialect dialect, Split split, Domain domain) {
  return load_dataset(path, dialect, split, domain, default_request_imputation());
}

Dataset load_dataset(const std::string& path, Dialect dialect, Split split, Domain domain,
                     const RequestImputation& imputation) {
  return dialect == Dialect::e2e ? load_e2e_csv(path, split, domain)
                                 : load_rnnlg_json(path, split, domain, imputation);
}

DatasetStats compute_stats(const Dataset& dataset) {
  if (dataset.samples.empty()) throw EmptyInput("compute_stats: empty dataset");
  DatasetStats st;
  st.sample_count = dataset.samples.size();

  std::set<std::string> unique_mrs;
  std::set<std::string> slot_types;
  std::map<std::string, std::size_t> da_counts;
  std::map<int, std::size_t> slot_count_n;
  std::map<int, double> sentence_sum;

  for (const auto& s : dataset.samples) {
    unique_mrs.insert(mr_group_key(s.mr));
    ++da_counts[s.mr.da_type];
    for (const auto& sv : s.mr.slots) slot_types.insert(sv.slot);
    int k = static_cast<int>(s.mr.slots.size());
    ++slot_count_n[k];
    sentence_sum[k] += static_cast<double>(split_sentences(s.reference).size());
  }

  st.unique_mr_count = unique_mrs.size();
  st.avg_refs_per_unique_mr =
      static_cast<double>(st.sample_count) / static_cast<double>(st.unique_mr_count);
  for (const auto& [k, n] : slot_count_n) {
    st.slot_count_histogram[k] = static_cast<double>(n) / static_cast<double>(st.sample_count);
    st.avg_sentences_by_slot_count[k] = sentence_sum[k] / static_cast<double>(n);
  }
  for (const auto& [da, n] : da_counts)
    st.da_distribution[da] = static_cast<double>(n) / static_cast<double>(st.sample_count);
  st.slot_type_count = slot_types.size();
  st.da_type_count = da_counts.size();
  return st;
}

}  // namespace mrgen
