#include "mrgen/mr.hpp"

#include <algorithm>
#include <cctype>

#include "mrgen/text.hpp"

namespace mrgen {

std::string to_string(Dialect d) { return d == Dialect::e2e ? "e2e" : "rnnlg"; }

std::string to_string(Domain d) {
  switch (d) {
    case Domain::e2e: return "e2e";
    case Domain::tv: return "tv";
    case Domain::laptop: return "laptop";
    case Domain::synthetic: return "synthetic";
  }
  return "e2e";
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Dialect dialect_from_string(std::string_view s) {
  if (s == "e2e") return Dialect::e2e;
  if (s == "rnnlg") return Dialect::rnnlg;
  throw ConfigError("unknown dialect: " + std::string(s));
}

Domain domain_from_string(std::string_view s) {
  if (s == "e2e") return Domain::e2e;
  if (s == "tv") return Domain::tv;
  if (s == "laptop") return Domain::laptop;
  if (s == "synthetic") return Domain::synthetic;
  throw ConfigError("unknown domain: " + std::string(s));
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "validation" || s == "dev") return Split::validation;
  if (s == "test") return Split::test;
  throw ConfigError("unknown split: " + std::string(s));
}

bool MeaningRepresentation::has_slot(std::string_view slot) const {
  return std::any_of(slots.begin(), slots.end(),
                     [&](const SlotValue& sv) { return sv.slot == slot; });
}

std::optional<std::string> MeaningRepresentation::value_of(std::string_view slot) const {
  for (const auto& sv : slots)
    if (sv.slot == slot) return sv.value;
  return std::nullopt;
}

std::string canonical_slot(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char ch : name) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty() && out.back() != '_') out += '_';
    } else {
      out += static_cast<char>(std::tolower(c));
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  while (!out.empty() && out.front() == '_') out.erase(out.begin());
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

MeaningRepresentation parse_e2e(std::string_view text) {
  MeaningRepresentation mr;
  mr.da_type = "inform";
  mr.dialect = Dialect::e2e;

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    // One segment: slot[value], terminated by a comma at bracket depth 0.
    std::size_t seg_start = i;
    int depth = 0;
    while (i < n && !(text[i] == ',' && depth == 0)) {
      if (text[i] == '[') ++depth;
      if (text[i] == ']') {
        --depth;
        if (depth < 0) throw MalformedMr("unbalanced ']' in MR: " + std::string(text));
      }
      ++i;
    }
    if (depth != 0) throw MalformedMr("unbalanced '[' in MR: " + std::string(text));
    std::string seg = trim(text.substr(seg_start, i - seg_start));
    if (i < n) ++i;  // skip comma
    if (seg.empty()) continue;

    std::size_t open = seg.find('[');
    if (open == std::string::npos || seg.back() != ']')
      throw MalformedMr("expected slot[value]: " + seg);
    std::string slot = canonical_slot(trim(std::string_view(seg).substr(0, open)));
    std::string value = trim(std::string_view(seg).substr(open + 1, seg.size() - open - 2));
    if (slot.empty()) throw MalformedMr("empty slot name in MR: " + std::string(text));
    if (value.empty()) throw MalformedMr("empty value for slot '" + slot + "'");
    if (mr.has_slot(slot)) throw DuplicateSlot("duplicate slot '" + slot + "' in e2e MR");
    mr.slots.push_back({slot, value});
  }
  if (mr.slots.empty()) throw MalformedMr("no slots in e2e MR: " + std::string(text));
  return mr;
}

MeaningRepresentation parse_rnnlg(std::string_view text) {
  MeaningRepresentation mr;
  mr.dialect = Dialect::rnnlg;

  std::string s = trim(text);
  std::size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw MalformedMr("expected da(...): " + s);
  mr.da_type = trim(std::string_view(s).substr(0, open));
  if (mr.da_type.empty()) throw MalformedMr("empty DA type: " + s);
  std::string body = s.substr(open + 1, s.size() - open - 2);
  if (body.find('(') != std::string::npos || body.find(')') != std::string::npos)
    throw MalformedMr("unbalanced parentheses: " + s);

  std::size_t i = 0;
  while (i < body.size()) {
    std::size_t j = body.find(';', i);
    if (j == std::string::npos) j = body.size();
    std::string entry = trim(std::string_view(body).substr(i, j - i));
    i = j + 1;
    if (entry.empty()) continue;
    std::size_t eq = entry.find('=');
    std::string slot, value;
    if (eq == std::string::npos) {
      slot = canonical_slot(entry);  // valueless slot (?request style)
    } else {
      slot = canonical_slot(trim(std::string_view(entry).substr(0, eq)));
      value = trim(std::string_view(entry).substr(eq + 1));
      // Values come quoted in the rnnlg files; 'dont_care' etc. stay verbatim.
      if (value.size() >= 2 && value.front() == '\'' && value.back() == '\'')
        value = value.substr(1, value.size() - 2);
    }
    if (slot.empty()) throw MalformedMr("empty slot name in MR: " + s);
    mr.slots.push_back({slot, value});
  }
  return mr;
}

}  // namespace

MeaningRepresentation parse_mr(std::string_view text, Dialect dialect) {
  if (trim(text).empty()) throw MalformedMr("empty MR text");
  return dialect == Dialect::e2e ? parse_e2e(text) : parse_rnnlg(text);
}

std::string serialize_mr(const MeaningRepresentation& mr) {
  std::string out;
  if (mr.dialect == Dialect::e2e) {
    for (std::size_t i = 0; i < mr.slots.size(); ++i) {
      if (i) out += ", ";
      out += mr.slots[i].slot + "[" + mr.slots[i].value + "]";
    }
  } else {
    out = mr.da_type + "(";
    for (std::size_t i = 0; i < mr.slots.size(); ++i) {
      if (i) out += ";";
      out += mr.slots[i].slot;
      if (!mr.slots[i].value.empty()) out += "='" + mr.slots[i].value + "'";
    }
    out += ")";
  }
  return out;
}

std::string mr_group_key(const MeaningRepresentation& mr) {
  std::vector<std::string> parts;
  parts.reserve(mr.slots.size());
  for (const auto& sv : mr.slots) parts.push_back(sv.slot + "\x1f" + sv.value);
  std::sort(parts.begin(), parts.end());
  std::string key = mr.da_type;
  for (const auto& p : parts) key += "\x1e" + p;
  return key;
}

}  // namespace mrgen
