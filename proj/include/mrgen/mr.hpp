#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrgen/error.hpp"

namespace mrgen {

enum class Dialect { e2e, rnnlg };
enum class Domain { e2e, tv, laptop, synthetic };
enum class Split { train, validation, test };

std::string to_string(Dialect d);
std::string to_string(Domain d);
std::string to_string(Split s);
Dialect dialect_from_string(std::string_view s);
Domain domain_from_string(std::string_view s);
Split split_from_string(std::string_view s);

// One slot-value pair. Slot names are canonical: lowercase, spaces replaced
// by underscores. Values keep their raw surface form; empty values are only
// legal in the rnnlg dialect (valueless ?request slots).
struct SlotValue {
  std::string slot;
  std::string value;

  bool operator==(const SlotValue&) const = default;
};

struct MeaningRepresentation {
  std::string da_type = "inform";
  std::vector<SlotValue> slots;  // textual order preserved exactly
  Dialect dialect = Dialect::e2e;

  bool has_slot(std::string_view slot) const;
  std::optional<std::string> value_of(std::string_view slot) const;
  std::size_t slot_count() const { return slots.size(); }

  bool operator==(const MeaningRepresentation&) const = default;
};

struct Sample {
  MeaningRepresentation mr;
  std::string reference;
  std::string id;
};

struct Dataset {
  std::vector<Sample> samples;
  Domain domain = Domain::e2e;
  Split split = Split::train;
};

// "customer rating" -> "customer_rating"
std::string canonical_slot(std::string_view name);

// Parses "name[The Golden Curry], food[Japanese]" (e2e) or
// "inform(name='x';type=y)" / "goodbye()" (rnnlg). Throws MalformedMr on
// unbalanced brackets or empty slot names, DuplicateSlot for repeated slots
// in the e2e dialect.
MeaningRepresentation parse_mr(std::string_view text, Dialect dialect);

// Canonical textual form; parse_mr(serialize_mr(mr), mr.dialect) == mr.
std::string serialize_mr(const MeaningRepresentation& mr);

// Key identifying an MR up to slot order (for unique-MR grouping).
std::string mr_group_key(const MeaningRepresentation& mr);

}  // namespace mrgen
