#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace slu {

// One parse unit: act, optional slot, optional value token sequence.
// slot absent implies value absent. All fields are stored lowercased;
// two triples are equal iff act, slot and the space-joined value match.
struct SemanticTriple {
  std::string act;
  std::optional<std::string> slot;
  std::optional<std::vector<std::string>> value;

  std::string value_string() const;
  std::string to_string() const;  // e.g. inform(pricerange=expensive)

  friend bool operator==(const SemanticTriple& a, const SemanticTriple& b) {
    return a.act == b.act && a.slot == b.slot && a.value_string() == b.value_string() &&
           a.value.has_value() == b.value.has_value();
  }
  friend std::strong_ordering operator<=>(const SemanticTriple& a, const SemanticTriple& b);
};

using TripleSet = std::set<SemanticTriple>;

// Legal acts, slots and pairs of the domain, plus the structural predicates
// that drive hierarchical decoding: does an act take a slot, does an
// act-slot pair take a value. Immutable after load.
class Ontology {
 public:
  Ontology() = default;
  Ontology(std::vector<std::string> acts, std::vector<std::string> slots,
           std::vector<std::tuple<std::string, std::string, bool>> pairs);

  const std::vector<std::string>& acts() const { return acts_; }
  const std::vector<std::string>& slots() const { return slots_; }

  bool has_act(const std::string& a) const { return act_index_.count(a) > 0; }
  bool has_slot(const std::string& s) const { return slot_index_.count(s) > 0; }
  int act_index(const std::string& a) const;
  int slot_index(const std::string& s) const;

  bool act_requires_slot(const std::string& a) const;
  bool is_legal_pair(const std::string& a, const std::string& s) const;
  bool pair_requires_value(const std::string& a, const std::string& s) const;

  // Slots legal for the act, in ontology slot order.
  const std::vector<std::string>& legal_slots(const std::string& a) const;

  const std::set<std::pair<std::string, std::string>>& legal_pairs() const { return pairs_; }

  friend bool operator==(const Ontology& a, const Ontology& b);

 private:
  std::vector<std::string> acts_, slots_;
  std::map<std::string, int> act_index_, slot_index_;
  std::map<std::string, bool> requires_slot_;
  std::set<std::pair<std::string, std::string>> pairs_;
  std::map<std::pair<std::string, std::string>, bool> requires_value_;
  std::map<std::string, std::vector<std::string>> legal_slots_;
};

// File schema: {"acts": [...], "slots": [...],
//               "pairs": [{"act":..., "slot":..., "requires_value":bool}, ...]}
// Names are lowercased on load. Acts absent from all pairs take no slot.
Ontology load_ontology(const std::string& path);
Ontology parse_ontology(const std::string& json_text);
std::string ontology_to_json(const Ontology& o);
void save_ontology(const Ontology& o, const std::string& path);
uint64_t ontology_hash(const Ontology& o);

// True iff t is well-formed against o: act known, slot present iff the act
// requires one, pair legal, value present iff the pair requires one.
bool validate_triple(const SemanticTriple& t, const Ontology& o);

}  // namespace slu
