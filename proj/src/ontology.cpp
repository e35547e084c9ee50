#include "slu/ontology.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "slu/util.hpp"

namespace slu {

std::string SemanticTriple::value_string() const {
  if (!value) return "";
  return join(*value, " ");
}

std::string SemanticTriple::to_string() const {
  std::string s = act + "(";
  if (slot) {
    s += *slot;
    if (value) s += "=" + value_string();
  }
  return s + ")";
}

std::strong_ordering operator<=>(const SemanticTriple& a, const SemanticTriple& b) {
  if (auto c = a.act <=> b.act; c != 0) return c;
  const std::string as = a.slot ? *a.slot : "", bs = b.slot ? *b.slot : "";
  if (auto c = as <=> bs; c != 0) return c;
  if (auto c = (a.value.has_value() ? 1 : 0) <=> (b.value.has_value() ? 1 : 0); c != 0) return c;
  return a.value_string() <=> b.value_string();
}

Ontology::Ontology(std::vector<std::string> acts, std::vector<std::string> slots,
                   std::vector<std::tuple<std::string, std::string, bool>> pairs) {
  for (auto& a : acts) {
    a = lowercase(a);
    if (act_index_.count(a)) throw std::runtime_error("ontology: duplicate act '" + a + "'");
    act_index_[a] = static_cast<int>(acts_.size());
    acts_.push_back(a);
    requires_slot_[a] = false;
    legal_slots_[a] = {};
  }
  for (auto& s : slots) {
    s = lowercase(s);
    if (slot_index_.count(s)) throw std::runtime_error("ontology: duplicate slot '" + s + "'");
    slot_index_[s] = static_cast<int>(slots_.size());
    slots_.push_back(s);
  }
  for (auto& [a0, s0, rv] : pairs) {
    const std::string a = lowercase(a0), s = lowercase(s0);
    if (!act_index_.count(a))
      throw std::runtime_error("ontology: pair references unknown act '" + a + "'");
    if (!slot_index_.count(s))
      throw std::runtime_error("ontology: pair references unknown slot '" + s + "'");
    auto key = std::make_pair(a, s);
    if (pairs_.count(key))
      throw std::runtime_error("ontology: duplicate pair (" + a + ", " + s + ")");
    pairs_.insert(key);
    requires_value_[key] = rv;
    requires_slot_[a] = true;
  }
  // legal_slots kept in ontology slot order
  for (const auto& a : acts_) {
    for (const auto& s : slots_) {
      if (pairs_.count({a, s})) legal_slots_[a].push_back(s);
    }
  }
}

int Ontology::act_index(const std::string& a) const {
  auto it = act_index_.find(a);
  if (it == act_index_.end()) throw std::runtime_error("ontology: unknown act '" + a + "'");
  return it->second;
}

int Ontology::slot_index(const std::string& s) const {
  auto it = slot_index_.find(s);
  if (it == slot_index_.end()) throw std::runtime_error("ontology: unknown slot '" + s + "'");
  return it->second;
}

bool Ontology::act_requires_slot(const std::string& a) const {
  auto it = requires_slot_.find(a);
  if (it == requires_slot_.end()) throw std::runtime_error("ontology: unknown act '" + a + "'");
  return it->second;
}

bool Ontology::is_legal_pair(const std::string& a, const std::string& s) const {
  return pairs_.count({a, s}) > 0;
}

bool Ontology::pair_requires_value(const std::string& a, const std::string& s) const {
  auto it = requires_value_.find({a, s});
  if (it == requires_value_.end())
    throw std::runtime_error("ontology: (" + a + ", " + s + ") is not a legal pair");
  return it->second;
}

const std::vector<std::string>& Ontology::legal_slots(const std::string& a) const {
  auto it = legal_slots_.find(a);
  if (it == legal_slots_.end()) throw std::runtime_error("ontology: unknown act '" + a + "'");
  return it->second;
}

bool operator==(const Ontology& a, const Ontology& b) {
  return a.acts_ == b.acts_ && a.slots_ == b.slots_ && a.pairs_ == b.pairs_ &&
         a.requires_value_ == b.requires_value_;
}

Ontology parse_ontology(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("ontology: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("ontology: top level must be an object");
  for (const auto& key : {"acts", "slots", "pairs"}) {
    if (!j.contains(key)) throw std::runtime_error(std::string("ontology: missing key '") + key + "'");
    if (!j[key].is_array())
      throw std::runtime_error(std::string("ontology: key '") + key + "' must be a list");
  }
  std::vector<std::string> acts, slots;
  for (const auto& a : j["acts"]) {
    if (!a.is_string()) throw std::runtime_error("ontology: entries of 'acts' must be strings");
    acts.push_back(a.get<std::string>());
  }
  for (const auto& s : j["slots"]) {
    if (!s.is_string()) throw std::runtime_error("ontology: entries of 'slots' must be strings");
    slots.push_back(s.get<std::string>());
  }
  std::vector<std::tuple<std::string, std::string, bool>> pairs;
  for (const auto& p : j["pairs"]) {
    if (!p.is_object() || !p.contains("act") || !p.contains("slot") || !p.contains("requires_value"))
      throw std::runtime_error(
          "ontology: each pair needs keys 'act', 'slot', 'requires_value'");
    pairs.emplace_back(p["act"].get<std::string>(), p["slot"].get<std::string>(),
                       p["requires_value"].get<bool>());
  }
  return Ontology(std::move(acts), std::move(slots), std::move(pairs));
}

Ontology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ontology: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_ontology(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) + " (file: " + path + ")");
  }
}

std::string ontology_to_json(const Ontology& o) {
  nlohmann::ordered_json j;
  j["acts"] = o.acts();
  j["slots"] = o.slots();
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& a : o.acts()) {
    for (const auto& s : o.legal_slots(a)) {
      nlohmann::ordered_json p;
      p["act"] = a;
      p["slot"] = s;
      p["requires_value"] = o.pair_requires_value(a, s);
      pairs.push_back(p);
    }
  }
  j["pairs"] = pairs;
  return j.dump(2) + "\n";
}

void save_ontology(const Ontology& o, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ontology: cannot write '" + path + "'");
  out << ontology_to_json(o);
}

uint64_t ontology_hash(const Ontology& o) { return fnv1a64(ontology_to_json(o)); }

bool validate_triple(const SemanticTriple& t, const Ontology& o) {
  if (!o.has_act(t.act)) return false;
  const bool needs_slot = o.act_requires_slot(t.act);
  if (t.slot.has_value() != needs_slot) return false;
  if (!t.slot) return !t.value.has_value();
  if (!o.is_legal_pair(t.act, *t.slot)) return false;
  const bool needs_value = o.pair_requires_value(t.act, *t.slot);
  return t.value.has_value() == needs_value;
}

}  // namespace slu
