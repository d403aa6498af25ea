#include "refinet/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace refinet::io {

using nlohmann::json;

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Recursive walk over raw JSON text that stops at the value addressed by a pointer.
class Locator {
 public:
  Locator(const std::string& text, const std::string& target) : text_(text), target_(target) {}

  int run() {
    try {
      if (value("")) return line_at(found_);
    } catch (const std::out_of_range&) {
    }
    return 0;
  }

 private:
  char peek() {
    skip_ws();
    return text_.at(pos_);
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (text_.at(pos_) != '"') {
      if (text_[pos_] == '\\') ++pos_;
      out += text_.at(pos_++);
    }
    ++pos_;
    return out;
  }
  bool value(const std::string& path) {
    char c = peek();
    if (path == target_) {
      found_ = pos_;
      return true;
    }
    if (c == '{') {
      ++pos_;
      if (peek() == '}') {
        ++pos_;
        return false;
      }
      for (;;) {
        if (peek() != '"') throw std::out_of_range("key");
        std::string key = string_token();
        if (peek() != ':') throw std::out_of_range("colon");
        ++pos_;
        if (value(path + "/" + escape_token(key))) return true;
        char d = peek();
        ++pos_;
        if (d == '}') return false;
        if (d != ',') throw std::out_of_range("separator");
      }
    }
    if (c == '[') {
      ++pos_;
      if (peek() == ']') {
        ++pos_;
        return false;
      }
      for (int index = 0;; ++index) {
        if (value(path + "/" + std::to_string(index))) return true;
        char d = peek();
        ++pos_;
        if (d == ']') return false;
        if (d != ',') throw std::out_of_range("separator");
      }
    }
    if (c == '"') {
      string_token();
      return false;
    }
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return false;
  }
  int line_at(std::size_t pos) const {
    int line = 1;
    for (std::size_t k = 0; k < pos && k < text_.size(); ++k)
      if (text_[k] == '\n') ++line;
    return line;
  }

  const std::string& text_;
  const std::string& target_;
  std::size_t pos_ = 0;
  std::size_t found_ = 0;
};

Rational read_rational(const Document& doc, const json& j, const std::string& pointer) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_unsigned()) return parse_rational(std::to_string(j.get<unsigned long long>()));
    if (j.is_number_float()) return parse_rational(j.dump());
  } catch (const std::invalid_argument& e) {
    doc.fail(pointer, e.what());
  }
  doc.fail(pointer, "expected a rational as \"p/q\", a decimal string, or a number");
}

const json& member(const Document& doc, const json& obj, const std::string& pointer, const char* key) {
  if (!obj.is_object()) doc.fail(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) doc.fail(pointer, std::string("missing \"") + key + "\"");
  return *it;
}

std::string read_string(const Document& doc, const json& j, const std::string& pointer) {
  if (!j.is_string()) doc.fail(pointer, "expected a string");
  return j.get<std::string>();
}

std::size_t atom_index(const Document& doc, const AtomSpace& space, const json& j, const std::string& pointer) {
  std::string id = read_string(doc, j, pointer);
  auto idx = space.find(id);
  if (!idx) doc.fail(pointer, "unknown atom \"" + id + "\"");
  return *idx;
}

int read_side(const Document& doc, const json& j, const std::string& pointer) {
  if (!j.is_number_integer() || (j.get<int>() != 0 && j.get<int>() != 1)) doc.fail(pointer, "side must be 0 or 1");
  return j.get<int>();
}

const char* side_key(int s) { return s == 0 ? "side0" : "side1"; }

}  // namespace

int locate_line(const std::string& text, const std::string& pointer) { return Locator(text, pointer).run(); }

void Document::fail(const std::string& pointer, const std::string& what) const {
  std::ostringstream os;
  os << name << ": " << (pointer.empty() ? "/" : pointer) << ": " << what;
  if (int line = locate_line(text, pointer); line > 0) os << " (line " << line << ")";
  throw InputError(os.str());
}

Document load_text(std::string name, std::string text) {
  Document doc{std::move(name), std::move(text), {}};
  try {
    doc.value = json::parse(doc.text);
  } catch (const json::parse_error& e) {
    std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    int line = 1;
    int col = 1;
    for (std::size_t k = 0; k < byte && k < doc.text.size(); ++k) {
      if (doc.text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (auto cut = what.find("syntax error"); cut != std::string::npos) what = what.substr(cut);
    throw InputError(doc.name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  return doc;
}

Document load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_text(path, ss.str());
}

InstancePtr parse_instance(const Document& doc) {
  const json& root = doc.value;
  std::array<SpacePtr, 2> sides;
  for (int s = 0; s < 2; ++s) {
    std::string base = std::string("/") + side_key(s);
    const json& atoms = member(doc, member(doc, root, "", side_key(s)), base, "atoms");
    if (!atoms.is_array()) doc.fail(base + "/atoms", "expected an array");
    std::vector<Atom> list;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      std::string p = base + "/atoms/" + std::to_string(k);
      Rational weight = read_rational(doc, member(doc, atoms[k], p, "weight"), p + "/weight");
      if (weight < 0) doc.fail(p + "/weight", "weight must be nonnegative");
      list.push_back({read_string(doc, member(doc, atoms[k], p, "id"), p + "/id"), weight});
    }
    try {
      sides[s] = std::make_shared<const AtomSpace>(std::move(list));
    } catch (const std::invalid_argument& e) {
      doc.fail(base + "/atoms", e.what());
    }
  }
  const json& edges = member(doc, root, "", "edges");
  if (!edges.is_array()) doc.fail("/edges", "expected an array");
  std::vector<Edge> list;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    std::string p = "/edges/" + std::to_string(k);
    if (!edges[k].is_array() || edges[k].size() != 2) doc.fail(p, "expected a pair [side0 id, side1 id]");
    list.push_back({atom_index(doc, *sides[0], edges[k][0], p + "/0"), atom_index(doc, *sides[1], edges[k][1], p + "/1")});
  }
  try {
    return std::make_shared<const Instance>(sides[0], sides[1], std::move(list));
  } catch (const std::invalid_argument& e) {
    doc.fail("/edges", e.what());
  }
}

json instance_to_json(const Instance& instance) {
  json out;
  for (int s = 0; s < 2; ++s) {
    json atoms = json::array();
    for (const auto& a : instance.side(s).atoms()) atoms.push_back({{"id", a.id}, {"weight", rational_json(a.weight)}});
    out[side_key(s)] = {{"atoms", atoms}};
  }
  json edges = json::array();
  for (const auto& e : instance.edges()) edges.push_back({instance.side(0).id(e.x), instance.side(1).id(e.y)});
  out["edges"] = edges;
  return out;
}

Plan parse_plan(const Document& doc, const InstancePtr& instance) {
  const json& root = doc.value;
  int side = read_side(doc, member(doc, root, "", "source_side"), "/source_side");
  const json& entries = member(doc, root, "", "entries");
  if (!entries.is_array()) doc.fail("/entries", "expected an array");
  Plan plan(instance, side);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    std::string p = "/entries/" + std::to_string(k);
    std::size_t from = atom_index(doc, instance->side(side), member(doc, entries[k], p, "from"), p + "/from");
    std::size_t to = atom_index(doc, instance->side(1 - side), member(doc, entries[k], p, "to"), p + "/to");
    Rational mass = read_rational(doc, member(doc, entries[k], p, "mass"), p + "/mass");
    if (mass < 0) doc.fail(p + "/mass", "mass must be nonnegative");
    if (side == 0) {
      plan.add(from, to, mass);
    } else {
      plan.add(to, from, mass);
    }
  }
  return plan;
}

json plan_to_json(const Plan& plan) {
  const Instance& inst = plan.instance();
  int side = plan.source_side();
  json entries = json::array();
  for (const auto& [k, mass] : plan.entries()) {
    const std::string& x = inst.side(0).id(k.first);
    const std::string& y = inst.side(1).id(k.second);
    entries.push_back({{"from", side == 0 ? x : y}, {"to", side == 0 ? y : x}, {"mass", rational_json(mass)}});
  }
  return {{"source_side", side}, {"entries", entries}};
}

Equilibrium parse_equilibrium(const Document& doc, const InstancePtr& instance) {
  const Instance& inst = *instance;
  const json& root = doc.value;
  Equilibrium eq{Allocation{instance, {}}, Price{}};
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      eq.allocation.bundle[s].push_back(Bundle{Measure(inst.side_ptr(0)), Measure(inst.side_ptr(1))});
    }
  }
  const json& agents = member(doc, root, "", "allocation");
  if (!agents.is_array()) doc.fail("/allocation", "expected an array");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    std::string p = "/allocation/" + std::to_string(k);
    int side = read_side(doc, member(doc, agents[k], p, "side"), p + "/side");
    std::size_t who = atom_index(doc, inst.side(side), member(doc, agents[k], p, "agent"), p + "/agent");
    const json& bundle = member(doc, agents[k], p, "bundle");
    Bundle& b = eq.allocation.bundle[side][who];
    for (int r = 0; r < 2; ++r) {
      auto it = bundle.find(side_key(r));
      if (it == bundle.end()) continue;
      std::string q = p + "/bundle/" + side_key(r);
      if (!it->is_object()) doc.fail(q, "expected an object of atom masses");
      Measure& part = r == 0 ? b.part0 : b.part1;
      for (const auto& [id, mass] : it->items()) {
        auto idx = inst.side(r).find(id);
        if (!idx) doc.fail(q + "/" + escape_token(id), "unknown atom \"" + id + "\"");
        Rational m = read_rational(doc, mass, q + "/" + escape_token(id));
        if (m < 0) doc.fail(q + "/" + escape_token(id), "mass must be nonnegative");
        part.set(*idx, m);
      }
    }
  }
  const json& price = member(doc, root, "", "price");
  for (int s = 0; s < 2; ++s) {
    std::string q = std::string("/price/") + side_key(s);
    const json& values = member(doc, price, "/price", side_key(s));
    eq.price.value[s].assign(inst.side(s).size(), Rational(0));
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      const std::string& id = inst.side(s).id(i);
      eq.price.value[s][i] = read_rational(doc, member(doc, values, q, id.c_str()), q + "/" + escape_token(id));
    }
  }
  return eq;
}

json equilibrium_to_json(const Equilibrium& eq) {
  const Instance& inst = *eq.allocation.instance;
  json agents = json::array();
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      json bundle = json::object();
      for (int r = 0; r < 2; ++r) {
        json part = json::object();
        const Measure& m = eq.allocation.bundle[s][i].part(r);
        for (std::size_t j = 0; j < m.size(); ++j)
          if (m[j] != 0) part[inst.side(r).id(j)] = rational_json(m[j]);
        bundle[side_key(r)] = part;
      }
      agents.push_back({{"agent", inst.side(s).id(i)}, {"side", s}, {"bundle", bundle}});
    }
  }
  json price = json::object();
  for (int s = 0; s < 2; ++s) {
    json values = json::object();
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) values[inst.side(s).id(i)] = rational_json(eq.price.value[s][i]);
    price[side_key(s)] = values;
  }
  return {{"allocation", agents}, {"price", price}};
}

std::string rational_json(const Rational& q) { return to_string(q); }

}  // namespace refinet::io
