#include "ccsr/lts.hpp"

#include <sstream>

#include "ccsr/errors.hpp"
#include "ccsr/parser.hpp"

namespace ccsr {

int Lts::add_state(const std::string& payload) {
  auto it = index_.find(payload);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(states_.size());
  states_.push_back(payload);
  index_.emplace(payload, id);
  return id;
}

int Lts::find_state(const std::string& payload) const {
  auto it = index_.find(payload);
  return it == index_.end() ? -1 : it->second;
}

bool Lts::add_edge(int src, Label label, int dst) {
  if (!edge_set_.emplace(src, label, dst).second) return false;
  edges_.push_back(Edge{src, label, dst});
  return true;
}

std::vector<Lts::Edge> Lts::out(int s) const {
  std::vector<Edge> res;
  for (const auto& e : edges_)
    if (e.src == s) res.push_back(e);
  return res;
}

std::set<Label> Lts::labels() const {
  std::set<Label> res;
  for (const auto& e : edges_) res.insert(e.label);
  return res;
}

std::string write_lts(const Lts& l) {
  std::ostringstream os;
  os << "lts " << l.name << "\n";
  if (l.truncated) os << "# truncated: state or step budget exceeded\n";
  os << "init s" << l.initial << "\n";
  for (const auto& e : l.edges())
    os << "trans s" << e.src << " " << e.label.str() << " s" << e.dst << "\n";
  return os.str();
}

namespace {

Label parse_label(const std::string& tok, int line) {
  std::string t = tok;
  bool backward = false;
  if (t.size() > 1 && t.back() == '-') {
    backward = true;
    t.pop_back();
  }
  try {
    return Label{parse_action_text(t), backward};
  } catch (const ValidationError& e) {
    throw ParseError(line, 1, e.what());
  }
}

}  // namespace

Lts read_lts(const std::string& text) {
  Lts l;
  l.name.clear();
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  bool have_header = false, have_init = false;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "lts") {
      if (have_header) throw ParseError(lineno, 1, "duplicate lts header");
      if (!(ls >> l.name)) throw ParseError(lineno, 1, "missing lts name");
      have_header = true;
    } else if (word == "init") {
      if (!have_header) throw ParseError(lineno, 1, "init before lts header");
      if (have_init) throw ParseError(lineno, 1, "duplicate init");
      std::string s;
      if (!(ls >> s)) throw ParseError(lineno, 1, "missing initial state");
      l.initial = l.add_state(s);
      have_init = true;
    } else if (word == "trans") {
      if (!have_init)
        throw ParseError(lineno, 1, "transition before the initial state is declared");
      std::string src, lab, dst;
      if (!(ls >> src >> lab >> dst)) throw ParseError(lineno, 1, "malformed trans line");
      l.add_edge(l.add_state(src), parse_label(lab, lineno), l.add_state(dst));
    } else {
      throw ParseError(lineno, 1, "unknown directive '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, 1, "trailing tokens on line");
  }
  if (!have_init) throw ParseError(lineno, 1, "missing init line");
  return l;
}

std::string lts_to_dot(const Lts& l) {
  std::ostringstream os;
  os << "digraph " << (l.name.empty() ? "lts" : l.name) << " {\n";
  os << "  rankdir=LR;\n";
  for (int s = 0; s < l.state_count(); ++s) {
    os << "  s" << s << " [label=\"" << l.payload(s) << "\""
       << (s == l.initial ? ", shape=doublecircle" : "") << "];\n";
  }
  for (const auto& e : l.edges())
    os << "  s" << e.src << " -> s" << e.dst << " [label=\"" << e.label.str() << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace ccsr
