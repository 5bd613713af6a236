#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "endsum/surface.hpp"

namespace endsum {

// ===========================================================================
// Descriptor DSL
// ===========================================================================
//
//   doc       := surface+
//   surface   := "surface" NAME "{" component+ "}"
//   component := "component" "{" core chain* "}"
//   core      := "core" "{" "genus2" INT ";" "orientable" BOOL ";"
//                "boundary" INT ";" "anchors" "[" NAME* "]" ";" "}"
//   chain     := "chain" NAME "{" node+ "start" NAME ";" "}"
//   node      := "node" NAME "{" "genus2" INT ";" "orientable" BOOL ";"
//                "children" "[" NAME* "]" ";" "}"
//
// The core's circle count is derived: every circle is either a boundary
// circle or an anchor. Name resolution (anchor/chain pairing, child names)
// happens at parse time with located diagnostics; numeric invariants are
// left to validate_descriptor.

struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string rule;
  std::string message;
};

struct SurfaceEntry {
  std::string name;
  int line = 0;
  SurfaceDescriptor descriptor;
  // node_names[component][anchor][node id] — kept for printing and messages
  std::vector<std::vector<std::vector<std::string>>> node_names;
};

struct DescriptorDocument {
  std::vector<SurfaceEntry> surfaces;

  const SurfaceEntry* find(const std::string& name) const {
    for (const auto& s : surfaces) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

struct ParseResult {
  DescriptorDocument document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

namespace dsl_detail {

enum class TokKind { Ident, Int, LBrace, RBrace, LBracket, RBracket, Semi, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

struct ParseAbort {
  Diagnostic diag;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = TokKind::Ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        t.text += text_[pos_];
        advance();
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = TokKind::Int;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        t.text += text_[pos_];
        advance();
      }
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseAbort{{t.line, t.col, "lexical", "integer literal out of range"}};
      }
      return t;
    }
    switch (c) {
      case '{': t.kind = TokKind::LBrace; break;
      case '}': t.kind = TokKind::RBrace; break;
      case '[': t.kind = TokKind::LBracket; break;
      case ']': t.kind = TokKind::RBracket; break;
      case ';': t.kind = TokKind::Semi; break;
      default:
        throw ParseAbort{{line_, col_, "lexical",
                          std::string("unexpected character '") + c + "'"}};
    }
    t.text = c;
    advance();
    return t;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      advance();
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { bump(); }

  DescriptorDocument document() {
    DescriptorDocument doc;
    doc.surfaces.push_back(surface());
    while (cur_.kind != TokKind::End) doc.surfaces.push_back(surface());
    for (std::size_t i = 0; i < doc.surfaces.size(); ++i) {
      for (std::size_t j = i + 1; j < doc.surfaces.size(); ++j) {
        if (doc.surfaces[i].name == doc.surfaces[j].name) {
          fail("surface", "surface '" + doc.surfaces[i].name + "' declared twice");
        }
      }
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& rule, const std::string& message) {
    throw ParseAbort{{cur_.line, cur_.col, rule, message}};
  }

  void bump() { cur_ = lexer_.next(); }

  void expect(TokKind k, const char* what, const char* rule) {
    if (cur_.kind != k) {
      fail(rule, std::string("expected ") + what + (cur_.text.empty() ? "" : ", got '" + cur_.text + "'"));
    }
    bump();
  }

  std::string name(const char* rule) {
    if (cur_.kind != TokKind::Ident) fail(rule, "expected a name");
    std::string n = cur_.text;
    bump();
    return n;
  }

  void keyword(const char* kw, const char* rule) {
    if (cur_.kind != TokKind::Ident || cur_.text != kw) {
      fail(rule, std::string("expected keyword '") + kw + "'" +
                     (cur_.text.empty() ? "" : ", got '" + cur_.text + "'"));
    }
    bump();
  }

  std::int64_t integer(const char* rule) {
    if (cur_.kind != TokKind::Int) fail(rule, "expected an integer");
    std::int64_t v = cur_.value;
    bump();
    return v;
  }

  bool boolean(const char* rule) {
    if (cur_.kind == TokKind::Ident && cur_.text == "true") { bump(); return true; }
    if (cur_.kind == TokKind::Ident && cur_.text == "false") { bump(); return false; }
    fail(rule, "expected true or false");
  }

  std::vector<std::string> name_list(const char* rule) {
    expect(TokKind::LBracket, "'['", rule);
    std::vector<std::string> names;
    while (cur_.kind == TokKind::Ident) {
      names.push_back(cur_.text);
      bump();
    }
    expect(TokKind::RBracket, "']'", rule);
    return names;
  }

  SurfaceEntry surface() {
    SurfaceEntry entry;
    entry.line = cur_.line;
    keyword("surface", "surface");
    entry.name = name("surface");
    expect(TokKind::LBrace, "'{'", "surface");
    do {
      component(entry);
    } while (cur_.kind == TokKind::Ident && cur_.text == "component");
    expect(TokKind::RBrace, "'}'", "surface");
    return entry;
  }

  void component(SurfaceEntry& entry) {
    keyword("component", "component");
    expect(TokKind::LBrace, "'{'", "component");

    Component comp;
    std::vector<std::string> anchor_names;
    core(comp, anchor_names);

    std::map<std::string, std::pair<BlockAutomaton, std::vector<std::string>>> chains;
    while (cur_.kind == TokKind::Ident && cur_.text == "chain") {
      auto [chain_name, automaton, node_names] = chain();
      if (chains.count(chain_name)) {
        fail("chain", "chain '" + chain_name + "' declared twice");
      }
      bool declared = false;
      for (const auto& a : anchor_names) declared |= (a == chain_name);
      if (!declared) {
        fail("chain", "chain '" + chain_name + "' is not listed among the core anchors");
      }
      chains[chain_name] = {std::move(automaton), std::move(node_names)};
    }
    expect(TokKind::RBrace, "'}'", "component");

    std::vector<std::vector<std::string>> comp_node_names;
    for (const auto& a : anchor_names) {
      auto it = chains.find(a);
      if (it == chains.end()) {
        fail("component", "anchor '" + a + "' has no chain definition");
      }
      comp.anchors.push_back({a, std::move(it->second.first)});
      comp_node_names.push_back(std::move(it->second.second));
    }
    entry.descriptor.components.push_back(std::move(comp));
    entry.node_names.push_back(std::move(comp_node_names));
  }

  void core(Component& comp, std::vector<std::string>& anchor_names) {
    keyword("core", "core");
    expect(TokKind::LBrace, "'{'", "core");
    keyword("genus2", "core");
    comp.core.doubled_genus = integer("core");
    expect(TokKind::Semi, "';'", "core");
    keyword("orientable", "core");
    comp.core.orientable = boolean("core");
    expect(TokKind::Semi, "';'", "core");
    keyword("boundary", "core");
    comp.boundary_count = integer("core");
    expect(TokKind::Semi, "';'", "core");
    keyword("anchors", "core");
    anchor_names = name_list("core");
    expect(TokKind::Semi, "';'", "core");
    expect(TokKind::RBrace, "'}'", "core");
    comp.core.circles = comp.boundary_count + static_cast<std::int64_t>(anchor_names.size());
  }

  std::tuple<std::string, BlockAutomaton, std::vector<std::string>> chain() {
    keyword("chain", "chain");
    std::string chain_name = name("chain");
    expect(TokKind::LBrace, "'{'", "chain");

    BlockAutomaton a;
    std::vector<std::string> node_names;
    std::vector<std::vector<std::string>> pending_children;
    std::map<std::string, std::size_t> ids;

    while (cur_.kind == TokKind::Ident && cur_.text == "node") {
      bump();
      std::string node_name = name("node");
      if (ids.count(node_name)) {
        fail("node", "node '" + node_name + "' declared twice in chain '" + chain_name + "'");
      }
      expect(TokKind::LBrace, "'{'", "node");
      Block blk;
      keyword("genus2", "node");
      blk.doubled_genus = integer("node");
      expect(TokKind::Semi, "';'", "node");
      keyword("orientable", "node");
      blk.orientable = boolean("node");
      expect(TokKind::Semi, "';'", "node");
      keyword("children", "node");
      pending_children.push_back(name_list("node"));
      expect(TokKind::Semi, "';'", "node");
      expect(TokKind::RBrace, "'}'", "node");
      ids[node_name] = a.nodes.size();
      node_names.push_back(node_name);
      a.nodes.push_back(std::move(blk));
    }
    if (a.nodes.empty()) {
      fail("chain", "chain '" + chain_name + "' declares no nodes");
    }

    keyword("start", "chain");
    std::string start_name = name("chain");
    if (!ids.count(start_name)) {
      fail("chain", "start node '" + start_name + "' is not declared in chain '" +
                        chain_name + "'");
    }
    a.start = ids[start_name];
    expect(TokKind::Semi, "';'", "chain");
    expect(TokKind::RBrace, "'}'", "chain");

    for (std::size_t ni = 0; ni < pending_children.size(); ++ni) {
      for (const std::string& child : pending_children[ni]) {
        auto it = ids.find(child);
        if (it == ids.end()) {
          fail("node", "unknown child name '" + child + "' in node '" + node_names[ni] +
                           "' of chain '" + chain_name + "'");
        }
        a.nodes[ni].children.push_back(it->second);
      }
    }
    return {chain_name, std::move(a), std::move(node_names)};
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace dsl_detail

inline ParseResult parse_dsl(const std::string& text) {
  ParseResult result;
  try {
    dsl_detail::Parser p(text);
    result.document = p.document();
  } catch (const dsl_detail::ParseAbort& abort) {
    result.diagnostics.push_back(abort.diag);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string print_document(const DescriptorDocument& doc) {
  std::string out;
  for (const SurfaceEntry& s : doc.surfaces) {
    out += "surface " + s.name + " {\n";
    for (std::size_t ci = 0; ci < s.descriptor.components.size(); ++ci) {
      const Component& comp = s.descriptor.components[ci];
      out += "  component {\n";
      out += "    core { genus2 " + std::to_string(comp.core.doubled_genus) + "; orientable " +
             (comp.core.orientable ? "true" : "false") + "; boundary " +
             std::to_string(comp.boundary_count) + "; anchors [";
      for (std::size_t ai = 0; ai < comp.anchors.size(); ++ai) {
        if (ai > 0) out += " ";
        out += comp.anchors[ai].first;
      }
      out += "]; }\n";
      for (std::size_t ai = 0; ai < comp.anchors.size(); ++ai) {
        const auto& [anchor_name, a] = comp.anchors[ai];
        const std::vector<std::string>* names = nullptr;
        if (ci < s.node_names.size() && ai < s.node_names[ci].size()) {
          names = &s.node_names[ci][ai];
        }
        auto node_name = [&](std::size_t id) {
          if (names && id < names->size()) return (*names)[id];
          return "n" + std::to_string(id);
        };
        out += "    chain " + anchor_name + " {\n";
        for (std::size_t ni = 0; ni < a.nodes.size(); ++ni) {
          const Block& blk = a.nodes[ni];
          out += "      node " + node_name(ni) + " { genus2 " +
                 std::to_string(blk.doubled_genus) + "; orientable " +
                 (blk.orientable ? "true" : "false") + "; children [";
          for (std::size_t k = 0; k < blk.children.size(); ++k) {
            if (k > 0) out += " ";
            out += node_name(blk.children[k]);
          }
          out += "]; }\n";
        }
        out += "      start " + node_name(a.start) + ";\n";
        out += "    }\n";
      }
      out += "  }\n";
    }
    out += "}\n";
  }
  return out;
}

/// Prints a bare descriptor (no remembered node names) under a given name.
inline std::string print_descriptor(const SurfaceDescriptor& d, const std::string& name) {
  DescriptorDocument doc;
  SurfaceEntry entry;
  entry.name = name;
  entry.descriptor = d;
  doc.surfaces.push_back(std::move(entry));
  return print_document(doc);
}

}  // namespace endsum
