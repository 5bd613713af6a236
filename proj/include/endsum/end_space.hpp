#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace endsum {

// ===========================================================================
// Labels
// ===========================================================================

enum class GenusClass : std::uint8_t { Zero, Infinite };

/// Invariants carried by a single end: its genus class (zero or infinite)
/// and whether it is orientable. A genus-zero end has a genus-zero, hence
/// orientable, neighborhood, so (Zero, non-orientable) is not a valid label.
struct EndLabel {
  GenusClass genus_class = GenusClass::Zero;
  bool orientable = true;

  friend bool operator==(const EndLabel&, const EndLabel&) = default;
};

struct InvalidLabelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline EndLabel validate_label(GenusClass genus_class, bool orientable) {
  if (genus_class == GenusClass::Zero && !orientable) {
    throw InvalidLabelError("invalid end label: a genus-zero end is always orientable");
  }
  return EndLabel{genus_class, orientable};
}

/// Label of the end obtained by fusing two ends into one: the fused end has
/// genus zero only if both inputs do, and is orientable only if both are.
inline EndLabel merge_label(EndLabel a, EndLabel b) {
  GenusClass g = (a.genus_class == GenusClass::Zero && b.genus_class == GenusClass::Zero)
                     ? GenusClass::Zero
                     : GenusClass::Infinite;
  return EndLabel{g, a.orientable && b.orientable};
}

inline int label_rank(EndLabel l) {
  return (l.genus_class == GenusClass::Infinite ? 2 : 0) + (l.orientable ? 0 : 1);
}

// ===========================================================================
// End space expressions
// ===========================================================================

enum class EndExprKind : std::uint8_t { Pt, Cantor, Seq, Union };

struct InvalidExprError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A labeled, compact, totally disconnected space of ends, presented in a
/// finite grammar:
///
///   Pt(l)       one end labeled l
///   Cantor(l)   a Cantor set of ends, all labeled l
///   Seq(B; l)   countably many disjoint copies of B converging to a single
///               limit end labeled l
///   Union(...)  finite disjoint union
///
/// The infinite-genus ends and the non-orientable ends of a surface form
/// closed subsets of its end space, so Seq enforces the closure condition:
/// a body with an infinite-genus (resp. non-orientable) end forces the limit
/// label to be infinite-genus (resp. non-orientable).
///
/// Values are immutable after construction.
class EndSpaceExpr {
 public:
  static EndSpaceExpr pt(EndLabel label) {
    check_label(label);
    EndSpaceExpr e;
    e.kind_ = EndExprKind::Pt;
    e.label_ = label;
    return e;
  }

  static EndSpaceExpr cantor(EndLabel label) {
    check_label(label);
    EndSpaceExpr e;
    e.kind_ = EndExprKind::Cantor;
    e.label_ = label;
    return e;
  }

  static EndSpaceExpr seq(EndSpaceExpr body, EndLabel limit) {
    check_label(limit);
    if (body.contains_infinite_genus() && limit.genus_class != GenusClass::Infinite) {
      throw InvalidExprError("seq closure violated: body has an infinite-genus end "
                             "but the limit label is genus zero");
    }
    if (body.contains_nonorientable() && limit.orientable) {
      throw InvalidExprError("seq closure violated: body has a non-orientable end "
                             "but the limit label is orientable");
    }
    EndSpaceExpr e;
    e.kind_ = EndExprKind::Seq;
    e.label_ = limit;
    e.children_.push_back(std::move(body));
    return e;
  }

  static EndSpaceExpr union_of(std::vector<EndSpaceExpr> parts) {
    if (parts.empty()) {
      throw InvalidExprError("union must have at least one part");
    }
    EndSpaceExpr e;
    e.kind_ = EndExprKind::Union;
    e.children_ = std::move(parts);
    return e;
  }

  EndExprKind kind() const { return kind_; }

  /// Pt/Cantor: the uniform end label. Seq: the limit label.
  EndLabel label() const {
    if (kind_ == EndExprKind::Union) {
      throw std::logic_error("union carries no label");
    }
    return label_;
  }

  const EndSpaceExpr& body() const {
    if (kind_ != EndExprKind::Seq) {
      throw std::logic_error("body() requires a seq");
    }
    return children_.front();
  }

  const std::vector<EndSpaceExpr>& parts() const {
    if (kind_ != EndExprKind::Union) {
      throw std::logic_error("parts() requires a union");
    }
    return children_;
  }

  bool contains_infinite_genus() const {
    if (kind_ != EndExprKind::Union && label_.genus_class == GenusClass::Infinite) return true;
    for (const auto& c : children_) {
      if (c.contains_infinite_genus()) return true;
    }
    return false;
  }

  bool contains_nonorientable() const {
    if (kind_ != EndExprKind::Union && !label_.orientable) return true;
    for (const auto& c : children_) {
      if (c.contains_nonorientable()) return true;
    }
    return false;
  }

  friend bool operator==(const EndSpaceExpr& a, const EndSpaceExpr& b) {
    return a.kind_ == b.kind_ &&
           (a.kind_ == EndExprKind::Union || a.label_ == b.label_) &&
           a.children_ == b.children_;
  }

 private:
  static void check_label(EndLabel l) { validate_label(l.genus_class, l.orientable); }

  EndSpaceExpr() = default;

  EndExprKind kind_ = EndExprKind::Pt;
  EndLabel label_{};
  std::vector<EndSpaceExpr> children_;
};

/// Total order used to sort union parts: lexicographic on
/// (constructor tag, label, children). Returns <0, 0, >0.
inline int compare(const EndSpaceExpr& a, const EndSpaceExpr& b) {
  if (a.kind() != b.kind()) {
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  }
  if (a.kind() != EndExprKind::Union) {
    int la = label_rank(a.label());
    int lb = label_rank(b.label());
    if (la != lb) return la < lb ? -1 : 1;
  }
  switch (a.kind()) {
    case EndExprKind::Pt:
    case EndExprKind::Cantor:
      return 0;
    case EndExprKind::Seq:
      return compare(a.body(), b.body());
    case EndExprKind::Union: {
      const auto& pa = a.parts();
      const auto& pb = b.parts();
      const std::size_t n = std::min(pa.size(), pb.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(pa[i], pb[i]);
        if (c != 0) return c;
      }
      if (pa.size() != pb.size()) return pa.size() < pb.size() ? -1 : 1;
      return 0;
    }
  }
  throw std::logic_error("unreachable");
}

// ===========================================================================
// Canonical form
// ===========================================================================

/// Rewrites an expression to the fixpoint of:
///   - flatten nested unions, drop singleton union wrappers;
///   - sort union parts by the total order;
///   - Cantor(l) + Cantor(l)        -> Cantor(l)   (within a union)
///   - Seq(Cantor(l); l)            -> Cantor(l)
///   - Union(T, Seq(T; l))          -> Seq(T; l)   (index-shift absorption)
///   - duplicate parts of a seq BODY union collapse to one copy (countably
///     many copies of (T + T) interleave into countably many copies of T).
///
/// Idempotent; equal canonical forms denote homeomorphic labeled triples.
inline EndSpaceExpr canonicalize(const EndSpaceExpr& e) {
  switch (e.kind()) {
    case EndExprKind::Pt:
    case EndExprKind::Cantor:
      return e;

    case EndExprKind::Seq: {
      EndSpaceExpr body = canonicalize(e.body());
      // Interleave rule: a seq body that is a union with repeated parts
      // denotes the same space as the deduplicated body.
      if (body.kind() == EndExprKind::Union) {
        std::vector<EndSpaceExpr> parts;
        for (const auto& p : body.parts()) {
          bool dup = false;
          for (const auto& q : parts) {
            if (q == p) { dup = true; break; }
          }
          if (!dup) parts.push_back(p);
        }
        body = (parts.size() == 1) ? parts.front() : EndSpaceExpr::union_of(std::move(parts));
      }
      if (body.kind() == EndExprKind::Cantor && body.label() == e.label()) {
        // Countably many Cantor blocks converging to a same-labeled limit
        // form a perfect set again: still a Cantor block.
        return body;
      }
      return EndSpaceExpr::seq(std::move(body), e.label());
    }

    case EndExprKind::Union: {
      std::vector<EndSpaceExpr> parts;
      for (const auto& p : e.parts()) {
        EndSpaceExpr cp = canonicalize(p);
        if (cp.kind() == EndExprKind::Union) {
          for (auto& q : cp.parts()) parts.push_back(q);
        } else {
          parts.push_back(std::move(cp));
        }
      }
      // Absorption: finitely many extra copies of a repeating seq body are
      // swallowed by an index shift of that seq.
      std::vector<EndSpaceExpr> kept;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        bool absorbed = false;
        for (std::size_t j = 0; j < parts.size(); ++j) {
          if (i == j) continue;
          if (parts[j].kind() == EndExprKind::Seq && parts[j].body() == parts[i]) {
            absorbed = true;
            break;
          }
        }
        if (!absorbed) kept.push_back(parts[i]);
      }
      // Two equal Cantor blocks are one Cantor block.
      std::vector<EndSpaceExpr> dedup;
      for (auto& p : kept) {
        if (p.kind() == EndExprKind::Cantor) {
          bool seen = false;
          for (const auto& q : dedup) {
            if (q == p) { seen = true; break; }
          }
          if (seen) continue;
        }
        dedup.push_back(std::move(p));
      }
      std::sort(dedup.begin(), dedup.end(),
                [](const EndSpaceExpr& x, const EndSpaceExpr& y) { return compare(x, y) < 0; });
      if (dedup.size() == 1) return dedup.front();
      return EndSpaceExpr::union_of(std::move(dedup));
    }
  }
  throw std::logic_error("unreachable");
}

/// Decides homeomorphism of the labeled triples (non-orientable ends,
/// infinite-genus ends, all ends) by comparing canonical forms. Sound in
/// general; complete for finite end sets and the rewrite-closed class of
/// uniform Cantor blocks with seq nests of depth at most two.
inline bool homeomorphic(const EndSpaceExpr& a, const EndSpaceExpr& b) {
  return canonicalize(a) == canonicalize(b);
}

// ===========================================================================
// Addresses and the quotient operation
// ===========================================================================

/// Names a single addressable end: child indices descending through union
/// parts to a Pt leaf, or to a Seq node (addressing its limit end). Ends
/// inside a Cantor block or among the countable copies of a seq body have
/// no finite name and are not addressable.
struct EndAddress {
  std::vector<std::size_t> path;

  friend bool operator==(const EndAddress&, const EndAddress&) = default;
};

struct SameEndError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnaddressableError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnknownEndError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const EndSpaceExpr* resolve_address(const EndSpaceExpr& e, const EndAddress& a) {
  const EndSpaceExpr* node = &e;
  for (std::size_t idx : a.path) {
    switch (node->kind()) {
      case EndExprKind::Union:
        if (idx >= node->parts().size()) {
          throw UnknownEndError("end address index out of range");
        }
        node = &node->parts()[idx];
        break;
      case EndExprKind::Seq:
        throw UnaddressableError("end address descends into a sequence body; "
                                 "those ends have no finite name");
      case EndExprKind::Cantor:
        throw UnaddressableError("end address enters a cantor block; "
                                 "those ends have no finite name");
      case EndExprKind::Pt:
        throw UnknownEndError("end address continues past a point");
    }
  }
  switch (node->kind()) {
    case EndExprKind::Pt:
    case EndExprKind::Seq:
      return node;
    case EndExprKind::Cantor:
      throw UnaddressableError("end address stops at a cantor block");
    case EndExprKind::Union:
      throw UnknownEndError("end address stops at a union, not at an end");
  }
  throw std::logic_error("unreachable");
}

inline EndSpaceExpr replace_at(const EndSpaceExpr& e, const std::vector<std::size_t>& path,
                               std::size_t i, const EndSpaceExpr& replacement) {
  if (i == path.size()) return replacement;
  std::vector<EndSpaceExpr> parts = e.parts();
  parts[path[i]] = replace_at(parts[path[i]], path, i + 1, replacement);
  return EndSpaceExpr::union_of(std::move(parts));
}

// Removes the addressed subtree; empty unions cascade upward.
inline std::optional<EndSpaceExpr> remove_at(const EndSpaceExpr& e,
                                             const std::vector<std::size_t>& path,
                                             std::size_t i) {
  if (i == path.size()) return std::nullopt;
  std::vector<EndSpaceExpr> parts = e.parts();
  std::optional<EndSpaceExpr> child = remove_at(parts[path[i]], path, i + 1);
  if (child.has_value()) {
    parts[path[i]] = std::move(*child);
  } else {
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(path[i]));
  }
  if (parts.empty()) return std::nullopt;
  return EndSpaceExpr::union_of(std::move(parts));
}

}  // namespace detail

/// Label of the end named by the address.
inline EndLabel end_label_at(const EndSpaceExpr& e, const EndAddress& a) {
  return detail::resolve_address(e, a)->label();
}

/// All addressable ends of an expression, with their labels.
inline std::vector<std::pair<EndAddress, EndLabel>> addressable_ends(const EndSpaceExpr& e) {
  std::vector<std::pair<EndAddress, EndLabel>> out;
  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, const EndSpaceExpr& node) -> void {
    switch (node.kind()) {
      case EndExprKind::Pt:
      case EndExprKind::Seq:
        out.push_back({EndAddress{path}, node.label()});
        return;
      case EndExprKind::Cantor:
        return;
      case EndExprKind::Union:
        for (std::size_t i = 0; i < node.parts().size(); ++i) {
          path.push_back(i);
          self(self, node.parts()[i]);
          path.pop_back();
        }
        return;
    }
  };
  walk(walk, e);
  return out;
}

/// The end space obtained by identifying the two addressed ends into a
/// single end labeled `merged`. The caller supplies merged = merge_label of
/// the two end labels; a mismatch is rejected.
///
/// Identification rules: two points fuse into one point; a point converging
/// against a sequence limit is absorbed into the relabeled limit; two
/// sequence limits fuse by interleaving the two bodies. The result is
/// canonical and has exactly one end fewer.
inline EndSpaceExpr quotient_ends(const EndSpaceExpr& e, const EndAddress& a,
                                  const EndAddress& b, EndLabel merged) {
  if (a == b) {
    throw SameEndError("a 1-handle at infinity requires two distinct ends");
  }
  const EndSpaceExpr* na = detail::resolve_address(e, a);
  const EndSpaceExpr* nb = detail::resolve_address(e, b);
  if (merged != merge_label(na->label(), nb->label())) {
    throw std::invalid_argument("merged label does not match merge_label of the two ends");
  }

  // Build the replacement for one address and delete the other. The two
  // paths are disjoint (neither can be a prefix of the other), so applying
  // the replacement first leaves the removal path valid.
  const bool a_is_seq = (na->kind() == EndExprKind::Seq);
  const bool b_is_seq = (nb->kind() == EndExprKind::Seq);

  const EndAddress* replace_addr = &a;
  const EndAddress* remove_addr = &b;
  EndSpaceExpr replacement = EndSpaceExpr::pt(merged);
  if (a_is_seq && b_is_seq) {
    replacement = EndSpaceExpr::seq(
        EndSpaceExpr::union_of({na->body(), nb->body()}), merged);
  } else if (a_is_seq || b_is_seq) {
    const EndSpaceExpr* s = a_is_seq ? na : nb;
    replace_addr = a_is_seq ? &a : &b;
    remove_addr = a_is_seq ? &b : &a;
    replacement = EndSpaceExpr::seq(s->body(), merged);
  }

  EndSpaceExpr replaced = detail::replace_at(e, replace_addr->path, 0, replacement);
  std::optional<EndSpaceExpr> result = detail::remove_at(replaced, remove_addr->path, 0);
  if (!result.has_value()) {
    throw std::logic_error("quotient removed the whole expression");
  }
  return canonicalize(*result);
}

// ===========================================================================
// End counting
// ===========================================================================

struct EndCount {
  enum class Kind : std::uint8_t { Finite, CountablyInfinite, Continuum };
  Kind kind = Kind::Finite;
  std::int64_t n = 0;  // meaningful only when kind == Finite

  static EndCount finite(std::int64_t n) { return EndCount{Kind::Finite, n}; }
  static EndCount countable() { return EndCount{Kind::CountablyInfinite, 0}; }
  static EndCount continuum() { return EndCount{Kind::Continuum, 0}; }

  friend bool operator==(const EndCount&, const EndCount&) = default;
};

inline EndCount count_ends(const EndSpaceExpr& e) {
  bool has_seq = false, has_cantor = false;
  std::int64_t points = 0;
  auto walk = [&](auto&& self, const EndSpaceExpr& node) -> void {
    switch (node.kind()) {
      case EndExprKind::Pt: ++points; return;
      case EndExprKind::Cantor: has_cantor = true; return;
      case EndExprKind::Seq: has_seq = true; self(self, node.body()); return;
      case EndExprKind::Union:
        for (const auto& p : node.parts()) self(self, p);
        return;
    }
  };
  walk(walk, e);
  if (has_cantor) return EndCount::continuum();
  if (has_seq) return EndCount::countable();
  return EndCount::finite(points);
}

// ===========================================================================
// Textual form:  pt(g,o)  cantor(g,o)  seq(EXPR; g,o)  union(EXPR, ...)
// with g in {0, inf} and o in {or, non}.
// ===========================================================================

inline std::string to_text(EndLabel l) {
  std::string s = (l.genus_class == GenusClass::Zero) ? "0" : "inf";
  s += ',';
  s += l.orientable ? "or" : "non";
  return s;
}

inline std::string to_text(const EndSpaceExpr& e) {
  switch (e.kind()) {
    case EndExprKind::Pt:
      return "pt(" + to_text(e.label()) + ")";
    case EndExprKind::Cantor:
      return "cantor(" + to_text(e.label()) + ")";
    case EndExprKind::Seq:
      return "seq(" + to_text(e.body()) + "; " + to_text(e.label()) + ")";
    case EndExprKind::Union: {
      std::string s = "union(";
      for (std::size_t i = 0; i < e.parts().size(); ++i) {
        if (i > 0) s += ", ";
        s += to_text(e.parts()[i]);
      }
      return s + ")";
    }
  }
  throw std::logic_error("unreachable");
}

namespace detail {

struct ExprTextParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool try_eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) { ++pos; return true; }
    return false;
  }

  void expect(char c) {
    if (!try_eat(c)) {
      throw InvalidExprError(std::string("expected '") + c + "' at offset " +
                             std::to_string(pos) + " in end expression");
    }
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    if (start == pos) {
      throw InvalidExprError("expected a word at offset " + std::to_string(pos) +
                             " in end expression");
    }
    return text.substr(start, pos - start);
  }

  EndLabel label() {
    std::string g = word();
    expect(',');
    std::string o = word();
    GenusClass gc;
    if (g == "0") gc = GenusClass::Zero;
    else if (g == "inf") gc = GenusClass::Infinite;
    else throw InvalidExprError("genus must be 0 or inf, got '" + g + "'");
    bool orient;
    if (o == "or") orient = true;
    else if (o == "non") orient = false;
    else throw InvalidExprError("orientability must be or or non, got '" + o + "'");
    return validate_label(gc, orient);
  }

  EndSpaceExpr expr() {
    std::string head = word();
    expect('(');
    if (head == "pt") {
      EndLabel l = label();
      expect(')');
      return EndSpaceExpr::pt(l);
    }
    if (head == "cantor") {
      EndLabel l = label();
      expect(')');
      return EndSpaceExpr::cantor(l);
    }
    if (head == "seq") {
      EndSpaceExpr body = expr();
      expect(';');
      EndLabel l = label();
      expect(')');
      return EndSpaceExpr::seq(std::move(body), l);
    }
    if (head == "union") {
      std::vector<EndSpaceExpr> parts;
      parts.push_back(expr());
      while (try_eat(',')) parts.push_back(expr());
      expect(')');
      return EndSpaceExpr::union_of(std::move(parts));
    }
    throw InvalidExprError("unknown end expression constructor '" + head + "'");
  }
};

}  // namespace detail

inline EndSpaceExpr parse_end_expr(const std::string& text) {
  detail::ExprTextParser p{text};
  EndSpaceExpr e = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) {
    throw InvalidExprError("trailing input after end expression at offset " +
                           std::to_string(p.pos));
  }
  return e;
}

}  // namespace endsum
