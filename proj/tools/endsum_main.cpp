// Command-line surface classifier and end-sum calculator.
//
// Subcommands:
//   classify FILE            invariant report per component
//   ends FILE [--census]     canonical end expressions; census via graph ends
//   endsum FILE --end C.A --end C.A [--non-oriented]
//                            attach a 1-handle at infinity two ways
//   iso FILE FILE            isomorphism decision with certificate
//   verify FILE --end ... --end ... [--trials N] [--seed S]
//                            presentation-invariance report
//
// Exit codes: 0 success, 1 negative mathematical verdict, 2 input error,
// 3 unsupported automaton shape.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "endsum/classify.hpp"
#include "endsum/dsl.hpp"
#include "endsum/end_space.hpp"
#include "endsum/graph_ends.hpp"
#include "endsum/handle.hpp"
#include "endsum/surface.hpp"

using nlohmann::json;
using namespace endsum;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegativeVerdict = 1;
constexpr int kExitInputError = 2;
constexpr int kExitUnsupported = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DescriptorDocument load_document(const std::string& path) {
  ParseResult r = parse_dsl(read_file(path));
  if (!r.ok()) {
    std::ostringstream msg;
    for (const Diagnostic& d : r.diagnostics) {
      msg << path << ":" << d.line << ":" << d.col << ": [" << d.rule << "] " << d.message;
    }
    throw InputError(msg.str());
  }
  return r.document;
}

const SurfaceEntry& pick_surface(const DescriptorDocument& doc, const std::string& name) {
  if (name.empty()) return doc.surfaces.front();
  const SurfaceEntry* s = doc.find(name);
  if (!s) throw InputError("no surface named '" + name + "' in the file");
  return *s;
}

SurfaceDescriptor validated(const SurfaceEntry& s) {
  auto issues = validate_descriptor(s.descriptor);
  if (!issues.empty()) throw InputError(InvalidDescriptorError::format(issues));
  return s.descriptor;
}

// End references: <component>.<anchor>[.<index>...] where <component> is a
// zero-based index, optionally written cN; a bare "c" names the only
// component of a one-component surface.
EndRef parse_end_ref(const std::string& text, std::size_t component_count) {
  std::vector<std::string> tokens;
  std::string tok;
  std::istringstream ss(text);
  while (std::getline(ss, tok, '.')) tokens.push_back(tok);
  if (tokens.size() < 2) {
    throw InputError("end reference '" + text + "' must look like <component>.<anchor>");
  }
  EndRef ref;
  const std::string& comp = tokens[0];
  auto all_digits = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  auto as_index = [&text](const std::string& s) -> std::size_t {
    try {
      return std::stoull(s);
    } catch (const std::out_of_range&) {
      throw InputError("end reference '" + text + "': index out of range");
    }
  };
  if (all_digits(comp)) {
    ref.component = as_index(comp);
  } else if (comp == "c" && component_count == 1) {
    ref.component = 0;
  } else if (comp.size() > 1 && comp[0] == 'c' && all_digits(comp.substr(1))) {
    ref.component = as_index(comp.substr(1));
  } else {
    throw InputError("end reference '" + text + "': component must be an index (0, 1, ... or c0, c1, ...)");
  }
  ref.anchor = tokens[1];
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (!all_digits(tokens[i])) {
      throw InputError("end reference '" + text + "': path entries must be indices");
    }
    ref.path.push_back(as_index(tokens[i]));
  }
  return ref;
}

// ---------------------------------------------------------------------------
// JSON encodings
// ---------------------------------------------------------------------------

json to_json(EndLabel l) {
  return json{{"genus", l.genus_class == GenusClass::Zero ? "0" : "inf"},
              {"orientable", l.orientable}};
}

json to_json(const EndSpaceExpr& e) {
  switch (e.kind()) {
    case EndExprKind::Pt:
      return json{{"kind", "pt"}, {"label", to_json(e.label())}};
    case EndExprKind::Cantor:
      return json{{"kind", "cantor"}, {"label", to_json(e.label())}};
    case EndExprKind::Seq:
      return json{{"kind", "seq"}, {"body", to_json(e.body())}, {"limit", to_json(e.label())}};
    case EndExprKind::Union: {
      json parts = json::array();
      for (const auto& p : e.parts()) parts.push_back(to_json(p));
      return json{{"kind", "union"}, {"parts", parts}};
    }
  }
  return json();
}

json to_json(const ClassInvariant& inv) {
  json genus = inv.genus.infinite ? json{{"infinite", true}}
                                  : json{{"finite", true}, {"doubled", inv.genus.doubled}};
  json parity;
  if (inv.parity) parity = (*inv.parity == Parity::Even) ? "even" : "odd";
  return json{{"orientable", inv.orientable}, {"genus", genus},
              {"parity", parity},            {"boundary", inv.boundary_count},
              {"ends", inv.ends ? to_json(*inv.ends) : json()},
              {"connected", inv.connected}};
}

json invariants_json(const std::vector<ClassInvariant>& invs) {
  json arr = json::array();
  for (const auto& inv : invs) arr.push_back(to_json(inv));
  return arr;
}

void print_invariants(std::ostream& os, const std::vector<ClassInvariant>& invs) {
  for (std::size_t i = 0; i < invs.size(); ++i) {
    os << "  component " << i << ": " << describe(invs[i]) << "\n";
  }
}

GraphPresentation underlying_graph(const BlockAutomaton& a) {
  GraphPresentation g;
  g.root = a.start;
  for (const Block& b : a.nodes) g.out_edges.push_back(b.children);
  return g;
}

// ---------------------------------------------------------------------------
// endsum: the two computation routes and their comparison
// ---------------------------------------------------------------------------

bool invariants_agree(const std::vector<ClassInvariant>& a,
                      const std::vector<ClassInvariant>& b) {
  return handle_detail::invariants_equal(a, b);
}

struct OracleVerdict {
  std::optional<bool> combinatorial;  // empty: not constructible
  std::optional<bool> exhaustion;     // empty: oracle not applicable
  std::string note;

  bool agree() const {
    return combinatorial.value_or(true) && exhaustion.value_or(true);
  }
};

OracleVerdict run_oracles(const SurfaceDescriptor& d, const HandleSpec& h,
                          const std::vector<ClassInvariant>& predicted,
                          std::optional<SurfaceDescriptor>* constructed_out) {
  OracleVerdict v;
  try {
    SurfaceDescriptor n = attach_handle_combinatorial(d, h);
    v.combinatorial = invariants_agree(classify(n), predicted);
    if (constructed_out) *constructed_out = std::move(n);
  } catch (const NonlinearEndError& e) {
    v.note = e.what();
  }

  // Finite occurrence counts stabilize within the longest acyclic path of
  // an automaton, and infinite genus gains at least one handle per cycle
  // period, so the automaton node count bounds both horizons.
  std::int64_t biggest = 0;
  for (std::size_t comp : {h.end_a.component, h.end_b.component}) {
    for (const auto& [name, a] : d.components[comp].anchors) {
      (void)name;
      biggest = std::max(biggest, static_cast<std::int64_t>(a.nodes.size()));
    }
  }
  const std::int64_t settle = std::max<std::int64_t>(20, biggest + 4);
  const std::int64_t window = std::max<std::int64_t>(8, biggest);
  const std::int64_t last = settle + window;

  const std::size_t merged_index = std::min(h.end_a.component, h.end_b.component);
  const ClassInvariant& merged = predicted[merged_index];
  try {
    auto L = exhaustion_oracle(d, h, last);
    bool ok = true;
    if (merged.genus.infinite) {
      ok &= L[last].doubled_genus() > L[settle].doubled_genus();
    } else {
      ok &= L[last].doubled_genus() == merged.genus.doubled;
      ok &= L[settle].doubled_genus() == merged.genus.doubled;
    }
    if (merged.parity) {
      ok &= parity_of(L[last].doubled_genus()) == *merged.parity;
      ok &= parity_of(L[last - 1].doubled_genus()) == *merged.parity;
    }
    v.exhaustion = ok;
  } catch (const UnsupportedShapeError& e) {
    if (!v.note.empty()) v.note += "; ";
    v.note += e.what();
  }
  return v;
}

// ---------------------------------------------------------------------------
// verify: transform catalog
// ---------------------------------------------------------------------------

bool is_pure_cycle(const BlockAutomaton& a) {
  try {
    handle_detail::Chain ch = handle_detail::extract_chain(a, "probe");
    return ch.tail == 0;
  } catch (const NonlinearEndError&) {
    return false;
  }
}

std::vector<DescriptorTransform> standard_transforms(const SurfaceDescriptor& d,
                                                     const HandleSpec& h) {
  std::vector<DescriptorTransform> ts;
  auto add_for = [&](std::size_t comp, const std::string& anchor) {
    const Component& c = d.components[comp];
    for (const auto& [name, a] : c.anchors) {
      if (name != anchor) continue;
      if (is_pure_cycle(a)) {
        ts.push_back(rotate_cycle_transform(comp, anchor, 1));
      }
      ts.push_back(subdivide_block_transform(comp, anchor, a.start, false));
      ts.push_back(subdivide_block_transform(comp, anchor, a.start, true));
      ts.push_back(offset_exhaustion_transform(comp, anchor, 1));
      ts.push_back(offset_exhaustion_transform(comp, anchor, 2));
    }
  };
  add_for(h.end_a.component, h.end_a.anchor);
  if (!(h.end_a.component == h.end_b.component && h.end_a.anchor == h.end_b.anchor)) {
    add_for(h.end_b.component, h.end_b.anchor);
  }
  return ts;
}

std::vector<DescriptorTransform> random_transforms(const SurfaceDescriptor& d,
                                                   const HandleSpec& h, std::uint64_t seed,
                                                   int trials) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, std::string>> anchors;
  for (std::size_t comp : {h.end_a.component, h.end_b.component}) {
    for (const auto& [name, a] : d.components[comp].anchors) {
      (void)a;
      anchors.push_back({comp, name});
    }
  }
  std::vector<DescriptorTransform> ts;
  for (int i = 0; i < trials && !anchors.empty(); ++i) {
    auto [comp, anchor] = anchors[rng() % anchors.size()];
    const BlockAutomaton* a = nullptr;
    for (const auto& [name, automaton] : d.components[comp].anchors) {
      if (name == anchor) a = &automaton;
    }
    switch (rng() % 3) {
      case 0:
        if (is_pure_cycle(*a)) {
          ts.push_back(rotate_cycle_transform(comp, anchor, 1 + rng() % a->nodes.size()));
          break;
        }
        [[fallthrough]];
      case 1:
        ts.push_back(
            subdivide_block_transform(comp, anchor, rng() % a->nodes.size(), rng() % 2 == 0));
        break;
      default:
        ts.push_back(offset_exhaustion_transform(comp, anchor, 1 + rng() % 3));
        break;
    }
  }
  return ts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classification and end sums of noncompact surfaces with compact boundary"};
  app.require_subcommand(1);

  std::function<int()> action;

  // ----- classify ---------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("classify", "Print the classification invariants");
    auto file = std::make_shared<std::string>();
    auto surface = std::make_shared<std::string>();
    auto as_json = std::make_shared<bool>(false);
    cmd->add_option("file", *file, "descriptor file")->required();
    cmd->add_option("--surface", *surface, "surface name (default: first in file)");
    cmd->add_flag("--json", *as_json, "machine-readable output");
    cmd->callback([=, &action] {
      action = [=]() {
        DescriptorDocument doc = load_document(*file);
        json out = json::array();
        for (const SurfaceEntry& s : doc.surfaces) {
          if (!surface->empty() && s.name != *surface) continue;
          auto invs = classify(validated(s));
          if (*as_json) {
            out.push_back(json{{"name", s.name}, {"components", invariants_json(invs)}});
          } else {
            std::cout << "surface " << s.name << "\n";
            print_invariants(std::cout, invs);
          }
        }
        if (!surface->empty() && out.empty() && !doc.find(*surface)) {
          throw InputError("no surface named '" + *surface + "' in the file");
        }
        if (*as_json) std::cout << json{{"surfaces", out}}.dump(2) << "\n";
        return kExitOk;
      };
    });
  }

  // ----- ends --------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("ends", "Print canonical end expressions per component");
    auto file = std::make_shared<std::string>();
    auto surface = std::make_shared<std::string>();
    auto census = std::make_shared<bool>(false);
    auto as_json = std::make_shared<bool>(false);
    cmd->add_option("file", *file, "descriptor file")->required();
    cmd->add_option("--surface", *surface, "surface name (default: first in file)");
    cmd->add_flag("--census", *census, "also run the graph-ends census per anchor");
    cmd->add_flag("--json", *as_json, "machine-readable output");
    cmd->callback([=, &action] {
      action = [=]() {
        DescriptorDocument doc = load_document(*file);
        const SurfaceEntry& s = pick_surface(doc, *surface);
        SurfaceDescriptor d = validated(s);
        json jcomponents = json::array();
        bool any_unsupported = false;
        if (!*as_json) std::cout << "surface " << s.name << "\n";
        for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
          // Assemble the component's end expression anchor by anchor so the
          // census stays available when a shape is unsupported.
          std::vector<EndSpaceExpr> parts;
          std::string unsupported_note;
          for (const auto& [name, a] : d.components[ci].anchors) {
            AutomatonEnds ae = ends_of_automaton(a);
            if (!ae.supported) {
              any_unsupported = true;
              if (!unsupported_note.empty()) unsupported_note += "; ";
              unsupported_note += name + ": " + ae.reason;
            } else if (ae.ends) {
              parts.push_back(*ae.ends);
            }
          }
          std::optional<EndSpaceExpr> ends;
          if (!parts.empty() && unsupported_note.empty()) {
            ends = canonicalize(parts.size() == 1 ? parts.front()
                                                  : EndSpaceExpr::union_of(parts));
          }
          json jc;
          jc["ends"] = ends ? to_json(*ends) : json();
          if (!unsupported_note.empty()) jc["unsupported"] = unsupported_note;
          if (!*as_json) {
            std::cout << "  component " << ci << ": ";
            if (!unsupported_note.empty()) {
              std::cout << "unsupported (" << unsupported_note << ")\n";
            } else {
              std::cout << (ends ? to_text(*ends) : "none") << "\n";
            }
          }
          if (*census) {
            json janchors = json::array();
            for (const auto& [name, a] : d.components[ci].anchors) {
              CensusResult r = end_census(underlying_graph(a));
              json ja{{"anchor", name}, {"kind", to_string(r.kind)}, {"counts", r.counts}};
              if (r.kind == CensusKind::Finite) ja["count"] = r.finite_count;
              janchors.push_back(ja);
              if (!*as_json) {
                std::cout << "    census " << name << ": " << to_string(r.kind);
                if (r.kind == CensusKind::Finite) std::cout << "(" << r.finite_count << ")";
                std::cout << ", counts";
                for (std::size_t k = 0; k < r.counts.size() && k < 8; ++k) {
                  std::cout << " " << r.counts[k];
                }
                std::cout << (r.counts.size() > 8 ? " ...\n" : "\n");
              }
            }
            jc["census"] = janchors;
          }
          jcomponents.push_back(jc);
        }
        if (*as_json) {
          std::cout << json{{"surface", s.name}, {"components", jcomponents}}.dump(2) << "\n";
        }
        return (any_unsupported && !*census) ? kExitUnsupported : kExitOk;
      };
    });
  }

  // ----- endsum ------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("endsum", "Attach a 1-handle at infinity to two distinct ends");
    auto file = std::make_shared<std::string>();
    auto surface = std::make_shared<std::string>();
    auto ends = std::make_shared<std::vector<std::string>>();
    auto non_oriented = std::make_shared<bool>(false);
    auto as_json = std::make_shared<bool>(false);
    cmd->add_option("file", *file, "descriptor file")->required();
    cmd->add_option("--surface", *surface, "surface name (default: first in file)");
    cmd->add_option("--end", *ends, "end reference <component>.<anchor>[.<idx>...] (twice)");
    cmd->add_flag("--non-oriented", *non_oriented, "attach the handle non-orientedly");
    cmd->add_flag("--json", *as_json, "machine-readable output");
    cmd->callback([=, &action] {
      action = [=]() {
        DescriptorDocument doc = load_document(*file);
        const SurfaceEntry& s = pick_surface(doc, *surface);
        SurfaceDescriptor d = validated(s);
        if (ends->size() != 2) {
          throw InputError("endsum needs exactly two --end references");
        }
        HandleSpec h;
        h.end_a = parse_end_ref((*ends)[0], d.components.size());
        h.end_b = parse_end_ref((*ends)[1], d.components.size());
        h.oriented = !*non_oriented;

        auto predicted = predict_handle_invariants(d, h);
        std::optional<SurfaceDescriptor> constructed;
        OracleVerdict verdict = run_oracles(d, h, predicted, &constructed);

        const std::string sum_name = s.name + "_sum";
        if (*as_json) {
          json out;
          out["surface"] = s.name;
          out["ends"] = {(*ends)[0], (*ends)[1]};
          out["oriented"] = h.oriented;
          out["predicted"] = invariants_json(predicted);
          out["descriptor"] = json();
          if (constructed) out["descriptor"] = print_descriptor(*constructed, sum_name);
          json oracle;
          oracle["verdict"] = verdict.agree() ? "agree" : "disagree";
          oracle["combinatorial"] = json();
          if (verdict.combinatorial) oracle["combinatorial"] = *verdict.combinatorial;
          oracle["exhaustion"] = json();
          if (verdict.exhaustion) oracle["exhaustion"] = *verdict.exhaustion;
          oracle["note"] = verdict.note;
          out["oracle"] = oracle;
          std::cout << out.dump(2) << "\n";
        } else {
          std::cout << "predicted invariants of the sum:\n";
          print_invariants(std::cout, predicted);
          if (constructed) {
            std::cout << "constructed descriptor:\n" << print_descriptor(*constructed, sum_name);
          } else {
            std::cout << "combinatorial construction unavailable: " << verdict.note << "\n";
          }
          std::cout << "oracle verdict: " << (verdict.agree() ? "agree" : "DISAGREE") << "\n";
        }
        return verdict.agree() ? kExitOk : kExitNegativeVerdict;
      };
    });
  }

  // ----- iso ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("iso", "Decide isomorphism of two surfaces");
    auto file1 = std::make_shared<std::string>();
    auto file2 = std::make_shared<std::string>();
    auto surface1 = std::make_shared<std::string>();
    auto surface2 = std::make_shared<std::string>();
    auto as_json = std::make_shared<bool>(false);
    cmd->add_option("file1", *file1, "first descriptor file")->required();
    cmd->add_option("file2", *file2, "second descriptor file")->required();
    cmd->add_option("--surface1", *surface1, "surface name in file1");
    cmd->add_option("--surface2", *surface2, "surface name in file2");
    cmd->add_flag("--json", *as_json, "machine-readable output");
    cmd->callback([=, &action] {
      action = [=]() {
        SurfaceDescriptor d1 = validated(pick_surface(load_document(*file1), *surface1));
        SurfaceDescriptor d2 = validated(pick_surface(load_document(*file2), *surface2));
        IsoResult r = isomorphic(d1, d2);
        if (*as_json) {
          json matches = json::array();
          for (auto [a, b] : r.matches) matches.push_back({a, b});
          std::cout << json{{"isomorphic", r.isomorphic},
                            {"certificate", r.certificate},
                            {"matches", matches}}
                           .dump(2)
                    << "\n";
        } else {
          std::cout << (r.isomorphic ? "isomorphic" : "not isomorphic") << "\n"
                    << r.certificate << "\n";
        }
        return r.isomorphic ? kExitOk : kExitNegativeVerdict;
      };
    });
  }

  // ----- verify ------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "verify", "Check presentation invariance of the handle attachment");
    auto file = std::make_shared<std::string>();
    auto surface = std::make_shared<std::string>();
    auto ends = std::make_shared<std::vector<std::string>>();
    auto non_oriented = std::make_shared<bool>(false);
    auto trials = std::make_shared<int>(0);
    auto seed = std::make_shared<std::uint64_t>(20240901u);
    auto as_json = std::make_shared<bool>(false);
    cmd->add_option("file", *file, "descriptor file")->required();
    cmd->add_option("--surface", *surface, "surface name (default: first in file)");
    cmd->add_option("--end", *ends, "end reference (twice)");
    cmd->add_flag("--non-oriented", *non_oriented, "attach the handle non-orientedly");
    cmd->add_option("--trials", *trials, "additional randomized transforms");
    cmd->add_option("--seed", *seed, "seed for randomized transforms");
    cmd->add_flag("--json", *as_json, "machine-readable output");
    cmd->callback([=, &action] {
      action = [=]() {
        DescriptorDocument doc = load_document(*file);
        const SurfaceEntry& s = pick_surface(doc, *surface);
        SurfaceDescriptor d = validated(s);
        if (ends->size() != 2) {
          throw InputError("verify needs exactly two --end references");
        }
        HandleSpec h;
        h.end_a = parse_end_ref((*ends)[0], d.components.size());
        h.end_b = parse_end_ref((*ends)[1], d.components.size());
        h.oriented = !*non_oriented;

        std::uint64_t effective_seed = *seed;
        if (const char* env = std::getenv("ENDSUM_SEED")) {
          effective_seed = std::strtoull(env, nullptr, 10);
        }

        auto transforms = standard_transforms(d, h);
        auto extra = random_transforms(d, h, effective_seed, *trials);
        transforms.insert(transforms.end(), extra.begin(), extra.end());

        VerificationReport report = verify_presentation_invariance(d, h, transforms);
        if (*as_json) {
          json checks = json::array();
          for (const auto& c : report.checks) {
            checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
          }
          std::cout << json{{"surface", s.name},
                            {"seed", effective_seed},
                            {"all_passed", report.all_passed()},
                            {"checks", checks}}
                           .dump(2)
                    << "\n";
        } else {
          for (const auto& c : report.checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
            if (!c.detail.empty()) std::cout << " -- " << c.detail;
            std::cout << "\n";
          }
          std::cout << (report.all_passed() ? "all checks passed" : "VERIFICATION FAILED")
                    << "\n";
        }
        return report.all_passed() ? kExitOk : kExitNegativeVerdict;
      };
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return action();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SameEndError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnknownEndError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnaddressableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InvalidDescriptorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnsupportedShapeError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const NonlinearEndError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInputError;
  }
}
