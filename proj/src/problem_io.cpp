#include "netequil/problem_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

#include "netequil/errors.hpp"

namespace netequil::io {

namespace {

constexpr std::string_view kProblemMagic = "netequil-problem";
constexpr std::string_view kSolutionMagic = "netequil-solution";
constexpr std::string_view kFormatVersion = "1";
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

struct Line {
  std::size_t number;
  std::string text;
  std::vector<std::string> tokens;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line, std::string section, std::string entity,
                       std::string message) {
  throw ParseError(Diagnostic{code, line, std::move(section), std::move(entity), std::move(message)});
}

/// Header line, then lines grouped by [section], comments and blanks dropped.
struct Document {
  std::map<std::string, std::vector<Line>> sections;
  std::vector<Line> preamble;
  std::map<std::string, std::size_t> section_line;
};

Document read_document(std::istream& in, std::string_view magic,
                       const std::set<std::string>& known_sections) {
  Document doc;
  std::string raw;
  std::size_t number = 0;
  bool have_header = false;
  std::string current;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view view = raw;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    if (!have_header) {
      auto toks = split_ws(view);
      if (toks.empty() || toks[0] != magic) {
        fail(ErrorCode::Syntax, number, "", "",
             "expected header '" + std::string(magic) + " " + std::string(kFormatVersion) + "'");
      }
      if (toks.size() != 2 || toks[1] != kFormatVersion) {
        fail(ErrorCode::UnsupportedVersion, number, "", "",
             "unsupported format version (this reader understands " + std::string(kFormatVersion) +
                 ")");
      }
      have_header = true;
      continue;
    }
    if (view.front() == '[') {
      if (view.back() != ']') fail(ErrorCode::Syntax, number, "", "", "unterminated section header");
      current = std::string(trim(view.substr(1, view.size() - 2)));
      if (!known_sections.contains(current)) {
        fail(ErrorCode::Syntax, number, current, "", "unknown section");
      }
      if (doc.section_line.contains(current)) {
        fail(ErrorCode::Duplicate, number, current, "", "section appears twice");
      }
      doc.section_line[current] = number;
      doc.sections[current];
      continue;
    }
    Line line{number, std::string(view), split_ws(view)};
    if (current.empty()) {
      doc.preamble.push_back(std::move(line));
    } else {
      doc.sections[current].push_back(std::move(line));
    }
  }
  if (!have_header) fail(ErrorCode::Syntax, number, "", "", "empty document");
  return doc;
}

const std::vector<Line>& require_section(const Document& doc, const std::string& name) {
  auto it = doc.sections.find(name);
  if (it == doc.sections.end()) {
    fail(ErrorCode::MissingSection, 0, name, "", "required section is missing");
  }
  return it->second;
}

double number_or_fail(std::string_view tok, const Line& line, const std::string& section,
                      const std::string& entity) {
  auto v = parse_number(tok);
  if (!v) fail(ErrorCode::Syntax, line.number, section, entity, "'" + std::string(tok) + "' is not a number");
  return *v;
}

std::vector<std::string> read_id_list(const Document& doc, const std::string& section) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& line : require_section(doc, section)) {
    if (line.tokens.size() != 1) {
      fail(ErrorCode::Syntax, line.number, section, "", "expected exactly one identifier per line");
    }
    if (!seen.insert(line.tokens[0]).second) {
      fail(ErrorCode::Duplicate, line.number, section, line.tokens[0], "duplicate identifier");
    }
    ids.push_back(line.tokens[0]);
  }
  if (ids.empty()) fail(ErrorCode::MissingSection, doc.section_line.at(section), section, "", "section is empty");
  return ids;
}

// ---- capacity families -----------------------------------------------------

using Params = std::map<std::string, std::string>;

struct FamilyReader {
  const Line& line;
  const std::string& arc;
  Params params;
  std::set<std::string> used;

  std::optional<double> optional(const std::string& key) {
    used.insert(key);
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return number_or_fail(it->second, line, "arcs", arc);
  }
  double required(const std::string& key) {
    auto v = optional(key);
    if (!v) fail(ErrorCode::Syntax, line.number, "arcs", arc, "missing parameter '" + key + "'");
    return *v;
  }
  std::string word(const std::string& key, const std::string& fallback) {
    used.insert(key);
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  void finish() {
    for (const auto& [k, v] : params) {
      if (!used.contains(k)) {
        fail(ErrorCode::Syntax, line.number, "arcs", arc, "unknown parameter '" + k + "'");
      }
    }
  }
};

ScalarCapacity read_capacity(const Line& line, const std::string& arc,
                             const std::vector<std::string>& toks) {
  const std::string& family = toks.front();
  FamilyReader r{line, arc, {}, {}};
  for (std::size_t k = 1; k < toks.size(); ++k) {
    auto eq = toks[k].find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(ErrorCode::Syntax, line.number, "arcs", arc, "expected key=value, got '" + toks[k] + "'");
    }
    if (!r.params.emplace(toks[k].substr(0, eq), toks[k].substr(eq + 1)).second) {
      fail(ErrorCode::Duplicate, line.number, "arcs", arc, "parameter given twice");
    }
  }

  ScalarCapacity cap;
  if (family == "bpr") {
    cap = Bpr{r.required("alpha"), r.required("rho"), r.required("theta"), r.required("p")};
  } else if (family == "log") {
    cap = Logarithmic{r.required("omega"), r.optional("theta").value_or(0.0)};
  } else if (family == "trc") {
    cap = Trc{r.required("alpha"), r.required("beta"), r.required("delta"), r.required("omega")};
  } else if (family == "powexp") {
    cap = PowerExp{r.required("alpha"), r.required("theta"), r.required("p")};
  } else if (family == "interval") {
    IntervalProx ip;
    const std::string phi = r.word("phi", "zero");
    if (phi == "zero") {
      ip.phi = PhiZero{};
    } else if (phi == "affine") {
      ip.phi = PhiAffine{r.required("a"), r.optional("b").value_or(0.0)};
    } else if (phi == "quadratic") {
      ip.phi = PhiQuadratic{r.required("a")};
    } else if (phi == "power") {
      ip.phi = PhiPower{r.required("c"), r.required("q")};
    } else {
      fail(ErrorCode::UnknownFamily, line.number, "arcs", arc, "unknown interval function '" + phi + "'");
    }
    ip.lo = r.optional("lo").value_or(-kInf);
    ip.hi = r.optional("hi").value_or(kInf);
    cap = ip;
  } else {
    fail(ErrorCode::UnknownFamily, line.number, "arcs", arc, "unknown capacity family '" + family + "'");
  }
  r.finish();
  try {
    validate(cap);
  } catch (const ConfigError& e) {
    fail(ErrorCode::ParameterRange, line.number, "arcs", arc, e.what());
  }
  return cap;
}

Box read_constraint(const Line& line, const std::string& arc, const std::vector<std::string>& toks,
                    std::size_t dim) {
  if (toks.size() == 1 && toks[0] == "orthant") return Box::orthant(dim);
  if (toks.size() == 1 && toks[0] == "free") return Box::whole_space(dim);
  if (toks.empty() || toks[0] != "box") {
    fail(ErrorCode::UnknownFamily, line.number, "arcs", arc,
         "constraint must be 'orthant', 'free' or 'box lo:hi ...'");
  }
  if (toks.size() - 1 != dim) {
    fail(ErrorCode::MissingCommodityEntry, line.number, "arcs", arc,
         "box needs one lo:hi pair per commodity (" + std::to_string(dim) + ")");
  }
  Box box{std::vector<double>(dim), std::vector<double>(dim)};
  for (std::size_t k = 0; k < dim; ++k) {
    const auto& tok = toks[k + 1];
    auto colon = tok.find(':');
    if (colon == std::string::npos) {
      fail(ErrorCode::Syntax, line.number, "arcs", arc, "box bound '" + tok + "' is not lo:hi");
    }
    box.lo[k] = number_or_fail(std::string_view(tok).substr(0, colon), line, "arcs", arc);
    box.hi[k] = number_or_fail(std::string_view(tok).substr(colon + 1), line, "arcs", arc);
  }
  try {
    validate(box);
  } catch (const ConfigError& e) {
    fail(ErrorCode::ParameterRange, line.number, "arcs", arc, e.what());
  }
  return box;
}

// ---- solver section --------------------------------------------------------

struct SolverEntry {
  std::size_t line;
  std::string value;
};

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

SolverConfig read_solver(const Document& doc, const Network& net) {
  SolverConfig cfg = SolverConfig::defaults(net);
  auto it = doc.sections.find("solver");
  if (it == doc.sections.end()) return cfg;

  std::map<std::string, SolverEntry> entries;
  for (const auto& line : it->second) {
    auto eq = line.text.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::Syntax, line.number, "solver", "", "expected key = value");
    }
    std::string key(trim(std::string_view(line.text).substr(0, eq)));
    std::string value(trim(std::string_view(line.text).substr(eq + 1)));
    if (!entries.emplace(key, SolverEntry{line.number, value}).second) {
      fail(ErrorCode::Duplicate, line.number, "solver", key, "option given twice");
    }
  }

  auto bad = [](const std::string& key, const SolverEntry& e, const std::string& why) {
    fail(ErrorCode::InvalidSolverOption, e.line, "solver", key, why);
  };
  auto as_number = [&](const std::string& key, const SolverEntry& e) {
    auto v = parse_number(e.value);
    if (!v) bad(key, e, "'" + e.value + "' is not a number");
    return *v;
  };
  auto as_count = [&](const std::string& key, const SolverEntry& e) {
    const double v = as_number(key, e);
    if (!(v >= 0 && v == std::floor(v) && v < 9.0e15)) bad(key, e, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  };

  std::optional<std::uint64_t> seed;
  std::string scheduler_word = "full";
  std::optional<SolverEntry> scheduler_entry, arc_groups, node_groups;

  for (const auto& [key, entry] : entries) {
    auto dot_pos = key.find('.');
    const std::string base = key.substr(0, dot_pos);
    if (base == "gamma" || base == "mu" || base == "sigma") {
      auto& target = base == "gamma" ? cfg.gamma : base == "mu" ? cfg.mu : cfg.sigma;
      const double v = as_number(key, entry);
      if (dot_pos == std::string::npos) {
        // Per-entity overrides are applied afterwards (map order puts them later).
        std::fill(target.begin(), target.end(), v);
      } else {
        const std::string id = key.substr(dot_pos + 1);
        try {
          target[base == "sigma" ? net.node_index(id) : net.arc_index(id)] = v;
        } catch (const DomainError&) {
          fail(ErrorCode::DanglingReference, entry.line, "solver", key, "unknown id '" + id + "'");
        }
      }
    } else if (key == "lambda") {
      cfg.lambda.values.clear();
      for (const auto& part : split_on(entry.value, ',')) {
        auto v = parse_number(part);
        if (!v) bad(key, entry, "'" + part + "' is not a number");
        cfg.lambda.values.push_back(*v);
      }
    } else if (key == "T") {
      cfg.sweep_bound = as_count(key, entry);
    } else if (key == "tol") {
      cfg.tol = as_number(key, entry);
    } else if (key == "max_iter") {
      cfg.max_iter = as_count(key, entry);
    } else if (key == "check_interval") {
      cfg.check_interval = as_count(key, entry);
    } else if (key == "seed") {
      seed = as_count(key, entry);
    } else if (key == "scheduler") {
      scheduler_word = entry.value;
      scheduler_entry = entry;
    } else if (key == "arc_groups") {
      arc_groups = entry;
    } else if (key == "node_groups") {
      node_groups = entry;
    } else {
      bad(key, entry, "unknown solver option");
    }
  }

  const SolverEntry sched_e = scheduler_entry.value_or(SolverEntry{0, scheduler_word});
  try {
    cfg.scheduler = parse_scheduler(scheduler_word, net, seed.value_or(0));
  } catch (const ConfigError& e) {
    bad("scheduler", sched_e, e.what());
  }

  auto read_groups = [&](const SolverEntry& e, const char* key, bool arcs) {
    auto* rr = std::get_if<RoundRobin>(&cfg.scheduler);
    if (!rr) bad(key, e, "groups require the roundrobin scheduler");
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& part : split_on(e.value, '|')) {
      std::vector<std::size_t> g;
      for (const auto& id : split_ws(part)) {
        try {
          g.push_back(arcs ? net.arc_index(id) : net.node_index(id));
        } catch (const DomainError&) {
          fail(ErrorCode::DanglingReference, e.line, "solver", key, "unknown id '" + id + "'");
        }
      }
      groups.push_back(std::move(g));
    }
    (arcs ? rr->arc_groups : rr->node_groups) = std::move(groups);
  };
  if (arc_groups) read_groups(*arc_groups, "arc_groups", true);
  if (node_groups) read_groups(*node_groups, "node_groups", false);

  try {
    validate(cfg, net);
  } catch (const ConfigError& e) {
    fail(ErrorCode::InvalidSolverOption, sched_e.line, "solver", "", e.what());
  }
  return cfg;
}

// ---- writers ---------------------------------------------------------------

void write_steps(std::ostream& out, const char* name, const std::vector<double>& steps,
                 const std::vector<std::string>& ids) {
  if (steps.empty()) return;
  out << name << " = " << format_number(steps.front()) << '\n';
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] != steps.front()) out << name << '.' << ids[k] << " = " << format_number(steps[k]) << '\n';
  }
}

void write_groups(std::ostream& out, const char* key,
                  const std::vector<std::vector<std::size_t>>& groups,
                  const std::vector<std::string>& ids) {
  out << key << " =";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g > 0) out << " |";
    for (std::size_t idx : groups[g]) out << ' ' << ids[idx];
  }
  out << '\n';
}

void write_capacity(std::ostream& out, const ScalarCapacity& cap) {
  auto kv = [&](const char* k, double v) { out << ' ' << k << '=' << format_number(v); };
  std::visit(overloaded{
                 [&](const Bpr& b) {
                   out << "bpr";
                   kv("alpha", b.alpha);
                   kv("rho", b.rho);
                   kv("theta", b.theta);
                   kv("p", b.p);
                 },
                 [&](const Logarithmic& l) {
                   out << "log";
                   kv("omega", l.omega);
                   kv("theta", l.theta);
                 },
                 [&](const Trc& t) {
                   out << "trc";
                   kv("alpha", t.alpha);
                   kv("beta", t.beta);
                   kv("delta", t.delta);
                   kv("omega", t.omega);
                 },
                 [&](const PowerExp& e) {
                   out << "powexp";
                   kv("alpha", e.alpha);
                   kv("theta", e.theta);
                   kv("p", e.p);
                 },
                 [&](const IntervalProx& ip) {
                   out << "interval";
                   std::visit(overloaded{
                                  [&](const PhiZero&) { out << " phi=zero"; },
                                  [&](const PhiAffine& f) {
                                    out << " phi=affine";
                                    kv("a", f.a);
                                    kv("b", f.b);
                                  },
                                  [&](const PhiQuadratic& f) {
                                    out << " phi=quadratic";
                                    kv("a", f.a);
                                  },
                                  [&](const PhiPower& f) {
                                    out << " phi=power";
                                    kv("c", f.c);
                                    kv("q", f.q);
                                  },
                              },
                              ip.phi);
                   kv("lo", ip.lo);
                   kv("hi", ip.hi);
                 },
             },
             cap);
}

void write_constraint(std::ostream& out, const Box& box) {
  if (box.is_orthant()) {
    out << "orthant";
    return;
  }
  if (box == Box::whole_space(box.dim())) {
    out << "free";
    return;
  }
  out << "box";
  for (std::size_t k = 0; k < box.dim(); ++k) {
    out << ' ' << format_number(box.lo[k]) << ':' << format_number(box.hi[k]);
  }
}

template <class Tag>
void read_block_section(const Document& doc, const std::string& section,
                        const std::vector<std::string>& ids, BlockVector<Tag>& target) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < ids.size(); ++k) index[ids[k]] = k;
  std::vector<bool> seen(ids.size(), false);
  for (const auto& line : require_section(doc, section)) {
    const std::string& id = line.tokens[0];
    auto it = index.find(id);
    if (it == index.end()) fail(ErrorCode::DanglingReference, line.number, section, id, "unknown id");
    if (seen[it->second]) fail(ErrorCode::Duplicate, line.number, section, id, "entry given twice");
    if (line.tokens.size() - 1 != target.dim()) {
      fail(ErrorCode::MissingCommodityEntry, line.number, section, id,
           "expected " + std::to_string(target.dim()) + " values");
    }
    seen[it->second] = true;
    for (std::size_t k = 0; k < target.dim(); ++k) {
      target[it->second][k] = number_or_fail(line.tokens[k + 1], line, section, id);
    }
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (!seen[k]) fail(ErrorCode::MissingCommodityEntry, 0, section, ids[k], "entry missing");
  }
}

template <class Tag>
void write_block_section(std::ostream& out, const char* section,
                         const std::vector<std::string>& ids, const BlockVector<Tag>& v) {
  out << '[' << section << "]\n";
  for (std::size_t b = 0; b < v.blocks(); ++b) {
    out << ids[b];
    for (double val : v[b]) out << ' ' << format_number(val);
    out << '\n';
  }
}

std::vector<std::string> arc_ids(const Network& net) {
  std::vector<std::string> ids;
  for (const auto& a : net.arcs()) ids.push_back(a.id);
  return ids;
}

}  // namespace

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax:
      return "E001";
    case ErrorCode::UnsupportedVersion:
      return "E002";
    case ErrorCode::UnknownFamily:
      return "E003";
    case ErrorCode::ParameterRange:
      return "E004";
    case ErrorCode::DanglingReference:
      return "E005";
    case ErrorCode::MissingCommodityEntry:
      return "E006";
    case ErrorCode::Duplicate:
      return "E007";
    case ErrorCode::MissingSection:
      return "E008";
    case ErrorCode::InvalidSolverOption:
      return "E009";
    case ErrorCode::DefaultedConstraint:
      return "W001";
  }
  return "E000";
}

std::string Diagnostic::format() const {
  std::string out(code_name(code));
  if (line > 0) out += " line " + std::to_string(line);
  if (!section.empty()) out += " [" + section + "]";
  if (!entity.empty()) out += " '" + entity + "'";
  out += ": " + message;
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty() || std::isnan(v)) {
    return std::nullopt;
  }
  return v;
}

SchedulerSpec parse_scheduler(std::string_view text, const Network& net, std::uint64_t seed) {
  text = trim(text);
  if (text == "full") return FullSweep{};
  if (text.starts_with("roundrobin:")) {
    auto k = parse_number(text.substr(11));
    if (!k || *k < 1 || *k != std::floor(*k) || *k > 1e9) {
      throw ConfigError("roundrobin needs a positive group count");
    }
    return RoundRobin::interleaved(net, static_cast<std::size_t>(*k));
  }
  if (text.starts_with("randomsweep:")) {
    auto p = parse_number(text.substr(12));
    if (!p) throw ConfigError("randomsweep needs an activation probability");
    return RandomSweep{seed, *p};
  }
  throw ConfigError("unknown scheduler '" + std::string(text) + "'");
}

ParsedProblem parse_problem(std::istream& in) {
  const Document doc =
      read_document(in, kProblemMagic, {"commodities", "nodes", "arcs", "supplies", "solver"});
  if (!doc.preamble.empty()) {
    fail(ErrorCode::Syntax, doc.preamble.front().number, "", "", "content before the first section");
  }

  auto commodities = read_id_list(doc, "commodities");
  auto nodes = read_id_list(doc, "nodes");
  const std::set<std::string> node_set(nodes.begin(), nodes.end());
  const std::size_t dim = commodities.size();

  std::vector<Network::ArcEndpoints> endpoints;
  std::vector<ArcOperator> arc_ops;
  std::vector<Diagnostic> warnings;
  std::set<std::string> arc_set;
  for (const auto& line : require_section(doc, "arcs")) {
    const auto& t = line.tokens;
    const std::string& id = t[0];
    if (t.size() < 4) {
      fail(ErrorCode::Syntax, line.number, "arcs", id, "expected: id tail head family [params] [; constraint]");
    }
    if (!arc_set.insert(id).second) fail(ErrorCode::Duplicate, line.number, "arcs", id, "duplicate arc id");
    for (const auto* end : {&t[1], &t[2]}) {
      if (!node_set.contains(*end)) {
        fail(ErrorCode::DanglingReference, line.number, "arcs", id, "unknown node '" + *end + "'");
      }
    }
    if (t[1] == t[2]) fail(ErrorCode::ParameterRange, line.number, "arcs", id, "arc is a self-loop");

    auto sep = std::find(t.begin() + 3, t.end(), ";");
    std::vector<std::string> cap_toks(t.begin() + 3, sep);
    if (cap_toks.empty()) fail(ErrorCode::Syntax, line.number, "arcs", id, "missing capacity family");
    ArcOperator op{read_capacity(line, id, cap_toks), Box{}};
    if (sep == t.end()) {
      op.constraint = Box::orthant(dim);
      warnings.push_back({ErrorCode::DefaultedConstraint, line.number, "arcs", id,
                          "no constraint given; using the nonnegative orthant"});
    } else {
      op.constraint = read_constraint(line, id, std::vector<std::string>(sep + 1, t.end()), dim);
    }
    endpoints.push_back({id, t[1], t[2]});
    arc_ops.push_back(std::move(op));
  }
  if (endpoints.empty()) fail(ErrorCode::MissingSection, doc.section_line.at("arcs"), "arcs", "", "section is empty");

  std::optional<Network> net;
  try {
    net.emplace(nodes, std::move(endpoints), commodities);
  } catch (const DomainError& e) {
    fail(ErrorCode::Syntax, 0, "arcs", "", e.what());
  }

  OperatorSet ops;
  ops.arcs = std::move(arc_ops);
  ops.nodes.assign(net->num_nodes(), NodeOperator{std::vector<double>(dim, 0.0)});
  if (auto it = doc.sections.find("supplies"); it != doc.sections.end()) {
    std::vector<bool> seen(net->num_nodes(), false);
    for (const auto& line : it->second) {
      const std::string& id = line.tokens[0];
      if (!node_set.contains(id)) fail(ErrorCode::DanglingReference, line.number, "supplies", id, "unknown node");
      const std::size_t i = net->node_index(id);
      if (seen[i]) fail(ErrorCode::Duplicate, line.number, "supplies", id, "supply given twice");
      seen[i] = true;
      if (line.tokens.size() - 1 != dim) {
        fail(ErrorCode::MissingCommodityEntry, line.number, "supplies", id,
             "expected " + std::to_string(dim) + " supply values, got " +
                 std::to_string(line.tokens.size() - 1));
      }
      for (std::size_t k = 0; k < dim; ++k) {
        ops.nodes[i].supply[k] = number_or_fail(line.tokens[k + 1], line, "supplies", id);
      }
    }
  }

  SolverConfig cfg = read_solver(doc, *net);
  return ParsedProblem{std::move(*net), std::move(ops), std::move(cfg), std::move(warnings)};
}

ParsedProblem parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Syntax, 0, "", path, "cannot open file");
  return parse_problem(in);
}

void write_problem(std::ostream& out, const Network& net, const OperatorSet& ops,
                   const SolverConfig& cfg) {
  out << kProblemMagic << ' ' << kFormatVersion << '\n';
  out << "[commodities]\n";
  for (const auto& c : net.commodity_ids()) out << c << '\n';
  out << "[nodes]\n";
  for (const auto& n : net.node_ids()) out << n << '\n';
  out << "[arcs]\n";
  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    const Arc& a = net.arc(j);
    out << a.id << ' ' << net.node_ids()[a.tail] << ' ' << net.node_ids()[a.head] << ' ';
    write_capacity(out, ops.arcs[j].capacity);
    out << " ; ";
    write_constraint(out, ops.arcs[j].constraint);
    out << '\n';
  }
  out << "[supplies]\n";
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    out << net.node_ids()[i];
    for (double s : ops.nodes[i].supply) out << ' ' << format_number(s);
    out << '\n';
  }

  const auto arcs = arc_ids(net);
  out << "[solver]\n";
  write_steps(out, "gamma", cfg.gamma, arcs);
  write_steps(out, "mu", cfg.mu, arcs);
  write_steps(out, "sigma", cfg.sigma, net.node_ids());
  out << "lambda = ";
  for (std::size_t k = 0; k < cfg.lambda.values.size(); ++k) {
    out << (k ? ", " : "") << format_number(cfg.lambda.values[k]);
  }
  out << '\n';
  out << "T = " << cfg.sweep_bound << '\n';
  std::visit(overloaded{
                 [&](const FullSweep&) { out << "scheduler = full\n"; },
                 [&](const RoundRobin& rr) {
                   out << "scheduler = roundrobin:" << rr.arc_groups.size() << '\n';
                   if (!(rr == RoundRobin::interleaved(net, rr.arc_groups.size()))) {
                     write_groups(out, "arc_groups", rr.arc_groups, arcs);
                     write_groups(out, "node_groups", rr.node_groups, net.node_ids());
                   }
                 },
                 [&](const RandomSweep& rs) {
                   out << "scheduler = randomsweep:" << format_number(rs.activation_prob) << '\n';
                   out << "seed = " << rs.seed << '\n';
                 },
             },
             cfg.scheduler);
  out << "tol = " << format_number(cfg.tol) << '\n';
  out << "max_iter = " << cfg.max_iter << '\n';
  out << "check_interval = " << cfg.check_interval << '\n';
}

Solution parse_solution(std::istream& in, const Network& net) {
  const Document doc = read_document(in, kSolutionMagic, {"flow", "arc_dual", "potential"});
  Solution sol{net.zero_flow(), net.zero_arc_dual(), net.zero_potential(), 0.0, 0,
               Termination::IterLimit};
  std::set<std::string> seen;
  for (const auto& line : doc.preamble) {
    if (line.tokens.size() != 2) fail(ErrorCode::Syntax, line.number, "", "", "expected: key value");
    const auto& key = line.tokens[0];
    const auto& value = line.tokens[1];
    seen.insert(key);
    if (key == "termination") {
      if (value == to_string(Termination::Converged)) {
        sol.termination = Termination::Converged;
      } else if (value == to_string(Termination::IterLimit)) {
        sol.termination = Termination::IterLimit;
      } else if (value == to_string(Termination::NumericalFailure)) {
        sol.termination = Termination::NumericalFailure;
      } else {
        fail(ErrorCode::Syntax, line.number, "", key, "unknown termination '" + value + "'");
      }
    } else if (key == "iterations") {
      auto v = parse_number(value);
      if (!v || *v < 0 || *v != std::floor(*v)) fail(ErrorCode::Syntax, line.number, "", key, "not a count");
      sol.iterations = static_cast<std::size_t>(*v);
    } else if (key == "residual") {
      sol.residual = number_or_fail(value, line, "", key);
    } else {
      fail(ErrorCode::Syntax, line.number, "", key, "unknown key");
    }
  }
  read_block_section(doc, "flow", arc_ids(net), sol.x);
  read_block_section(doc, "arc_dual", arc_ids(net), sol.xdual);
  read_block_section(doc, "potential", net.node_ids(), sol.v);
  return sol;
}

Solution parse_solution_file(const std::string& path, const Network& net) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Syntax, 0, "", path, "cannot open file");
  return parse_solution(in, net);
}

void write_solution(std::ostream& out, const Network& net, const Solution& sol) {
  out << kSolutionMagic << ' ' << kFormatVersion << '\n';
  out << "termination " << to_string(sol.termination) << '\n';
  out << "iterations " << sol.iterations << '\n';
  out << "residual " << format_number(sol.residual) << '\n';
  write_block_section(out, "flow", arc_ids(net), sol.x);
  write_block_section(out, "arc_dual", arc_ids(net), sol.xdual);
  write_block_section(out, "potential", net.node_ids(), sol.v);
}

std::string trace_row(const TraceRecord& rec) {
  std::string row = std::to_string(rec.n);
  for (double v : {rec.tau, rec.pi, rec.theta, rec.lambda}) row += ',' + format_number(v);
  row += ',' + std::to_string(rec.active_arcs);
  row += ',' + std::to_string(rec.active_nodes);
  row += ',' + (rec.residual ? format_number(*rec.residual) : std::string());
  row += ',' + (rec.millis ? format_number(*rec.millis) : std::string());
  return row;
}

}  // namespace netequil::io
