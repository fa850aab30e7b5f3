#include "vforge/task.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <memory>
#include <set>

#include "vforge/errors.hpp"

namespace vforge {

namespace {

struct Line {
  std::size_t number;
  std::string text;  // comment stripped
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    std::size_t start = k;
    while (k < s.size() && !std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    if (k > start) out.push_back(s.substr(start, k - start));
  }
  return out;
}

std::size_t column_of(const Line& line, std::string_view part) {
  return static_cast<std::size_t>(part.data() - line.text.data()) + 1;
}

template <typename T>
T parse_number(const Line& line, std::string_view text, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line.number, column_of(line, text), std::string("expected ") + what);
  }
  return value;
}

bool valid_name(std::string_view name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// c1*sqrt(p1) + c2*sqrt(p2) - ...; a bare rational stands for c*sqrt(1).
Weight parse_weight(const Line& line, std::string_view text) {
  Weight w;
  std::string s;
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (std::isspace(static_cast<unsigned char>(text[k]))) continue;
    s += text[k];
    cols.push_back(column_of(line, text.substr(k)));
  }
  std::size_t k = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError(line.number, k < cols.size() ? cols[k] : column_of(line, text) + text.size(), msg);
  };
  if (s.empty()) fail("empty weight");
  while (k < s.size()) {
    int sign = 1;
    if (s[k] == '+' || s[k] == '-') {
      sign = s[k] == '-' ? -1 : 1;
      ++k;
    } else if (!w.empty()) {
      fail("expected '+' or '-'");
    }
    std::size_t start = k;
    while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '/')) ++k;
    mpq_class coeff = 1;
    if (k > start) {
      try {
        coeff = mpq_class(s.substr(start, k - start));
        coeff.canonicalize();
      } catch (const std::invalid_argument&) {
        k = start;
        fail("malformed coefficient");
      }
      if (k < s.size() && s[k] == '*') ++k;
    }
    std::uint32_t radicand = 1;
    if (s.compare(k, 5, "sqrt(") == 0) {
      k += 5;
      std::size_t ps = k;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k == ps || k >= s.size() || s[k] != ')') fail("expected sqrt(<prime>)");
      radicand = static_cast<std::uint32_t>(std::stoul(s.substr(ps, k - ps)));
      ++k;
      if (radicand != 1 && !is_prime(radicand)) fail("radicand must be 1 or a prime");
    } else if (k == start) {
      fail("expected a coefficient or sqrt(<prime>)");
    }
    w.push_back({coeff * sign, radicand});
  }
  return w;
}

struct Pending {
  const Line* line;
  std::string name;
  std::string_view expr;
};

}  // namespace

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Monomialize: return "monomialize";
    case TaskKind::Principalize: return "principalize";
    case TaskKind::Fraction: return "fraction";
    case TaskKind::Dominate: return "dominate";
    case TaskKind::Reduce: return "reduce";
    case TaskKind::Expand: return "expand";
    case TaskKind::Uniformize: return "uniformize";
    case TaskKind::Verify: return "verify";
  }
  return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  for (auto k : {TaskKind::Monomialize, TaskKind::Principalize, TaskKind::Fraction, TaskKind::Dominate,
                 TaskKind::Reduce, TaskKind::Expand, TaskKind::Uniformize, TaskKind::Verify}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

Task parse_task(std::string_view text) {
  std::vector<Line> lines;
  {
    std::size_t number = 0, pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string raw(text.substr(pos, end - pos));
      ++number;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      lines.push_back({number, raw});
      pos = end + 1;
    }
  }

  Task task;
  std::optional<std::vector<int>> blocks;
  const Line* blocks_line = nullptr;
  struct VarDecl {
    std::string name;
    int block;  // 0 free, -1 free with infinite value
    const Line* line;
    std::size_t column;
  };
  std::vector<VarDecl> vars;
  std::map<std::string, std::pair<Weight, const Line*>> weights;
  std::vector<Pending> polys, relations;
  bool have_kind = false;

  for (const Line& line : lines) {
    std::string_view body = trim(line.text);
    if (body.empty()) continue;
    auto column = [&](std::string_view part) { return column_of(line, part); };
    std::size_t colon = body.find(':');

    if (body.rfind("weight", 0) == 0 && (body.size() == 6 || std::isspace(static_cast<unsigned char>(body[6])))) {
      std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError(line.number, column(body), "expected 'weight <name> = ...'");
      std::string_view name = trim(body.substr(6, eq - 6));
      if (!valid_name(name)) throw ParseError(line.number, column(body.substr(6)), "malformed variable name");
      weights[std::string(name)] = {parse_weight(line, trim(body.substr(eq + 1))), &line};
      continue;
    }
    if (colon == std::string_view::npos) throw ParseError(line.number, column(body), "expected '<key>: <value>'");
    std::string_view key = trim(body.substr(0, colon));
    std::string_view value = trim(body.substr(colon + 1));
    auto words = split_ws(key);

    if (key == "blocks") {
      std::vector<int> sizes;
      for (auto tok : split_ws(value)) {
        int r = parse_number<int>(line, tok, "a block size");
        if (r < 1) throw ParseError(line.number, column(tok), "block sizes must be positive");
        sizes.push_back(r);
      }
      if (sizes.empty()) throw ParseError(line.number, column(value), "at least one block is required");
      blocks = sizes;
      blocks_line = &line;
    } else if (key == "vars") {
      for (auto tok : split_ws(value)) {
        std::size_t at = tok.find('@');
        if (at == std::string_view::npos) throw ParseError(line.number, column(tok), "expected name@block");
        std::string_view name = tok.substr(0, at), where = tok.substr(at + 1);
        if (!valid_name(name)) throw ParseError(line.number, column(tok), "malformed variable name");
        int block = where == "free" ? 0 : where == "inf" ? -1 : parse_number<int>(line, where, "a block number");
        vars.push_back({std::string(name), block, &line, column(tok)});
      }
    } else if (key == "field") {
      auto toks = split_ws(value);
      if (toks.size() == 1 && toks[0] == "Q") {
        task.field = CoefficientField::rationals();
      } else if (toks.size() == 2 && toks[0] == "F") {
        auto p = parse_number<std::uint32_t>(line, toks[1], "a prime");
        if (!is_prime(p)) throw ParseError(line.number, column(toks[1]), "field characteristic must be prime");
        task.field = CoefficientField::prime(p);
      } else {
        throw ParseError(line.number, column(value), "expected 'Q' or 'F <prime>'");
      }
    } else if (key == "task") {
      auto kind = parse_task_kind(value);
      if (!kind) throw ParseError(line.number, column(value), "unknown task '" + std::string(value) + "'");
      task.kind = *kind;
      have_kind = true;
    } else if (key == "level") {
      task.level = parse_number<int>(line, value, "a level");
    } else if (key == "order") {
      task.order = parse_number<std::size_t>(line, value, "an order");
      if (task.order < 1) throw ParseError(line.number, column(value), "order must be at least 1");
    } else if (key == "max-steps") {
      task.max_steps = parse_number<std::size_t>(line, value, "a step count");
    } else if (key == "log") {
      task.log_path = std::string(value);
    } else if (key == "branch") {
      BranchChoice choice;
      std::set<std::string_view> seen;
      for (auto tok : split_ws(value)) {
        std::size_t eq = tok.find('=');
        std::string_view k = eq == std::string_view::npos ? tok : tok.substr(0, eq);
        if (eq == std::string_view::npos || (k != "edge" && k != "root") || !seen.insert(k).second) {
          throw ParseError(line.number, column(tok), "expected edge=<k> or root=<index>");
        }
        auto n = parse_number<std::size_t>(line, tok.substr(eq + 1), "an index");
        (k == "edge" ? choice.edge : choice.root) = n;
      }
      task.branches.push_back(choice);
    } else if (words.size() == 2 && (words[0] == "poly" || words[0] == "relation")) {
      if (!valid_name(words[1])) throw ParseError(line.number, column(words[1]), "malformed name");
      Pending p{&line, std::string(words[1]), value};
      (words[0] == "poly" ? polys : relations).push_back(p);
    } else {
      throw ParseError(line.number, column(key), "unknown key '" + std::string(key) + "'");
    }
  }

  if (!blocks) throw ParseError(1, 1, "missing 'blocks:' line");
  if (!have_kind) throw ParseError(1, 1, "missing 'task:' line");
  if (task.level < 1 || task.level > static_cast<int>(blocks->size())) {
    throw ParseError(blocks_line->number, 1, "level must lie between 1 and the number of blocks");
  }

  // Frame: default weights in declaration order, then overrides.
  std::vector<std::vector<std::string>> block_names(blocks->size());
  std::set<std::string> names;
  for (const auto& v : vars) {
    if (!names.insert(v.name).second) throw ParseError(v.line->number, v.column, "duplicate variable " + v.name);
    if (v.block > static_cast<int>(blocks->size())) {
      throw ParseError(v.line->number, v.column, "block out of range for " + v.name);
    }
    if (v.block >= 1) block_names[v.block - 1].push_back(v.name);
    if (v.block < -1) throw ParseError(v.line->number, v.column, "block out of range for " + v.name);
  }
  for (std::size_t b = 0; b < blocks->size(); ++b) {
    if (static_cast<int>(block_names[b].size()) != (*blocks)[b]) {
      throw ParseError(blocks_line->number, 1, "block " + std::to_string(b + 1) + " declares " +
                                                   std::to_string((*blocks)[b]) + " variables but " +
                                                   std::to_string(block_names[b].size()) + " are listed");
    }
  }
  ValuationFrame defaults = ValuationFrame::with_default_weights(*blocks);
  std::vector<std::vector<Weight>> w(blocks->size());
  for (std::size_t b = 0; b < blocks->size(); ++b) {
    for (std::size_t k = 0; k < block_names[b].size(); ++k) {
      auto it = weights.find(block_names[b][k]);
      w[b].push_back(it != weights.end() ? it->second.first
                                         : defaults.weight(static_cast<int>(b) + 1, static_cast<int>(k)));
    }
  }
  for (const auto& [name, entry] : weights) {
    bool found = std::any_of(block_names.begin(), block_names.end(), [&](const auto& bn) {
      return std::find(bn.begin(), bn.end(), name) != bn.end();
    });
    if (!found) throw ParseError(entry.second->number, 1, "weight given for non-block variable " + name);
  }
  try {
    task.frame = std::make_shared<const ValuationFrame>(*blocks, w);
  } catch (const Error& e) {
    const Line* at = weights.empty() ? blocks_line : weights.begin()->second.second;
    throw ParseError(at->number, 1, e.what());
  }

  std::vector<Variable> chart_vars;
  std::vector<int> seen_in_block(blocks->size(), 0);
  for (const auto& v : vars) {
    if (v.block >= 1) {
      chart_vars.push_back({v.name, GroupValue::generator(*task.frame, v.block, seen_in_block[v.block - 1]++), v.block});
    } else {
      chart_vars.push_back({v.name, v.block == -1 ? std::optional<GroupValue>(GroupValue::infinity()) : std::nullopt, 0});
    }
  }
  task.chart.emplace(task.frame, chart_vars, task.level);

  const auto chart_names = task.chart->names();
  auto parse_all = [&](const std::vector<Pending>& in, std::vector<NamedPoly>& out) {
    for (const auto& p : in) {
      std::size_t offset = static_cast<std::size_t>(p.expr.data() - p.line->text.data());
      out.push_back({p.name, parse_poly(p.expr, chart_names, task.field, p.line->number, offset), static_cast<int>(p.line->number)});
    }
  };
  parse_all(polys, task.polys);
  parse_all(relations, task.relations);
  for (const auto& r : task.relations) {
    auto idx = task.chart->find(r.name);
    if (!idx || task.chart->variable(*idx).block != 0) {
      throw ParseError(static_cast<std::size_t>(r.line), 1, "relation variable " + r.name + " must be declared @free");
    }
  }
  return task;
}

}  // namespace vforge
