#include "vforge/log.hpp"

#include <cctype>
#include <charconv>

#include "vforge/errors.hpp"
#include "vforge/rational.hpp"

namespace vforge {

namespace {

std::vector<std::string_view> tokens(std::string_view s) {
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

std::string exponent_list(const std::vector<std::int64_t>& e) { return exponents_to_string(e); }

std::string matrix_string(const std::vector<std::vector<std::int64_t>>& m) {
  std::string out = "[";
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (r) out += ';';
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      if (c) out += ',';
      out += std::to_string(m[r][c]);
    }
  }
  return out + "]";
}

std::int64_t to_int(std::string_view s, std::size_t line, const char* what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(line, 1, std::string("expected ") + what);
  return v;
}

std::vector<std::vector<std::int64_t>> parse_matrix(std::string_view s, std::size_t line) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ParseError(line, 1, "malformed matrix");
  s = s.substr(1, s.size() - 2);
  std::vector<std::vector<std::int64_t>> m;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = s.find(';', pos);
    std::string_view row = s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    std::vector<std::int64_t> r;
    std::size_t p = 0;
    while (true) {
      std::size_t comma = row.find(',', p);
      r.push_back(to_int(row.substr(p, comma == std::string_view::npos ? std::string_view::npos : comma - p), line,
                         "a matrix entry"));
      if (comma == std::string_view::npos) break;
      p = comma + 1;
    }
    m.push_back(std::move(r));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return m;
}

Exponents exponents_at(std::string_view s, std::size_t line) {
  try {
    return parse_exponents(s);
  } catch (const ParseError& e) {
    throw ParseError(line, 1, e.what());
  } catch (const std::exception&) {
    throw ParseError(line, 1, "malformed exponent vector '" + std::string(s) + "'");
  }
}

}  // namespace

std::string format_value(const std::optional<GroupValue>& v) { return v ? to_string(*v) : "?"; }

std::optional<GroupValue> parse_value(std::string_view text) {
  if (text == "?") return std::nullopt;
  return parse_group_value(text);
}

std::string format_step(const StepRecord& rec, std::size_t number, const Chart& before) {
  std::string out = "step " + std::to_string(number) + ": " + kind_name(rec.step) + " ";
  std::vector<std::string> after_names = before.names();
  for (std::size_t k = 0; k < rec.positions.size(); ++k) after_names[rec.positions[k]] = rec.outputs[k].name;
  if (const auto* p = std::get_if<Primitive>(&rec.step)) {
    out += p->target + " " + p->divisor;
  } else if (const auto* m1 = std::get_if<Mono1>(&rec.step)) {
    out += std::to_string(m1->block) + " " + matrix_string(m1->matrix);
  } else if (const auto* mo = std::get_if<Monomial>(&rec.step)) {
    out += mo->var + " " + std::to_string(mo->block) + " " + exponent_list(mo->exponents);
  } else if (const auto* tr = std::get_if<Translate>(&rec.step)) {
    out += tr->var + " " + rational_string(tr->lambda) + " " + exponent_list(tr->shift);
  } else {
    out += std::get<Rename>(rec.step).var;
  }
  out += " =>";
  for (const auto& v : rec.outputs) out += " " + v.name + " " + format_value(v.value);
  if (const auto* rn = std::get_if<Rename>(&rec.step)) {
    out += " num: " + to_string(rn->num, after_names) + " den: " + to_string(rn->den, after_names);
  }
  if (!rec.annotation.empty()) out += "  # " + rec.annotation;
  return out;
}

LoggedStep parse_step(std::string_view line, const Chart& before, const CoefficientField& field, std::size_t ln) {
  LoggedStep out;
  std::string_view body = line;
  if (auto hash = body.find("  # "); hash != std::string_view::npos) {
    out.annotation = std::string(body.substr(hash + 4));
    body = body.substr(0, hash);
  }
  std::string_view rename_tail;
  if (auto num = body.find(" num: "); num != std::string_view::npos) {
    rename_tail = body.substr(num + 1);
    body = body.substr(0, num);
  }
  std::size_t arrow = body.find(" =>");
  if (body.rfind("step ", 0) != 0 || arrow == std::string_view::npos) throw ParseError(ln, 1, "malformed step line");
  auto head = tokens(body.substr(0, arrow));
  auto tail = tokens(body.substr(arrow + 3));
  if (head.size() < 3 || head[1].empty() || head[1].back() != ':') throw ParseError(ln, 1, "malformed step line");
  out.number = static_cast<std::size_t>(to_int(head[1].substr(0, head[1].size() - 1), ln, "a step number"));
  if (tail.size() % 2 != 0 || tail.empty()) throw ParseError(ln, 1, "malformed step outputs");
  for (std::size_t k = 0; k < tail.size(); k += 2) {
    try {
      out.outputs.emplace_back(std::string(tail[k]), parse_value(tail[k + 1]));
    } catch (const ParseError&) {
      throw ParseError(ln, 1, "malformed value '" + std::string(tail[k + 1]) + "'");
    }
  }
  std::string_view kind = head[2];
  auto arg = [&](std::size_t k) {
    if (head.size() <= k + 3) throw ParseError(ln, 1, "missing step argument");
    return head[k + 3];
  };
  auto expect_args = [&](std::size_t n) {
    if (head.size() != n + 3) throw ParseError(ln, 1, "wrong number of step arguments");
  };
  if (kind == "Primitive") {
    expect_args(2);
    out.step = Primitive{std::string(arg(0)), std::string(arg(1))};
  } else if (kind == "Mono1") {
    expect_args(2);
    out.step = Mono1{static_cast<int>(to_int(arg(0), ln, "a block")), parse_matrix(arg(1), ln)};
  } else if (kind == "Mono2" || kind == "Mono3" || kind == "Mono4") {
    expect_args(3);
    out.step = Monomial{kind[4] - '0', std::string(arg(0)), static_cast<int>(to_int(arg(1), ln, "a block")),
                        exponents_at(arg(2), ln)};
  } else if (kind == "Translate") {
    expect_args(3);
    mpq_class lambda;
    try {
      lambda = mpq_class(std::string(arg(1)));
      lambda.canonicalize();
    } catch (const std::invalid_argument&) {
      throw ParseError(ln, 1, "malformed translation constant");
    }
    out.step = Translate{std::string(arg(0)), lambda, exponents_at(arg(2), ln), out.outputs.at(0).second};
  } else if (kind == "Rename") {
    expect_args(1);
    std::size_t den = rename_tail.find(" den: ");
    if (rename_tail.rfind("num: ", 0) != 0 || den == std::string_view::npos) {
      throw ParseError(ln, 1, "rename needs num: and den:");
    }
    std::string var(arg(0));
    std::vector<std::string> names = before.names();
    names[before.index_of(var)] = out.outputs.at(0).first;
    Poly num = parse_poly(rename_tail.substr(5, den - 5), names, field, ln);
    Poly dpoly = parse_poly(rename_tail.substr(den + 6), names, field, ln);
    out.step = Rename{var, num, dpoly, out.outputs.at(0).second};
  } else {
    throw ParseError(ln, 1, "unknown step kind '" + std::string(kind) + "'");
  }
  return out;
}

std::vector<Chart> replay_charts(const Derivation& d) {
  std::vector<Chart> out{d.initial()};
  out.reserve(d.size() + 1);
  for (const auto& rec : d.steps()) out.push_back(apply_step(out.back(), rec.step));
  return out;
}

}  // namespace vforge
