#include <charconv>
#include <cmath>
#include <sstream>

#include "usp/model.hpp"

namespace usp {

namespace {

constexpr std::size_t kTermsPerLine = 8;

std::string num(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_expression(std::ostringstream& os, const LinearModel& m,
                      const std::vector<Term>& terms) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (t > 0 && t % kTermsPerLine == 0) os << "\n  ";
    double c = terms[t].coef;
    if (t == 0)
      os << ' ' << num(c);
    else
      os << (c < 0 ? " - " : " + ") << num(std::abs(c));
    os << ' ' << m.variables[terms[t].var].name;
  }
}

}  // namespace

std::string export_lp(const LinearModel& m) {
  std::ostringstream os;
  os << "\\ usp linear model\n"
     << "\\ formulation: " << to_string(m.formulation) << "\n"
     << "\\ scope: " << (m.scope == ModelScope::Full ? "full" : "master") << "\n"
     << "\\ eps: " << num(m.eps) << "\n"
     << "\\ big_M: " << num(m.big_M) << "\n";
  os << "Minimize\n obj:";
  write_expression(os, m, m.objective);
  os << "\nSubject To\n";
  for (const auto& c : m.constraints) {
    os << ' ' << c.name << ':';
    write_expression(os, m, c.terms);
    os << ' ' << to_string(c.sense) << ' ' << num(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.variables) {
    bool lo = std::isfinite(v.lower), hi = std::isfinite(v.upper);
    if (lo && hi && v.lower == v.upper)
      os << ' ' << v.name << " = " << num(v.lower) << '\n';
    else if (lo && hi)
      os << ' ' << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << '\n';
    else if (lo)
      os << ' ' << v.name << " >= " << num(v.lower) << '\n';
    else if (hi)
      os << " -inf <= " << v.name << " <= " << num(v.upper) << '\n';
    else
      os << ' ' << v.name << " free\n";
  }
  os << "Binaries\n";
  for (const auto& v : m.variables)
    if (v.kind == VarKind::Binary) os << ' ' << v.name << '\n';
  os << "End\n";
  return os.str();
}

namespace {

struct Cursor {
  std::vector<std::string> tokens;
  std::vector<std::size_t> lines;
  std::size_t pos = 0;

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }
  std::size_t line() const { return pos < lines.size() ? lines[pos] : (lines.empty() ? 0 : lines.back()); }
  std::string next() {
    if (done()) throw ParseError("unexpected end of input", line());
    return tokens[pos++];
  }
};

bool parse_number(const std::string& s, double& out) {
  if (s == "inf" || s == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (s == "-inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool is_sense(const std::string& t) { return t == "<=" || t == ">=" || t == "="; }

Sense sense_of(const std::string& t) {
  return t == "<=" ? Sense::LessEqual : t == ">=" ? Sense::GreaterEqual : Sense::Equal;
}

bool is_section(const std::string& t) {
  return t == "Subject" || t == "Bounds" || t == "Binaries" || t == "End";
}

Family variable_family(const std::string& name) {
  switch (name.empty() ? '?' : name[0]) {
    case 'x':
    case 'y': return Family::Route;
    case 'f': return Family::Flow;
    case 'w': return Family::Weight;
    case 'l': return Family::Length;
  }
  throw ParseError("unknown variable family in '" + name + "'");
}

Family row_family(const std::string& name) {
  auto prefix = name.substr(0, name.find('_'));
  if (prefix == "fc") return Family::Conservation;
  if (prefix == "cap") return Family::Capacity;
  if (prefix == "fb") return Family::FlowBound;
  if (prefix == "pu") return Family::Uniqueness;
  if (prefix == "plu" || prefix == "pll") return Family::PathLength;
  throw ParseError("unknown constraint family in '" + name + "'");
}

}  // namespace

LinearModel parse_lp(const std::string& text) {
  LinearModel m;
  Cursor cur;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '\\') {
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(2, colon - 2);
      std::string value = line.substr(colon + 2);
      if (key == "formulation") {
        if (value != "DBM" && value != "OBM") throw ParseError("bad formulation", lineno, key);
        m.formulation = value == "DBM" ? Formulation::DBM : Formulation::OBM;
      } else if (key == "scope") {
        m.scope = value == "master" ? ModelScope::Master : ModelScope::Full;
      } else if (key == "eps" || key == "big_M") {
        double v;
        if (!parse_number(value, v)) throw ParseError("bad number", lineno, key);
        (key == "eps" ? m.eps : m.big_M) = v;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      cur.tokens.push_back(tok);
      cur.lines.push_back(lineno);
    }
  }

  // Pending rows hold names until the Bounds section declares variables.
  struct RawTerm {
    double coef;
    std::string var;
  };
  struct RawRow {
    std::string name;
    std::vector<RawTerm> terms;
    Sense sense;
    double rhs;
  };

  auto read_expression = [&](bool allow_sense) {
    std::vector<RawTerm> terms;
    double sign = 1.0;
    while (!cur.done()) {
      const std::string& t = cur.peek();
      if (is_section(t) || (allow_sense && is_sense(t))) break;
      if (t.back() == ':') break;
      cur.next();
      if (t == "+") {
        sign = 1.0;
        continue;
      }
      if (t == "-") {
        sign = -1.0;
        continue;
      }
      double c;
      if (!parse_number(t, c)) throw ParseError("expected a coefficient, got '" + t + "'", cur.line());
      if (!cur.done() && !is_sense(cur.peek()) && !is_section(cur.peek()) &&
          cur.peek().back() != ':') {
        terms.push_back({sign * c, cur.next()});
      } else if (c != 0.0) {
        throw ParseError("constant terms are not supported", cur.line());
      }
      sign = 1.0;
    }
    return terms;
  };

  auto expect = [&](const std::string& t) {
    std::size_t at = cur.line();
    if (cur.next() != t) throw ParseError("expected '" + t + "'", at);
  };

  expect("Minimize");
  expect("obj:");
  auto objective = read_expression(false);
  expect("Subject");
  expect("To");

  std::vector<RawRow> rows;
  while (!cur.done() && !is_section(cur.peek())) {
    std::size_t at = cur.line();
    std::string name = cur.next();
    if (name.back() != ':') throw ParseError("expected a row name", at);
    name.pop_back();
    RawRow r{name, read_expression(true), Sense::Equal, 0.0};
    std::string s = cur.next();
    if (!is_sense(s)) throw ParseError("expected a sense", cur.line(), name);
    r.sense = sense_of(s);
    if (!parse_number(cur.next(), r.rhs)) throw ParseError("bad right-hand side", cur.line(), name);
    rows.push_back(std::move(r));
  }

  expect("Bounds");
  std::map<std::string, std::size_t> index;
  auto declare = [&](const std::string& name, double lo, double hi) {
    if (index.count(name)) throw ParseError("variable bounded twice", cur.line(), name);
    index[name] = m.variables.size();
    m.variables.push_back({name, VarKind::Continuous, lo, hi, variable_family(name)});
  };
  while (!cur.done() && cur.peek() != "Binaries" && cur.peek() != "End") {
    std::string a = cur.next();
    double lo;
    if (parse_number(a, lo)) {
      expect("<=");
      std::string name = cur.next();
      expect("<=");
      double hi;
      if (!parse_number(cur.next(), hi)) throw ParseError("bad bound", cur.line(), name);
      declare(name, lo, hi);
      continue;
    }
    std::string op = cur.next();
    if (op == "free") {
      declare(a, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
      continue;
    }
    double v;
    if (!parse_number(cur.next(), v)) throw ParseError("bad bound", cur.line(), a);
    if (op == "=")
      declare(a, v, v);
    else if (op == ">=")
      declare(a, v, std::numeric_limits<double>::infinity());
    else
      throw ParseError("unsupported bound form", cur.line(), a);
  }
  if (!cur.done() && cur.peek() == "Binaries") {
    cur.next();
    while (!cur.done() && cur.peek() != "End") {
      std::string name = cur.next();
      auto it = index.find(name);
      if (it == index.end()) throw ParseError("binary variable without bounds", cur.line(), name);
      m.variables[it->second].kind = VarKind::Binary;
    }
  }
  expect("End");

  auto resolve = [&](const std::vector<RawTerm>& raw) {
    std::vector<Term> out;
    for (const auto& t : raw) {
      auto it = index.find(t.var);
      if (it == index.end()) throw ParseError("undeclared variable", 0, t.var);
      out.push_back({it->second, t.coef});
    }
    return out;
  };
  m.objective = resolve(objective);
  for (auto& r : rows)
    m.constraints.push_back({r.name, resolve(r.terms), r.sense, r.rhs, row_family(r.name)});
  return m;
}

}  // namespace usp
