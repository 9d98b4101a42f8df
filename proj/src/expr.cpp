#include "gbclab/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gbclab/error.hpp"

namespace gbclab {

namespace {

std::shared_ptr<Expr> node(NodeKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}

const char* function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sqrt: return "sqrt";
    case Function::Tanh: return "tanh";
    case Function::Atan: return "atan";
  }
  return "?";
}

bool lookup_function(std::string_view name, Function& out) {
  static constexpr std::pair<std::string_view, Function> table[] = {
      {"sin", Function::Sin},   {"cos", Function::Cos},   {"exp", Function::Exp},
      {"log", Function::Log},   {"sqrt", Function::Sqrt}, {"tanh", Function::Tanh},
      {"atan", Function::Atan},
  };
  for (const auto& [n, f] : table)
    if (n == name) {
      out = f;
      return true;
    }
  return false;
}

char binary_symbol(NodeKind k) {
  switch (k) {
    case NodeKind::Add: return '+';
    case NodeKind::Subtract: return '-';
    case NodeKind::Multiply: return '*';
    case NodeKind::Divide: return '/';
    case NodeKind::Power: return '^';
    default: return '?';
  }
}

void print(const Expr& e, char prefix, std::string& out) {
  switch (e.kind) {
    case NodeKind::Number: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, e.number);
      out.append(buf, res.ptr);
      return;
    }
    case NodeKind::Variable:
      out += prefix;
      out += std::to_string(e.variable + 1);
      return;
    case NodeKind::Constant:
      out += e.constant == NamedConstant::Pi ? "pi" : "e";
      return;
    case NodeKind::Negate:
      out += "(-";
      print(*e.lhs, prefix, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += function_name(e.function);
      out += '(';
      print(*e.lhs, prefix, out);
      out += ')';
      return;
    default:
      out += '(';
      print(*e.lhs, prefix, out);
      out += binary_symbol(e.kind);
      print(*e.rhs, prefix, out);
      out += ')';
  }
}

// Recursive-descent parser over a single expression.
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' factor)?
//   base   := number | ident | func '(' expr ')' | '(' expr ')'
// Unary minus binds looser than '^', so -x1^2 is -(x1^2); '^' is right-associative.
class Parser {
 public:
  Parser(std::string_view text, int n, char prefix, std::size_t offset)
      : s_(text), n_(n), prefix_(prefix), offset_(offset) {}

  ExprPtr parse() {
    skip_ws();
    if (pos_ == s_.size()) fail("empty expression");
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, offset_ + pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(NodeKind::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = make_binary(NodeKind::Subtract, lhs, parse_term());
      else
        return lhs;
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(NodeKind::Multiply, lhs, parse_factor());
      else if (accept('/'))
        lhs = make_binary(NodeKind::Divide, lhs, parse_factor());
      else
        return lhs;
    }
  }

  ExprPtr parse_factor() {
    if (accept('-')) return make_unary(NodeKind::Negate, parse_factor());
    ExprPtr base = parse_base();
    if (accept('^')) return make_binary(NodeKind::Power, base, parse_factor());
    return base;
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos_ == s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t before = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - before;
    };
    std::size_t count = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
      if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return make_number(v);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);

    Function fn;
    if (lookup_function(name, fn)) {
      if (!accept('(')) fail("expected '(' after " + std::string(name));
      ExprPtr arg = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return make_call(fn, arg);
    }
    if (name == "pi" || name == "e") {
      auto e = node(NodeKind::Constant);
      e->constant = name == "pi" ? NamedConstant::Pi : NamedConstant::E;
      return e;
    }
    if (name == "r") {
      ExprPtr sum;
      for (int i = 0; i < n_; ++i) {
        ExprPtr sq = make_binary(NodeKind::Power, make_variable(i), make_number(2.0));
        sum = sum ? make_binary(NodeKind::Add, sum, sq) : sq;
      }
      return make_call(Function::Sqrt, sum);
    }
    if (name.size() >= 2 && name[0] == prefix_) {
      int index = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (res.ec == std::errc() && res.ptr == name.data() + name.size() && name[1] != '0' &&
          index >= 1 && index <= n_)
        return make_variable(index - 1);
    }
    throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'", offset_ + start);
  }

  std::string_view s_;
  int n_;
  char prefix_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr make_number(double v) {
  auto e = node(NodeKind::Number);
  e->number = v;
  return e;
}

ExprPtr make_variable(int index) {
  auto e = node(NodeKind::Variable);
  e->variable = index;
  return e;
}

ExprPtr make_unary(NodeKind kind, ExprPtr operand) {
  auto e = node(kind);
  e->lhs = std::move(operand);
  return e;
}

ExprPtr make_binary(NodeKind kind, ExprPtr lhs, ExprPtr rhs) {
  auto e = node(kind);
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr make_call(Function fn, ExprPtr arg) {
  auto e = node(NodeKind::Call);
  e->function = fn;
  e->lhs = std::move(arg);
  return e;
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number:
      return std::bit_cast<std::uint64_t>(a.number) == std::bit_cast<std::uint64_t>(b.number);
    case NodeKind::Variable: return a.variable == b.variable;
    case NodeKind::Constant: return a.constant == b.constant;
    case NodeKind::Negate: return same_tree(*a.lhs, *b.lhs);
    case NodeKind::Call: return a.function == b.function && same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

bool depends_on_variables(const Expr& e) { return max_variable(e) >= 0; }

int max_variable(const Expr& e) {
  switch (e.kind) {
    case NodeKind::Number:
    case NodeKind::Constant: return -1;
    case NodeKind::Variable: return e.variable;
    case NodeKind::Negate:
    case NodeKind::Call: return max_variable(*e.lhs);
    default: return std::max(max_variable(*e.lhs), max_variable(*e.rhs));
  }
}

std::string to_string(const Expr& e, char var_prefix) {
  std::string out;
  print(e, var_prefix, out);
  return out;
}

ExprPtr substitute(const ExprPtr& e, std::span<const ExprPtr> replacements) {
  switch (e->kind) {
    case NodeKind::Number:
    case NodeKind::Constant: return e;
    case NodeKind::Variable: return replacements[e->variable];
    case NodeKind::Negate: return make_unary(e->kind, substitute(e->lhs, replacements));
    case NodeKind::Call: return make_call(e->function, substitute(e->lhs, replacements));
    default:
      return make_binary(e->kind, substitute(e->lhs, replacements), substitute(e->rhs, replacements));
  }
}

ExprPtr parse_expression(std::string_view text, int n, char var_prefix, std::size_t base_offset) {
  return Parser(text, n, var_prefix, base_offset).parse();
}

Jet evaluate(const Expr& e, std::span<const Jet> vars) {
  const int k = vars.empty() ? 0 : vars[0].vars();
  switch (e.kind) {
    case NodeKind::Number: return Jet::constant(k, e.number);
    case NodeKind::Variable: return vars[e.variable];
    case NodeKind::Constant:
      return Jet::constant(k, e.constant == NamedConstant::Pi ? std::numbers::pi : std::numbers::e);
    case NodeKind::Negate: return -evaluate(*e.lhs, vars);
    case NodeKind::Add: return evaluate(*e.lhs, vars) + evaluate(*e.rhs, vars);
    case NodeKind::Subtract: return evaluate(*e.lhs, vars) - evaluate(*e.rhs, vars);
    case NodeKind::Multiply: return evaluate(*e.lhs, vars) * evaluate(*e.rhs, vars);
    case NodeKind::Divide: return jet_divide(evaluate(*e.lhs, vars), evaluate(*e.rhs, vars));
    case NodeKind::Power: {
      Jet base = evaluate(*e.lhs, vars);
      if (!depends_on_variables(*e.rhs)) {
        const double c = evaluate_value(*e.rhs, {});
        return jet_pow(base, c);
      }
      return jet_pow(base, evaluate(*e.rhs, vars));
    }
    case NodeKind::Call: {
      Jet u = evaluate(*e.lhs, vars);
      switch (e.function) {
        case Function::Sin: return jet_sin(u);
        case Function::Cos: return jet_cos(u);
        case Function::Exp: return jet_exp(u);
        case Function::Log: return jet_log(u);
        case Function::Sqrt: return jet_sqrt(u);
        case Function::Tanh: return jet_tanh(u);
        case Function::Atan: return jet_atan(u);
      }
    }
  }
  throw Error("corrupt expression tree");
}

double evaluate_value(const Expr& e, std::span<const double> vars) {
  auto domain = [](bool ok, const char* what, double t) {
    if (!ok) throw DomainError(std::string(what) + " is not smooth at argument " + std::to_string(t));
  };
  switch (e.kind) {
    case NodeKind::Number: return e.number;
    case NodeKind::Variable: return vars[e.variable];
    case NodeKind::Constant: return e.constant == NamedConstant::Pi ? std::numbers::pi : std::numbers::e;
    case NodeKind::Negate: return -evaluate_value(*e.lhs, vars);
    case NodeKind::Add: return evaluate_value(*e.lhs, vars) + evaluate_value(*e.rhs, vars);
    case NodeKind::Subtract: return evaluate_value(*e.lhs, vars) - evaluate_value(*e.rhs, vars);
    case NodeKind::Multiply: return evaluate_value(*e.lhs, vars) * evaluate_value(*e.rhs, vars);
    case NodeKind::Divide: {
      const double d = evaluate_value(*e.rhs, vars);
      domain(d != 0.0, "division", d);
      return evaluate_value(*e.lhs, vars) / d;
    }
    case NodeKind::Power: {
      const double b = evaluate_value(*e.lhs, vars);
      const double c = evaluate_value(*e.rhs, vars);
      if (depends_on_variables(*e.rhs)) {
        domain(b > 0.0, "power", b);
      } else {
        const bool integer = std::nearbyint(c) == c;
        domain(integer ? !(b == 0.0 && c < 0.0) : (b > 0.0 || (b == 0.0 && c > 0.0)), "power", b);
      }
      return std::pow(b, c);
    }
    case NodeKind::Call: {
      const double u = evaluate_value(*e.lhs, vars);
      switch (e.function) {
        case Function::Sin: return std::sin(u);
        case Function::Cos: return std::cos(u);
        case Function::Exp: return std::exp(u);
        case Function::Log: domain(u > 0.0, "log", u); return std::log(u);
        case Function::Sqrt: domain(u >= 0.0, "sqrt", u); return std::sqrt(u);
        case Function::Tanh: return std::tanh(u);
        case Function::Atan: return std::atan(u);
      }
    }
  }
  throw Error("corrupt expression tree");
}

MapSpec parse_map(std::string_view source, int n, int m) {
  if (n < 1) throw DimensionError("domain dimension must be positive");
  if (m < 1) throw DimensionError("codomain dimension must be positive");
  MapSpec spec;
  spec.n = n;
  spec.m = m;
  spec.source = std::string(source);
  std::size_t start = 0;
  for (std::size_t i = 0; i <= source.size(); ++i) {
    if (i == source.size() || source[i] == ';' || source[i] == '\n') {
      std::string_view piece = source.substr(start, i - start);
      if (piece.find_first_not_of(" \t\r") != std::string_view::npos)
        spec.exprs.push_back(parse_expression(piece, n, 'x', start));
      start = i + 1;
    }
  }
  if (static_cast<int>(spec.exprs.size()) != m)
    throw ArityMismatch("expected " + std::to_string(m) + " expressions, found " +
                        std::to_string(spec.exprs.size()));
  return spec;
}

std::string to_string(const MapSpec& map) {
  std::string out;
  for (std::size_t a = 0; a < map.exprs.size(); ++a) {
    if (a) out += "; ";
    out += to_string(*map.exprs[a]);
  }
  return out;
}

MapJet3 eval_jet3(const MapSpec& map, std::span<const double> x) {
  MapJet3 jet;
  jet.n = map.n;
  jet.m = map.m;
  jet.point.assign(x.begin(), x.end());
  std::vector<Jet> vars;
  vars.reserve(map.n);
  for (int i = 0; i < map.n; ++i) vars.push_back(Jet::variable(map.n, i, x[i]));
  jet.components.reserve(map.m);
  auto where = [&](int a) {
    std::ostringstream os;
    os.precision(17);
    os << "component " << a + 1 << " at (";
    for (int i = 0; i < map.n; ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
  };
  for (int a = 0; a < map.m; ++a) {
    try {
      Jet j = evaluate(*map.exprs[a], vars);
      if (!j.all_finite()) throw DomainError("non-finite derivative");
      jet.components.push_back(std::move(j));
    } catch (const DomainError& err) {
      throw DomainError(std::string(err.what()) + " in " + where(a));
    }
  }
  return jet;
}

}  // namespace gbclab
