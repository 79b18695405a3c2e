#include "csgeo/exprlang.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace csgeo::expr {

namespace {

const char* const kFunctions[] = {"exp", "sin", "cos", "sqrt", "log"};

bool is_function_name(const std::string& s) {
  for (const char* f : kFunctions)
    if (s == f) return true;
  return false;
}

bool is_reserved_name(const std::string& s) {
  return s == "u" || s == "v" || s == "i" || s == "pi" || is_function_name(s);
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset = 0;
  double number = 0.0;
  std::string text;
};

const char* token_name(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    const char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    Token tok;
    tok.offset = pos;
    switch (c) {
      case '+': tok.kind = Tok::Plus; ++pos; out.push_back(tok); continue;
      case '-': tok.kind = Tok::Minus; ++pos; out.push_back(tok); continue;
      case '*': tok.kind = Tok::Star; ++pos; out.push_back(tok); continue;
      case '/': tok.kind = Tok::Slash; ++pos; out.push_back(tok); continue;
      case '^': tok.kind = Tok::Caret; ++pos; out.push_back(tok); continue;
      case '(': tok.kind = Tok::LParen; ++pos; out.push_back(tok); continue;
      case ')': tok.kind = Tok::RParen; ++pos; out.push_back(tok); continue;
      case ',': tok.kind = Tok::Comma; ++pos; out.push_back(tok); continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos + 1 < n && std::isdigit(static_cast<unsigned char>(text[pos + 1])))) {
      std::size_t end = pos;
      while (end < n && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      if (end < n && text[end] == '.') {
        ++end;
        while (end < n && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      }
      if (end < n && (text[end] == 'e' || text[end] == 'E')) {
        std::size_t mark = end + 1;
        if (mark < n && (text[mark] == '+' || text[mark] == '-')) ++mark;
        if (mark < n && std::isdigit(static_cast<unsigned char>(text[mark]))) {
          end = mark;
          while (end < n && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        }
      }
      tok.kind = Tok::Number;
      const char* first = text.data() + pos;
      const char* last = text.data() + end;
      auto [ptr, ec] = std::from_chars(first, last, tok.number);
      if (ec != std::errc() || ptr != last)
        throw ParseError("malformed numeric literal", pos, {"number"});
      pos = end;
      out.push_back(tok);
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t end = pos;
      while (end < n && is_ident_char(text[end])) ++end;
      tok.kind = Tok::Ident;
      tok.text = std::string(text.substr(pos, end - pos));
      pos = end;
      out.push_back(tok);
      continue;
    }
    std::ostringstream os;
    os << "unexpected character '" << c << "'";
    throw ParseError(os.str(), pos);
  }
  Token end_tok;
  end_tok.kind = Tok::End;
  end_tok.offset = n;
  out.push_back(end_tok);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

NodePtr make(NodeKind k, double number = 0.0, std::string name = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->number = number;
  n->name = std::move(name);
  return n;
}

NodePtr make_unary(NodeKind k, NodePtr a, std::string name = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->name = std::move(name);
  n->lhs = std::move(a);
  return n;
}

NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
public:
  Parser(std::string_view text, const std::map<std::string, double>& params)
      : tokens_(lex(text)), params_(params) {}

  NodePtr run() {
    NodePtr e = expression();
    expect(Tok::End);
    return e;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  Token advance() { return tokens_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::ostringstream os;
    os << "unexpected " << token_name(t.kind) << " at offset " << t.offset;
    if (!expected.empty()) {
      os << "; expected ";
      for (std::size_t k = 0; k < expected.size(); ++k)
        os << (k ? " or " : "") << expected[k];
    }
    throw ParseError(os.str(), t.offset, std::move(expected));
  }

  void expect(Tok kind) {
    if (peek().kind != kind) fail({token_name(kind)});
    advance();
  }

  NodePtr expression() {
    NodePtr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Tok op = advance().kind;
      NodePtr rhs = term();
      lhs = make_binary(op == Tok::Plus ? NodeKind::Add : NodeKind::Sub,
                        std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Tok op = advance().kind;
      NodePtr rhs = unary();
      lhs = make_binary(op == Tok::Star ? NodeKind::Mul : NodeKind::Div,
                        std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::Minus) {
      advance();
      return make_unary(NodeKind::Negate, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::Caret) {
      advance();
      // right associative; the exponent admits a leading sign
      return make_binary(NodeKind::Pow, std::move(base), unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        const double value = t.number;
        advance();
        return make(NodeKind::Number, value);
      }
      case Tok::LParen: {
        advance();
        NodePtr e = expression();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail({"number", "identifier", "'('", "'-'"});
    }
  }

  NodePtr identifier() {
    const Token t = advance();
    const std::string& name = t.text;
    if (is_function_name(name)) {
      if (peek().kind != Tok::LParen) {
        std::ostringstream os;
        os << "function '" << name << "' requires an argument list at offset " << t.offset;
        throw ParseError(os.str(), peek().offset, {"'('"});
      }
      advance();
      NodePtr arg = expression();
      expect(Tok::RParen);
      return make_unary(NodeKind::Call, std::move(arg), name);
    }
    if (name == "u") return make(NodeKind::VarU);
    if (name == "v") return make(NodeKind::VarV);
    if (name == "i") return make(NodeKind::Imaginary);
    if (name == "pi") return make(NodeKind::Pi);
    if (params_.count(name)) return make(NodeKind::Param, 0.0, name);
    throw UnknownIdentifier(name, t.offset);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const std::map<std::string, double>& params_;
};

// ---------------------------------------------------------------------------
// Printer

int prec(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

void print_node(const NodePtr& e, int min_prec, std::string& out) {
  const bool parens = prec(*e) < min_prec;
  if (parens) out += '(';
  switch (e->kind) {
    case NodeKind::Number: out += format_number(e->number); break;
    case NodeKind::Imaginary: out += 'i'; break;
    case NodeKind::Pi: out += "pi"; break;
    case NodeKind::VarU: out += 'u'; break;
    case NodeKind::VarV: out += 'v'; break;
    case NodeKind::Param: out += e->name; break;
    case NodeKind::Negate:
      out += '-';
      print_node(e->lhs, 3, out);
      break;
    case NodeKind::Add:
      print_node(e->lhs, 1, out);
      out += '+';
      print_node(e->rhs, 2, out);
      break;
    case NodeKind::Sub:
      print_node(e->lhs, 1, out);
      out += '-';
      print_node(e->rhs, 2, out);
      break;
    case NodeKind::Mul:
      print_node(e->lhs, 2, out);
      out += '*';
      print_node(e->rhs, 3, out);
      break;
    case NodeKind::Div:
      print_node(e->lhs, 2, out);
      out += '/';
      print_node(e->rhs, 3, out);
      break;
    case NodeKind::Pow:
      print_node(e->lhs, 5, out);
      out += '^';
      print_node(e->rhs, 3, out);
      break;
    case NodeKind::Call:
      out += e->name;
      out += '(';
      print_node(e->lhs, 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

constexpr double kTinyModulus = std::numeric_limits<double>::min();

}  // namespace

// ---------------------------------------------------------------------------
// Public parsing API

NodePtr parse_expression(std::string_view text,
                         const std::map<std::string, double>& params) {
  return Parser(text, params).run();
}

std::string to_string(const NodePtr& e) {
  std::string out;
  print_node(e, 0, out);
  return out;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Number:
      return a->number == b->number;
    case NodeKind::Param:
    case NodeKind::Call:
      if (a->name != b->name) return false;
      break;
    default:
      break;
  }
  if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
  if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
  if (a->lhs && !structurally_equal(a->lhs, b->lhs)) return false;
  if (a->rhs && !structurally_equal(a->rhs, b->rhs)) return false;
  return true;
}

bool structurally_equal(const SurfaceAst& a, const SurfaceAst& b) {
  for (int k = 0; k < 3; ++k)
    if (!structurally_equal(a.components[k], b.components[k])) return false;
  return a.params == b.params;
}

SurfaceAst load_surface_spec(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("surface spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("surface spec must be a JSON object");
  if (!doc.contains("components") || !doc["components"].is_array() ||
      doc["components"].size() != 3)
    throw ConfigError("surface spec needs a \"components\" array of three strings");

  SurfaceAst ast;
  if (doc.contains("params")) {
    const auto& params = doc["params"];
    if (!params.is_object())
      throw ConfigError("\"params\" must be an object of numbers");
    for (auto it = params.begin(); it != params.end(); ++it) {
      const std::string& name = it.key();
      if (name.empty() || !is_ident_start(name[0]))
        throw ConfigError("parameter name '" + name + "' is not an identifier");
      for (char c : name)
        if (!is_ident_char(c))
          throw ConfigError("parameter name '" + name + "' is not an identifier");
      if (is_reserved_name(name))
        throw ConfigError("parameter name '" + name + "' shadows a builtin");
      if (!it.value().is_number())
        throw ConfigError("parameter '" + name + "' must be a number");
      ast.params[name] = it.value().get<double>();
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (!doc["components"][k].is_string())
      throw ConfigError("surface spec components must be strings");
    ast.components[k] =
        parse_expression(doc["components"][k].get<std::string>(), ast.params);
  }
  return ast;
}

std::string surface_spec_to_json(const SurfaceAst& ast) {
  nlohmann::ordered_json doc;
  doc["components"] = nlohmann::ordered_json::array();
  for (int k = 0; k < 3; ++k) doc["components"].push_back(to_string(ast.components[k]));
  doc["params"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : ast.params) doc["params"][name] = value;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Jet arithmetic

CJet operator+(const CJet& a, const CJet& b) {
  return {a.f + b.f, a.fu + b.fu, a.fv + b.fv, a.fuu + b.fuu, a.fuv + b.fuv, a.fvv + b.fvv};
}

CJet operator-(const CJet& a, const CJet& b) {
  return {a.f - b.f, a.fu - b.fu, a.fv - b.fv, a.fuu - b.fuu, a.fuv - b.fuv, a.fvv - b.fvv};
}

CJet operator-(const CJet& a) {
  return {-a.f, -a.fu, -a.fv, -a.fuu, -a.fuv, -a.fvv};
}

CJet operator*(const CJet& a, const CJet& b) {
  CJet r;
  r.f = a.f * b.f;
  r.fu = a.fu * b.f + a.f * b.fu;
  r.fv = a.fv * b.f + a.f * b.fv;
  r.fuu = a.fuu * b.f + 2.0 * a.fu * b.fu + a.f * b.fuu;
  r.fuv = a.fuv * b.f + a.fu * b.fv + a.fv * b.fu + a.f * b.fuv;
  r.fvv = a.fvv * b.f + 2.0 * a.fv * b.fv + a.f * b.fvv;
  return r;
}

namespace {

// Composition with a scalar function given value/first/second derivative at g.f.
CJet chain(const CJet& g, Complex phi, Complex dphi, Complex ddphi) {
  CJet r;
  r.f = phi;
  r.fu = dphi * g.fu;
  r.fv = dphi * g.fv;
  r.fuu = ddphi * g.fu * g.fu + dphi * g.fuu;
  r.fuv = ddphi * g.fu * g.fv + dphi * g.fuv;
  r.fvv = ddphi * g.fv * g.fv + dphi * g.fvv;
  return r;
}

CJet jet_inverse(const CJet& g) {
  if (std::abs(g.f) < kTinyModulus)
    throw DomainError("division by zero at the evaluation point");
  const Complex w = 1.0 / g.f;
  return chain(g, w, -w * w, 2.0 * w * w * w);
}

bool on_negative_real_axis(Complex w) { return w.imag() == 0.0 && w.real() < 0.0; }

CJet integer_power(const CJet& base, long n) {
  CJet acc = jet_constant(Complex(1.0, 0.0));
  CJet p = base;
  unsigned long m = static_cast<unsigned long>(n < 0 ? -n : n);
  while (m > 0) {
    if (m & 1ul) acc = acc * p;
    m >>= 1;
    if (m > 0) p = p * p;
  }
  if (n < 0) acc = jet_inverse(acc);
  return acc;
}

}  // namespace

CJet operator/(const CJet& a, const CJet& b) { return a * jet_inverse(b); }

CJet jet_constant(Complex c) {
  CJet r;
  r.f = c;
  return r;
}

CJet jet_u(double u) {
  CJet r;
  r.f = Complex(u, 0.0);
  r.fu = Complex(1.0, 0.0);
  return r;
}

CJet jet_v(double v) {
  CJet r;
  r.f = Complex(v, 0.0);
  r.fv = Complex(1.0, 0.0);
  return r;
}

CJet jet_exp(const CJet& g) {
  const Complex e = std::exp(g.f);
  return chain(g, e, e, e);
}

CJet jet_sin(const CJet& g) {
  const Complex s = std::sin(g.f), c = std::cos(g.f);
  return chain(g, s, c, -s);
}

CJet jet_cos(const CJet& g) {
  const Complex s = std::sin(g.f), c = std::cos(g.f);
  return chain(g, c, -s, -c);
}

CJet jet_sqrt(const CJet& g) {
  if (std::abs(g.f) < kTinyModulus)
    throw DomainError("sqrt at zero has no 2-jet");
  if (on_negative_real_axis(g.f))
    throw DomainError("sqrt on the negative real axis (branch cut)");
  const Complex s = std::sqrt(g.f);
  const Complex ds = 0.5 / s;
  const Complex dds = -0.25 / (s * g.f);
  return chain(g, s, ds, dds);
}

CJet jet_log(const CJet& g) {
  if (std::abs(g.f) < kTinyModulus)
    throw DomainError("log at zero");
  if (on_negative_real_axis(g.f))
    throw DomainError("log on the negative real axis (branch cut)");
  const Complex w = 1.0 / g.f;
  return chain(g, std::log(g.f), w, -w * w);
}

CJet jet_pow(const CJet& base, const CJet& expo) {
  const bool expo_const = expo.fu == Complex{} && expo.fv == Complex{} &&
                          expo.fuu == Complex{} && expo.fuv == Complex{} &&
                          expo.fvv == Complex{};
  if (expo_const) {
    const Complex c = expo.f;
    if (c.imag() == 0.0 && c.real() == std::nearbyint(c.real()) &&
        std::abs(c.real()) <= 64.0)
      return integer_power(base, static_cast<long>(c.real()));
    if (std::abs(base.f) < kTinyModulus)
      throw DomainError("power of zero with non-integer exponent");
    if (on_negative_real_axis(base.f))
      throw DomainError("non-integer power of a negative real base (branch cut)");
    const Complex w = base.f;
    const Complex p = std::pow(w, c);
    return chain(base, p, c * p / w, c * (c - 1.0) * p / (w * w));
  }
  return jet_exp(expo * jet_log(base));
}

CJet eval_component(const NodePtr& e, const std::map<std::string, double>& params,
                    double u, double v) {
  switch (e->kind) {
    case NodeKind::Number: return jet_constant(Complex(e->number, 0.0));
    case NodeKind::Imaginary: return jet_constant(Complex(0.0, 1.0));
    case NodeKind::Pi: return jet_constant(Complex(M_PI, 0.0));
    case NodeKind::VarU: return jet_u(u);
    case NodeKind::VarV: return jet_v(v);
    case NodeKind::Param: {
      auto it = params.find(e->name);
      if (it == params.end())
        throw UnknownIdentifier(e->name, 0);
      return jet_constant(Complex(it->second, 0.0));
    }
    case NodeKind::Negate: return -eval_component(e->lhs, params, u, v);
    case NodeKind::Add:
      return eval_component(e->lhs, params, u, v) + eval_component(e->rhs, params, u, v);
    case NodeKind::Sub:
      return eval_component(e->lhs, params, u, v) - eval_component(e->rhs, params, u, v);
    case NodeKind::Mul:
      return eval_component(e->lhs, params, u, v) * eval_component(e->rhs, params, u, v);
    case NodeKind::Div:
      return eval_component(e->lhs, params, u, v) / eval_component(e->rhs, params, u, v);
    case NodeKind::Pow:
      return jet_pow(eval_component(e->lhs, params, u, v),
                     eval_component(e->rhs, params, u, v));
    case NodeKind::Call: {
      const CJet arg = eval_component(e->lhs, params, u, v);
      if (e->name == "exp") return jet_exp(arg);
      if (e->name == "sin") return jet_sin(arg);
      if (e->name == "cos") return jet_cos(arg);
      if (e->name == "sqrt") return jet_sqrt(arg);
      return jet_log(arg);
    }
  }
  throw Error("eval_component: corrupt AST");
}

Jet2 eval_jet2(const SurfaceAst& ast, double u, double v) {
  Jet2 jet;
  for (int k = 0; k < 3; ++k) {
    const CJet c = eval_component(ast.components[k], ast.params, u, v);
    jet.z[k] = c.f;
    jet.zu[k] = c.fu;
    jet.zv[k] = c.fv;
    jet.zuu[k] = c.fuu;
    jet.zuv[k] = c.fuv;
    jet.zvv[k] = c.fvv;
  }
  return jet;
}

}  // namespace csgeo::expr

// Error constructors live here to keep errors.hpp header-only friendly.
namespace csgeo {

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : Error(message), offset_(offset), expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(const std::string& name, std::size_t offset)
    : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
      name_(name),
      offset_(offset) {}

}  // namespace csgeo
