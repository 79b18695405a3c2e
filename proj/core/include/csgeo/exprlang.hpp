#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "csgeo/jets.hpp"

namespace csgeo::expr {

enum class NodeKind {
  Number,     // literal
  Imaginary,  // builtin constant i
  Pi,         // builtin constant pi
  VarU,
  VarV,
  Param,      // named parameter, value supplied at evaluation time
  Negate,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Call,       // exp, sin, cos, sqrt, log
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double number = 0.0;   // Number
  std::string name;      // Param / Call
  NodePtr lhs, rhs;      // children; unary nodes use lhs only
};

/// A surface as three component expressions plus named parameter values.
struct SurfaceAst {
  std::array<NodePtr, 3> components;
  std::map<std::string, double> params;
};

/// Parses one expression. `params` is the set of declared parameter names;
/// any other identifier raises UnknownIdentifier. Grammar: + - * / ^ (right
/// associative), unary minus, parentheses, calls exp/sin/cos/sqrt/log,
/// constants i and pi, variables u and v, decimal literals.
NodePtr parse_expression(std::string_view text,
                         const std::map<std::string, double>& params);

/// Canonical text form; parse(to_string(e)) is structurally equal to e.
std::string to_string(const NodePtr& e);

bool structurally_equal(const NodePtr& a, const NodePtr& b);
bool structurally_equal(const SurfaceAst& a, const SurfaceAst& b);

/// Loads {"components": [s1, s2, s3], "params": {name: value}} from JSON text.
SurfaceAst load_surface_spec(const std::string& json_text);

/// Inverse of load_surface_spec, with canonicalized expression text.
std::string surface_spec_to_json(const SurfaceAst& ast);

/// Complex 2-jet scalar: value and derivatives up to second order in (u, v).
struct CJet {
  Complex f{}, fu{}, fv{}, fuu{}, fuv{}, fvv{};
};

CJet operator+(const CJet& a, const CJet& b);
CJet operator-(const CJet& a, const CJet& b);
CJet operator-(const CJet& a);
CJet operator*(const CJet& a, const CJet& b);
CJet operator/(const CJet& a, const CJet& b);

CJet jet_constant(Complex c);
CJet jet_u(double u);
CJet jet_v(double v);
CJet jet_exp(const CJet& g);
CJet jet_sin(const CJet& g);
CJet jet_cos(const CJet& g);
CJet jet_sqrt(const CJet& g);
CJet jet_log(const CJet& g);
CJet jet_pow(const CJet& base, const CJet& expo);

/// Evaluates one component expression to its exact 2-jet at (u, v).
CJet eval_component(const NodePtr& e, const std::map<std::string, double>& params,
                    double u, double v);

/// Evaluates all three components.
Jet2 eval_jet2(const SurfaceAst& ast, double u, double v);

/// JetEvaluator adapter over a parsed surface.
class ExpressionSurface final : public JetEvaluator {
public:
  explicit ExpressionSurface(SurfaceAst ast) : ast_(std::move(ast)) {}
  Jet2 jet(double u, double v) const override { return eval_jet2(ast_, u, v); }
  const SurfaceAst& ast() const { return ast_; }

private:
  SurfaceAst ast_;
};

}  // namespace csgeo::expr
