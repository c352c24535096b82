#include "srusk/expr.hpp"

#include <functional>
#include <sstream>

namespace srusk {

namespace {

// Depth-first walk with per-node memo; shared subtrees are visited once.
template <class F>
void for_each_node(const ExprNode* root, F&& visit) {
  std::unordered_map<const ExprNode*, bool> seen;
  std::function<void(const ExprNode*)> rec = [&](const ExprNode* n) {
    if (!n || seen.count(n)) return;
    seen[n] = true;
    if (n->a) rec(n->a.get());
    if (n->b) rec(n->b.get());
    visit(n);
  };
  rec(root);
}

}  // namespace

int Expr::max_var() const {
  int mv = -1;
  for_each_node(node(), [&](const ExprNode* n) {
    if (n->kind == OpKind::Var && n->var > mv) mv = n->var;
  });
  return mv;
}

Expr derivative(const Expr& e, int var) {
  std::unordered_map<const ExprNode*, Expr> memo;
  std::function<Expr(const Expr&)> d = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    const ExprNode* n = x.node();
    Expr r;
    switch (n->kind) {
      case OpKind::Const:
        r = Expr(0.0);
        break;
      case OpKind::Var:
        r = Expr(n->var == var ? 1.0 : 0.0);
        break;
      case OpKind::Add:
        r = d(Expr(n->a)) + d(Expr(n->b));
        break;
      case OpKind::Sub:
        r = d(Expr(n->a)) - d(Expr(n->b));
        break;
      case OpKind::Neg:
        r = -d(Expr(n->a));
        break;
      case OpKind::Mul:
        r = d(Expr(n->a)) * Expr(n->b) + Expr(n->a) * d(Expr(n->b));
        break;
      case OpKind::Div: {
        const Expr a(n->a), b(n->b);
        r = (d(a) * b - a * d(b)) / (b * b);
        break;
      }
      case OpKind::PowInt: {
        const Expr a(n->a);
        r = static_cast<double>(n->ipow) * powi(a, n->ipow - 1) * d(a);
        break;
      }
      case OpKind::PowReal: {
        const Expr a(n->a);
        r = n->rpow * powr(a, n->rpow - 1.0) * d(a);
        break;
      }
      case OpKind::Exp:
        r = x * d(Expr(n->a));
        break;
      case OpKind::Log:
        r = d(Expr(n->a)) / Expr(n->a);
        break;
      case OpKind::Sin:
        r = cos(Expr(n->a)) * d(Expr(n->a));
        break;
      case OpKind::Cos:
        r = -sin(Expr(n->a)) * d(Expr(n->a));
        break;
      case OpKind::Tanh:
        r = (1.0 - x * x) * d(Expr(n->a));
        break;
      case OpKind::Sqrt:
        r = d(Expr(n->a)) / (2.0 * x);
        break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return d(e);
}

Expr substitute(const Expr& e, const std::vector<Expr>& repl) {
  std::unordered_map<const ExprNode*, Expr> memo;
  std::function<Expr(const Expr&)> s = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    const ExprNode* n = x.node();
    Expr r;
    switch (n->kind) {
      case OpKind::Const:
        r = x;
        break;
      case OpKind::Var:
        r = (n->var >= 0 && n->var < static_cast<int>(repl.size())) ? repl[n->var] : x;
        break;
      case OpKind::Add:
        r = s(Expr(n->a)) + s(Expr(n->b));
        break;
      case OpKind::Sub:
        r = s(Expr(n->a)) - s(Expr(n->b));
        break;
      case OpKind::Mul:
        r = s(Expr(n->a)) * s(Expr(n->b));
        break;
      case OpKind::Div:
        r = s(Expr(n->a)) / s(Expr(n->b));
        break;
      case OpKind::Neg:
        r = -s(Expr(n->a));
        break;
      case OpKind::PowInt:
        r = powi(s(Expr(n->a)), n->ipow);
        break;
      case OpKind::PowReal:
        r = powr(s(Expr(n->a)), n->rpow);
        break;
      case OpKind::Exp:
        r = exp(s(Expr(n->a)));
        break;
      case OpKind::Log:
        r = log(s(Expr(n->a)));
        break;
      case OpKind::Sin:
        r = sin(s(Expr(n->a)));
        break;
      case OpKind::Cos:
        r = cos(s(Expr(n->a)));
        break;
      case OpKind::Tanh:
        r = tanh(s(Expr(n->a)));
        break;
      case OpKind::Sqrt:
        r = sqrt(s(Expr(n->a)));
        break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return s(e);
}

Tape::Tape(const Expr& root) {
  std::unordered_map<const ExprNode*, int> slot_of;
  std::function<int(const ExprNode*)> emit = [&](const ExprNode* n) -> int {
    auto it = slot_of.find(n);
    if (it != slot_of.end()) return it->second;
    Instr in;
    in.kind = n->kind;
    if (n->a) in.a = emit(n->a.get());
    if (n->b) in.b = emit(n->b.get());
    in.value = n->value;
    in.var = n->var;
    in.ipow = n->ipow;
    in.rpow = n->rpow;
    if (n->kind == OpKind::Var && n->var > max_var_) max_var_ = n->var;
    const int slot = static_cast<int>(instrs_.size());
    instrs_.push_back(in);
    slot_of.emplace(n, slot);
    return slot;
  };
  emit(root.node());
}

std::string Expr::to_string() const {
  std::function<std::string(const ExprNode*)> str = [&](const ExprNode* n) -> std::string {
    std::ostringstream os;
    switch (n->kind) {
      case OpKind::Const:
        os << n->value;
        break;
      case OpKind::Var:
        os << "x" << n->var;
        break;
      case OpKind::Add:
        os << "(" << str(n->a.get()) << " + " << str(n->b.get()) << ")";
        break;
      case OpKind::Sub:
        os << "(" << str(n->a.get()) << " - " << str(n->b.get()) << ")";
        break;
      case OpKind::Mul:
        os << "(" << str(n->a.get()) << " * " << str(n->b.get()) << ")";
        break;
      case OpKind::Div:
        os << "(" << str(n->a.get()) << " / " << str(n->b.get()) << ")";
        break;
      case OpKind::Neg:
        os << "(-" << str(n->a.get()) << ")";
        break;
      case OpKind::PowInt:
        os << str(n->a.get()) << "^" << n->ipow;
        break;
      case OpKind::PowReal:
        os << str(n->a.get()) << "^" << n->rpow;
        break;
      case OpKind::Exp:
        os << "exp(" << str(n->a.get()) << ")";
        break;
      case OpKind::Log:
        os << "log(" << str(n->a.get()) << ")";
        break;
      case OpKind::Sin:
        os << "sin(" << str(n->a.get()) << ")";
        break;
      case OpKind::Cos:
        os << "cos(" << str(n->a.get()) << ")";
        break;
      case OpKind::Tanh:
        os << "tanh(" << str(n->a.get()) << ")";
        break;
      case OpKind::Sqrt:
        os << "sqrt(" << str(n->a.get()) << ")";
        break;
    }
    return os.str();
  };
  return str(node());
}

}  // namespace srusk
