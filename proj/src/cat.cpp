#include "memcat/cat.hpp"

#include <algorithm>
#include <cctype>

namespace memcat {

namespace {

struct Tok {
  enum class Kind { Ident, Num, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1, col = 1;
};

struct Lexed {
  std::vector<Tok> toks;
  // comment text ending just before token i (empty if none)
  std::vector<std::string> comment_before;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

Lexed lex(const std::string& s) {
  Lexed out;
  std::size_t i = 0;
  int line = 1, col = 1;
  std::string pending;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (true) {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        adv(1);
      } else if (s.compare(i, 2, "(*") == 0) {
        int l0 = line, c0 = col;
        std::size_t end = s.find("*)", i + 2);
        if (end == std::string::npos) throw ModelError("unterminated comment", l0, c0);
        pending = s.substr(i + 2, end - i - 2);
        adv(end + 2 - i);
      } else {
        break;
      }
    }
    Tok t;
    t.line = line;
    t.col = col;
    if (i >= s.size()) {
      out.toks.push_back(t);
      out.comment_before.push_back(pending);
      return out;
    }
    char c = s[i];
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size()) {
        if (ident_char(s[j])) {
          ++j;
        } else if ((s[j] == '-' || s[j] == '+') && j + 1 < s.size() &&
                   std::isalpha(static_cast<unsigned char>(s[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
      t.kind = Tok::Kind::Ident;
      t.text = s.substr(i, j - i);
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = Tok::Kind::Num;
      t.text = s.substr(i, j - i);
      adv(j - i);
    } else if (std::string("|&\\;+*()=").find(c) != std::string::npos) {
      t.kind = Tok::Kind::Punct;
      t.text = std::string(1, c);
      adv(1);
    } else {
      throw ModelError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.toks.push_back(t);
    out.comment_before.push_back(pending);
    pending.clear();
  }
}

const std::set<std::string> kKeywords = {"let", "rec", "and", "acyclic", "irreflexive", "as"};

std::optional<std::pair<Dir, Dir>> filter_dirs(const std::string& s) {
  if (s.size() != 2) return std::nullopt;
  auto d = [](char c) -> std::optional<Dir> {
    if (c == 'R') return Dir::R;
    if (c == 'W') return Dir::W;
    if (c == 'M') return Dir::M;
    return std::nullopt;
  };
  auto a = d(s[0]), b = d(s[1]);
  if (!a || !b) return std::nullopt;
  return std::make_pair(*a, *b);
}

std::string normalise_name(const std::string& comment) {
  std::string out;
  bool dash = false;
  for (char c : comment) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (dash && !out.empty()) out += '-';
      dash = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      dash = true;
    }
  }
  return out;
}

class CatParser {
 public:
  explicit CatParser(Lexed lx) : lx_(std::move(lx)) {}

  ModelAst run() {
    ModelAst ast;
    while (cur().kind != Tok::Kind::End) {
      if (is_kw("let")) {
        ast.stmts.push_back(let_stmt());
      } else if (is_kw("acyclic") || is_kw("irreflexive")) {
        ast.stmts.push_back(check_stmt(ast));
      } else {
        fail("expected let, acyclic or irreflexive, found '" + cur().text + "'");
      }
    }
    return ast;
  }

 private:
  const Tok& cur() const { return lx_.toks[p_]; }
  [[noreturn]] void fail(const std::string& m) const { throw ModelError(m, cur().line, cur().col); }
  bool is_kw(const char* k) const { return cur().kind == Tok::Kind::Ident && cur().text == k; }
  bool is_punct(const char* k) const { return cur().kind == Tok::Kind::Punct && cur().text == k; }
  void expect(const char* k) {
    if (!is_punct(k)) fail(std::string("expected '") + k + "'");
    ++p_;
  }
  std::string name() {
    if (cur().kind != Tok::Kind::Ident || kKeywords.count(cur().text)) fail("expected a name");
    return lx_.toks[p_++].text;
  }
  void bind(const std::string& n, int line, int col) {
    if (bound_.count(n)) throw ModelError("duplicate binding '" + n + "'", line, col);
    bound_.insert(n);
  }

  Stmt let_stmt() {
    Stmt st;
    st.line = cur().line;
    ++p_;
    if (is_kw("rec")) {
      ++p_;
      st.kind = Stmt::Kind::LetRec;
      std::vector<std::tuple<std::string, int, int>> names;
      std::size_t save = p_;
      // collect the group's names first so bodies may refer to each other
      while (true) {
        int l = cur().line, c = cur().col;
        names.emplace_back(name(), l, c);
        expect("=");
        skip_expr();
        if (!is_kw("and")) break;
        ++p_;
      }
      for (auto& [n, l, c] : names) bind(n, l, c);
      p_ = save;
      for (std::size_t k = 0; k < names.size(); ++k) {
        std::string n = name();
        expect("=");
        st.bindings.emplace_back(n, expr());
        if (k + 1 < names.size()) ++p_;  // 'and'
      }
    } else {
      int l = cur().line, c = cur().col;
      std::string n = name();
      expect("=");
      ExprPtr e = expr();
      bind(n, l, c);
      st.bindings.emplace_back(n, e);
    }
    return st;
  }

  void skip_expr() {
    int depth = 0;
    while (cur().kind != Tok::Kind::End) {
      if (depth == 0 && cur().kind == Tok::Kind::Ident && kKeywords.count(cur().text)) return;
      if (is_punct("(")) ++depth;
      if (is_punct(")")) --depth;
      ++p_;
    }
  }

  Stmt check_stmt(const ModelAst& ast) {
    Stmt st;
    st.kind = Stmt::Kind::Check;
    st.line = cur().line;
    // name from the latest comment since the previous check
    std::string comment;
    for (std::size_t k = p_ + 1; k-- > last_check_;)
      if (!lx_.comment_before[k].empty()) {
        comment = lx_.comment_before[k];
        break;
      }
    st.check = is_kw("acyclic") ? Stmt::CheckKind::Acyclic : Stmt::CheckKind::Irreflexive;
    ++p_;
    st.expr = expr();
    if (is_kw("as")) {
      ++p_;
      st.name = name();
    } else if (!comment.empty()) {
      st.name = normalise_name(comment);
    } else {
      st.name = "check" + std::to_string(ast.check_names().size() + 1);
    }
    last_check_ = p_;
    return st;
  }

  ExprPtr node(Expr::Op op, std::vector<ExprPtr> kids, const Tok& at) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->kids = std::move(kids);
    e->line = at.line;
    e->col = at.col;
    return e;
  }

  // | < ; < \ < & < postfix
  ExprPtr expr() { return binary(0); }

  ExprPtr binary(int level) {
    static const char* ops[] = {"|", ";", "\\", "&"};
    static const Expr::Op kinds[] = {Expr::Op::Union, Expr::Op::Seq, Expr::Op::Diff, Expr::Op::Inter};
    if (level == 4) return postfix();
    ExprPtr lhs = binary(level + 1);
    while (is_punct(ops[level])) {
      Tok at = cur();
      ++p_;
      ExprPtr rhs = binary(level + 1);
      lhs = node(kinds[level], {lhs, rhs}, at);
    }
    return lhs;
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (is_punct("+") || is_punct("*")) {
      Tok at = cur();
      ++p_;
      e = node(at.text == "+" ? Expr::Op::Plus : Expr::Op::Star, {e}, at);
    }
    return e;
  }

  ExprPtr primary() {
    Tok at = cur();
    if (is_punct("(")) {
      ++p_;
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    if (at.kind == Tok::Kind::Num) {
      if (at.text != "0") fail("only the constant 0 is supported");
      ++p_;
      return node(Expr::Op::Empty, {}, at);
    }
    if (at.kind == Tok::Kind::Ident && !kKeywords.count(at.text)) {
      ++p_;
      auto dirs = filter_dirs(at.text);
      if (dirs && is_punct("(")) {
        ++p_;
        ExprPtr inner = expr();
        expect(")");
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Filter;
        e->src = dirs->first;
        e->tgt = dirs->second;
        e->name = at.text;
        e->kids = {inner};
        e->line = at.line;
        e->col = at.col;
        return e;
      }
      if (!bound_.count(at.text) && !builtin_names().count(at.text))
        throw ModelError("unbound identifier '" + at.text + "'", at.line, at.col);
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::Id;
      e->name = at.text;
      e->line = at.line;
      e->col = at.col;
      return e;
    }
    fail("expected an expression, found '" + at.text + "'");
  }

  Lexed lx_;
  std::size_t p_ = 0;
  std::size_t last_check_ = 0;
  std::set<std::string> bound_;
};

void monotone_walk(const Expr& e, const std::set<std::string>& group, bool under_diff) {
  if (e.op == Expr::Op::Id && under_diff && group.count(e.name))
    throw ModelError("recursive name '" + e.name + "' occurs under '\\'", e.line, e.col);
  for (const auto& k : e.kids) monotone_walk(*k, group, under_diff || e.op == Expr::Op::Diff);
}

struct Evaluator {
  const Candidate& cand;
  Env& env;

  Relation eval(const Expr& e) const {
    std::size_t n = cand.size();
    switch (e.op) {
      case Expr::Op::Empty: return Relation(n);
      case Expr::Op::Id: {
        auto it = env.find(e.name);
        if (it == env.end()) throw ModelError("unbound identifier '" + e.name + "'", e.line, e.col);
        return it->second;
      }
      case Expr::Op::Union: return eval(*e.kids[0]) | eval(*e.kids[1]);
      case Expr::Op::Inter: return eval(*e.kids[0]) & eval(*e.kids[1]);
      case Expr::Op::Diff: return eval(*e.kids[0]) - eval(*e.kids[1]);
      case Expr::Op::Seq: return compose(eval(*e.kids[0]), eval(*e.kids[1]));
      case Expr::Op::Plus: return closure(eval(*e.kids[0]), false);
      case Expr::Op::Star: return closure(eval(*e.kids[0]), true);
      case Expr::Op::Filter: return restrict(eval(*e.kids[0]), cand.events(), e.src, e.tgt);
    }
    throw ModelError("bad expression", e.line, e.col);
  }
};

}  // namespace

const std::set<std::string>& builtin_names() {
  static const std::set<std::string> names = [] {
    std::set<std::string> s = {"po",  "po-loc", "rf",   "rfe",  "rfi",  "co",
                               "coe", "coi",    "fr",   "fre",  "fri",  "com",
                               "addr", "data",  "dp",   "ctrl", "ctrl+cfence",
                               "ctrl+isync", "ctrl+isb", "id"};
    for (FenceKind k : kAllFences) s.insert(fence_name(k));
    return s;
  }();
  return names;
}

std::vector<std::string> ModelAst::check_names() const {
  std::vector<std::string> out;
  for (const auto& s : stmts)
    if (s.kind == Stmt::Kind::Check) out.push_back(s.name);
  return out;
}

bool ModelAst::binds(const std::string& name) const {
  for (const auto& s : stmts)
    for (const auto& [n, e] : s.bindings)
      if (n == name) return true;
  return false;
}

ModelAst parse_model(const std::string& text) { return CatParser(lex(text)).run(); }

void check_recursive_monotone(const ModelAst& ast) {
  for (const auto& st : ast.stmts) {
    if (st.kind != Stmt::Kind::LetRec) continue;
    std::set<std::string> group;
    for (const auto& [n, e] : st.bindings) group.insert(n);
    for (const auto& [n, e] : st.bindings) monotone_walk(*e, group, false);
  }
}

std::string print_expr(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Empty: return "0";
    case Expr::Op::Id: return e.name;
    case Expr::Op::Union: return "(" + print_expr(*e.kids[0]) + "|" + print_expr(*e.kids[1]) + ")";
    case Expr::Op::Inter: return "(" + print_expr(*e.kids[0]) + "&" + print_expr(*e.kids[1]) + ")";
    case Expr::Op::Diff: return "(" + print_expr(*e.kids[0]) + "\\" + print_expr(*e.kids[1]) + ")";
    case Expr::Op::Seq: return "(" + print_expr(*e.kids[0]) + ";" + print_expr(*e.kids[1]) + ")";
    case Expr::Op::Plus: return print_expr(*e.kids[0]) + "+";
    case Expr::Op::Star: return print_expr(*e.kids[0]) + "*";
    case Expr::Op::Filter: return e.name + "(" + print_expr(*e.kids[0]) + ")";
  }
  return "?";
}

Env builtin_env(const Candidate& c) {
  const Program& p = *c.prog;
  Env env;
  env["po"] = p.po;
  env["po-loc"] = p.po_loc;
  env["rf"] = c.rf;
  env["rfe"] = c.rfe;
  env["rfi"] = c.rfi;
  env["co"] = c.co;
  env["coe"] = c.coe;
  env["coi"] = c.coi;
  env["fr"] = c.fr;
  env["fre"] = c.fre;
  env["fri"] = c.fri;
  env["com"] = c.com;
  env["addr"] = p.addr;
  env["data"] = p.data;
  env["dp"] = p.addr | p.data;
  env["ctrl"] = p.ctrl;
  env["ctrl+cfence"] = p.ctrl_cfence;
  env["ctrl+isync"] = p.ctrl_cfence;
  env["ctrl+isb"] = p.ctrl_cfence;
  env["id"] = Relation::identity(c.size());
  // fence kinds foreign to the test's architecture never occur in it, so
  // they are bound to the empty relation rather than rejected
  for (FenceKind k : kAllFences) {
    auto it = p.fences.find(k);
    env[fence_name(k)] = it == p.fences.end() ? Relation(c.size()) : it->second;
  }
  return env;
}

std::vector<std::string> Verdict::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

Evaluation evaluate(const ModelAst& ast, const Candidate& c, const EvalOptions& opts) {
  Evaluation ev;
  ev.env = builtin_env(c);
  Evaluator E{c, ev.env};
  std::size_t n = c.size();
  auto dropped = [&](const std::string& name) {
    return opts.static_ppo && (name == "rdw" || name == "detour");
  };
  for (const auto& st : ast.stmts) {
    switch (st.kind) {
      case Stmt::Kind::Let: {
        const auto& [name, e] = st.bindings[0];
        ev.env[name] = dropped(name) ? Relation(n) : E.eval(*e);
        break;
      }
      case Stmt::Kind::LetRec: {
        for (const auto& [name, e] : st.bindings) ev.env[name] = Relation(n);
        std::size_t limit = n * n * st.bindings.size() + 2;
        for (std::size_t round = 0;; ++round) {
          if (round > limit) throw ModelError("fixpoint did not converge", st.line, 1);
          std::vector<Relation> next;
          for (const auto& [name, e] : st.bindings) next.push_back(E.eval(*e));
          bool changed = false;
          for (std::size_t k = 0; k < next.size(); ++k) {
            Relation& slot = ev.env[st.bindings[k].first];
            if (!(slot == next[k])) {
              changed = true;
              slot = std::move(next[k]);
            }
          }
          ++ev.fixpoint_rounds;
          if (!changed) break;
        }
        break;
      }
      case Stmt::Kind::Check: {
        Relation r = E.eval(*st.expr);
        CheckResult cr;
        cr.name = st.name;
        if (st.check == Stmt::CheckKind::Acyclic) {
          auto a = check_acyclic(r);
          cr.pass = a.ok;
          cr.witness = a.cycle;
        } else {
          auto a = check_irreflexive(r);
          cr.pass = a.ok;
          if (!a.ok) cr.witness = {a.witness};
        }
        ev.verdict.allowed = ev.verdict.allowed && cr.pass;
        ev.verdict.checks.push_back(cr);
        break;
      }
    }
  }
  return ev;
}

Verdict eval_model(const ModelAst& ast, const Candidate& c, const EvalOptions& opts) {
  return evaluate(ast, c, opts).verdict;
}

}  // namespace memcat
